#include "chartforge/qa.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <regex>
#include <set>
#include <sstream>

#include "chartforge/detail/text.hpp"
#include "chartforge/error.hpp"
#include "chartforge/rng.hpp"
#include "chartforge/table_synth.hpp"

namespace chartforge {

namespace detail {
extern const std::string_view kBuiltinTemplatesJson;
}

namespace {

using nlohmann::json;

constexpr int kMaxAttempts = 16;

const std::regex& token_re() {
    static const std::regex re("<[^<>]+>");
    return re;
}

std::vector<std::string> tokens_in(const std::string& text) {
    std::vector<std::string> out;
    for (std::sregex_iterator it(text.begin(), text.end(), token_re()), end; it != end; ++it) out.push_back(it->str());
    return out;
}

/// Matches "<prefixN suffix>" and returns N.
std::optional<int> indexed(const std::string& tok, std::string_view prefix, std::string_view suffix = ">") {
    if (tok.size() <= prefix.size() + suffix.size()) return std::nullopt;
    if (tok.compare(0, prefix.size(), prefix) != 0) return std::nullopt;
    if (tok.compare(tok.size() - suffix.size(), suffix.size(), suffix) != 0) return std::nullopt;
    std::string digits = tok.substr(prefix.size(), tok.size() - prefix.size() - suffix.size());
    if (digits.empty() || digits.size() > 2 || !std::all_of(digits.begin(), digits.end(), ::isdigit)) return std::nullopt;
    int n = std::stoi(digits);
    return n >= 1 ? std::optional<int>(n) : std::nullopt;
}

enum class TokenUse { Question, ProgramText, ProgramNumber };

/// Updates the template's derived requirements; false for unknown tokens.
bool register_token(QaTemplate& t, const std::string& tok, TokenUse use, int& max_mark) {
    auto need_ticks = [&](int n) { t.ticks_needed = std::max(t.ticks_needed, n); };
    if (auto n = indexed(tok, "<legend label")) {
        if (use == TokenUse::ProgramNumber) return false;
        t.legends_needed = std::max(t.legends_needed, *n);
        return true;
    }
    if (auto n = indexed(tok, "<x_tick")) {
        if (use == TokenUse::ProgramNumber) return false;
        need_ticks(*n);
        return true;
    }
    if (auto n = indexed(tok, "<x_tick", "_index>")) {
        if (use != TokenUse::ProgramNumber) return false;
        need_ticks(*n);
        return true;
    }
    if (auto n = indexed(tok, "<col")) {
        if (use == TokenUse::ProgramNumber) return false;
        t.min_series = std::max(t.min_series, *n);
        return true;
    }
    if (tok == "<first x_tick>" || tok == "<last x_tick>") {
        if (use == TokenUse::ProgramNumber) return false;
        t.min_ticks = std::max(t.min_ticks, 2);
        return true;
    }
    if (tok == "<X label>" || tok == "<plural form of X label>" || tok == "<Y label>" || tok == "<noun>" ||
        tok == "<nouns>" || tok == "<k-th>") {
        if (tok == "<k-th>") t.uses_k = true;
        return use == TokenUse::Question;
    }
    if (tok == "<k>" || tok == "<k_from_end>") {
        t.uses_k = true;
        return use != TokenUse::ProgramText && (tok == "<k>" || use == TokenUse::ProgramNumber);
    }
    if (tok == "<threshold>") {
        t.uses_threshold = true;
        return use != TokenUse::ProgramText;
    }
    if (tok == "<tick_gap>") {
        need_ticks(2);
        return use == TokenUse::ProgramNumber;
    }
    if (tok == "<n_ticks>") return use == TokenUse::ProgramNumber;
    if (auto n = indexed(tok, "<mark")) {
        max_mark = std::max(max_mark, *n);
        return use == TokenUse::Question;
    }
    for (std::string_view suffix : {".row>", ".col>", ".row2>", ".col2>"}) {
        if (auto n = indexed(tok, "<mark", suffix)) {
            max_mark = std::max(max_mark, *n);
            return use == TokenUse::ProgramText;
        }
    }
    for (std::string_view suffix : {".row_index>", ".col_index>", ".row2_index>"}) {
        if (auto n = indexed(tok, "<mark", suffix)) {
            max_mark = std::max(max_mark, *n);
            return use == TokenUse::ProgramNumber;
        }
    }
    return false;
}

bool is_token(const std::string& s) { return s.size() > 2 && s.front() == '<' && s.back() == '>'; }

std::optional<cot::ValueKind> value_kind_from(const std::string& s) {
    if (s == "number") return cot::ValueKind::Number;
    if (s == "text") return cot::ValueKind::Text;
    if (s == "bool") return cot::ValueKind::Bool;
    return std::nullopt;
}

std::string require_string(const json& j, const std::string& key, const std::string& path) {
    if (!j.contains(key)) throw SchemaError(path + "." + key, "missing key");
    if (!j[key].is_string()) throw SchemaError(path + "." + key, "expected a string");
    return j[key].get<std::string>();
}

int optional_int(const json& j, const std::string& key, const std::string& path, int fallback) {
    if (!j.contains(key)) return fallback;
    if (!j[key].is_number_integer() || j[key].get<int>() < 0) throw SchemaError(path + "." + key, "expected a non-negative integer");
    return j[key].get<int>();
}

QaTemplate parse_template(const json& j, const std::string& path) {
    static const std::set<std::string> known{"id", "task", "category", "family", "chart_types", "variants",
                                             "program", "answer_kind", "marks", "threshold_from", "min_series",
                                             "max_series", "min_ticks"};
    if (!j.is_object()) throw SchemaError(path, "template must be an object");
    for (const auto& [key, v] : j.items()) {
        if (!known.count(key)) throw SchemaError(path + "." + key, "unknown key");
    }
    QaTemplate t;
    t.id = require_string(j, "id", path);
    std::string task = require_string(j, "task", path);
    if (task == "numerical") {
        t.task = QaTask::Numerical;
    } else if (task == "referring") {
        t.task = QaTask::Referring;
    } else {
        throw SchemaError(path + ".task", "expected 'numerical' or 'referring'");
    }
    t.category = require_string(j, "category", path);
    t.family = require_string(j, "family", path);
    auto kind = value_kind_from(require_string(j, "answer_kind", path));
    if (!kind) throw SchemaError(path + ".answer_kind", "expected number, text or bool");
    t.answer_kind = *kind;

    if (!j.contains("chart_types") || !j["chart_types"].is_array() || j["chart_types"].empty()) {
        throw SchemaError(path + ".chart_types", "expected a non-empty array");
    }
    for (std::size_t i = 0; i < j["chart_types"].size(); ++i) {
        const auto& c = j["chart_types"][i];
        std::optional<ChartType> ct = c.is_string() ? chart_type_from_string(c.get<std::string>()) : std::nullopt;
        if (!ct) throw SchemaError(path + ".chart_types[" + std::to_string(i) + "]", "unknown chart type");
        t.chart_types.push_back(*ct);
    }

    if (!j.contains("variants") || !j["variants"].is_array() || j["variants"].size() < 2) {
        throw SchemaError(path + ".variants", "expected at least two phrasings");
    }
    for (std::size_t i = 0; i < j["variants"].size(); ++i) {
        if (!j["variants"][i].is_string()) throw SchemaError(path + ".variants[" + std::to_string(i) + "]", "expected a string");
        t.variants.push_back(j["variants"][i].get<std::string>());
    }

    if (j.contains("marks")) {
        if (!j["marks"].is_array()) throw SchemaError(path + ".marks", "expected an array");
        for (std::size_t i = 0; i < j["marks"].size(); ++i) {
            const auto& m = j["marks"][i];
            std::string mp = path + ".marks[" + std::to_string(i) + "]";
            if (!m.is_object()) throw SchemaError(mp, "expected an object");
            for (const auto& [key, v] : m.items()) {
                if (key != "kind" && key != "pair") throw SchemaError(mp + "." + key, "unknown key");
            }
            MarkSlot slot;
            std::string k = m.contains("kind") ? require_string(m, "kind", mp) : "any";
            if (k == "box") {
                slot.kind = MarkKind::Box;
            } else if (k == "arrow") {
                slot.kind = MarkKind::Arrow;
            } else if (k != "any") {
                throw SchemaError(mp + ".kind", "expected box, arrow or any");
            }
            if (m.contains("pair")) {
                if (!m["pair"].is_boolean()) throw SchemaError(mp + ".pair", "expected a boolean");
                slot.pair = m["pair"].get<bool>();
            }
            t.marks.push_back(slot);
        }
    }
    if (j.contains("threshold_from")) t.threshold_from = require_string(j, "threshold_from", path);
    t.min_series = std::max(1, optional_int(j, "min_series", path, 1));
    t.max_series = optional_int(j, "max_series", path, 0);
    t.min_ticks = std::max(1, optional_int(j, "min_ticks", path, 1));

    // Program skeleton.
    if (!j.contains("program") || !j["program"].is_array() || j["program"].empty()) {
        throw SchemaError(path + ".program", "expected a non-empty array of steps");
    }
    int max_mark = 0;
    for (std::size_t i = 0; i < j["program"].size(); ++i) {
        const auto& s = j["program"][i];
        std::string sp = path + ".program[" + std::to_string(i) + "]";
        if (!s.is_object()) throw SchemaError(sp, "expected an object");
        for (const auto& [key, v] : s.items()) {
            if (key != "func" && key != "args") throw SchemaError(sp + "." + key, "unknown key");
        }
        TemplateStep step;
        step.func = require_string(s, "func", sp);
        if (!s.contains("args") || !s["args"].is_array()) throw SchemaError(sp + ".args", "expected an array");
        for (std::size_t a = 0; a < s["args"].size(); ++a) {
            const auto& arg = s["args"][a];
            std::string ap = sp + ".args[" + std::to_string(a) + "]";
            if (!arg.is_object()) throw SchemaError(ap, "expected an object");
            for (const auto& [key, v] : arg.items()) {
                std::string kp = ap + "." + key;
                if (key == "num") {
                    if (v.is_string()) {
                        if (!is_token(v.get<std::string>()) ||
                            !register_token(t, v.get<std::string>(), TokenUse::ProgramNumber, max_mark)) {
                            throw SchemaError(kp, "unknown numeric slot " + v.get<std::string>());
                        }
                    } else if (!v.is_number()) {
                        throw SchemaError(kp, "expected a number or a numeric slot");
                    }
                } else if (key == "row" || key == "col" || key == "text") {
                    if (!v.is_string()) throw SchemaError(kp, "expected a string");
                    const std::string sv = v.get<std::string>();
                    if (is_token(sv) && !register_token(t, sv, TokenUse::ProgramText, max_mark)) {
                        throw SchemaError(kp, "unknown slot " + sv);
                    }
                } else if (key == "ref") {
                    if (!v.is_number_integer()) throw SchemaError(kp, "expected an integer");
                } else {
                    throw SchemaError(kp, "unknown key");
                }
            }
            step.args.push_back(arg);
        }
        t.program.push_back(std::move(step));
    }
    if (is_token(t.threshold_from)) {
        int unused = 0;
        QaTemplate scratch = t;
        if (!register_token(scratch, t.threshold_from, TokenUse::ProgramText, unused)) {
            throw SchemaError(path + ".threshold_from", "unknown slot " + t.threshold_from);
        }
    }

    // Every variant must mention the same bound slots; descriptive tokens
    // (axis labels, element nouns) may differ.
    static const std::set<std::string> descriptive = {"<X label>", "<plural form of X label>", "<Y label>",
                                                      "<noun>", "<nouns>"};
    std::set<std::string> first;
    for (std::size_t i = 0; i < t.variants.size(); ++i) {
        std::set<std::string> toks;
        for (const auto& tok : tokens_in(t.variants[i])) {
            if (!register_token(t, tok, TokenUse::Question, max_mark)) {
                throw SchemaError(path + ".variants[" + std::to_string(i) + "]", "unknown slot " + tok);
            }
            if (descriptive.count(tok)) continue;
            toks.insert(tok == "<k-th>" ? "<k>" : tok);
        }
        if (i == 0) {
            first = toks;
        } else if (toks != first) {
            throw SchemaError(path + ".variants[" + std::to_string(i) + "]", "uses different slots than variant 0");
        }
    }
    if (t.uses_threshold && is_token(t.threshold_from)) {
        int unused = 0;
        register_token(t, t.threshold_from, TokenUse::ProgramText, unused);
    }

    if (t.task == QaTask::Numerical && (max_mark > 0 || !t.marks.empty())) {
        throw SchemaError(path + ".marks", "numerical templates cannot use marks");
    }
    if (t.task == QaTask::Referring) {
        if (t.marks.empty()) throw SchemaError(path + ".marks", "referring templates need at least one mark");
        if (max_mark > static_cast<int>(t.marks.size())) throw SchemaError(path + ".marks", "slot names an undeclared mark");
    }
    t.min_series = std::max(t.min_series, t.legends_needed);
    t.min_ticks = std::max({t.min_ticks, t.ticks_needed, t.uses_k ? 2 : 1});
    if (t.max_series != 0 && t.max_series < t.min_series) throw SchemaError(path + ".max_series", "below the series the slots need");
    return t;
}

// ---------------------------------------------------------------------------
// Instantiation helpers

std::string lower_first(std::string s) {
    if (s.size() >= 2 && std::isupper(static_cast<unsigned char>(s[0])) && std::islower(static_cast<unsigned char>(s[1]))) {
        s[0] = static_cast<char>(std::tolower(static_cast<unsigned char>(s[0])));
    }
    return s;
}

std::string x_noun(const DataTable& t, ChartType type) {
    if (type == ChartType::Histogram) return "bin";
    if (!t.x_label().empty()) return lower_first(t.x_label());
    return "category";
}

std::string y_noun(const DataTable& t) {
    if (!t.y_label().empty()) return lower_first(t.y_label());
    if (t.cols() == 1) return lower_first(t.col_labels()[0]);
    return "value";
}

bool row_elements(ChartType t) {
    return t == ChartType::Pie || t == ChartType::Histogram || t == ChartType::Box || t == ChartType::Bubble;
}

std::vector<ElementRef> available_elements(const DataTable& t, ChartType type, const RenderResult* render) {
    std::vector<ElementRef> out;
    if (render) {
        for (const auto& b : render->element_boxes) out.push_back(b.ref);
        return out;
    }
    if (row_elements(type)) {
        for (std::size_t r = 0; r < t.rows(); ++r) out.push_back({0, static_cast<int>(r)});
    } else {
        for (std::size_t c = 0; c < t.cols(); ++c) {
            for (std::size_t r = 0; r < t.rows(); ++r) out.push_back({static_cast<int>(c), static_cast<int>(r)});
        }
    }
    return out;
}

void check_target(const DataTable& t, const RenderResult* render, ElementRef ref) {
    bool in_table = ref.series >= 0 && ref.category >= 0 && static_cast<std::size_t>(ref.series) < t.cols() &&
                    static_cast<std::size_t>(ref.category) < t.rows();
    if (!in_table || (render && !render->find(ref))) {
        throw UnknownTarget("mark target (series " + std::to_string(ref.series) + ", category " +
                            std::to_string(ref.category) + ") is not a drawn element");
    }
}

struct Resolver {
    const QaTemplate& tmpl;
    const DataTable& table;
    ChartType type;
    const SlotBindings& b;

    std::size_t legend(int n) const { return b.legends.at(static_cast<std::size_t>(n - 1)); }
    std::size_t tick(int n) const { return b.ticks.at(static_cast<std::size_t>(n - 1)); }
    const ReferMark& mark(int n) const { return b.marks.at(static_cast<std::size_t>(n - 1)); }

    std::string text(const std::string& tok) const {
        if (auto n = indexed(tok, "<legend label")) return table.col_labels()[legend(*n)];
        if (auto n = indexed(tok, "<x_tick")) return table.row_labels()[tick(*n)];
        if (auto n = indexed(tok, "<col")) return table.col_labels()[static_cast<std::size_t>(*n - 1)];
        if (tok == "<first x_tick>") return table.row_labels().front();
        if (tok == "<last x_tick>") return table.row_labels().back();
        if (auto n = indexed(tok, "<mark", ".row>")) return table.row_labels()[static_cast<std::size_t>(mark(*n).target.category)];
        if (auto n = indexed(tok, "<mark", ".col>")) return table.col_labels()[static_cast<std::size_t>(mark(*n).target.series)];
        if (auto n = indexed(tok, "<mark", ".row2>")) return table.row_labels()[static_cast<std::size_t>(mark(*n).second->category)];
        if (auto n = indexed(tok, "<mark", ".col2>")) return table.col_labels()[static_cast<std::size_t>(mark(*n).second->series)];
        throw Error("template " + tmpl.id + ": unresolved slot " + tok);
    }

    double number(const std::string& tok) const {
        if (tok == "<k>") return b.k;
        if (tok == "<k_from_end>") return static_cast<double>(table.rows()) - b.k + 1;
        if (tok == "<threshold>") return *b.threshold;
        if (tok == "<n_ticks>") return static_cast<double>(table.rows());
        if (tok == "<tick_gap>") return static_cast<double>(tick(2)) - static_cast<double>(tick(1));
        if (auto n = indexed(tok, "<x_tick", "_index>")) return static_cast<double>(tick(*n) + 1);
        if (auto n = indexed(tok, "<mark", ".row_index>")) return mark(*n).target.category + 1;
        if (auto n = indexed(tok, "<mark", ".col_index>")) return mark(*n).target.series + 1;
        if (auto n = indexed(tok, "<mark", ".row2_index>")) return mark(*n).second->category + 1;
        throw Error("template " + tmpl.id + ": unresolved numeric slot " + tok);
    }

    std::string question_token(const std::string& tok) const {
        if (tok == "<X label>") return x_noun(table, type);
        if (tok == "<plural form of X label>") return pluralize(x_noun(table, type));
        if (tok == "<Y label>") return y_noun(table);
        if (tok == "<noun>") return std::string(element_noun(type));
        if (tok == "<nouns>") return pluralize(element_noun(type));
        if (tok == "<threshold>") return format_number(*b.threshold);
        if (tok == "<k>") return std::to_string(b.k);
        if (tok == "<k-th>") return ordinal(b.k);
        if (auto n = indexed(tok, "<col")) return lower_first(table.col_labels()[static_cast<std::size_t>(*n - 1)]);
        if (auto n = indexed(tok, "<mark")) return mark_phrase(mark(*n), type);
        return text(tok);
    }

    cot::Arg arg(const json& j) const {
        if (j.contains("ref")) return cot::StepRef{j["ref"].get<int>()};
        if (j.contains("num")) {
            const auto& v = j["num"];
            return v.is_string() ? number(v.get<std::string>()) : v.get<double>();
        }
        if (j.contains("text")) {
            std::string s = j["text"].get<std::string>();
            return is_token(s) ? text(s) : s;
        }
        cot::TableQuery q;
        auto sub = [&](const std::string& s) { return is_token(s) ? text(s) : s; };
        if (j.contains("row")) q.row = sub(j["row"].get<std::string>());
        if (j.contains("col")) q.col = sub(j["col"].get<std::string>());
        return q;
    }

    cot::CotProgram program() const {
        cot::CotProgram p;
        int id = 1;
        for (const auto& s : tmpl.program) {
            cot::CotStep step{id++, s.func, {}};
            for (const auto& a : s.args) step.args.push_back(arg(a));
            p.steps.push_back(std::move(step));
        }
        return p;
    }

    std::string question(int variant) const {
        const std::string& pattern = tmpl.variants.at(static_cast<std::size_t>(variant));
        std::string out;
        std::size_t pos = 0;
        for (std::sregex_iterator it(pattern.begin(), pattern.end(), token_re()), end; it != end; ++it) {
            out += pattern.substr(pos, static_cast<std::size_t>(it->position()) - pos);
            out += question_token(it->str());
            pos = static_cast<std::size_t>(it->position() + it->length());
        }
        out += pattern.substr(pos);
        if (!out.empty()) out[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(out[0])));
        return out;
    }
};

std::optional<std::size_t> column_for(const std::string& from, const DataTable& t, const SlotBindings& b) {
    if (auto n = indexed(from, "<legend label")) return b.legends.at(static_cast<std::size_t>(*n - 1));
    if (auto n = indexed(from, "<col")) return static_cast<std::size_t>(*n - 1);
    return t.find_col(from);
}

void check_structure(const QaTemplate& tmpl, const DataTable& t, ChartType type) {
    if (!tmpl.applies_to(type)) {
        throw SlotUnsatisfiable("template " + tmpl.id + " does not apply to " + std::string(to_string(type)) + " charts");
    }
    if (static_cast<int>(t.cols()) < tmpl.min_series) {
        throw SlotUnsatisfiable("template " + tmpl.id + " needs " + std::to_string(tmpl.min_series) + " series, table has " +
                                std::to_string(t.cols()));
    }
    if (tmpl.max_series != 0 && static_cast<int>(t.cols()) > tmpl.max_series) {
        throw SlotUnsatisfiable("template " + tmpl.id + " allows at most " + std::to_string(tmpl.max_series) + " series");
    }
    if (static_cast<int>(t.rows()) < tmpl.min_ticks) {
        throw SlotUnsatisfiable("template " + tmpl.id + " needs " + std::to_string(tmpl.min_ticks) + " x ticks, table has " +
                                std::to_string(t.rows()));
    }
    if (!t.all_numeric()) throw SlotUnsatisfiable("template " + tmpl.id + " needs a numeric table");
}

std::size_t pair_count(const QaTemplate& tmpl) {
    return static_cast<std::size_t>(std::count_if(tmpl.marks.begin(), tmpl.marks.end(), [](const MarkSlot& m) { return m.pair; }));
}

std::vector<ReferMark> sample_marks(const QaTemplate& tmpl, const std::vector<ElementRef>& elements, Rng& rng) {
    std::size_t needed = tmpl.marks.size() + pair_count(tmpl);
    if (elements.size() < needed) throw SlotUnsatisfiable("template " + tmpl.id + " needs " + std::to_string(needed) + " elements");
    auto picks = sample_indices(rng, elements.size(), needed);
    auto colors = sample_indices(rng, mark_colors().size(), tmpl.marks.size());
    std::vector<ReferMark> marks;
    std::size_t next = 0;
    for (std::size_t i = 0; i < tmpl.marks.size(); ++i) {
        const MarkSlot& slot = tmpl.marks[i];
        MarkKind kind = slot.kind ? *slot.kind : (coin(rng) ? MarkKind::Box : MarkKind::Arrow);
        ReferMark m = sample_refer_mark(rng, kind, elements[picks[next++]]);
        if (slot.pair) m.second = elements[picks[next++]];
        m.color = std::string(mark_colors()[colors[i]].name);
        marks.push_back(std::move(m));
    }
    return marks;
}

void check_given_marks(const QaTemplate& tmpl, const InstantiationContext& ctx) {
    if (ctx.marks.size() < tmpl.marks.size()) {
        throw SlotUnsatisfiable("template " + tmpl.id + " needs " + std::to_string(tmpl.marks.size()) + " marks, got " +
                                std::to_string(ctx.marks.size()));
    }
    std::set<ElementRef> seen;
    std::set<std::string> colors;
    for (std::size_t i = 0; i < tmpl.marks.size(); ++i) {
        const ReferMark& m = ctx.marks[i];
        const MarkSlot& slot = tmpl.marks[i];
        if (slot.kind && *slot.kind != m.kind) {
            throw SlotUnsatisfiable("template " + tmpl.id + " needs a " + std::string(to_string(*slot.kind)) + " for mark " +
                                    std::to_string(i + 1));
        }
        if (slot.pair != m.second.has_value()) {
            throw SlotUnsatisfiable("template " + tmpl.id + (slot.pair ? " needs a two-element mark" : " needs a single-element mark") +
                                    " in slot " + std::to_string(i + 1));
        }
        check_target(*ctx.table, ctx.render, m.target);
        if (m.second) check_target(*ctx.table, ctx.render, *m.second);
        if (!seen.insert(m.target).second || (m.second && !seen.insert(*m.second).second)) {
            throw SlotUnsatisfiable("template " + tmpl.id + ": marks must single out distinct elements");
        }
        if (!colors.insert(m.color).second) {
            throw SlotUnsatisfiable("template " + tmpl.id + ": marks must have distinct colors");
        }
    }
}

QaInstance instantiate_impl(const QaTemplate& tmpl, const InstantiationContext& ctx) {
    if (!ctx.table) throw InvalidParams("instantiation context has no table");
    const DataTable& t = *ctx.table;
    check_structure(tmpl, t, ctx.chart_type);

    std::vector<ElementRef> elements;
    if (tmpl.task == QaTask::Referring) {
        if (!ctx.marks.empty()) {
            check_given_marks(tmpl, ctx);
        } else {
            elements = available_elements(t, ctx.chart_type, ctx.render);
            std::size_t needed = tmpl.marks.size() + pair_count(tmpl);
            if (elements.size() < needed) {
                throw SlotUnsatisfiable("template " + tmpl.id + " needs " + std::to_string(needed) + " distinct elements");
            }
        }
    }

    Rng variant_rng = make_rng(ctx.seed, 0xC0DE);
    int variant = ctx.variant ? *ctx.variant
                              : uniform_int(variant_rng, 0, static_cast<int>(tmpl.variants.size()) - 1);
    if (variant < 0 || variant >= static_cast<int>(tmpl.variants.size())) {
        throw InvalidParams("template " + tmpl.id + " has no variant " + std::to_string(variant));
    }

    std::string last_cause;
    for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
        Rng rng = make_rng(ctx.seed, static_cast<std::uint64_t>(attempt));
        SlotBindings b;
        b.legends = sample_indices(rng, t.cols(), static_cast<std::size_t>(tmpl.legends_needed));
        b.ticks = sample_indices(rng, t.rows(), static_cast<std::size_t>(tmpl.ticks_needed));
        std::sort(b.ticks.begin(), b.ticks.end());
        if (tmpl.uses_k) b.k = uniform_int(rng, 2, std::min(static_cast<int>(t.rows()), 5));
        if (tmpl.task == QaTask::Referring) {
            b.marks = ctx.marks.empty() ? sample_marks(tmpl, elements, rng)
                                        : std::vector<ReferMark>(ctx.marks.begin(), ctx.marks.begin() + static_cast<long>(tmpl.marks.size()));
        }
        if (tmpl.uses_threshold) {
            auto col = column_for(tmpl.threshold_from, t, b);
            if (!col || *col >= t.cols()) throw Error("template " + tmpl.id + ": threshold column not found");
            b.threshold = t.at(uniform_int<std::size_t>(rng, 0, t.rows() - 1), *col).as_number();
        }

        Resolver r{tmpl, t, ctx.chart_type, b};
        cot::CotProgram program = r.program();
        cot::Value answer;
        try {
            answer = cot::execute(program, t);
        } catch (const cot::CotError& e) {
            if (!cot::is_value_dependent(e.kind())) throw Error("template " + tmpl.id + ": " + e.what());
            last_cause = e.what();
            continue;
        }
        if (cot::kind_of(answer) != tmpl.answer_kind) {
            throw Error("template " + tmpl.id + " produced a " + std::string(cot::to_string(cot::kind_of(answer))) +
                        " answer, declared " + std::string(cot::to_string(tmpl.answer_kind)));
        }
        QaInstance inst;
        inst.template_id = tmpl.id;
        inst.family = tmpl.family;
        inst.category = tmpl.category;
        inst.variant = variant;
        inst.question = r.question(variant);
        inst.program = std::move(program);
        inst.answer = std::move(answer);
        inst.bindings = std::move(b);
        return inst;
    }
    throw SlotUnsatisfiable("template " + tmpl.id + ": no valid binding after " + std::to_string(kMaxAttempts) +
                            " attempts (" + last_cause + ")");
}

}  // namespace

std::string_view to_string(QaTask t) { return t == QaTask::Numerical ? "numerical" : "referring"; }

bool QaTemplate::applies_to(ChartType t) const {
    return std::find(chart_types.begin(), chart_types.end(), t) != chart_types.end();
}

TemplateLibrary TemplateLibrary::from_json(const json& j) {
    if (!j.is_object()) throw SchemaError("$", "template library must be an object");
    for (const auto& [key, v] : j.items()) {
        if (key != "templates" && key != "version") throw SchemaError(key, "unknown key");
    }
    if (!j.contains("templates") || !j["templates"].is_array()) throw SchemaError("templates", "expected an array");
    TemplateLibrary lib;
    std::set<std::string> ids;
    const auto& reg = cot::FunctionRegistry::standard();
    for (std::size_t i = 0; i < j["templates"].size(); ++i) {
        std::string path = "templates[" + std::to_string(i) + "]";
        QaTemplate t = parse_template(j["templates"][i], path);
        if (!ids.insert(t.id).second) throw SchemaError(path + ".id", "duplicate template id " + t.id);

        // Static check of the skeleton with placeholder values in every slot.
        cot::CotProgram p;
        int id = 1;
        for (const auto& s : t.program) {
            cot::CotStep step{id++, s.func, {}};
            for (const auto& a : s.args) {
                if (a.contains("ref")) {
                    step.args.push_back(cot::StepRef{a["ref"].get<int>()});
                } else if (a.contains("num")) {
                    step.args.push_back(1.0);
                } else if (a.contains("text")) {
                    step.args.push_back(a["text"].get<std::string>());
                } else {
                    cot::TableQuery q;
                    if (a.contains("row")) q.row = "r";
                    if (a.contains("col")) q.col = "c";
                    step.args.push_back(q);
                }
            }
            p.steps.push_back(std::move(step));
        }
        auto diags = cot::validate(p, reg);
        if (!diags.empty()) throw SchemaError(path + ".program", diags.front().path + ": " + diags.front().message);
        if (reg.find(p.steps.back().func)->result != t.answer_kind) {
            throw SchemaError(path + ".answer_kind", "does not match the result of " + p.steps.back().func);
        }
        lib.templates_.push_back(std::move(t));
    }
    return lib;
}

TemplateLibrary TemplateLibrary::load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open template file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    json j;
    try {
        j = json::parse(ss.str());
    } catch (const json::parse_error& e) {
        throw SchemaError("$", std::string("invalid JSON: ") + e.what());
    }
    return from_json(j);
}

const TemplateLibrary& TemplateLibrary::builtin() {
    static const TemplateLibrary lib = from_json(json::parse(detail::kBuiltinTemplatesJson));
    return lib;
}

std::vector<const QaTemplate*> TemplateLibrary::by_task(QaTask task) const {
    std::vector<const QaTemplate*> out;
    for (const auto& t : templates_) {
        if (t.task == task) out.push_back(&t);
    }
    return out;
}

const QaTemplate* TemplateLibrary::find(std::string_view id) const {
    for (const auto& t : templates_) {
        if (t.id == id) return &t;
    }
    return nullptr;
}

QaInstance instantiate(const QaTemplate& tmpl, const InstantiationContext& ctx) {
    if (tmpl.task != QaTask::Numerical) throw InvalidParams("template " + tmpl.id + " is a referring template");
    return instantiate_impl(tmpl, ctx);
}

QaInstance instantiate_referring(const QaTemplate& tmpl, const InstantiationContext& ctx) {
    if (tmpl.task != QaTask::Referring) throw InvalidParams("template " + tmpl.id + " is a numerical template");
    return instantiate_impl(tmpl, ctx);
}

std::vector<const QaTemplate*> enumerate_applicable(const DataTable& table, ChartType chart_type, QaTask task,
                                                    const TemplateLibrary& lib) {
    std::vector<const QaTemplate*> out;
    std::size_t elements = available_elements(table, chart_type, nullptr).size();
    for (const QaTemplate* t : lib.by_task(task)) {
        try {
            check_structure(*t, table, chart_type);
        } catch (const SlotUnsatisfiable&) {
            continue;
        }
        if (task == QaTask::Referring && elements < t->marks.size() + pair_count(*t)) continue;
        out.push_back(t);
    }
    return out;
}

DataTable reference_table(ChartType type) {
    constexpr std::uint64_t kSeed = 20240229;
    switch (type) {
        case ChartType::Histogram: {
            DistributionSpec spec{DistributionKind::Normal, {50.0, 12.0}, 1000};
            return synth_histogram_table(spec, 10, kSeed);
        }
        case ChartType::Box: {
            DistributionSpec spec{DistributionKind::Normal, {50.0, 12.0}, 200};
            return synth_boxplot_table(spec, 5, kSeed);
        }
        default: {
            SynthConfig cfg = default_synth_config(type);
            cfg.rows = {8, 8};
            if (type == ChartType::Pie) cfg.rows = {6, 6};
            if (type == ChartType::Bubble) cfg.rows = {7, 7};
            cfg.cols = {4, 4};
            return synth_series_table(cfg, kSeed);
        }
    }
}

LibraryStats library_stats(QaTask task, const TemplateLibrary& lib) {
    LibraryStats s;
    std::map<ChartType, DataTable> tables;
    double tokens = 0, steps = 0, funcs = 0;
    std::uint64_t index = 0;
    for (const QaTemplate* t : lib.by_task(task)) {
        ChartType type = t->chart_types.front();
        auto it = tables.find(type);
        if (it == tables.end()) it = tables.emplace(type, reference_table(type)).first;
        InstantiationContext ctx;
        ctx.table = &it->second;
        ctx.chart_type = type;
        ctx.seed = mix_seed(1, index++);
        ctx.variant = 0;
        QaInstance inst = task == QaTask::Numerical ? instantiate(*t, ctx) : instantiate_referring(*t, ctx);
        auto ps = cot::program_stats(inst.program);
        tokens += static_cast<double>(detail::split_whitespace(inst.question).size());
        steps += static_cast<double>(ps.steps);
        funcs += static_cast<double>(ps.distinct_functions);
        ++s.template_count;
    }
    if (s.template_count) {
        double n = static_cast<double>(s.template_count);
        s.mean_question_tokens = tokens / n;
        s.mean_cot_steps = steps / n;
        s.mean_distinct_functions = funcs / n;
    }
    return s;
}

std::string pluralize(std::string_view phrase) {
    std::string p(detail::trim(phrase));
    if (p.empty()) return p;
    // Inflect the head word: the last word before any parenthetical.
    std::size_t paren = p.find(" (");
    std::string head_part = paren == std::string::npos ? p : p.substr(0, paren);
    std::string tail = paren == std::string::npos ? "" : p.substr(paren);
    std::size_t sp = head_part.find_last_of(' ');
    std::string prefix = sp == std::string::npos ? "" : head_part.substr(0, sp + 1);
    std::string word = sp == std::string::npos ? head_part : head_part.substr(sp + 1);

    static const std::map<std::string, std::string> irregular{
        {"person", "people"},   {"child", "children"},   {"man", "men"},           {"woman", "women"},
        {"mouse", "mice"},      {"goose", "geese"},      {"foot", "feet"},         {"tooth", "teeth"},
        {"criterion", "criteria"}, {"phenomenon", "phenomena"}, {"analysis", "analyses"}, {"axis", "axes"},
        {"index", "indices"},   {"matrix", "matrices"},  {"leaf", "leaves"},       {"life", "lives"},
        {"half", "halves"},     {"shelf", "shelves"},    {"wolf", "wolves"},       {"knife", "knives"},
        {"datum", "data"},      {"medium", "media"},     {"cactus", "cacti"},      {"radius", "radii"},
    };
    static const std::set<std::string> invariant{"species", "series", "sheep", "fish", "deer", "aircraft",
                                                 "data", "news", "equipment", "information", "software",
                                                 "staff", "people", "media"};
    std::string lw = detail::lower(word);
    std::string plural;
    auto keep_case = [&](const std::string& lower_form) {
        std::string out = lower_form;
        if (!word.empty() && std::isupper(static_cast<unsigned char>(word[0]))) {
            out[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(out[0])));
        }
        return out;
    };
    auto ends = [&](std::string_view suf) { return lw.size() >= suf.size() && lw.compare(lw.size() - suf.size(), suf.size(), suf) == 0; };
    auto vowel = [](char c) { return std::string_view("aeiou").find(c) != std::string_view::npos; };

    if (auto it = irregular.find(lw); it != irregular.end()) {
        plural = keep_case(it->second);
    } else if (invariant.count(lw) || word.empty() || !std::isalpha(static_cast<unsigned char>(word.back()))) {
        plural = word;
    } else if (ends("s") || ends("x") || ends("z") || ends("ch") || ends("sh")) {
        plural = word + "es";
    } else if (ends("y") && lw.size() >= 2 && !vowel(lw[lw.size() - 2])) {
        plural = word.substr(0, word.size() - 1) + "ies";
    } else {
        plural = word + "s";
    }
    return prefix + plural + tail;
}

std::string ordinal(int n) {
    int mod100 = n % 100;
    const char* suffix = "th";
    if (mod100 < 11 || mod100 > 13) {
        switch (n % 10) {
            case 1: suffix = "st"; break;
            case 2: suffix = "nd"; break;
            case 3: suffix = "rd"; break;
            default: break;
        }
    }
    return std::to_string(n) + suffix;
}

std::string_view element_noun(ChartType t) {
    switch (t) {
        case ChartType::Bar: return "bar";
        case ChartType::Line:
        case ChartType::DotLine:
        case ChartType::Area:
        case ChartType::Radar: return "point";
        case ChartType::Pie: return "slice";
        case ChartType::Histogram: return "bin";
        case ChartType::Box: return "box plot";
        case ChartType::Bubble: return "bubble";
    }
    return "element";
}

std::string mark_phrase(const ReferMark& mark, ChartType t) {
    std::string noun(element_noun(t));
    if (mark.second) {
        std::string nouns = pluralize(noun);
        return mark.kind == MarkKind::Box ? "the two " + nouns + " in the " + mark.color + " box"
                                          : "the two " + nouns + " connected by the " + mark.color + " arrow";
    }
    return mark.kind == MarkKind::Box ? "the " + noun + " in the " + mark.color + " box"
                                      : "the " + noun + " indicated by the " + mark.color + " arrow";
}

}  // namespace chartforge
