#include "chartforge/dataset.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <iterator>
#include <map>
#include <mutex>
#include <regex>
#include <set>
#include <sstream>
#include <thread>

#include "chartforge/cot.hpp"
#include "chartforge/png_io.hpp"
#include "chartforge/render.hpp"
#include "chartforge/stubs.hpp"
#include "chartforge/style.hpp"

namespace chartforge {

namespace fs = std::filesystem;
using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

namespace {

// Record volumes per task in the reference corpus; the default mix follows
// their ratios.
constexpr std::array<double, 5> kTaskVolumes = {911958, 24494581, 5899842, 7075203, 1006738};

constexpr std::array<double, 9> kDefaultChartWeights = {44.3, 11.3, 8.0, 3.6, 7.8, 8.4, 6.8, 6.2, 3.6};

constexpr std::uint64_t kTaskShuffleStream = 0x7A5C;
constexpr int kRecordAttempts = 8;

const std::vector<std::string>& table_instructions() {
    static const std::vector<std::string> v = {
        "Convert the chart into a markdown table.",
        "Extract the underlying data table of this chart in markdown.",
        "Write out the data shown in the chart as a markdown table.",
        "Recover the table that this chart was drawn from.",
    };
    return v;
}

std::string record_id(std::size_t index) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%06zu", index);
    return buf;
}

std::string image_rel_path(Task task, const std::string& id) {
    return "images/" + std::string(to_string(task)) + "/" + id + ".png";
}

std::string boxes_rel_path(const std::string& id) { return "boxes/" + id + ".json"; }

ojson rect_json(const PixelRect& r) { return ojson{{"x", r.x}, {"y", r.y}, {"w", r.w}, {"h", r.h}}; }

ojson ref_json(ElementRef r) { return ojson{{"series", r.series}, {"category", r.category}}; }

ojson marks_json(const RenderResult& rr) {
    ojson out = ojson::array();
    for (const auto& p : rr.marks) {
        ojson m;
        m["kind"] = to_string(p.mark.kind);
        m["color"] = p.mark.color;
        m["stroke"] = p.mark.stroke;
        m["size"] = p.mark.size;
        m["target"] = ref_json(p.mark.target);
        m["second"] = p.mark.second ? ref_json(*p.mark.second) : ojson(nullptr);
        m["rect"] = rect_json(p.rect);
        out.push_back(std::move(m));
    }
    return out;
}

QaTask qa_task(Task t) { return t == Task::ReferringQa ? QaTask::Referring : QaTask::Numerical; }

const SynthConfig* synth_override(const BuildConfig& c, ChartType type) {
    for (const auto& s : c.synth) {
        if (s.chart_family == type) return &s;
    }
    return nullptr;
}

std::vector<std::uint8_t> read_bytes(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw Error("cannot read " + p.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_bytes(const fs::path& p, const std::string& data) {
    std::ofstream out(p, std::ios::binary);
    out.write(data.data(), static_cast<std::streamsize>(data.size()));
    if (!out) throw Error("cannot write " + p.string());
}

void write_bytes(const fs::path& p, const std::vector<std::uint8_t>& data) {
    write_bytes(p, std::string(data.begin(), data.end()));
}

bool has_placeholder(const std::string& s) {
    static const std::regex re("<[^<>]+>");
    return std::regex_search(s, re);
}

// Shared by the pre-write check in build_shard and by verify_shard.
std::vector<Violation> check_record(const json& rec, const std::vector<std::uint8_t>& png, const json& boxes) {
    std::vector<Violation> out;
    std::string id = rec.value("id", std::string("?"));
    auto fail = [&](std::string check, std::string detail) { out.push_back({id, std::move(check), std::move(detail)}); };

    std::optional<Task> task;
    try {
        task = task_from_string(rec.at("task").get<std::string>());
        if (!task) {
            fail("schema", "unknown task");
            return out;
        }
        if (rec.at("image").get<std::string>() != image_rel_path(*task, id)) fail("schema", "unexpected image path");
    } catch (const std::exception& e) {
        fail("schema", e.what());
        return out;
    }

    std::optional<DataTable> table;
    try {
        table = record_table(rec);
    } catch (const std::exception& e) {
        fail("table", e.what());
    }

    int width = rec.value("width", 0), height = rec.value("height", 0);
    try {
        RgbImage img = decode_png(png);
        if (img.width != width || img.height != height) fail("image", "dimensions differ from the manifest");
    } catch (const std::exception& e) {
        fail("image", e.what());
    }

    if (!boxes.is_array() || boxes.empty()) {
        fail("boxes", "no element boxes");
    } else {
        for (const auto& b : boxes) {
            PixelRect r{b.value("x", -1), b.value("y", -1), b.value("w", 0), b.value("h", 0)};
            if (!r.within(width, height)) {
                fail("boxes", "element box outside the image");
                break;
            }
        }
    }

    const std::string response = rec.value("response", std::string());
    const std::string instruction = rec.value("instruction", std::string());
    if (instruction.empty() || response.empty()) fail("schema", "empty instruction or response");
    if (has_placeholder(instruction)) fail("instruction", "unfilled placeholder");
    if (!table) return out;

    switch (*task) {
        case Task::ChartToTable:
            try {
                if (!same_content(parse_markdown_table(response), *table)) fail("response", "table differs from source");
            } catch (const std::exception& e) {
                fail("response", e.what());
            }
            break;
        case Task::NumericalQa:
        case Task::ReferringQa:
            try {
                cot::CotProgram p = cot::deserialize(response);
                auto diags = cot::validate(p);
                if (!diags.empty()) {
                    fail("cot", diags.front().path + ": " + diags.front().message);
                    break;
                }
                cot::Value v = cot::execute(p, *table);
                auto kind = cot::kind_of(v);
                if (std::string(cot::to_string(kind)) != rec.at("answer_kind").get<std::string>()) {
                    fail("answer", "answer kind differs");
                } else if (cot::value_to_json(v) != rec.at("answer_value")) {
                    fail("answer", "re-executed value differs from the stored answer");
                } else if (cot::format_value(v) != rec.at("answer").get<std::string>()) {
                    fail("answer", "answer text differs");
                }
            } catch (const std::exception& e) {
                fail("cot", e.what());
            }
            if (*task == Task::ReferringQa) {
                const json& marks = rec.contains("marks") ? rec["marks"] : json();
                if (!marks.is_array() || marks.empty()) fail("marks", "referring record without marks");
                else {
                    for (const auto& m : marks) {
                        const json& r = m.at("rect");
                        PixelRect pr{r.at("x").get<int>(), r.at("y").get<int>(), r.at("w").get<int>(),
                                     r.at("h").get<int>()};
                        if (!pr.within(width, height)) fail("marks", "mark outside the image");
                    }
                }
            }
            break;
        case Task::OpenQa:
        case Task::Summarization: {
            auto bad = ungrounded_numbers(response, *table);
            if (!bad.empty()) fail("grounding", "number " + format_number(bad.front()) + " not found in the table");
            break;
        }
    }
    return out;
}

std::string trim(std::string_view s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

}  // namespace

// ---------------------------------------------------------------------------
// Tasks and mixes

std::string_view to_string(Task t) {
    switch (t) {
        case Task::ChartToTable: return "chart_to_table";
        case Task::NumericalQa: return "numerical_qa";
        case Task::ReferringQa: return "referring_qa";
        case Task::OpenQa: return "open_qa";
        case Task::Summarization: return "summarization";
    }
    return "chart_to_table";
}

std::optional<Task> task_from_string(std::string_view s) {
    for (Task t : kAllTasks) {
        if (to_string(t) == s) return t;
    }
    if (s == "numerical") return Task::NumericalQa;
    if (s == "referring") return Task::ReferringQa;
    if (s == "open") return Task::OpenQa;
    if (s == "summary") return Task::Summarization;
    return std::nullopt;
}

MixSpec default_mix() {
    MixSpec m;
    double total = 0.0;
    for (double v : kTaskVolumes) total += v;
    for (std::size_t i = 0; i < 5; ++i) m.proportions[i] = kTaskVolumes[i] / total;
    m.total = 1000;
    return m;
}

void validate(const MixSpec& mix) {
    double sum = 0.0;
    for (double p : mix.proportions) {
        if (!(p >= 0.0) || !std::isfinite(p)) throw InvalidParams("mix proportions must be non-negative");
        sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw InvalidParams("mix proportions sum to " + std::to_string(sum) + ", not 1");
}

std::array<std::size_t, 5> realize_counts(const MixSpec& mix) {
    validate(mix);
    std::array<std::size_t, 5> counts{};
    std::array<double, 5> rem{};
    std::size_t assigned = 0;
    for (std::size_t i = 0; i < 5; ++i) {
        double exact = mix.proportions[i] * static_cast<double>(mix.total);
        counts[i] = static_cast<std::size_t>(std::floor(exact));
        rem[i] = exact - std::floor(exact);
        assigned += counts[i];
    }
    std::array<std::size_t, 5> order{0, 1, 2, 3, 4};
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return rem[a] > rem[b]; });
    for (std::size_t k = 0; assigned < mix.total && k < 5; ++k, ++assigned) counts[order[k]] += 1;
    return counts;
}

std::vector<Task> task_assignment(const MixSpec& mix) {
    auto counts = realize_counts(mix);
    std::vector<Task> tasks;
    tasks.reserve(mix.total);
    for (std::size_t i = 0; i < 5; ++i) tasks.insert(tasks.end(), counts[i], kAllTasks[i]);
    Rng rng = make_rng(mix.seed, kTaskShuffleStream);
    shuffle(rng, tasks);
    return tasks;
}

// ---------------------------------------------------------------------------
// Configuration

BuildConfig default_build_config() {
    BuildConfig c;
    c.chart_weights = kDefaultChartWeights;
    return c;
}

BuildConfig build_config_from_json(const json& j) {
    if (!j.is_object()) throw SchemaError("config", "expected an object");
    BuildConfig c = default_build_config();
    auto get_uint = [](const json& v, const std::string& path) {
        if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0)) {
            throw SchemaError(path, "expected a non-negative integer");
        }
        return v.get<std::uint64_t>();
    };
    for (const auto& [key, v] : j.items()) {
        if (key == "seed") {
            c.mix.seed = get_uint(v, key);
        } else if (key == "total") {
            c.mix.total = get_uint(v, key);
        } else if (key == "mix") {
            if (!v.is_object()) throw SchemaError("mix", "expected an object of task proportions");
            c.mix.proportions = {};
            for (const auto& [name, p] : v.items()) {
                auto t = task_from_string(name);
                if (!t) throw SchemaError("mix." + name, "unknown task");
                if (!p.is_number()) throw SchemaError("mix." + name, "expected a number");
                c.mix.proportions[static_cast<std::size_t>(*t)] = p.get<double>();
            }
        } else if (key == "chart_weights") {
            if (!v.is_object()) throw SchemaError("chart_weights", "expected an object of weights");
            c.chart_weights = {};
            for (const auto& [name, w] : v.items()) {
                auto t = chart_type_from_string(name);
                if (!t) throw SchemaError("chart_weights." + name, "unknown chart type");
                if (!w.is_number() || w.get<double>() < 0) {
                    throw SchemaError("chart_weights." + name, "expected a non-negative number");
                }
                c.chart_weights[static_cast<std::size_t>(*t)] = w.get<double>();
            }
        } else if (key == "width") {
            c.width_px = static_cast<int>(get_uint(v, key));
        } else if (key == "height") {
            c.height_px = static_cast<int>(get_uint(v, key));
        } else if (key == "jobs") {
            c.jobs = static_cast<int>(get_uint(v, key));
        } else if (key == "templates") {
            if (v.is_null()) continue;
            if (!v.is_string()) throw SchemaError("templates", "expected a path");
            c.templates_path = v.get<std::string>();
        } else if (key == "synth") {
            if (!v.is_array()) throw SchemaError("synth", "expected an array of synthesis configs");
            for (const auto& s : v) c.synth.push_back(synth_config_from_json(s));
        } else {
            throw SchemaError(key, "unknown key");
        }
    }
    validate(c.mix);
    double wsum = 0.0;
    for (double w : c.chart_weights) wsum += w;
    if (wsum <= 0.0) throw SchemaError("chart_weights", "at least one weight must be positive");
    if (c.jobs < 1) throw SchemaError("jobs", "must be at least 1");
    return c;
}

ojson to_json(const BuildConfig& c) {
    ojson j;
    j["seed"] = c.mix.seed;
    j["total"] = c.mix.total;
    ojson mix;
    for (std::size_t i = 0; i < 5; ++i) mix[std::string(to_string(kAllTasks[i]))] = c.mix.proportions[i];
    j["mix"] = mix;
    ojson w;
    for (std::size_t i = 0; i < 9; ++i) w[std::string(to_string(kAllChartTypes[i]))] = c.chart_weights[i];
    j["chart_weights"] = w;
    j["width"] = c.width_px;
    j["height"] = c.height_px;
    j["jobs"] = c.jobs;
    j["templates"] = c.templates_path ? ojson(*c.templates_path) : ojson(nullptr);
    ojson synth = ojson::array();
    for (const auto& s : c.synth) synth.push_back(ojson::parse(to_json(s).dump()));
    j["synth"] = synth;
    return j;
}

std::uint64_t resolve_seed(std::optional<std::uint64_t> cli_seed, std::optional<std::uint64_t> config_seed) {
    if (cli_seed) return *cli_seed;
    if (config_seed) return *config_seed;
    if (const char* env = std::getenv("CHARTFORGE_SEED"); env && *env) {
        char* end = nullptr;
        unsigned long long v = std::strtoull(env, &end, 10);
        if (end && *end == '\0') return v;
        throw InvalidParams("CHARTFORGE_SEED is not an unsigned integer");
    }
    return 0;
}

// ---------------------------------------------------------------------------
// Generation

GeneratedRecord generate_record(const BuildConfig& config, std::size_t index, Task task, const TemplateLibrary& lib) {
    const std::string id = record_id(index);
    const std::uint64_t rec_seed = mix_seed(config.mix.seed, index);
    std::string last_cause = "no applicable template";

    for (int attempt = 0; attempt < kRecordAttempts; ++attempt) {
        const auto a = static_cast<std::uint64_t>(attempt);
        Rng rng = make_rng(rec_seed, 100 + a);
        ChartType type = kAllChartTypes[weighted_index(rng, config.chart_weights)];
        const SynthConfig* over = synth_override(config, type);
        SynthConfig sc = over ? *over : default_synth_config(type);
        DataTable table = synth_table(sc, mix_seed(rec_seed, 200 + a));
        StyleSpec style = style_sample(mix_seed(rec_seed, 300 + a));
        ChartSpec spec{type, style, config.width_px, config.height_px};
        RenderResult rr = render(table, spec, mix_seed(rec_seed, 400 + a));

        ojson rec;
        rec["id"] = id;
        rec["task"] = to_string(task);
        rec["chart_type"] = to_string(type);
        rec["image"] = image_rel_path(task, id);
        rec["boxes"] = boxes_rel_path(id);
        rec["width"] = rr.width;
        rec["height"] = rr.height;

        ojson prov;
        prov["shard_seed"] = config.mix.seed;
        prov["index"] = index;
        prov["record_seed"] = rec_seed;
        prov["attempt"] = attempt;
        prov["style_id"] = style_id(style);
        prov["template_id"] = nullptr;
        prov["stub_grade"] = false;

        switch (task) {
            case Task::ChartToTable:
                rec["instruction"] = pick(rng, table_instructions());
                rec["response"] = to_markdown(table);
                break;
            case Task::NumericalQa:
            case Task::ReferringQa: {
                auto candidates = enumerate_applicable(table, type, qa_task(task), lib);
                shuffle(rng, candidates);
                std::optional<QaInstance> inst;
                InstantiationContext ctx;
                ctx.table = &table;
                ctx.chart_type = type;
                ctx.seed = mix_seed(rec_seed, 500 + a);
                ctx.render = &rr;
                for (const QaTemplate* t : candidates) {
                    try {
                        inst = task == Task::ReferringQa ? instantiate_referring(*t, ctx) : instantiate(*t, ctx);
                        break;
                    } catch (const SlotUnsatisfiable& e) {
                        last_cause = e.what();
                    }
                }
                if (!inst) continue;
                if (task == Task::ReferringQa) rr = apply_refer_marks(rr, inst->bindings.marks, mix_seed(rec_seed, 600 + a));
                rec["instruction"] = inst->question;
                rec["response"] = cot::serialize(inst->program);
                rec["answer"] = cot::format_value(inst->answer);
                rec["answer_kind"] = cot::to_string(cot::kind_of(inst->answer));
                rec["answer_value"] = ojson::parse(cot::value_to_json(inst->answer).dump());
                if (task == Task::ReferringQa) rec["marks"] = marks_json(rr);
                prov["template_id"] = inst->template_id;
                prov["family"] = inst->family;
                prov["variant"] = inst->variant;
                break;
            }
            case Task::OpenQa:
            case Task::Summarization: {
                TextStub s = task == Task::OpenQa ? open_qa_stub(table, type, mix_seed(rec_seed, 700 + a))
                                                  : summary_stub(table, type, mix_seed(rec_seed, 700 + a));
                rec["instruction"] = s.instruction;
                rec["response"] = s.response;
                prov["stub_grade"] = true;
                prov["stub_rule"] = s.rule;
                break;
            }
        }
        rec["table"] = to_markdown(table);
        rec["table_meta"] = ojson{{"title", table.title()}, {"x_label", table.x_label()}, {"y_label", table.y_label()}};
        rec["provenance"] = prov;
        return GeneratedRecord{std::move(rec), std::move(rr.png), element_boxes_json(rr)};
    }
    throw Error("record " + id + ": " + last_cause);
}

ShardSummary build_shard(const BuildConfig& config, const fs::path& out_dir) {
    validate(config.mix);
    TemplateLibrary custom;
    const TemplateLibrary* lib = &TemplateLibrary::builtin();
    if (config.templates_path) {
        custom = TemplateLibrary::load_file(*config.templates_path);
        lib = &custom;
    }
    const std::vector<Task> tasks = task_assignment(config.mix);

    fs::create_directories(out_dir / "boxes");
    for (Task t : kAllTasks) fs::create_directories(out_dir / "images" / std::string(to_string(t)));

    ShardSummary summary;
    summary.manifest = out_dir / "manifest.jsonl";
    std::ofstream manifest(summary.manifest, std::ios::binary | std::ios::trunc);
    if (!manifest) throw Error("cannot write " + summary.manifest.string());

    const std::size_t jobs = static_cast<std::size_t>(std::max(1, config.jobs));
    const std::size_t batch = 32 * jobs;
    for (std::size_t begin = 0; begin < tasks.size(); begin += batch) {
        const std::size_t end = std::min(tasks.size(), begin + batch);
        std::vector<std::optional<GeneratedRecord>> out(end - begin);
        std::vector<std::string> errors(end - begin);
        std::atomic<std::size_t> next{begin};
        auto worker = [&] {
            for (std::size_t i = next++; i < end; i = next++) {
                try {
                    GeneratedRecord g = generate_record(config, i, tasks[i], *lib);
                    auto v = check_record(json::parse(g.manifest.dump()), g.png, json::parse(g.boxes.dump()));
                    if (!v.empty()) {
                        errors[i - begin] = "record " + v.front().record_id + ": " + v.front().check + ": " + v.front().detail;
                    } else {
                        out[i - begin] = std::move(g);
                    }
                } catch (const std::exception& e) {
                    errors[i - begin] = e.what();
                }
            }
        };
        std::vector<std::thread> pool;
        for (std::size_t w = 1; w < jobs; ++w) pool.emplace_back(worker);
        worker();
        for (auto& th : pool) th.join();

        for (std::size_t i = begin; i < end; ++i) {
            if (!errors[i - begin].empty()) throw Error(errors[i - begin]);
            GeneratedRecord& g = *out[i - begin];
            const std::string id = record_id(i);
            write_bytes(out_dir / image_rel_path(tasks[i], id), g.png);
            write_bytes(out_dir / boxes_rel_path(id), g.boxes.dump() + "\n");
            manifest << g.manifest.dump() << '\n';
            summary.counts[static_cast<std::size_t>(tasks[i])] += 1;
            ++summary.records;
        }
    }
    manifest.close();
    if (!manifest) throw Error("failed writing " + summary.manifest.string());

    ojson shard;
    shard["format"] = "chartforge-shard";
    shard["version"] = 1;
    ojson cfg = to_json(config);
    cfg.erase("jobs");
    shard["config"] = cfg;
    ojson counts;
    for (std::size_t i = 0; i < 5; ++i) counts[std::string(to_string(kAllTasks[i]))] = summary.counts[i];
    shard["counts"] = counts;
    shard["records"] = summary.records;
    write_bytes(out_dir / "shard.json", shard.dump(2) + "\n");
    return summary;
}

// ---------------------------------------------------------------------------
// Verification

std::vector<json> read_manifest(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot read manifest " + path.string());
    std::vector<json> out;
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        ++n;
        if (trim(line).empty()) continue;
        try {
            out.push_back(json::parse(line));
        } catch (const json::exception& e) {
            throw SchemaError("line " + std::to_string(n), e.what());
        }
    }
    return out;
}

DataTable record_table(const json& record) {
    DataTable parsed = parse_markdown_table(record.at("table").get<std::string>());
    TableMeta meta = parsed.meta();
    if (record.contains("table_meta")) {
        const json& m = record["table_meta"];
        meta.title = m.value("title", std::string());
        meta.x_label = m.value("x_label", meta.x_label);
        meta.y_label = m.value("y_label", std::string());
    }
    return DataTable(parsed.row_labels(), parsed.col_labels(), parsed.cells(), meta);
}

std::vector<Violation> verify_record(const json& record, const fs::path& root) {
    std::string id = record.value("id", std::string("?"));
    std::vector<std::uint8_t> png;
    json boxes;
    try {
        png = read_bytes(root / record.at("image").get<std::string>());
    } catch (const std::exception& e) {
        return {{id, "image", e.what()}};
    }
    try {
        auto bytes = read_bytes(root / record.at("boxes").get<std::string>());
        boxes = json::parse(bytes.begin(), bytes.end());
    } catch (const std::exception& e) {
        return {{id, "boxes", e.what()}};
    }
    return check_record(record, png, boxes);
}

VerifyReport verify_shard(const fs::path& manifest, bool regenerate) {
    VerifyReport report;
    const fs::path root = manifest.parent_path();
    std::vector<std::string> lines;
    {
        std::ifstream in(manifest, std::ios::binary);
        if (!in) throw Error("cannot read manifest " + manifest.string());
        std::string line;
        while (std::getline(in, line)) {
            if (!trim(line).empty()) lines.push_back(line);
        }
    }

    std::optional<BuildConfig> config;
    std::vector<Task> tasks;
    TemplateLibrary custom;
    const TemplateLibrary* lib = &TemplateLibrary::builtin();
    if (regenerate) {
        auto bytes = read_bytes(root / "shard.json");
        json shard = json::parse(bytes.begin(), bytes.end());
        config = build_config_from_json(shard.at("config"));
        tasks = task_assignment(config->mix);
        if (config->templates_path) {
            custom = TemplateLibrary::load_file(*config->templates_path);
            lib = &custom;
        }
    }

    std::set<std::string> ids;
    for (std::size_t n = 0; n < lines.size(); ++n) {
        json rec;
        try {
            rec = json::parse(lines[n]);
        } catch (const json::exception& e) {
            report.violations.push_back({"line " + std::to_string(n + 1), "schema", e.what()});
            continue;
        }
        ++report.records;
        std::string id = rec.value("id", std::string("?"));
        if (!ids.insert(id).second) report.violations.push_back({id, "schema", "duplicate record id"});
        if (auto t = task_from_string(rec.value("task", std::string()))) report.counts[static_cast<std::size_t>(*t)] += 1;
        auto v = verify_record(rec, root);
        report.violations.insert(report.violations.end(), v.begin(), v.end());

        if (regenerate) {
            try {
                std::size_t index = rec.at("provenance").at("index").get<std::size_t>();
                if (index >= tasks.size()) throw Error("index outside the shard");
                GeneratedRecord g = generate_record(*config, index, tasks[index], *lib);
                if (g.manifest.dump() != lines[n]) {
                    report.violations.push_back({id, "reproducibility", "regenerated manifest line differs"});
                }
                if (g.png != read_bytes(root / image_rel_path(tasks[index], record_id(index)))) {
                    report.violations.push_back({id, "reproducibility", "regenerated image differs"});
                }
                auto boxes = read_bytes(root / boxes_rel_path(record_id(index)));
                if (g.boxes.dump() + "\n" != std::string(boxes.begin(), boxes.end())) {
                    report.violations.push_back({id, "reproducibility", "regenerated boxes differ"});
                }
            } catch (const std::exception& e) {
                report.violations.push_back({id, "reproducibility", e.what()});
            }
        }
    }
    return report;
}

ojson to_json(const VerifyReport& r) {
    ojson j;
    j["records"] = r.records;
    ojson counts;
    for (std::size_t i = 0; i < 5; ++i) counts[std::string(to_string(kAllTasks[i]))] = r.counts[i];
    j["counts"] = counts;
    j["violation_count"] = r.violations.size();
    ojson v = ojson::array();
    for (const auto& x : r.violations) v.push_back(ojson{{"id", x.record_id}, {"check", x.check}, {"detail", x.detail}});
    j["violations"] = v;
    return j;
}

// ---------------------------------------------------------------------------
// Evaluation

std::vector<Prediction> read_predictions(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot read predictions " + path.string());
    std::vector<Prediction> out;
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        ++n;
        if (trim(line).empty()) continue;
        std::string where = "line " + std::to_string(n);
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception& e) {
            throw SchemaError(where, e.what());
        }
        if (!j.is_object() || !j.contains("id") || !j["id"].is_string()) throw SchemaError(where + ".id", "expected a string");
        if (!j.contains("prediction") || !j["prediction"].is_string()) {
            throw SchemaError(where + ".prediction", "expected a string");
        }
        out.push_back({j["id"].get<std::string>(), j["prediction"].get<std::string>()});
    }
    return out;
}

namespace {

std::string qa_answer_text(const std::string& pred, const DataTable& table) {
    std::string t = trim(pred);
    if (t.empty() || t.front() != '{') return t;
    cot::CotProgram p;
    try {
        p = cot::deserialize(t);
    } catch (const Error&) {
        return t;
    }
    try {
        return cot::format_value(cot::execute(p, table));
    } catch (const Error&) {
        return {};
    }
}

}  // namespace

ojson evaluate(const std::vector<Prediction>& predictions, const fs::path& manifest, std::optional<Task> task,
               const EvalConfig& cfg) {
    if (predictions.empty()) throw Error("no predictions to evaluate");
    validate(cfg.rms);
    if (!(cfg.relaxed.tolerance >= 0.0 && cfg.relaxed.tolerance < 1.0)) throw InvalidParams("tolerance must be in [0, 1)");

    std::map<std::string, std::string> pred;
    for (const auto& p : predictions) pred[p.id] = p.text;

    struct Acc {
        std::size_t count = 0;
        double sum = 0.0;
        std::vector<std::string> preds;
        std::vector<std::vector<std::string>> refs;
    };
    std::array<Acc, 5> acc;
    ojson records = ojson::array();
    std::size_t missing = 0, matched = 0;

    for (const json& rec : read_manifest(manifest)) {
        auto t = task_from_string(rec.at("task").get<std::string>());
        if (!t) throw SchemaError("task", "unknown task in manifest");
        if (task && *t != *task) continue;
        const std::string id = rec.at("id").get<std::string>();
        auto it = pred.find(id);
        if (it == pred.end()) ++missing;
        else ++matched;
        const std::string p = it == pred.end() ? std::string() : it->second;
        Acc& a = acc[static_cast<std::size_t>(*t)];
        ++a.count;
        double score = 0.0;
        switch (*t) {
            case Task::ChartToTable:
                score = rms_f1(std::string_view(p), record_table(rec), cfg.rms);
                a.sum += score;
                break;
            case Task::NumericalQa:
            case Task::ReferringQa: {
                DataTable table = record_table(rec);
                score = relaxed_correct(qa_answer_text(p, table), rec.at("answer").get<std::string>(), cfg.relaxed) ? 1.0 : 0.0;
                a.sum += score;
                break;
            }
            case Task::OpenQa:
            case Task::Summarization: {
                std::vector<std::string> refs{rec.at("response").get<std::string>()};
                score = bleu(p, refs);
                a.preds.push_back(p);
                a.refs.push_back(std::move(refs));
                break;
            }
        }
        records.push_back(ojson{{"id", id}, {"task", to_string(*t)}, {"score", score}});
    }

    ojson report;
    report["config"] = ojson{{"tolerance", cfg.relaxed.tolerance},
                             {"numeric_threshold", cfg.rms.numeric_threshold},
                             {"text_threshold", cfg.rms.text_threshold}};
    ojson tasks = ojson::object();
    for (std::size_t i = 0; i < 5; ++i) {
        const Acc& a = acc[i];
        if (a.count == 0) continue;
        ojson s;
        s["count"] = a.count;
        switch (kAllTasks[i]) {
            case Task::ChartToTable: s["rms_f1_mean"] = a.sum / static_cast<double>(a.count); break;
            case Task::NumericalQa:
            case Task::ReferringQa: s["relaxed_accuracy"] = a.sum / static_cast<double>(a.count); break;
            default: s["bleu"] = corpus_bleu(a.preds, a.refs);
        }
        tasks[std::string(to_string(kAllTasks[i]))] = s;
    }
    report["tasks"] = tasks;
    report["matched"] = matched;
    report["missing"] = missing;
    report["unmatched"] = predictions.size() - matched;
    report["records"] = records;
    return report;
}

}  // namespace chartforge
