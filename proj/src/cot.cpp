#include "chartforge/cot.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

namespace chartforge::cot {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

[[noreturn]] void fail(ErrorKind kind, const std::string& what) { throw CotError(kind, 0, what); }

const Value& value_at(std::span<const Operand> args, std::size_t i) { return std::get<Value>(args[i]); }
double num(std::span<const Operand> args, std::size_t i) { return std::get<double>(value_at(args, i)); }
const std::string& text(std::span<const Operand> args, std::size_t i) {
    return std::get<std::string>(value_at(args, i));
}
const NumberList& nums(std::span<const Operand> args, std::size_t i) {
    return std::get<NumberList>(value_at(args, i));
}
const TextList& texts(std::span<const Operand> args, std::size_t i) {
    return std::get<TextList>(value_at(args, i));
}
const TableQuery& query(std::span<const Operand> args, std::size_t i) { return std::get<TableQuery>(args[i]); }

void require_nonempty(const NumberList& xs, const char* fn) {
    if (xs.empty()) fail(ErrorKind::DomainError, std::string(fn) + " of an empty list");
}

std::size_t row_of(const DataTable& t, const std::string& label) {
    auto r = t.find_row(label);
    if (!r) fail(ErrorKind::LookupMiss, "no row labelled '" + label + "'");
    return *r;
}

std::size_t col_of(const DataTable& t, const std::string& label) {
    auto c = t.find_col(label);
    if (!c) fail(ErrorKind::LookupMiss, "no column labelled '" + label + "'");
    return *c;
}

double numeric_cell(const DataTable& t, std::size_t r, std::size_t c) {
    const Cell& cell = t.at(r, c);
    if (!cell.is_number()) {
        fail(ErrorKind::LookupMiss, "no numeric value at (" + t.row_labels()[r] + ", " + t.col_labels()[c] + ")");
    }
    return cell.as_number();
}

/// 1-based integer index into a list of length n.
std::size_t index_arg(double k, std::size_t n, const char* fn) {
    if (std::floor(k) != k || k < 1.0 || k > static_cast<double>(n)) {
        std::ostringstream os;
        os << fn << ": index " << k << " outside 1.." << n;
        fail(ErrorKind::DomainError, os.str());
    }
    return static_cast<std::size_t>(k) - 1;
}

double mean_of(const NumberList& xs) {
    double s = 0.0;
    for (double x : xs) s += x;
    return s / static_cast<double>(xs.size());
}

double median_of(NumberList xs) {
    std::sort(xs.begin(), xs.end());
    std::size_t n = xs.size();
    return n % 2 == 1 ? xs[n / 2] : (xs[n / 2 - 1] + xs[n / 2]) / 2.0;
}

double stddev_of(const NumberList& xs) {
    double m = mean_of(xs);
    double ss = 0.0;
    for (double x : xs) ss += (x - m) * (x - m);
    return std::sqrt(ss / static_cast<double>(xs.size()));
}

double pearson(const NumberList& x, const NumberList& y) {
    if (x.size() != y.size()) fail(ErrorKind::DomainError, "correlation of lists with different lengths");
    if (x.size() < 2) fail(ErrorKind::DomainError, "correlation needs at least two points");
    double mx = mean_of(x);
    double my = mean_of(y);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0.0 || syy == 0.0) fail(ErrorKind::UndefinedCorrelation, "a series has zero variance");
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

std::size_t arg_extreme(const NumberList& xs, const TextList& labels, bool want_max, const char* fn) {
    require_nonempty(xs, fn);
    if (xs.size() != labels.size()) fail(ErrorKind::DomainError, std::string(fn) + ": values and labels differ in length");
    std::size_t best = 0;
    for (std::size_t i = 1; i < xs.size(); ++i) {
        if (want_max ? xs[i] > xs[best] : xs[i] < xs[best]) best = i;
    }
    return best;
}

NumberList pairwise(const NumberList& a, const NumberList& b, bool add, const char* fn) {
    if (a.size() != b.size()) fail(ErrorKind::DomainError, std::string(fn) + " of lists with different lengths");
    NumberList out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = add ? a[i] + b[i] : a[i] - b[i];
    return out;
}

double checked_divide(double a, double b) {
    if (b == 0.0) fail(ErrorKind::DivisionByZero, "division by zero");
    return a / b;
}

using P = ParamKind;
using V = ValueKind;

FunctionRegistry make_standard() {
    FunctionRegistry reg;
    auto add = [&](std::string name, std::vector<ParamKind> params, ValueKind result, FunctionImpl impl) {
        reg.add(FunctionDef{std::move(name), std::move(params), result, std::move(impl)});
    };

    add("retrieve_cell", {P::CellQuery}, V::Number, [](auto args, const DataTable& t) -> Value {
        const auto& q = query(args, 0);
        return numeric_cell(t, row_of(t, *q.row), col_of(t, *q.col));
    });
    add("retrieve_row", {P::RowQuery}, V::NumberList, [](auto args, const DataTable& t) -> Value {
        std::size_t r = row_of(t, *query(args, 0).row);
        NumberList out;
        for (std::size_t c = 0; c < t.cols(); ++c) out.push_back(numeric_cell(t, r, c));
        return out;
    });
    add("retrieve_column", {P::ColQuery}, V::NumberList, [](auto args, const DataTable& t) -> Value {
        std::size_t c = col_of(t, *query(args, 0).col);
        NumberList out;
        for (std::size_t r = 0; r < t.rows(); ++r) out.push_back(numeric_cell(t, r, c));
        return out;
    });
    add("retrieve_labels", {P::Text}, V::TextList, [](auto args, const DataTable& t) -> Value {
        const auto& axis = text(args, 0);
        if (axis == "rows") return t.row_labels();
        if (axis == "columns" || axis == "cols") return t.col_labels();
        fail(ErrorKind::LookupMiss, "retrieve_labels axis must be 'rows' or 'columns', got '" + axis + "'");
    });

    add("max", {P::NumberList}, V::Number, [](auto args, const DataTable&) -> Value {
        const auto& xs = nums(args, 0);
        require_nonempty(xs, "max");
        return *std::max_element(xs.begin(), xs.end());
    });
    add("min", {P::NumberList}, V::Number, [](auto args, const DataTable&) -> Value {
        const auto& xs = nums(args, 0);
        require_nonempty(xs, "min");
        return *std::min_element(xs.begin(), xs.end());
    });
    add("sum", {P::NumberList}, V::Number, [](auto args, const DataTable&) -> Value {
        double s = 0.0;
        for (double x : nums(args, 0)) s += x;
        return s;
    });
    add("mean", {P::NumberList}, V::Number, [](auto args, const DataTable&) -> Value {
        require_nonempty(nums(args, 0), "mean");
        return mean_of(nums(args, 0));
    });
    add("median", {P::NumberList}, V::Number, [](auto args, const DataTable&) -> Value {
        require_nonempty(nums(args, 0), "median");
        return median_of(nums(args, 0));
    });
    add("range", {P::NumberList}, V::Number, [](auto args, const DataTable&) -> Value {
        const auto& xs = nums(args, 0);
        require_nonempty(xs, "range");
        auto [lo, hi] = std::minmax_element(xs.begin(), xs.end());
        return *hi - *lo;
    });
    add("stddev", {P::NumberList}, V::Number, [](auto args, const DataTable&) -> Value {
        require_nonempty(nums(args, 0), "stddev");
        return stddev_of(nums(args, 0));
    });
    add("count", {P::NumberList}, V::Number, [](auto args, const DataTable&) -> Value {
        return static_cast<double>(nums(args, 0).size());
    });
    add("argmax", {P::NumberList, P::TextList}, V::Text, [](auto args, const DataTable&) -> Value {
        return texts(args, 1)[arg_extreme(nums(args, 0), texts(args, 1), true, "argmax")];
    });
    add("argmin", {P::NumberList, P::TextList}, V::Text, [](auto args, const DataTable&) -> Value {
        return texts(args, 1)[arg_extreme(nums(args, 0), texts(args, 1), false, "argmin")];
    });

    add("add", {P::Number, P::Number}, V::Number,
        [](auto args, const DataTable&) -> Value { return num(args, 0) + num(args, 1); });
    add("subtract", {P::Number, P::Number}, V::Number,
        [](auto args, const DataTable&) -> Value { return num(args, 0) - num(args, 1); });
    add("multiply", {P::Number, P::Number}, V::Number,
        [](auto args, const DataTable&) -> Value { return num(args, 0) * num(args, 1); });
    add("divide", {P::Number, P::Number}, V::Number,
        [](auto args, const DataTable&) -> Value { return checked_divide(num(args, 0), num(args, 1)); });
    add("ratio", {P::Number, P::Number}, V::Number,
        [](auto args, const DataTable&) -> Value { return checked_divide(num(args, 0), num(args, 1)); });
    add("percentage", {P::Number, P::Number}, V::Number,
        [](auto args, const DataTable&) -> Value { return checked_divide(num(args, 0), num(args, 1)) * 100.0; });
    add("abs", {P::Number}, V::Number, [](auto args, const DataTable&) -> Value { return std::fabs(num(args, 0)); });

    add("greater_than", {P::Number, P::Number}, V::Bool,
        [](auto args, const DataTable&) -> Value { return num(args, 0) > num(args, 1); });
    add("less_than", {P::Number, P::Number}, V::Bool,
        [](auto args, const DataTable&) -> Value { return num(args, 0) < num(args, 1); });
    add("equal_within", {P::Number, P::Number, P::Number}, V::Bool, [](auto args, const DataTable&) -> Value {
        if (num(args, 2) < 0.0) fail(ErrorKind::DomainError, "equal_within tolerance must be >= 0");
        return std::fabs(num(args, 0) - num(args, 1)) <= num(args, 2);
    });
    add("correlation", {P::NumberList, P::NumberList}, V::Number,
        [](auto args, const DataTable&) -> Value { return pearson(nums(args, 0), nums(args, 1)); });

    add("sort", {P::NumberList, P::Text}, V::NumberList, [](auto args, const DataTable&) -> Value {
        NumberList xs = nums(args, 0);
        const auto& order = text(args, 1);
        if (order == "asc") {
            std::sort(xs.begin(), xs.end());
        } else if (order == "desc") {
            std::sort(xs.begin(), xs.end(), std::greater<>());
        } else {
            fail(ErrorKind::DomainError, "sort order must be 'asc' or 'desc', got '" + order + "'");
        }
        return xs;
    });
    add("diff_consecutive", {P::NumberList}, V::NumberList, [](auto args, const DataTable&) -> Value {
        const auto& xs = nums(args, 0);
        NumberList out;
        for (std::size_t i = 1; i < xs.size(); ++i) out.push_back(xs[i] - xs[i - 1]);
        return out;
    });
    add("filter_greater", {P::NumberList, P::Number}, V::NumberList, [](auto args, const DataTable&) -> Value {
        NumberList out;
        for (double x : nums(args, 0)) {
            if (x > num(args, 1)) out.push_back(x);
        }
        return out;
    });
    add("filter_less", {P::NumberList, P::Number}, V::NumberList, [](auto args, const DataTable&) -> Value {
        NumberList out;
        for (double x : nums(args, 0)) {
            if (x < num(args, 1)) out.push_back(x);
        }
        return out;
    });
    add("nth", {P::NumberList, P::Number}, V::Number, [](auto args, const DataTable&) -> Value {
        const auto& xs = nums(args, 0);
        return xs[index_arg(num(args, 1), xs.size(), "nth")];
    });
    add("label_at", {P::TextList, P::Number}, V::Text, [](auto args, const DataTable&) -> Value {
        const auto& xs = texts(args, 0);
        return xs[index_arg(num(args, 1), xs.size(), "label_at")];
    });
    add("slice", {P::NumberList, P::Number, P::Number}, V::NumberList, [](auto args, const DataTable&) -> Value {
        const auto& xs = nums(args, 0);
        std::size_t from = index_arg(num(args, 1), xs.size(), "slice");
        std::size_t to = index_arg(num(args, 2), xs.size(), "slice");
        if (from > to) fail(ErrorKind::DomainError, "slice start after end");
        return NumberList(xs.begin() + static_cast<long>(from), xs.begin() + static_cast<long>(to) + 1);
    });
    add("pairwise_add", {P::NumberList, P::NumberList}, V::NumberList, [](auto args, const DataTable&) -> Value {
        return pairwise(nums(args, 0), nums(args, 1), true, "pairwise_add");
    });
    add("pairwise_subtract", {P::NumberList, P::NumberList}, V::NumberList,
        [](auto args, const DataTable&) -> Value {
            return pairwise(nums(args, 0), nums(args, 1), false, "pairwise_subtract");
        });
    return reg;
}

// Static kind of an argument, as seen by the checker.
struct ArgShape {
    enum class Tag { Value, Query, Unknown } tag;
    ValueKind value_kind = ValueKind::Number;
    TableQuery query;

    static ArgShape unknown() { return {Tag::Unknown, ValueKind::Number, {}}; }
    static ArgShape value(ValueKind k) { return {Tag::Value, k, {}}; }
    static ArgShape of_query(const TableQuery& q) { return {Tag::Query, ValueKind::Number, q}; }
};

bool accepts(ParamKind p, const ArgShape& a) {
    if (a.tag == ArgShape::Tag::Unknown) return true;  // reported separately
    switch (p) {
        case P::Number: return a.tag == ArgShape::Tag::Value && a.value_kind == V::Number;
        case P::Text: return a.tag == ArgShape::Tag::Value && a.value_kind == V::Text;
        case P::Bool: return a.tag == ArgShape::Tag::Value && a.value_kind == V::Bool;
        case P::NumberList: return a.tag == ArgShape::Tag::Value && a.value_kind == V::NumberList;
        case P::TextList: return a.tag == ArgShape::Tag::Value && a.value_kind == V::TextList;
        case P::RowQuery: return a.tag == ArgShape::Tag::Query && a.query.row && !a.query.col;
        case P::ColQuery: return a.tag == ArgShape::Tag::Query && a.query.col && !a.query.row;
        case P::CellQuery: return a.tag == ArgShape::Tag::Query && a.query.row && a.query.col;
    }
    return false;
}

std::string describe(const ArgShape& a) {
    if (a.tag == ArgShape::Tag::Query) {
        if (a.query.row && a.query.col) return "cell query";
        return a.query.row ? "row query" : "column query";
    }
    return std::string(to_string(a.value_kind));
}

std::string step_path(std::size_t i) { return "steps[" + std::to_string(i) + "]"; }

ordered_json arg_to_json(const Arg& a) {
    ordered_json j = ordered_json::object();
    std::visit(
        [&](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, double>) {
                j["num"] = v;
            } else if constexpr (std::is_same_v<T, std::string>) {
                j["text"] = v;
            } else if constexpr (std::is_same_v<T, StepRef>) {
                j["ref"] = v.id;
            } else {
                if (v.row) j["row"] = *v.row;
                if (v.col) j["col"] = *v.col;
            }
        },
        a);
    return j;
}

Arg arg_from_json(const json& j, const std::string& path) {
    if (!j.is_object()) throw SchemaError(path, "argument must be an object");
    for (const auto& [key, v] : j.items()) {
        if (key != "num" && key != "text" && key != "ref" && key != "row" && key != "col") {
            throw SchemaError(path + "." + key, "unknown key");
        }
    }
    auto only = [&](const char* key) {
        if (j.size() != 1) throw SchemaError(path, std::string("'") + key + "' cannot be combined with other keys");
    };
    if (j.contains("num")) {
        only("num");
        if (!j["num"].is_number()) throw SchemaError(path + ".num", "expected a number");
        double v = j["num"].get<double>();
        if (!std::isfinite(v)) throw SchemaError(path + ".num", "number must be finite");
        return v;
    }
    if (j.contains("text")) {
        only("text");
        if (!j["text"].is_string()) throw SchemaError(path + ".text", "expected a string");
        return j["text"].get<std::string>();
    }
    if (j.contains("ref")) {
        only("ref");
        if (!j["ref"].is_number_integer()) throw SchemaError(path + ".ref", "expected an integer step id");
        return StepRef{j["ref"].get<int>()};
    }
    TableQuery q;
    if (j.contains("row")) {
        if (!j["row"].is_string()) throw SchemaError(path + ".row", "expected a string");
        q.row = j["row"].get<std::string>();
    }
    if (j.contains("col")) {
        if (!j["col"].is_string()) throw SchemaError(path + ".col", "expected a string");
        q.col = j["col"].get<std::string>();
    }
    if (!q.row && !q.col) throw SchemaError(path, "argument needs one of num, text, ref, row, col");
    return q;
}

}  // namespace

// ---------------------------------------------------------------------------

ValueKind kind_of(const Value& v) { return static_cast<ValueKind>(v.index()); }

std::string_view to_string(ValueKind k) {
    switch (k) {
        case ValueKind::Number: return "number";
        case ValueKind::Text: return "text";
        case ValueKind::Bool: return "bool";
        case ValueKind::NumberList: return "number list";
        case ValueKind::TextList: return "text list";
    }
    return "?";
}

std::string format_value(const Value& v) {
    return std::visit(
        [](const auto& x) -> std::string {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, double>) {
                return format_number(x);
            } else if constexpr (std::is_same_v<T, std::string>) {
                return x;
            } else if constexpr (std::is_same_v<T, bool>) {
                return x ? "Yes" : "No";
            } else if constexpr (std::is_same_v<T, NumberList>) {
                std::string out;
                for (std::size_t i = 0; i < x.size(); ++i) out += (i ? ", " : "") + format_number(x[i]);
                return out;
            } else {
                std::string out;
                for (std::size_t i = 0; i < x.size(); ++i) out += (i ? ", " : "") + x[i];
                return out;
            }
        },
        v);
}

nlohmann::json value_to_json(const Value& v) {
    return std::visit([](const auto& x) { return nlohmann::json(x); }, v);
}

Value value_from_json(const nlohmann::json& j, ValueKind kind) {
    switch (kind) {
        case ValueKind::Number:
            if (j.is_number()) return j.get<double>();
            break;
        case ValueKind::Text:
            if (j.is_string()) return j.get<std::string>();
            break;
        case ValueKind::Bool:
            if (j.is_boolean()) return j.get<bool>();
            break;
        case ValueKind::NumberList:
            if (j.is_array()) return j.get<NumberList>();
            break;
        case ValueKind::TextList:
            if (j.is_array()) return j.get<TextList>();
            break;
    }
    throw SchemaError("answer", "value does not match kind " + std::string(to_string(kind)));
}

std::string_view to_string(ParamKind k) {
    switch (k) {
        case ParamKind::Number: return "number";
        case ParamKind::Text: return "text";
        case ParamKind::Bool: return "bool";
        case ParamKind::NumberList: return "number list";
        case ParamKind::TextList: return "text list";
        case ParamKind::RowQuery: return "row query";
        case ParamKind::ColQuery: return "column query";
        case ParamKind::CellQuery: return "cell query";
    }
    return "?";
}

std::string_view to_string(ErrorKind k) {
    switch (k) {
        case ErrorKind::UnknownFunction: return "UnknownFunction";
        case ErrorKind::ArityMismatch: return "ArityMismatch";
        case ErrorKind::TypeMismatch: return "TypeMismatch";
        case ErrorKind::LookupMiss: return "LookupMiss";
        case ErrorKind::DivisionByZero: return "DivisionByZero";
        case ErrorKind::UndefinedCorrelation: return "UndefinedCorrelation";
        case ErrorKind::DomainError: return "DomainError";
        case ErrorKind::MalformedProgram: return "MalformedProgram";
    }
    return "?";
}

bool is_value_dependent(ErrorKind k) {
    return k == ErrorKind::LookupMiss || k == ErrorKind::DivisionByZero || k == ErrorKind::UndefinedCorrelation ||
           k == ErrorKind::DomainError;
}

CotError::CotError(ErrorKind kind, int step_id, const std::string& what)
    : Error(std::string(to_string(kind)) + (step_id > 0 ? " at step " + std::to_string(step_id) : "") + ": " + what),
      kind_(kind),
      step_id_(step_id) {}

std::string_view to_string(DiagnosticKind k) {
    switch (k) {
        case DiagnosticKind::EmptyProgram: return "empty-program";
        case DiagnosticKind::NonIncreasingId: return "non-increasing-id";
        case DiagnosticKind::UnknownFunction: return "unknown-function";
        case DiagnosticKind::ArityMismatch: return "arity-mismatch";
        case DiagnosticKind::ArgumentKindMismatch: return "argument-kind-mismatch";
        case DiagnosticKind::ForwardReference: return "forward-reference";
        case DiagnosticKind::DanglingReference: return "dangling-reference";
    }
    return "?";
}

const FunctionRegistry& FunctionRegistry::standard() {
    static const FunctionRegistry reg = make_standard();
    return reg;
}

void FunctionRegistry::add(FunctionDef def) {
    std::string name = def.name;
    defs_.insert_or_assign(std::move(name), std::move(def));
}

const FunctionDef* FunctionRegistry::find(std::string_view name) const {
    auto it = defs_.find(name);
    return it == defs_.end() ? nullptr : &it->second;
}

std::vector<std::string> FunctionRegistry::names() const {
    std::vector<std::string> out;
    for (const auto& [name, def] : defs_) out.push_back(name);
    return out;
}

std::vector<Diagnostic> validate(const CotProgram& program, const FunctionRegistry& registry) {
    std::vector<Diagnostic> out;
    if (program.steps.empty()) {
        out.push_back({DiagnosticKind::EmptyProgram, 0, "steps", "program has no steps"});
        return out;
    }
    // id -> result kind (nullopt when the producing function is unknown)
    std::map<int, std::optional<ValueKind>> produced;
    int last_id = 0;
    for (std::size_t i = 0; i < program.steps.size(); ++i) {
        const CotStep& step = program.steps[i];
        const std::string path = step_path(i);
        if (i > 0 && step.id <= last_id) {
            out.push_back({DiagnosticKind::NonIncreasingId, step.id, path + ".id",
                           "step id " + std::to_string(step.id) + " does not exceed previous id " +
                               std::to_string(last_id)});
        }
        const FunctionDef* def = registry.find(step.func);
        if (!def) {
            out.push_back({DiagnosticKind::UnknownFunction, step.id, path + ".func", "unknown function '" + step.func + "'"});
        } else if (def->params.size() != step.args.size()) {
            out.push_back({DiagnosticKind::ArityMismatch, step.id, path + ".args",
                           step.func + " takes " + std::to_string(def->params.size()) + " arguments, got " +
                               std::to_string(step.args.size())});
        }
        for (std::size_t a = 0; a < step.args.size(); ++a) {
            const std::string apath = path + ".args[" + std::to_string(a) + "]";
            ArgShape shape = ArgShape::unknown();
            const Arg& arg = step.args[a];
            if (std::holds_alternative<double>(arg)) {
                shape = ArgShape::value(V::Number);
            } else if (std::holds_alternative<std::string>(arg)) {
                shape = ArgShape::value(V::Text);
            } else if (const auto* q = std::get_if<TableQuery>(&arg)) {
                shape = ArgShape::of_query(*q);
            } else {
                int ref = std::get<StepRef>(arg).id;
                if (ref >= step.id) {
                    out.push_back({DiagnosticKind::ForwardReference, step.id, apath + ".ref",
                                   "reference to step " + std::to_string(ref) + " which is not earlier"});
                } else if (auto it = produced.find(ref); it == produced.end()) {
                    out.push_back({DiagnosticKind::DanglingReference, step.id, apath + ".ref",
                                   "reference to missing step " + std::to_string(ref)});
                } else if (it->second) {
                    shape = ArgShape::value(*it->second);
                }
            }
            if (def && a < def->params.size() && !accepts(def->params[a], shape)) {
                out.push_back({DiagnosticKind::ArgumentKindMismatch, step.id, apath,
                               step.func + " expects a " + std::string(to_string(def->params[a])) + ", got a " +
                                   describe(shape)});
            }
        }
        produced[step.id] = def ? std::optional<ValueKind>(def->result) : std::nullopt;
        last_id = std::max(last_id, step.id);
    }
    return out;
}

Value execute(const CotProgram& program, const DataTable& table, const FunctionRegistry& registry) {
    if (program.steps.empty()) throw CotError(ErrorKind::MalformedProgram, 0, "program has no steps");
    std::map<int, Value> results;
    int last_id = 0;
    const Value* last = nullptr;
    for (std::size_t i = 0; i < program.steps.size(); ++i) {
        const CotStep& step = program.steps[i];
        if (i > 0 && step.id <= last_id) {
            throw CotError(ErrorKind::MalformedProgram, step.id, "step ids must be strictly increasing");
        }
        const FunctionDef* def = registry.find(step.func);
        if (!def) throw CotError(ErrorKind::UnknownFunction, step.id, "unknown function '" + step.func + "'");
        if (def->params.size() != step.args.size()) {
            throw CotError(ErrorKind::ArityMismatch, step.id,
                           step.func + " takes " + std::to_string(def->params.size()) + " arguments, got " +
                               std::to_string(step.args.size()));
        }
        std::vector<Operand> operands;
        operands.reserve(step.args.size());
        for (std::size_t a = 0; a < step.args.size(); ++a) {
            const Arg& arg = step.args[a];
            ArgShape shape = ArgShape::unknown();
            if (const auto* d = std::get_if<double>(&arg)) {
                operands.emplace_back(Value(*d));
                shape = ArgShape::value(V::Number);
            } else if (const auto* s = std::get_if<std::string>(&arg)) {
                operands.emplace_back(Value(*s));
                shape = ArgShape::value(V::Text);
            } else if (const auto* q = std::get_if<TableQuery>(&arg)) {
                operands.emplace_back(*q);
                shape = ArgShape::of_query(*q);
            } else {
                int ref = std::get<StepRef>(arg).id;
                auto it = results.find(ref);
                if (ref >= step.id || it == results.end()) {
                    throw CotError(ErrorKind::MalformedProgram, step.id,
                                   "argument " + std::to_string(a + 1) + " refers to step " + std::to_string(ref) +
                                       " which has not run");
                }
                operands.emplace_back(it->second);
                shape = ArgShape::value(kind_of(it->second));
            }
            if (!accepts(def->params[a], shape)) {
                throw CotError(ErrorKind::TypeMismatch, step.id,
                               step.func + " argument " + std::to_string(a + 1) + " expects a " +
                                   std::string(to_string(def->params[a])) + ", got a " + describe(shape));
            }
        }
        Value v;
        try {
            v = def->impl(operands, table);
        } catch (const CotError& e) {
            std::string msg = e.what();
            auto colon = msg.find(": ");
            throw CotError(e.kind(), step.id, colon == std::string::npos ? msg : msg.substr(colon + 2));
        }
        bool finite = std::visit(
            [](const auto& x) {
                using T = std::decay_t<decltype(x)>;
                if constexpr (std::is_same_v<T, double>) {
                    return std::isfinite(x);
                } else if constexpr (std::is_same_v<T, NumberList>) {
                    return std::all_of(x.begin(), x.end(), [](double d) { return std::isfinite(d); });
                } else {
                    return true;
                }
            },
            v);
        if (!finite) throw CotError(ErrorKind::DomainError, step.id, step.func + " produced a non-finite number");
        last = &(results[step.id] = std::move(v));
        last_id = step.id;
    }
    return *last;
}

ordered_json to_json(const CotProgram& program) {
    ordered_json steps = ordered_json::array();
    for (const auto& s : program.steps) {
        ordered_json args = ordered_json::array();
        for (const auto& a : s.args) args.push_back(arg_to_json(a));
        ordered_json step;
        step["id"] = s.id;
        step["func"] = s.func;
        step["args"] = std::move(args);
        steps.push_back(std::move(step));
    }
    ordered_json j;
    j["steps"] = std::move(steps);
    return j;
}

std::string serialize(const CotProgram& program) { return to_json(program).dump(); }

CotProgram from_json(const json& j) {
    if (!j.is_object()) throw SchemaError("$", "program must be a JSON object");
    for (const auto& [key, v] : j.items()) {
        if (key != "steps") throw SchemaError(key, "unknown key");
    }
    if (!j.contains("steps")) throw SchemaError("steps", "missing key");
    const json& steps = j["steps"];
    if (!steps.is_array()) throw SchemaError("steps", "expected an array");
    CotProgram p;
    for (std::size_t i = 0; i < steps.size(); ++i) {
        const std::string path = step_path(i);
        const json& s = steps[i];
        if (!s.is_object()) throw SchemaError(path, "step must be an object");
        for (const auto& [key, v] : s.items()) {
            if (key != "id" && key != "func" && key != "args") throw SchemaError(path + "." + key, "unknown key");
        }
        for (const char* key : {"id", "func", "args"}) {
            if (!s.contains(key)) throw SchemaError(path + "." + key, "missing key");
        }
        if (!s["id"].is_number_integer()) throw SchemaError(path + ".id", "expected an integer");
        if (!s["func"].is_string()) throw SchemaError(path + ".func", "expected a string");
        if (!s["args"].is_array()) throw SchemaError(path + ".args", "expected an array");
        CotStep step;
        step.id = s["id"].get<int>();
        step.func = s["func"].get<std::string>();
        for (std::size_t a = 0; a < s["args"].size(); ++a) {
            step.args.push_back(arg_from_json(s["args"][a], path + ".args[" + std::to_string(a) + "]"));
        }
        p.steps.push_back(std::move(step));
    }
    return p;
}

CotProgram deserialize(std::string_view text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw SchemaError("$", std::string("invalid JSON: ") + e.what());
    }
    return from_json(j);
}

ProgramStats program_stats(const CotProgram& program) {
    std::set<std::string> funcs;
    for (const auto& s : program.steps) funcs.insert(s.func);
    return {program.steps.size(), funcs.size()};
}

}  // namespace chartforge::cot
