#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "chartforge/error.hpp"
#include "chartforge/table.hpp"

namespace chartforge::cot {

// ---------------------------------------------------------------------------
// Values

enum class ValueKind { Number, Text, Bool, NumberList, TextList };

using NumberList = std::vector<double>;
using TextList = std::vector<std::string>;
using Value = std::variant<double, std::string, bool, NumberList, TextList>;

ValueKind kind_of(const Value& v);
std::string_view to_string(ValueKind k);

/// Answer text: numbers via format_number, booleans as Yes/No, lists
/// comma-separated.
std::string format_value(const Value& v);

nlohmann::json value_to_json(const Value& v);
/// Inverse of value_to_json for a known kind.
Value value_from_json(const nlohmann::json& j, ValueKind kind);

// ---------------------------------------------------------------------------
// Program IR

struct StepRef {
    int id = 0;
    friend bool operator==(const StepRef&, const StepRef&) = default;
};

/// Table lookup by label. retrieve_row uses `row`, retrieve_column uses
/// `col`, retrieve_cell uses both.
struct TableQuery {
    std::optional<std::string> row;
    std::optional<std::string> col;
    friend bool operator==(const TableQuery&, const TableQuery&) = default;
};

using Arg = std::variant<double, std::string, StepRef, TableQuery>;

struct CotStep {
    int id = 0;
    std::string func;
    std::vector<Arg> args;
    friend bool operator==(const CotStep&, const CotStep&) = default;
};

/// Straight-line program; the last step's value is the answer.
struct CotProgram {
    std::vector<CotStep> steps;
    friend bool operator==(const CotProgram&, const CotProgram&) = default;
};

// ---------------------------------------------------------------------------
// Registry

enum class ParamKind { Number, Text, Bool, NumberList, TextList, RowQuery, ColQuery, CellQuery };

std::string_view to_string(ParamKind k);

/// What a function receives for each parameter: a value, or the table query
/// for the three retrieval functions.
using Operand = std::variant<Value, TableQuery>;

using FunctionImpl = std::function<Value(std::span<const Operand>, const DataTable&)>;

struct FunctionDef {
    std::string name;
    std::vector<ParamKind> params;
    ValueKind result;
    FunctionImpl impl;
};

class FunctionRegistry {
public:
    /// The built-in function library.
    static const FunctionRegistry& standard();

    void add(FunctionDef def);
    const FunctionDef* find(std::string_view name) const;
    std::vector<std::string> names() const;

private:
    std::map<std::string, FunctionDef, std::less<>> defs_;
};

// ---------------------------------------------------------------------------
// Errors and diagnostics

enum class ErrorKind {
    UnknownFunction,
    ArityMismatch,
    TypeMismatch,
    LookupMiss,
    DivisionByZero,
    UndefinedCorrelation,
    DomainError,      // empty list, index out of range, length mismatch, overflow
    MalformedProgram  // empty program, duplicate / non-increasing ids, bad refs
};

std::string_view to_string(ErrorKind k);

/// True for failures that depend on table values rather than program shape.
bool is_value_dependent(ErrorKind k);

class CotError : public Error {
public:
    CotError(ErrorKind kind, int step_id, const std::string& what);
    ErrorKind kind() const noexcept { return kind_; }
    int step_id() const noexcept { return step_id_; }

private:
    ErrorKind kind_;
    int step_id_;
};

enum class DiagnosticKind {
    EmptyProgram,
    NonIncreasingId,
    UnknownFunction,
    ArityMismatch,
    ArgumentKindMismatch,
    ForwardReference,
    DanglingReference,
};

std::string_view to_string(DiagnosticKind k);

struct Diagnostic {
    DiagnosticKind kind;
    int step_id;
    std::string path;  // e.g. steps[2].args[0]
    std::string message;
};

// ---------------------------------------------------------------------------
// Operations

/// Evaluates steps in order against `table`; the last value is returned.
/// Throws CotError carrying the failing step id.
Value execute(const CotProgram& program, const DataTable& table,
              const FunctionRegistry& registry = FunctionRegistry::standard());

/// All static problems, without touching a table. Return types are fixed per
/// function, so an empty result means only value-dependent errors remain.
std::vector<Diagnostic> validate(const CotProgram& program,
                                 const FunctionRegistry& registry = FunctionRegistry::standard());

/// Canonical compact JSON:
/// {"steps":[{"id":1,"func":"retrieve_column","args":[{"col":"Y"}]}, ...]}
std::string serialize(const CotProgram& program);
nlohmann::ordered_json to_json(const CotProgram& program);

/// Strict parse of the canonical form; throws SchemaError with the path of
/// the first violation (missing key, unknown key, wrong type).
CotProgram deserialize(std::string_view text);
CotProgram from_json(const nlohmann::json& j);

struct ProgramStats {
    std::size_t steps = 0;
    std::size_t distinct_functions = 0;
    friend bool operator==(const ProgramStats&, const ProgramStats&) = default;
};

ProgramStats program_stats(const CotProgram& program);

}  // namespace chartforge::cot
