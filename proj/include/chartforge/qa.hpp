#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "chartforge/chart_type.hpp"
#include "chartforge/cot.hpp"
#include "chartforge/render.hpp"
#include "chartforge/table.hpp"

namespace chartforge {

enum class QaTask { Numerical, Referring };

std::string_view to_string(QaTask t);

/// Requirements of one mark slot in a referring template.
struct MarkSlot {
    std::optional<MarkKind> kind;  // nullopt: box or arrow, drawn at random
    bool pair = false;             // the mark singles out two elements
};

/// One program step of a template. Arguments are kept in their JSON form;
/// strings of the form "<...>" are slots resolved at instantiation.
struct TemplateStep {
    std::string func;
    std::vector<nlohmann::json> args;
};

struct QaTemplate {
    std::string id;
    QaTask task = QaTask::Numerical;
    std::string category;
    std::string family;  // names the computation; shared by templates that compute the same thing
    std::vector<ChartType> chart_types;
    std::vector<std::string> variants;  // paraphrases; the first is canonical
    std::vector<TemplateStep> program;
    cot::ValueKind answer_kind = cot::ValueKind::Number;
    std::vector<MarkSlot> marks;
    std::string threshold_from = "<legend label1>";

    // Derived from the slots the template uses.
    int legends_needed = 0;
    int ticks_needed = 0;
    int min_series = 1;
    int max_series = 0;  // 0: unbounded
    int min_ticks = 1;
    bool uses_k = false;
    bool uses_threshold = false;

    bool applies_to(ChartType t) const;
};

/// Parsed, checked template library.
class TemplateLibrary {
public:
    /// The library embedded in the binary.
    static const TemplateLibrary& builtin();

    /// Throws SchemaError naming the offending template field.
    static TemplateLibrary from_json(const nlohmann::json& j);
    static TemplateLibrary load_file(const std::string& path);

    std::span<const QaTemplate> templates() const { return templates_; }
    std::vector<const QaTemplate*> by_task(QaTask task) const;
    const QaTemplate* find(std::string_view id) const;

private:
    std::vector<QaTemplate> templates_;
};

/// Slot values chosen for one instantiation.
struct SlotBindings {
    std::vector<std::size_t> legends;  // column indices, distinct
    std::vector<std::size_t> ticks;    // row indices, strictly ascending
    int k = 0;
    std::optional<double> threshold;
    std::vector<ReferMark> marks;
};

struct InstantiationContext {
    const DataTable* table = nullptr;
    ChartType chart_type = ChartType::Bar;
    std::uint64_t seed = 0;
    /// Referring task: marks to phrase questions about, in slot order. When
    /// empty, marks are sampled over the elements of `render` (or of the
    /// table shape when no render is given).
    std::vector<ReferMark> marks;
    const RenderResult* render = nullptr;
    /// Forces a phrasing variant; otherwise one is drawn from the seed.
    /// The variant never influences slot choices.
    std::optional<int> variant;
};

struct QaInstance {
    std::string template_id;
    std::string family;
    std::string category;
    int variant = 0;
    std::string question;
    cot::CotProgram program;
    cot::Value answer;
    SlotBindings bindings;
};

/// Fills a numerical template. Value-dependent failures (division by zero,
/// flat series, ...) are retried with fresh slot choices up to 16 times.
/// Throws SlotUnsatisfiable when the table cannot bind the slots.
QaInstance instantiate(const QaTemplate& tmpl, const InstantiationContext& ctx);

/// Fills a referring template; questions name marks by color and kind.
/// Throws SlotUnsatisfiable (too few marks or elements) and UnknownTarget
/// (a given mark outside the table or the render).
QaInstance instantiate_referring(const QaTemplate& tmpl, const InstantiationContext& ctx);

/// Templates for `chart_type` and `task` whose structural slot requirements
/// (series count, tick count, mark count) `table` meets.
std::vector<const QaTemplate*> enumerate_applicable(const DataTable& table, ChartType chart_type, QaTask task,
                                                    const TemplateLibrary& lib = TemplateLibrary::builtin());

struct LibraryStats {
    std::size_t template_count = 0;
    double mean_question_tokens = 0.0;
    double mean_cot_steps = 0.0;
    double mean_distinct_functions = 0.0;
};

/// One canonical instantiation per template on a fixed reference table of
/// its first chart type; tokens are whitespace-separated words.
LibraryStats library_stats(QaTask task, const TemplateLibrary& lib = TemplateLibrary::builtin());

/// The reference table used by library_stats for `type`.
DataTable reference_table(ChartType type);

/// English plural of a noun phrase (inflects the head word).
std::string pluralize(std::string_view phrase);

/// "1st", "2nd", "3rd", "4th", ...
std::string ordinal(int n);

/// Word used for one drawn element: bar, point, slice, bubble, ...
std::string_view element_noun(ChartType t);

/// Natural-language handle for a mark, e.g. "the bar in the red box".
std::string mark_phrase(const ReferMark& mark, ChartType t);

}  // namespace chartforge
