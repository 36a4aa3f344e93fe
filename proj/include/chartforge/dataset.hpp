#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "chartforge/chart_type.hpp"
#include "chartforge/metrics.hpp"
#include "chartforge/qa.hpp"
#include "chartforge/table_synth.hpp"

namespace chartforge {

enum class Task { ChartToTable, NumericalQa, ReferringQa, OpenQa, Summarization };

inline constexpr std::array<Task, 5> kAllTasks = {Task::ChartToTable, Task::NumericalQa, Task::ReferringQa,
                                                  Task::OpenQa, Task::Summarization};

std::string_view to_string(Task t);
std::optional<Task> task_from_string(std::string_view s);

/// Per-task proportions (indexed like kAllTasks), the record count and the
/// shard seed.
struct MixSpec {
    std::array<double, 5> proportions{};
    std::size_t total = 0;
    std::uint64_t seed = 0;
};

/// Proportions in line with the per-task volumes of the reference corpus.
MixSpec default_mix();

/// Throws InvalidParams unless proportions are non-negative and sum to 1
/// within 1e-9.
void validate(const MixSpec& mix);

/// Largest-remainder rounding; equal remainders go to the earlier task.
std::array<std::size_t, 5> realize_counts(const MixSpec& mix);

struct BuildConfig {
    MixSpec mix = default_mix();
    std::array<double, 9> chart_weights{};  // indexed like kAllChartTypes
    int width_px = 448;
    int height_px = 448;
    int jobs = 1;
    std::optional<std::string> templates_path;  // default: the built-in library
    std::vector<SynthConfig> synth;  // per-family overrides; others use defaults
};

BuildConfig default_build_config();

/// Keys: seed, total, mix {task: p}, chart_weights {type: w}, width, height,
/// jobs, templates, synth [SynthConfig]. Unset keys keep their defaults;
/// unknown keys throw SchemaError.
BuildConfig build_config_from_json(const nlohmann::json& j);
nlohmann::ordered_json to_json(const BuildConfig& c);

/// --seed, then the config's "seed", then CHARTFORGE_SEED, then 0.
std::uint64_t resolve_seed(std::optional<std::uint64_t> cli_seed, std::optional<std::uint64_t> config_seed);

/// One generated record before it is written.
struct GeneratedRecord {
    nlohmann::ordered_json manifest;  // the JSONL line
    std::vector<std::uint8_t> png;
    nlohmann::ordered_json boxes;
};

/// Task of every record index, fixed by the mix.
std::vector<Task> task_assignment(const MixSpec& mix);

/// Deterministic in (config, index, task). Throws Error naming the record on
/// failure.
GeneratedRecord generate_record(const BuildConfig& config, std::size_t index, Task task,
                                const TemplateLibrary& lib);

struct ShardSummary {
    std::filesystem::path manifest;
    std::array<std::size_t, 5> counts{};
    std::size_t records = 0;
};

/// Writes images/<task>/<id>.png, boxes/<id>.json, manifest.jsonl and
/// shard.json under `out_dir`. Each record is re-verified before it is
/// written; the first failure aborts with its id.
ShardSummary build_shard(const BuildConfig& config, const std::filesystem::path& out_dir);

struct Violation {
    std::string record_id;
    std::string check;
    std::string detail;
};

struct VerifyReport {
    std::size_t records = 0;
    std::array<std::size_t, 5> counts{};
    std::vector<Violation> violations;
};

/// Checks one manifest line against its files under `root`.
std::vector<Violation> verify_record(const nlohmann::json& record, const std::filesystem::path& root);

/// Re-executes COT responses, re-parses tables, decodes images and checks
/// geometry and grounding. With `regenerate`, every record is rebuilt from
/// shard.json and compared byte for byte.
VerifyReport verify_shard(const std::filesystem::path& manifest, bool regenerate = false);

nlohmann::ordered_json to_json(const VerifyReport& r);

// ---------------------------------------------------------------------------
// Evaluation

struct EvalConfig {
    RelaxedConfig relaxed;
    RmsConfig rms;
};

struct Prediction {
    std::string id;
    std::string text;
};

/// JSONL lines {"id": ..., "prediction": ...}. Throws SchemaError.
std::vector<Prediction> read_predictions(const std::filesystem::path& path);

/// Scores predictions against the manifest: relaxed correctness for QA
/// (a prediction that parses as a COT program is executed first), RMS F1
/// for chart-to-table and corpus BLEU for open QA and summaries. Records
/// without a prediction score 0. `task` restricts the report to one task.
nlohmann::ordered_json evaluate(const std::vector<Prediction>& predictions, const std::filesystem::path& manifest,
                                std::optional<Task> task = std::nullopt, const EvalConfig& cfg = {});

/// Manifest lines in file order.
std::vector<nlohmann::json> read_manifest(const std::filesystem::path& path);

/// The table stored in a manifest record.
DataTable record_table(const nlohmann::json& record);

}  // namespace chartforge
