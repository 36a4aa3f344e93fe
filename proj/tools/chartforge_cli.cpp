// Command-line front end. JSON goes to stdout, human-readable text to
// stderr. Exit codes: 0 success, 1 runtime failure, 2 usage error.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "chartforge/cot.hpp"
#include "chartforge/dataset.hpp"
#include "chartforge/qa.hpp"
#include "chartforge/render.hpp"
#include "chartforge/style.hpp"
#include "chartforge/table_synth.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using ojson = nlohmann::ordered_json;
using namespace chartforge;

namespace {

std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot read " + path);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::string& path, const std::string& data) {
    std::ofstream out(path, std::ios::binary);
    out.write(data.data(), static_cast<std::streamsize>(data.size()));
    if (!out) throw Error("cannot write " + path);
}

/// A markdown table, or a JSON object carrying "table" (markdown) and an
/// optional "table_meta", such as a manifest record.
DataTable load_table(const std::string& path) {
    std::string text = read_text(path);
    auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '{') return record_table(json::parse(text));
    return parse_markdown_table(text);
}

ChartType parse_type(const std::string& s) {
    auto t = chart_type_from_string(s);
    if (!t) throw CLI::ValidationError("--type", "unknown chart type " + s);
    return *t;
}

struct Common {
    std::optional<std::uint64_t> seed;
};

int cmd_synth(const std::string& config_path, const Common& c, const std::string& out, std::optional<int> jobs,
              std::optional<std::size_t> total) {
    json j = json::parse(read_text(config_path));
    std::optional<std::uint64_t> config_seed;
    if (j.is_object() && j.contains("seed")) config_seed = j["seed"].get<std::uint64_t>();
    BuildConfig cfg = build_config_from_json(j);
    cfg.mix.seed = resolve_seed(c.seed, config_seed);
    if (jobs) cfg.jobs = *jobs;
    if (total) cfg.mix.total = *total;
    std::cerr << "building " << cfg.mix.total << " records with seed " << cfg.mix.seed << " into " << out << "\n";
    ShardSummary s = build_shard(cfg, out);
    ojson r;
    r["manifest"] = s.manifest.string();
    r["records"] = s.records;
    r["seed"] = cfg.mix.seed;
    ojson counts;
    for (std::size_t i = 0; i < 5; ++i) counts[std::string(to_string(kAllTasks[i]))] = s.counts[i];
    r["counts"] = counts;
    std::cout << r.dump() << "\n";
    std::cerr << "manifest: " << s.manifest.string() << "\n";
    return 0;
}

int cmd_render(const std::string& table_path, const std::string& type_name, const Common& c,
               const std::string& style, int width, int height, const std::string& out, const std::string& boxes) {
    ChartType type = parse_type(type_name);
    std::uint64_t seed = resolve_seed(c.seed, std::nullopt);
    DataTable table = table_path.empty() ? synth_table(default_synth_config(type), seed) : load_table(table_path);
    StyleSpec spec_style = style.empty() ? style_sample(seed) : style_from_id(style);
    RenderResult rr = render(table, ChartSpec{type, spec_style, width, height}, seed);
    write_file(out, std::string(rr.png.begin(), rr.png.end()));
    ojson r;
    r["image"] = out;
    r["style_id"] = style_id(spec_style);
    r["elements"] = rr.element_boxes.size();
    if (!boxes.empty()) {
        write_file(boxes, element_boxes_json(rr).dump() + "\n");
        r["boxes"] = boxes;
    } else {
        r["element_boxes"] = element_boxes_json(rr);
    }
    std::cout << r.dump() << "\n";
    std::cerr << "rendered " << to_string(type) << " chart with " << rr.element_boxes.size() << " elements to " << out
              << "\n";
    return 0;
}

int cmd_gen_qa(const std::string& table_path, const std::string& type_name, const std::string& task_name,
               const std::string& template_id, int count, const Common& c, const std::string& image_out) {
    ChartType type = parse_type(type_name);
    QaTask task = task_name == "referring" ? QaTask::Referring : QaTask::Numerical;
    std::uint64_t seed = resolve_seed(c.seed, std::nullopt);
    DataTable table = table_path.empty() ? synth_table(default_synth_config(type), seed) : load_table(table_path);
    RenderResult rr = render(table, ChartSpec{type, style_sample(seed), kDefaultCanvasSize, kDefaultCanvasSize}, seed);

    std::vector<const QaTemplate*> pool;
    if (!template_id.empty()) {
        const QaTemplate* t = TemplateLibrary::builtin().find(template_id);
        if (!t) throw Error("unknown template " + template_id);
        pool.push_back(t);
        task = t->task;
    } else {
        pool = enumerate_applicable(table, type, task);
    }
    if (pool.empty()) throw SlotUnsatisfiable("no template applies to this table");

    int written = 0;
    Rng rng = make_rng(seed, 0x6E0A);
    for (int i = 0; i < count * 4 && written < count; ++i) {
        const QaTemplate* t = pool[uniform_int<std::size_t>(rng, 0, pool.size() - 1)];
        InstantiationContext ctx;
        ctx.table = &table;
        ctx.chart_type = type;
        ctx.seed = mix_seed(seed, static_cast<std::uint64_t>(i));
        ctx.render = &rr;
        QaInstance inst;
        try {
            inst = task == QaTask::Referring ? instantiate_referring(*t, ctx) : instantiate(*t, ctx);
        } catch (const SlotUnsatisfiable& e) {
            if (!template_id.empty()) throw;
            continue;
        }
        ojson r;
        r["template_id"] = inst.template_id;
        r["variant"] = inst.variant;
        r["question"] = inst.question;
        r["program"] = cot::to_json(inst.program);
        r["answer"] = cot::format_value(inst.answer);
        if (task == QaTask::Referring && !image_out.empty() && written == 0) {
            RenderResult marked = apply_refer_marks(rr, inst.bindings.marks, ctx.seed);
            write_file(image_out, std::string(marked.png.begin(), marked.png.end()));
            r["image"] = image_out;
        }
        std::cout << r.dump() << "\n";
        std::cerr << inst.template_id << ": " << inst.question << " -> " << r["answer"].get<std::string>() << "\n";
        ++written;
    }
    if (written < count) throw SlotUnsatisfiable("only " + std::to_string(written) + " questions could be generated");
    return 0;
}

int cmd_exec_cot(const std::string& program_path, const std::string& table_path) {
    cot::CotProgram p = cot::deserialize(read_text(program_path));
    DataTable table = load_table(table_path);
    cot::Value v = cot::execute(p, table);
    ojson r;
    r["kind"] = cot::to_string(cot::kind_of(v));
    r["value"] = ojson::parse(cot::value_to_json(v).dump());
    r["text"] = cot::format_value(v);
    std::cout << r.dump() << "\n";
    std::cerr << cot::format_value(v) << "\n";
    return 0;
}

int cmd_eval(const std::string& predictions, const std::string& manifest, const std::string& task_name,
             const EvalConfig& cfg, bool summary_only) {
    std::optional<Task> task;
    if (!task_name.empty()) {
        task = task_from_string(task_name);
        if (!task) throw CLI::ValidationError("--task", "unknown task " + task_name);
    }
    ojson report = evaluate(read_predictions(predictions), manifest, task, cfg);
    for (const auto& [name, s] : report["tasks"].items()) {
        std::cerr << name << ": " << s.dump() << "\n";
    }
    if (summary_only) report.erase("records");
    std::cout << report.dump() << "\n";
    return 0;
}

int cmd_verify(const std::string& manifest, bool regenerate) {
    fs::path m = manifest;
    if (fs::is_directory(m)) m /= "manifest.jsonl";
    VerifyReport r = verify_shard(m, regenerate);
    std::cout << to_json(r).dump() << "\n";
    std::cerr << r.records << " records, " << r.violations.size() << " violations\n";
    for (const auto& v : r.violations) std::cerr << "  " << v.record_id << " [" << v.check << "] " << v.detail << "\n";
    return r.violations.empty() ? 0 : 1;
}

int cmd_stats(const std::string& templates_path) {
    TemplateLibrary custom;
    const TemplateLibrary* lib = &TemplateLibrary::builtin();
    if (!templates_path.empty()) {
        custom = TemplateLibrary::load_file(templates_path);
        lib = &custom;
    }
    ojson r;
    std::fprintf(stderr, "%-10s %6s %8s %10s %6s\n", "task", "count", "tokens", "cot_steps", "funcs");
    for (QaTask t : {QaTask::Numerical, QaTask::Referring}) {
        LibraryStats s = library_stats(t, *lib);
        r[std::string(to_string(t))] = ojson{{"template_count", s.template_count},
                                             {"mean_question_tokens", s.mean_question_tokens},
                                             {"mean_cot_steps", s.mean_cot_steps},
                                             {"mean_distinct_functions", s.mean_distinct_functions}};
        std::fprintf(stderr, "%-10s %6zu %8.2f %10.2f %6.2f\n", std::string(to_string(t)).c_str(), s.template_count,
                     s.mean_question_tokens, s.mean_cot_steps, s.mean_distinct_functions);
    }
    DataTable generic = reference_table(ChartType::Bar);
    r["applicable_to_reference_bar"] = ojson{
        {"numerical", enumerate_applicable(generic, ChartType::Bar, QaTask::Numerical, *lib).size()},
        {"referring", enumerate_applicable(generic, ChartType::Bar, QaTask::Referring, *lib).size()}};
    std::cout << r.dump() << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Chart dataset synthesis and evaluation"};
    app.require_subcommand(1);
    Common common;
    app.add_option("--seed", common.seed, "Seed; overrides the config file and CHARTFORGE_SEED");

    auto* synth = app.add_subcommand("synth", "Build a dataset shard");
    std::string config_path, out_dir;
    std::optional<int> jobs;
    std::optional<std::size_t> total;
    synth->add_option("--config", config_path, "Build config (JSON)")->required()->check(CLI::ExistingFile);
    synth->add_option("--out", out_dir, "Output directory")->required();
    synth->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);
    synth->add_option("--total", total, "Record count override");
    synth->add_option("--seed", common.seed, "Seed");

    auto* rend = app.add_subcommand("render", "Render one chart");
    std::string table_path, type_name = "bar", style, image_out, boxes_out;
    int width = kDefaultCanvasSize, height = kDefaultCanvasSize;
    rend->add_option("--table", table_path, "Markdown table (synthesized when omitted)")->check(CLI::ExistingFile);
    rend->add_option("--type", type_name, "Chart type")->required();
    rend->add_option("--style", style, "Style id, e.g. p0.f0.l0.m0.g0.b0.w2.grid1");
    rend->add_option("--width", width, "Width in pixels");
    rend->add_option("--height", height, "Height in pixels");
    rend->add_option("--out", image_out, "PNG path")->required();
    rend->add_option("--boxes", boxes_out, "Element box sidecar path");
    rend->add_option("--seed", common.seed, "Seed");

    auto* genqa = app.add_subcommand("gen-qa", "Instantiate QA templates against a table");
    std::string task_name = "numerical", template_id;
    int count = 1;
    genqa->add_option("--table", table_path, "Markdown table (synthesized when omitted)")->check(CLI::ExistingFile);
    genqa->add_option("--type", type_name, "Chart type");
    genqa->add_option("--task", task_name, "numerical or referring")->check(CLI::IsMember({"numerical", "referring"}));
    genqa->add_option("--template", template_id, "Template id");
    genqa->add_option("--count", count, "Questions to generate")->check(CLI::PositiveNumber);
    genqa->add_option("--image", image_out, "Write the marked chart of the first referring question here");
    genqa->add_option("--seed", common.seed, "Seed");

    auto* exec = app.add_subcommand("exec-cot", "Execute a COT program against a table");
    std::string program_path;
    exec->add_option("--program", program_path, "COT program (JSON)")->required()->check(CLI::ExistingFile);
    exec->add_option("--table", table_path, "Markdown table or manifest record")->required()->check(CLI::ExistingFile);

    auto* eval = app.add_subcommand("eval", "Score predictions against a manifest");
    std::string predictions, manifest, eval_task;
    EvalConfig eval_cfg;
    bool summary_only = false;
    eval->add_option("--predictions", predictions, "JSONL of {id, prediction}")->required()->check(CLI::ExistingFile);
    eval->add_option("--manifest", manifest, "Shard manifest")->required()->check(CLI::ExistingFile);
    eval->add_option("--task", eval_task, "Restrict to one task");
    eval->add_option("--tolerance", eval_cfg.relaxed.tolerance, "Relaxed correctness tolerance");
    eval->add_option("--numeric-threshold", eval_cfg.rms.numeric_threshold, "RMS numeric threshold");
    eval->add_option("--text-threshold", eval_cfg.rms.text_threshold, "RMS text threshold");
    eval->add_flag("--summary-only", summary_only, "Omit per-record scores");

    auto* verify = app.add_subcommand("verify", "Check every record of a shard");
    bool regenerate = false;
    verify->add_option("--manifest", manifest, "Manifest file or shard directory")->required()->check(CLI::ExistingPath);
    verify->add_flag("--regenerate", regenerate, "Rebuild each record from shard.json and compare bytes");

    auto* stats = app.add_subcommand("stats", "Template library statistics");
    std::string templates_path;
    stats->add_option("--templates", templates_path, "Template file (default: built-in)")->check(CLI::ExistingFile);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e, std::cerr, std::cerr);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*synth) return cmd_synth(config_path, common, out_dir, jobs, total);
        if (*rend) return cmd_render(table_path, type_name, common, style, width, height, image_out, boxes_out);
        if (*genqa) return cmd_gen_qa(table_path, type_name, task_name, template_id, count, common, image_out);
        if (*exec) return cmd_exec_cot(program_path, table_path);
        if (*eval) return cmd_eval(predictions, manifest, eval_task, eval_cfg, summary_only);
        if (*verify) return cmd_verify(manifest, regenerate);
        if (*stats) return cmd_stats(templates_path);
    } catch (const CLI::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
