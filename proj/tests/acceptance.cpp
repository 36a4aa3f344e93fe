// Acceptance run: one PASS/FAIL line per criterion. Exit status is non-zero
// when any criterion fails.

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <thread>

#include <nlohmann/json.hpp>

#include "chartforge/dataset.hpp"
#include "chartforge/metrics.hpp"
#include "chartforge/png_io.hpp"
#include "chartforge/qa.hpp"
#include "chartforge/render.hpp"
#include "chartforge/table_synth.hpp"
#include "invariants.hpp"
#include "oracle.hpp"
#include "random_tables.hpp"
#include "rms_oracle.hpp"

using namespace chartforge;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

// Pinned limits.
constexpr int kOracleCases = 1000;
constexpr double kOracleSeconds = 10.0;
constexpr std::size_t kMinNumerical = 101;
constexpr std::size_t kMinReferring = 114;
constexpr double kMinSteps = 3.0;
constexpr double kMinDistinct = 2.5;
constexpr int kInvarianceTables = 500;
constexpr int kOraclePairs = 200;
constexpr double kRmsTolerance = 1e-9;
constexpr int kSpecsPerFamily = 200;
constexpr int kStyles = 5;
constexpr std::size_t kShardRecords = 1000;
constexpr double kShardSeconds = 300.0;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
    bool pass = false;
    std::string detail;
};

// ---------------------------------------------------------------------------

Outcome cot_oracle() {
    const auto& lib = TemplateLibrary::builtin();
    std::set<std::pair<QaTask, std::string>> want, seen;
    for (const auto& t : lib.templates()) want.insert({t.task, t.category});
    std::set<ChartType> types;

    int agree = 0, done = 0;
    std::string first_bad;
    auto t0 = Clock::now();
    for (std::uint64_t seed = 0; done < kOracleCases; ++seed) {
        Rng rng = make_rng(seed, 0xACCE);
        ChartType type = kAllChartTypes[static_cast<std::size_t>(done) % kAllChartTypes.size()];
        QaTask task = (done / 9) % 2 == 0 ? QaTask::Numerical : QaTask::Referring;
        DataTable table = synth_table(default_synth_config(type), mix_seed(seed, 1));
        auto pool = enumerate_applicable(table, type, task);
        if (pool.empty()) continue;
        // Category first, then a template inside it, so rare categories show up.
        std::map<std::string, std::vector<const QaTemplate*>> by_cat;
        for (const auto* t : pool) by_cat[t->category].push_back(t);
        auto cat = std::next(by_cat.begin(), static_cast<long>(uniform_int<std::size_t>(rng, 0, by_cat.size() - 1)));
        const QaTemplate* tmpl = pick(rng, cat->second);

        InstantiationContext ctx;
        ctx.table = &table;
        ctx.chart_type = type;
        ctx.seed = mix_seed(seed, 2);
        QaInstance inst;
        try {
            inst = task == QaTask::Numerical ? instantiate(*tmpl, ctx) : instantiate_referring(*tmpl, ctx);
        } catch (const SlotUnsatisfiable&) {
            continue;
        }
        ++done;
        seen.insert({task, tmpl->category});
        types.insert(type);
        cot::Value got = cot::execute(inst.program, table);
        cot::Value expect = oracle::answer(tmpl->family, table, inst.bindings);
        if (got == expect && got == inst.answer) {
            ++agree;
        } else if (first_bad.empty()) {
            first_bad = tmpl->id + " seed " + std::to_string(seed) + ": " + cot::format_value(got) + " vs " +
                        cot::format_value(expect);
        }
    }
    double secs = seconds_since(t0);
    bool covered = seen == want && types.size() == kAllChartTypes.size();
    std::ostringstream os;
    os << agree << "/" << done << " agree, " << seen.size() << "/" << want.size() << " task categories, "
       << types.size() << "/9 chart types, " << secs << " s (limit " << kOracleSeconds << " s)";
    if (!first_bad.empty()) os << "; first mismatch " << first_bad;
    return {agree == kOracleCases && covered && secs < kOracleSeconds, os.str()};
}

Outcome library_structure() {
    auto num = library_stats(QaTask::Numerical);
    auto ref = library_stats(QaTask::Referring);
    std::ostringstream os;
    os << num.template_count << " numerical (>= " << kMinNumerical << "), " << ref.template_count << " referring (>= "
       << kMinReferring << "), mean steps " << num.mean_cot_steps << " (>= " << kMinSteps << "), mean distinct functions "
       << num.mean_distinct_functions << " (>= " << kMinDistinct << ")";
    bool ok = num.template_count >= kMinNumerical && ref.template_count >= kMinReferring &&
              num.mean_cot_steps >= kMinSteps && num.mean_distinct_functions >= kMinDistinct;
    return {ok, os.str()};
}

Outcome rms_suite() {
    Rng rng = make_rng(31337);
    int exact = 0;
    for (int i = 0; i < kInvarianceTables; ++i) {
        auto gold = testgen::table(rng, uniform_int<std::size_t>(rng, 1, 6), uniform_int<std::size_t>(rng, 1, 6));
        bool ok = rms_f1(gold, gold) == 1.0 && rms_f1(testgen::random_permutation(rng, gold), gold) == 1.0 &&
                  rms_f1(transpose(gold), gold) == 1.0 &&
                  rms_f1(transpose(testgen::random_permutation(rng, gold)), gold) == 1.0;
        exact += ok;
    }
    int matched = 0, checked = 0, skipped = 0;
    double worst = 0.0;
    while (checked < kOraclePairs) {
        auto gold = testgen::table(rng, uniform_int<std::size_t>(rng, 1, 4), uniform_int<std::size_t>(rng, 1, 4));
        auto pred = testgen::corrupt(rng, gold);
        auto ref = rms_oracle::score(pred, gold);
        if (ref.ambiguous) {
            ++skipped;
            continue;
        }
        double diff = std::fabs(rms_f1(pred, gold) - ref.f1);
        worst = std::max(worst, diff);
        matched += diff <= kRmsTolerance;
        ++checked;
    }
    std::ostringstream os;
    os << exact << "/" << kInvarianceTables << " tables exact under identity/permutation/transpose, " << matched << "/"
       << kOraclePairs << " corrupted pairs within " << kRmsTolerance << " of exhaustive search (max diff " << worst
       << ", " << skipped << " tied-assignment pairs redrawn)";
    return {exact == kInvarianceTables && matched == kOraclePairs, os.str()};
}

Outcome relaxed_suite() {
    int ok = 0, total = 0;
    auto expect = [&](bool cond) {
        ++total;
        ok += cond;
    };
    expect(relaxed_correct("105", "100"));
    expect(!relaxed_correct("105.0001", "100"));
    expect(relaxed_correct("95", "100"));
    expect(!relaxed_correct("94.9999", "100"));
    expect(relaxed_correct("0", "0"));
    expect(!relaxed_correct("0.0001", "0"));
    expect(!relaxed_correct("-0.0001", "0"));
    expect(relaxed_correct("YES", "yes"));
    expect(relaxed_correct("  Germany ", "germany"));
    expect(!relaxed_correct("Germanyy", "germany"));

    std::ifstream in(CHARTFORGE_TEST_DATA_DIR "/relaxed_golden.json");
    auto cases = nlohmann::json::parse(in);
    int golden = 0;
    for (const auto& c : cases) {
        RelaxedConfig cfg{c.value("tolerance", 0.05)};
        golden += relaxed_correct(c["pred"].get<std::string>(), c["gold"].get<std::string>(), cfg) == c["expected"].get<bool>();
    }
    std::ostringstream os;
    os << ok << "/" << total << " boundary cases, golden file " << golden << "/" << cases.size();
    return {ok == total && golden == static_cast<int>(cases.size()) && cases.size() == 50, os.str()};
}

Outcome synthesis_invariants() {
    int violations = 0, specs = 0;
    std::string first;
    for (auto type : kAllChartTypes) {
        Rng rng = make_rng(777, static_cast<std::uint64_t>(type));
        for (int i = 0; i < kSpecsPerFamily; ++i) {
            SynthConfig cfg = default_synth_config(type);
            int lo = uniform_int(rng, std::max(cfg.rows.lo, 2), cfg.rows.hi);
            cfg.rows = {lo, uniform_int(rng, lo, cfg.rows.hi)};
            double vlo = uniform_real(rng, -100.0, 100.0);
            cfg.value_range = {vlo, vlo + uniform_real(rng, 1.0, 500.0)};
            if (type == ChartType::Radar) cfg.value_range = {std::max(0.0, vlo), std::max(0.0, vlo) + 50.0};
            cfg.decimals = uniform_int(rng, 0, 3);
            cfg.n_samples = uniform_int<std::size_t>(rng, 1, 5000);
            DataTable t = synth_table(cfg, rng());
            ++specs;
            auto bad = invariants::check(t, type, cfg.n_samples);
            violations += static_cast<int>(bad.size());
            if (!bad.empty() && first.empty()) first = bad.front();
        }
    }
    std::ostringstream os;
    os << specs << " specs (" << kSpecsPerFamily << " per family), " << violations << " violations";
    if (!first.empty()) os << "; first: " << first;
    return {violations == 0 && specs == kSpecsPerFamily * 9, os.str()};
}

// Height of the solid run through the middle of a bar, read off the raster.
int raster_bar_height(const RenderResult& r, const PixelRect& rect) {
    int x = rect.x + rect.w / 2;
    int ymid = rect.y + rect.h / 2;
    auto px = [&](int y) {
        std::size_t i = 3 * (static_cast<std::size_t>(y) * static_cast<std::size_t>(r.width) + static_cast<std::size_t>(x));
        return std::array<std::uint8_t, 3>{r.rgb[i], r.rgb[i + 1], r.rgb[i + 2]};
    };
    auto c = px(ymid);
    int top = ymid, bottom = ymid;
    while (top > 0 && px(top - 1) == c) --top;
    while (bottom + 1 < r.height && px(bottom + 1) == c) ++bottom;
    return bottom - top + 1;
}

Outcome rendering_soundness() {
    int renders = 0, out_of_bounds = 0, nondeterministic = 0, misordered = 0, failures = 0;
    std::string first;
    for (auto type : kAllChartTypes) {
        for (int s = 1; s <= kStyles; ++s) {
            auto seed = static_cast<std::uint64_t>(100 * s + static_cast<int>(type));
            try {
                DataTable table = synth_table(default_synth_config(type), seed);
                ChartSpec spec{type, style_sample(seed)};
                RenderResult r = render(table, spec, seed);
                ++renders;
                if (render(table, spec, seed).png != r.png) ++nondeterministic;
                if (decode_png(r.png).pixels != r.rgb) ++nondeterministic;
                for (const auto& b : r.element_boxes) out_of_bounds += !b.rect.within(r.width, r.height);
                for (const auto& l : r.legend) out_of_bounds += !l.rect.within(r.width, r.height);

                Rng rng = make_rng(seed, 9);
                std::vector<ReferMark> marks;
                for (const auto& b : r.element_boxes) {
                    MarkKind k = coin(rng) ? MarkKind::Box : MarkKind::Arrow;
                    marks.push_back(sample_refer_mark(rng, k, b.ref));
                }
                auto pair = sample_refer_mark(rng, MarkKind::Box, r.element_boxes.front().ref);
                pair.second = r.element_boxes.back().ref;
                marks.push_back(pair);
                pair.kind = MarkKind::Arrow;
                marks.push_back(pair);
                RenderResult m = apply_refer_marks(r, marks, seed);
                for (const auto& pm : m.marks) out_of_bounds += !pm.rect.within(m.width, m.height);
                if (apply_refer_marks(r, marks, seed).png != m.png) ++nondeterministic;
            } catch (const std::exception& e) {
                ++failures;
                if (first.empty()) first = std::string(to_string(type)) + ": " + e.what();
            }
        }
    }
    // Single-series bars (no legend over the plot), one per style.
    for (int s = 1; s <= kStyles; ++s) {
        auto cfg = default_synth_config(ChartType::Bar);
        cfg.cols = {1, 1};
        cfg.rows = {6, 8};
        auto seed = static_cast<std::uint64_t>(900 + s);
        DataTable table = synth_table(cfg, seed);
        RenderResult r = render(table, ChartSpec{ChartType::Bar, style_sample(seed)}, seed);
        double vmax = 0.0;
        int hmax = 0;
        for (std::size_t i = 0; i < table.rows(); ++i) vmax = std::max(vmax, table.at(i, 0).as_number());
        std::vector<int> h(table.rows());
        for (std::size_t i = 0; i < table.rows(); ++i) {
            h[i] = raster_bar_height(r, r.find(ElementRef{0, static_cast<int>(i)})->rect);
            hmax = std::max(hmax, h[i]);
        }
        double unit = vmax / hmax;  // value per pixel
        for (std::size_t a = 0; a < table.rows(); ++a) {
            for (std::size_t b = 0; b < table.rows(); ++b) {
                double va = table.at(a, 0).as_number(), vb = table.at(b, 0).as_number();
                if (va < vb && h[a] > h[b]) ++misordered;
                if (vb - va > 2.0 * unit && h[a] >= h[b]) ++misordered;
            }
        }
    }
    std::ostringstream os;
    os << renders << "/" << 9 * kStyles << " type x style renders, " << out_of_bounds << " out-of-bounds boxes or marks, "
       << nondeterministic << " non-identical reruns, " << misordered << " misordered bar pairs over " << kStyles
       << " styles";
    if (!first.empty()) os << "; first failure " << first;
    return {renders == 9 * kStyles && out_of_bounds == 0 && nondeterministic == 0 && misordered == 0 && failures == 0,
            os.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Files under `a` that are missing from `b` or differ byte for byte.
int tree_differences(const fs::path& a, const fs::path& b) {
    int diff = 0;
    for (const auto& e : fs::recursive_directory_iterator(a)) {
        if (!e.is_regular_file()) continue;
        auto rel = fs::relative(e.path(), a);
        if (!fs::exists(b / rel) || slurp(e.path()) != slurp(b / rel)) ++diff;
    }
    return diff;
}

struct ShardRun {
    fs::path dir;
    bool built = false;
};

Outcome end_to_end(ShardRun& shard) {
    fs::path root = fs::temp_directory_path() / "chartforge_acceptance";
    fs::remove_all(root);
    shard.dir = root / "shard";
    BuildConfig cfg = default_build_config();
    cfg.mix.total = kShardRecords;
    cfg.mix.seed = 20240601;
    cfg.jobs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));

    auto t0 = Clock::now();
    ShardSummary sum = build_shard(cfg, shard.dir);
    double build_secs = seconds_since(t0);
    shard.built = true;

    VerifyReport rep = verify_shard(sum.manifest, true);

    // Independent rebuild from the seeds and config stored with the shard.
    auto stored = nlohmann::json::parse(slurp(shard.dir / "shard.json"));
    BuildConfig again = build_config_from_json(stored["config"]);
    fs::path rebuilt = root / "rebuilt";
    build_shard(again, rebuilt);
    int diffs = tree_differences(shard.dir, rebuilt) + tree_differences(rebuilt, shard.dir);

    std::size_t tasks_present = 0;
    for (auto c : sum.counts) tasks_present += c > 0;
    std::ostringstream os;
    os << sum.records << " records over " << tasks_present << " tasks built in " << build_secs << " s (limit "
       << kShardSeconds << " s), verify: " << rep.violations.size() << " violations, rebuild: " << diffs
       << " differing files";
    if (!rep.violations.empty()) {
        os << "; first " << rep.violations[0].record_id << " [" << rep.violations[0].check << "] "
           << rep.violations[0].detail;
    }
    bool ok = sum.records == kShardRecords && tasks_present == 5 && build_secs < kShardSeconds &&
              rep.violations.empty() && diffs == 0;
    return {ok, os.str()};
}

struct RunResult {
    int code = -1;
    std::string out;
};

RunResult run_cli(const std::string& args) {
    std::string cmd = std::string(CHARTFORGE_CLI_PATH) + " " + args + " 2>/dev/null";
    RunResult r;
    FILE* p = ::popen(cmd.c_str(), "r");
    if (!p) return r;
    char buf[4096];
    std::size_t n;
    while ((n = std::fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
    int status = ::pclose(p);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

Outcome self_evaluation(const ShardRun& shard) {
    if (!shard.built) return {false, "no shard (criterion 7 did not build one)"};
    fs::path manifest = shard.dir / "manifest.jsonl";
    auto records = read_manifest(manifest);

    auto write_preds = [&](const fs::path& path, const std::function<std::string(std::size_t)>& pred_for) {
        std::ofstream out(path);
        for (std::size_t i = 0; i < records.size(); ++i) {
            out << nlohmann::json{{"id", records[i]["id"]}, {"prediction", pred_for(i)}}.dump() << "\n";
        }
    };
    fs::path gold = shard.dir.parent_path() / "gold.jsonl";
    write_preds(gold, [&](std::size_t i) { return records[i]["response"].get<std::string>(); });

    // Random cyclic shift inside each task: nobody keeps their own response.
    std::map<std::string, std::vector<std::size_t>> by_task;
    for (std::size_t i = 0; i < records.size(); ++i) by_task[records[i]["task"]].push_back(i);
    std::vector<std::size_t> source(records.size());
    Rng rng = make_rng(4242);
    for (auto& [task, idx] : by_task) {
        shuffle(rng, idx);
        for (std::size_t k = 0; k < idx.size(); ++k) source[idx[k]] = idx[(k + 1) % idx.size()];
    }
    fs::path scrambled = shard.dir.parent_path() / "scrambled.jsonl";
    write_preds(scrambled, [&](std::size_t i) { return records[source[i]]["response"].get<std::string>(); });

    auto score = [&](const fs::path& preds) {
        auto r = run_cli("eval --summary-only --predictions " + preds.string() + " --manifest " + manifest.string());
        return r.code == 0 ? nlohmann::json::parse(r.out) : nlohmann::json();
    };
    auto g = score(gold);
    auto s = score(scrambled);
    if (g.is_null() || s.is_null()) return {false, "eval command failed"};

    struct Metric {
        const char* task;
        const char* key;
        double gold_target;
    };
    const Metric metrics[] = {{"chart_to_table", "rms_f1_mean", 1.0},
                              {"numerical_qa", "relaxed_accuracy", 1.0},
                              {"referring_qa", "relaxed_accuracy", 1.0},
                              {"open_qa", "bleu", 100.0},
                              {"summarization", "bleu", 100.0}};
    bool ok = true;
    std::ostringstream os;
    for (const auto& m : metrics) {
        double gv = g["tasks"][m.task][m.key].get<double>();
        double sv = s["tasks"][m.task][m.key].get<double>();
        bool gold_ok = std::fabs(gv - m.gold_target) <= 1e-9 * m.gold_target;
        ok = ok && gold_ok && sv < gv;
        os << m.task << " " << m.key << " gold " << gv << " scrambled " << sv << "; ";
    }
    return {ok, os.str()};
}

}  // namespace

int main() {
    struct Criterion {
        int id;
        const char* name;
        std::function<Outcome()> run;
    };
    ShardRun shard;
    const Criterion criteria[] = {
        {1, "COT oracle equivalence", cot_oracle},
        {2, "template library structure", library_structure},
        {3, "RMS F1 invariance and exhaustive oracle", rms_suite},
        {4, "relaxed correctness boundaries", relaxed_suite},
        {5, "synthesis invariants", synthesis_invariants},
        {6, "rendering soundness", rendering_soundness},
        {7, "end-to-end shard", [&] { return end_to_end(shard); }},
        {8, "self-evaluation sanity", [&] { return self_evaluation(shard); }},
    };
    int failed = 0;
    for (const auto& c : criteria) {
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failed += !o.pass;
        std::printf("[%s] %d %s: %s\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(std::size(criteria)) - failed, std::size(criteria));
    return failed == 0 ? 0 : 1;
}
