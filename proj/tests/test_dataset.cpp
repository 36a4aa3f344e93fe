#include <cstdlib>
#include <filesystem>
#include <fstream>

#include <gtest/gtest.h>

#include "chartforge/dataset.hpp"

using namespace chartforge;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    auto p = fs::temp_directory_path() / ("chartforge_test_" + name);
    fs::remove_all(p);
    return p;
}

BuildConfig small_config(std::size_t total, std::uint64_t seed) {
    auto c = default_build_config();
    c.mix.total = total;
    c.mix.seed = seed;
    c.mix.proportions = {0.2, 0.2, 0.2, 0.2, 0.2};
    return c;
}

}  // namespace

TEST(Mix, DefaultProportionsSumToOne) {
    auto m = default_mix();
    double s = 0;
    for (double p : m.proportions) s += p;
    EXPECT_NEAR(s, 1.0, 1e-12);
    EXPECT_NO_THROW(validate(m));
    m.proportions[0] += 0.1;
    EXPECT_THROW(validate(m), InvalidParams);
}

TEST(Mix, LargestRemainder) {
    MixSpec m{{0.5, 0.25, 0.25, 0.0, 0.0}, 7, 0};
    // 3.5, 1.75, 1.75 -> 3, 1, 1; the two spare seats go to the .75 remainders
    EXPECT_EQ(realize_counts(m), (std::array<std::size_t, 5>{3, 2, 2, 0, 0}));
    MixSpec even{{0.2, 0.2, 0.2, 0.2, 0.2}, 3, 0};
    EXPECT_EQ(realize_counts(even), (std::array<std::size_t, 5>{1, 1, 1, 0, 0}));
    auto a = task_assignment(m);
    EXPECT_EQ(a.size(), 7u);
    EXPECT_EQ(std::count(a.begin(), a.end(), Task::ChartToTable), 3);
}

TEST(Tasks, NamesAndAliases) {
    for (auto t : kAllTasks) EXPECT_EQ(task_from_string(to_string(t)).value(), t);
    EXPECT_EQ(task_from_string("summary").value(), Task::Summarization);
    EXPECT_FALSE(task_from_string("captioning").has_value());
}

TEST(Config, JsonKeysAndErrors) {
    auto c = build_config_from_json({{"seed", 5}, {"total", 12}, {"mix", {{"numerical_qa", 1.0}}}, {"width", 320}});
    EXPECT_EQ(c.mix.seed, 5u);
    EXPECT_EQ(c.mix.total, 12u);
    EXPECT_EQ(c.mix.proportions[1], 1.0);
    EXPECT_EQ(c.mix.proportions[0], 0.0);
    EXPECT_EQ(c.width_px, 320);
    try {
        build_config_from_json({{"totl", 3}});
        FAIL();
    } catch (const SchemaError& e) {
        EXPECT_EQ(e.path(), "totl");
    }
}

TEST(Config, SeedPrecedence) {
    ::unsetenv("CHARTFORGE_SEED");
    EXPECT_EQ(resolve_seed(std::nullopt, std::nullopt), 0u);
    ::setenv("CHARTFORGE_SEED", "17", 1);
    EXPECT_EQ(resolve_seed(std::nullopt, std::nullopt), 17u);
    EXPECT_EQ(resolve_seed(std::nullopt, 4), 4u);
    EXPECT_EQ(resolve_seed(9, 4), 9u);
    ::unsetenv("CHARTFORGE_SEED");
}

TEST(Records, DeterministicAndComplete) {
    auto cfg = small_config(10, 3);
    const auto& lib = TemplateLibrary::builtin();
    for (auto task : kAllTasks) {
        auto a = generate_record(cfg, 4, task, lib);
        auto b = generate_record(cfg, 4, task, lib);
        EXPECT_EQ(a.manifest.dump(), b.manifest.dump());
        EXPECT_EQ(a.png, b.png);
        EXPECT_EQ(a.manifest["task"], std::string(to_string(task)));
        EXPECT_FALSE(a.manifest["instruction"].get<std::string>().empty());
        EXPECT_FALSE(a.manifest["response"].get<std::string>().empty());
    }
}

class Shard : public ::testing::Test {
protected:
    static void SetUpTestSuite() {
        dir_ = scratch("shard");
        summary_ = build_shard(small_config(40, 11), dir_);
    }
    static inline fs::path dir_;
    static inline ShardSummary summary_;
};

TEST_F(Shard, LayoutAndCounts) {
    EXPECT_EQ(summary_.records, 40u);
    EXPECT_EQ(summary_.counts, (std::array<std::size_t, 5>{8, 8, 8, 8, 8}));
    EXPECT_TRUE(fs::exists(dir_ / "manifest.jsonl"));
    EXPECT_TRUE(fs::exists(dir_ / "shard.json"));
    auto recs = read_manifest(dir_ / "manifest.jsonl");
    ASSERT_EQ(recs.size(), 40u);
    for (const auto& r : recs) {
        EXPECT_TRUE(fs::exists(dir_ / r["image"].get<std::string>()));
        EXPECT_TRUE(fs::exists(dir_ / r["boxes"].get<std::string>()));
    }
}

TEST_F(Shard, VerifiesCleanAndRegenerates) {
    auto rep = verify_shard(dir_ / "manifest.jsonl", true);
    EXPECT_EQ(rep.records, 40u);
    EXPECT_TRUE(rep.violations.empty()) << to_json(rep).dump(2);
}

TEST_F(Shard, DetectsTampering) {
    auto recs = read_manifest(dir_ / "manifest.jsonl");
    for (auto& r : recs) {
        if (r["task"] == "numerical_qa") {
            r["answer"] = "not the answer";
            EXPECT_FALSE(verify_record(r, dir_).empty());
            break;
        }
    }
    for (auto& r : recs) {
        if (r["task"] == "chart_to_table") {
            r["response"] = "| x | y |\n| --- | --- |\n| a | 1 |";
            EXPECT_FALSE(verify_record(r, dir_).empty());
            break;
        }
    }
}

TEST_F(Shard, GoldPredictionsScorePerfectly) {
    std::vector<Prediction> preds;
    for (const auto& r : read_manifest(dir_ / "manifest.jsonl")) preds.push_back({r["id"], r["response"]});
    auto rep = evaluate(preds, dir_ / "manifest.jsonl");
    EXPECT_EQ(rep["tasks"]["chart_to_table"]["rms_f1_mean"].get<double>(), 1.0);
    EXPECT_EQ(rep["tasks"]["numerical_qa"]["relaxed_accuracy"].get<double>(), 1.0);
    EXPECT_EQ(rep["tasks"]["referring_qa"]["relaxed_accuracy"].get<double>(), 1.0);
    EXPECT_DOUBLE_EQ(rep["tasks"]["open_qa"]["bleu"].get<double>(), 100.0);
    EXPECT_DOUBLE_EQ(rep["tasks"]["summarization"]["bleu"].get<double>(), 100.0);
}

TEST_F(Shard, MissingPredictionsScoreZero) {
    auto recs = read_manifest(dir_ / "manifest.jsonl");
    std::vector<Prediction> preds{{recs[0]["id"], recs[0]["response"]}};
    auto rep = evaluate(preds, dir_ / "manifest.jsonl");
    EXPECT_EQ(rep["missing"].get<std::size_t>(), 39u);
    EXPECT_THROW(evaluate({}, dir_ / "manifest.jsonl"), Error);
}
