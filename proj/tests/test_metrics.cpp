#include <cmath>
#include <fstream>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "chartforge/metrics.hpp"
#include "rms_oracle.hpp"
#include "random_tables.hpp"

using namespace chartforge;

TEST(Levenshtein, KnownDistances) {
    EXPECT_EQ(levenshtein("kitten", "sitting"), 3u);
    EXPECT_EQ(levenshtein("", "abc"), 3u);
    EXPECT_EQ(levenshtein("same", "same"), 0u);
    EXPECT_DOUBLE_EQ(normalized_levenshtein("", ""), 0.0);
    EXPECT_DOUBLE_EQ(normalized_levenshtein("abcd", "abxd"), 0.25);
}

TEST(Relaxed, InclusiveEdge) {
    EXPECT_TRUE(relaxed_correct("105", "100"));
    EXPECT_FALSE(relaxed_correct("105.0001", "100"));
    EXPECT_TRUE(relaxed_correct("95", "100"));
    EXPECT_FALSE(relaxed_correct("94.9999", "100"));
}

TEST(Relaxed, ZeroGoldNeedsExactZero) {
    EXPECT_TRUE(relaxed_correct("0", "0"));
    EXPECT_TRUE(relaxed_correct("-0.0", "0"));
    EXPECT_FALSE(relaxed_correct("0.0001", "0"));
}

TEST(Relaxed, TextIsCaseInsensitive) {
    EXPECT_TRUE(relaxed_correct(" yes ", "Yes"));
    EXPECT_FALSE(relaxed_correct("yes.", "Yes"));
}

TEST(Relaxed, RejectsBadTolerance) {
    EXPECT_THROW(relaxed_correct("1", "1", RelaxedConfig{1.0}), InvalidParams);
    EXPECT_THROW(relaxed_correct("1", "1", RelaxedConfig{-0.1}), InvalidParams);
}

TEST(Relaxed, GoldenFile) {
    std::ifstream in(CHARTFORGE_TEST_DATA_DIR "/relaxed_golden.json");
    ASSERT_TRUE(in);
    auto cases = nlohmann::json::parse(in);
    ASSERT_EQ(cases.size(), 50u);
    for (const auto& c : cases) {
        RelaxedConfig cfg{c.value("tolerance", 0.05)};
        EXPECT_EQ(relaxed_correct(c["pred"].get<std::string>(), c["gold"].get<std::string>(), cfg), c["expected"].get<bool>())
            << c.dump();
    }
}

TEST(Rms, IdentityPermutationTranspose) {
    auto rng = make_rng(11);
    for (int i = 0; i < 50; ++i) {
        auto gold = testgen::table(rng, uniform_int<std::size_t>(rng, 1, 6), uniform_int<std::size_t>(rng, 1, 6));
        EXPECT_EQ(rms_f1(gold, gold), 1.0);
        EXPECT_EQ(rms_f1(testgen::random_permutation(rng, gold), gold), 1.0);
        EXPECT_EQ(rms_f1(transpose(gold), gold), 1.0);
    }
}

TEST(Rms, ExactPartialScore) {
    DataTable gold({"a1", "b2"}, {"v"}, {{Cell::number(10)}, {Cell::number(20)}});
    DataTable pred({"a1", "b2"}, {"v"}, {{Cell::number(10)}, {Cell::number(25)}});
    // second cell: relative error 0.25 over threshold 0.5 -> 0.5
    EXPECT_DOUBLE_EQ(rms_f1(pred, gold), 0.75);
    DataTable half({"a1"}, {"v"}, {{Cell::number(10)}});
    // precision 1, recall 0.5
    EXPECT_NEAR(rms_f1(half, gold), 2.0 / 3.0, 1e-15);
}

TEST(Rms, KeySimilarityScalesCells) {
    DataTable gold({"abcd"}, {"v"}, {{Cell::number(5)}});
    DataTable pred({"abxd"}, {"v"}, {{Cell::number(5)}});
    // label distance 0.25 over 0.5 -> key similarity 0.5
    EXPECT_DOUBLE_EQ(rms_f1(pred, gold), 0.5);
}

TEST(Rms, UnparsableMarkdownScoresZero) {
    DataTable gold({"a"}, {"v"}, {{Cell::number(5)}});
    EXPECT_EQ(rms_f1(std::string_view("no table here"), gold), 0.0);
    EXPECT_EQ(rms_f1(std::string_view(to_markdown(gold)), gold), 1.0);
}

TEST(Rms, MatchesExhaustiveOracle) {
    auto rng = make_rng(23);
    int checked = 0;
    while (checked < 60) {
        auto gold = testgen::table(rng, uniform_int<std::size_t>(rng, 1, 4), uniform_int<std::size_t>(rng, 1, 4));
        auto pred = testgen::corrupt(rng, gold);
        auto ref = rms_oracle::score(pred, gold);
        if (ref.ambiguous) continue;
        EXPECT_NEAR(rms_f1(pred, gold), ref.f1, 1e-9) << to_markdown(pred) << "\nvs\n" << to_markdown(gold);
        ++checked;
    }
}

TEST(Rms, ValidatesThresholds) {
    EXPECT_THROW(validate(RmsConfig{0.0, 0.5}), InvalidParams);
    EXPECT_THROW(validate(RmsConfig{0.5, 1.5}), InvalidParams);
}

TEST(Bleu, NoSmoothingZeroWhenFourGramsMissing) {
    EXPECT_EQ(bleu("the cat sat", {"the cat sat down"}), 0.0);
}

TEST(Bleu, IdenticalIsHundred) {
    EXPECT_DOUBLE_EQ(bleu("a b c d e", {"a b c d e"}), 100.0);
}

TEST(Bleu, FrozenCorpusValues) {
    double v = corpus_bleu({"the quick brown fox jumps over the lazy dog today",
                            "sales rose sharply in the second quarter of the year"},
                           {{"the quick brown fox jumped over the lazy dog today", "a quick brown fox jumps over a lazy dog"},
                            {"sales rose sharply in the second quarter"}});
    EXPECT_NEAR(v, 76.44575147485206, 1e-9);
    EXPECT_NEAR(bleu("a b c d e", {"a b c d e f g h"}), 54.88116360940264, 1e-9);
}

TEST(Bleu, CaseFolding) {
    EXPECT_DOUBLE_EQ(bleu("The Cat Sat On The Mat", {"the cat sat on the mat"}), 100.0);
}

TEST(Bleu, Errors) {
    EXPECT_THROW(bleu("x", {}), EmptyReference);
    EXPECT_THROW(corpus_bleu({"a"}, {}), InvalidParams);
}
