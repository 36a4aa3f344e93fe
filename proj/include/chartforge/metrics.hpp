#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "chartforge/table.hpp"

namespace chartforge {

std::size_t levenshtein(std::string_view a, std::string_view b);

/// Edit distance divided by the longer length; 0 for two empty strings.
double normalized_levenshtein(std::string_view a, std::string_view b);

// ---------------------------------------------------------------------------
// Relaxed correctness

struct RelaxedConfig {
    double tolerance = 0.05;  // relative, in [0, 1)
};

/// Numeric answers (after dropping '%' and thousands separators) match when
/// |pred - gold| <= tolerance * |gold|; a zero gold needs an exact zero.
/// Everything else is a trimmed, case-insensitive string comparison.
bool relaxed_correct(std::string_view pred, std::string_view gold, const RelaxedConfig& cfg = {});

// ---------------------------------------------------------------------------
// Table similarity

struct RmsConfig {
    double numeric_threshold = 0.5;  // relative error at which a number scores 0
    double text_threshold = 0.5;     // normalized edit distance at which text scores 0
};

void validate(const RmsConfig& cfg);

struct RmsScore {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    bool transposed = false;  // best score came from the transposed gold
};

/// Rows of `pred` are matched one-to-one to rows of `gold` by minimum total
/// normalized edit distance of their labels (case-folded); columns likewise.
/// A matched entry scores key similarity times value similarity. The better
/// of the plain and the transposed gold is reported.
RmsScore rms_score(const DataTable& pred, const DataTable& gold, const RmsConfig& cfg = {});

double rms_f1(const DataTable& pred, const DataTable& gold, const RmsConfig& cfg = {});

/// Parses `pred_markdown` first; an unparsable prediction scores 0.
double rms_f1(std::string_view pred_markdown, const DataTable& gold, const RmsConfig& cfg = {});

// ---------------------------------------------------------------------------
// BLEU

/// Lowercased whitespace tokens.
std::vector<std::string> bleu_tokenize(std::string_view text);

/// Corpus BLEU-4 on a 0-100 scale: clipped n-gram precisions pooled over the
/// corpus, uniform weights, no smoothing, brevity penalty against the
/// closest reference length. `refs[i]` holds the references of `preds[i]`.
/// Throws EmptyReference if any reference list is empty and InvalidParams on
/// a size mismatch.
double corpus_bleu(const std::vector<std::string>& preds, const std::vector<std::vector<std::string>>& refs);

/// Single-segment BLEU.
double bleu(std::string_view pred, const std::vector<std::string>& refs);

}  // namespace chartforge
