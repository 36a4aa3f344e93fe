#include "chartforge/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <array>
#include <map>

#include "chartforge/detail/hungarian.hpp"
#include "chartforge/detail/text.hpp"

namespace chartforge {

std::size_t levenshtein(std::string_view a, std::string_view b) {
    if (a.size() < b.size()) std::swap(a, b);
    std::vector<std::size_t> row(b.size() + 1);
    for (std::size_t j = 0; j <= b.size(); ++j) row[j] = j;
    for (std::size_t i = 1; i <= a.size(); ++i) {
        std::size_t diag = row[0];
        row[0] = i;
        for (std::size_t j = 1; j <= b.size(); ++j) {
            std::size_t up = row[j];
            row[j] = std::min({row[j] + 1, row[j - 1] + 1, diag + (a[i - 1] == b[j - 1] ? 0 : 1)});
            diag = up;
        }
    }
    return row[b.size()];
}

double normalized_levenshtein(std::string_view a, std::string_view b) {
    std::size_t n = std::max(a.size(), b.size());
    if (n == 0) return 0.0;
    return static_cast<double>(levenshtein(a, b)) / static_cast<double>(n);
}

bool relaxed_correct(std::string_view pred, std::string_view gold, const RelaxedConfig& cfg) {
    if (!(cfg.tolerance >= 0.0 && cfg.tolerance < 1.0)) throw InvalidParams("relaxed tolerance must be in [0, 1)");
    auto p = parse_number(pred);
    auto g = parse_number(gold);
    if (p && g) {
        if (*g == 0.0) return *p == 0.0;
        double scale = std::fabs(*g);
        return std::fabs(*p - *g) <= cfg.tolerance * scale + 1e-12 * scale;
    }
    return detail::lower(detail::trim(pred)) == detail::lower(detail::trim(gold));
}

// ---------------------------------------------------------------------------

void validate(const RmsConfig& cfg) {
    auto ok = [](double x) { return x > 0.0 && x <= 1.0; };
    if (!ok(cfg.numeric_threshold)) throw InvalidParams("numeric_threshold must be in (0, 1]");
    if (!ok(cfg.text_threshold)) throw InvalidParams("text_threshold must be in (0, 1]");
}

namespace {

std::string fold(std::string_view s) { return detail::lower(detail::trim(s)); }

std::string cell_text(const Cell& c) { return c.is_number() ? format_number(c.as_number()) : c.as_text(); }

double text_similarity(std::string_view a, std::string_view b, double tau) {
    return 1.0 - std::min(1.0, normalized_levenshtein(fold(a), fold(b)) / tau);
}

double value_similarity(const Cell& p, const Cell& g, const RmsConfig& cfg) {
    if (p.is_number() && g.is_number()) {
        double pv = p.as_number();
        double gv = g.as_number();
        if (gv == 0.0) return pv == 0.0 ? 1.0 : 0.0;
        double rel = std::fabs(pv - gv) / std::fabs(gv);
        return 1.0 - std::min(1.0, rel / cfg.numeric_threshold);
    }
    return text_similarity(cell_text(p), cell_text(g), cfg.text_threshold);
}

/// Row i of `pred` -> row of `gold` (or -1), by minimum label edit cost.
std::vector<long> match_labels(const std::vector<std::string>& pred, const std::vector<std::string>& gold) {
    std::vector<std::vector<double>> cost(pred.size(), std::vector<double>(gold.size()));
    for (std::size_t i = 0; i < pred.size(); ++i) {
        for (std::size_t j = 0; j < gold.size(); ++j) cost[i][j] = normalized_levenshtein(fold(pred[i]), fold(gold[j]));
    }
    return detail::hungarian(cost);
}

RmsScore score_against(const DataTable& pred, const DataTable& gold, const RmsConfig& cfg) {
    auto rows = match_labels(pred.row_labels(), gold.row_labels());
    auto cols = match_labels(pred.col_labels(), gold.col_labels());
    double mass = 0.0;
    for (std::size_t i = 0; i < pred.rows(); ++i) {
        if (rows[i] < 0) continue;
        auto gi = static_cast<std::size_t>(rows[i]);
        double row_sim = text_similarity(pred.row_labels()[i], gold.row_labels()[gi], cfg.text_threshold);
        for (std::size_t j = 0; j < pred.cols(); ++j) {
            if (cols[j] < 0) continue;
            auto gj = static_cast<std::size_t>(cols[j]);
            double col_sim = text_similarity(pred.col_labels()[j], gold.col_labels()[gj], cfg.text_threshold);
            mass += row_sim * col_sim * value_similarity(pred.at(i, j), gold.at(gi, gj), cfg);
        }
    }
    RmsScore s;
    s.precision = mass / static_cast<double>(pred.rows() * pred.cols());
    s.recall = mass / static_cast<double>(gold.rows() * gold.cols());
    s.f1 = s.precision + s.recall > 0.0 ? 2.0 * s.precision * s.recall / (s.precision + s.recall) : 0.0;
    return s;
}

}  // namespace

RmsScore rms_score(const DataTable& pred, const DataTable& gold, const RmsConfig& cfg) {
    validate(cfg);
    RmsScore plain = score_against(pred, gold, cfg);
    RmsScore flipped = score_against(pred, transpose(gold), cfg);
    if (flipped.f1 > plain.f1) {
        flipped.transposed = true;
        return flipped;
    }
    return plain;
}

double rms_f1(const DataTable& pred, const DataTable& gold, const RmsConfig& cfg) {
    return rms_score(pred, gold, cfg).f1;
}

double rms_f1(std::string_view pred_markdown, const DataTable& gold, const RmsConfig& cfg) {
    validate(cfg);
    try {
        return rms_f1(parse_markdown_table(pred_markdown), gold, cfg);
    } catch (const MalformedTable&) {
        return 0.0;
    }
}

// ---------------------------------------------------------------------------

std::vector<std::string> bleu_tokenize(std::string_view text) { return detail::split_whitespace(detail::lower(text)); }

namespace {

using NgramCounts = std::map<std::vector<std::string>, std::size_t>;

NgramCounts ngrams(const std::vector<std::string>& toks, std::size_t n) {
    NgramCounts out;
    for (std::size_t i = 0; i + n <= toks.size(); ++i) {
        ++out[std::vector<std::string>(toks.begin() + static_cast<long>(i), toks.begin() + static_cast<long>(i + n))];
    }
    return out;
}

}  // namespace

double corpus_bleu(const std::vector<std::string>& preds, const std::vector<std::vector<std::string>>& refs) {
    constexpr std::size_t kMaxN = 4;
    if (preds.size() != refs.size()) throw InvalidParams("bleu: predictions and references differ in count");
    if (preds.empty()) throw EmptyReference("bleu: empty corpus");
    std::array<double, kMaxN> matched{};
    std::array<double, kMaxN> total{};
    double pred_len = 0.0;
    double ref_len = 0.0;
    for (std::size_t s = 0; s < preds.size(); ++s) {
        if (refs[s].empty()) throw EmptyReference("bleu: segment " + std::to_string(s) + " has no references");
        auto hyp = bleu_tokenize(preds[s]);
        std::vector<std::vector<std::string>> ref_toks;
        for (const auto& r : refs[s]) ref_toks.push_back(bleu_tokenize(r));

        pred_len += static_cast<double>(hyp.size());
        // Closest reference length; the shorter one on ties.
        std::size_t best = ref_toks[0].size();
        for (const auto& r : ref_toks) {
            auto d = [&](std::size_t len) { return len > hyp.size() ? len - hyp.size() : hyp.size() - len; };
            if (d(r.size()) < d(best) || (d(r.size()) == d(best) && r.size() < best)) best = r.size();
        }
        ref_len += static_cast<double>(best);

        for (std::size_t n = 1; n <= kMaxN; ++n) {
            NgramCounts max_ref;
            for (const auto& r : ref_toks) {
                for (const auto& [g, c] : ngrams(r, n)) max_ref[g] = std::max(max_ref[g], c);
            }
            for (const auto& [g, c] : ngrams(hyp, n)) {
                auto it = max_ref.find(g);
                matched[n - 1] += static_cast<double>(std::min(c, it == max_ref.end() ? 0 : it->second));
                total[n - 1] += static_cast<double>(c);
            }
        }
    }
    double log_p = 0.0;
    for (std::size_t n = 0; n < kMaxN; ++n) {
        if (matched[n] == 0.0) return 0.0;
        log_p += std::log(matched[n] / total[n]) / static_cast<double>(kMaxN);
    }
    double bp = pred_len >= ref_len ? 1.0 : std::exp(1.0 - ref_len / pred_len);
    return 100.0 * bp * std::exp(log_p);
}

double bleu(std::string_view pred, const std::vector<std::string>& refs) {
    if (refs.empty()) throw EmptyReference("bleu: no references");
    return corpus_bleu({std::string(pred)}, {refs});
}

}  // namespace chartforge
