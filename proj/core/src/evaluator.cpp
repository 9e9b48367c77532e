#include "ghl/evaluator.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "ghl/errors.hpp"
#include "ghl/util.hpp"

namespace ghl {

std::string to_string(RoundingMode mode) {
    return mode == RoundingMode::one_decimal ? "one-decimal" : "raw";
}

RoundingMode rounding_mode_from_string(const std::string& name) {
    if (name == "one-decimal" || name == "one_decimal") return RoundingMode::one_decimal;
    if (name == "raw") return RoundingMode::raw;
    throw ConfigError("unknown rounding mode: '" + name + "'");
}

bool matches(double score, const MatchRule& rule) {
    if (rule.mode == RoundingMode::raw) return score >= rule.threshold;
    return round_half_up(score, 1) >= rule.threshold;
}

MatchSet match_threshold(const SimilarityMatrix& matrix, const MatchRule& rule) {
    MatchSet out;
    std::vector<bool> truth_hit(matrix.truth_count, false);
    std::vector<bool> generated_hit(matrix.generated_count, false);
    for (std::size_t i = 0; i < matrix.truth_count; ++i) {
        for (std::size_t j = 0; j < matrix.generated_count; ++j) {
            const double s = matrix.at(i, j);
            if (!matches(s, rule)) continue;
            out.pairs.push_back({i, j, s});
            truth_hit[i] = true;
            generated_hit[j] = true;
        }
    }
    out.covered_truth = static_cast<std::size_t>(
        std::count(truth_hit.begin(), truth_hit.end(), true));
    out.valid_generated = static_cast<std::size_t>(
        std::count(generated_hit.begin(), generated_hit.end(), true));
    return out;
}

double cosine_similarity(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size())
        throw EvalError("cosine similarity needs equal dimensions, got " +
                        std::to_string(a.size()) + " and " + std::to_string(b.size()));
    if (a.empty()) throw EvalError("cosine similarity of empty vectors");
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    if (na == 0.0 || nb == 0.0) throw EvalError("cosine similarity of a zero vector");
    // sqrt(na * nb) keeps self-similarity exactly 1.0; the split-sqrt form can
    // land one ulp under it.
    double s = dot / std::sqrt(na * nb);
    return std::clamp(s, -1.0, 1.0);
}

SimilarityMatrix build_similarity_matrix(const std::vector<std::string>& truth_texts,
                                         const std::vector<std::string>& generated_texts,
                                         Gateway& gateway, const EvaluatorOptions& options) {
    if (truth_texts.empty()) throw EvalError("truth set is empty");

    SimilarityMatrix matrix;
    matrix.truth_count = truth_texts.size();
    matrix.generated_count = generated_texts.size();
    matrix.scores.assign(matrix.truth_count * matrix.generated_count, 0.0);
    if (generated_texts.empty()) return matrix;

    std::map<std::string, std::size_t> distinct;
    std::vector<std::string> order;
    auto intern = [&](const std::string& text) {
        auto [it, inserted] = distinct.emplace(text, order.size());
        if (inserted) order.push_back(text);
        return it->second;
    };
    std::vector<std::size_t> truth_ref, generated_ref;
    truth_ref.reserve(truth_texts.size());
    generated_ref.reserve(generated_texts.size());
    for (const auto& t : truth_texts) truth_ref.push_back(intern(t));
    for (const auto& g : generated_texts) generated_ref.push_back(intern(g));

    const std::vector<EmbeddingVector> vectors =
        gateway.embed_batch(order, options.embedding_model);
    if (vectors.size() != order.size())
        throw EvalError("embedding batch returned the wrong number of vectors");

    for (std::size_t i = 0; i < truth_ref.size(); ++i) {
        for (std::size_t j = 0; j < generated_ref.size(); ++j) {
            if (options.identical_text_fast_path && truth_ref[i] == generated_ref[j]) {
                matrix.at(i, j) = 1.0;
                continue;
            }
            matrix.at(i, j) = cosine_similarity(vectors[truth_ref[i]].components,
                                                vectors[generated_ref[j]].components);
        }
    }
    return matrix;
}

MetricsSummary compute_metrics_from_counts(double truth_total, double generated_total,
                                           double covered_truth, double valid_generated,
                                           double duration_s) {
    if (truth_total <= 0) throw EvalError("metrics need a non-empty truth set");
    MetricsSummary m;
    m.truth_total = truth_total;
    m.generated_total = generated_total;
    m.covered_truth = covered_truth;
    m.valid_generated = valid_generated;
    m.duration_s = duration_s;
    m.ratio = generated_total / truth_total;
    m.precision = generated_total > 0 ? valid_generated / generated_total : 0.0;
    m.recall = covered_truth / truth_total;
    m.f1 = (m.precision + m.recall) > 0
               ? 2.0 * m.precision * m.recall / (m.precision + m.recall)
               : 0.0;
    return m;
}

MetricsSummary compute_metrics(const SimilarityMatrix& matrix, const MatchRule& rule,
                               double duration_s) {
    const MatchSet set = match_threshold(matrix, rule);
    return compute_metrics_from_counts(static_cast<double>(matrix.truth_count),
                                       static_cast<double>(matrix.generated_count),
                                       static_cast<double>(set.covered_truth),
                                       static_cast<double>(set.valid_generated), duration_s);
}

namespace {

MetricsSummary mean_of(const std::vector<MetricsSummary>& items) {
    MetricsSummary m;
    const double n = static_cast<double>(items.size());
    for (const auto& item : items) {
        m.truth_total += item.truth_total;
        m.generated_total += item.generated_total;
        m.covered_truth += item.covered_truth;
        m.valid_generated += item.valid_generated;
        m.ratio += item.ratio;
        m.precision += item.precision;
        m.recall += item.recall;
        m.f1 += item.f1;
        m.duration_s += item.duration_s;
    }
    m.truth_total /= n;
    m.generated_total /= n;
    m.covered_truth /= n;
    m.valid_generated /= n;
    m.ratio /= n;
    m.precision /= n;
    m.recall /= n;
    m.f1 /= n;
    m.duration_s /= n;
    return m;
}

}  // namespace

MetricsSummary aggregate_runs(const std::vector<MetricsSummary>& runs) {
    if (runs.empty()) throw EvalError("no runs to aggregate");
    for (const auto& r : runs)
        if (r.truth_total != runs.front().truth_total)
            throw EvalError("runs disagree on the truth total, cannot aggregate");
    MetricsSummary m = mean_of(runs);
    m.duration_s = 0;
    for (const auto& r : runs) m.duration_s += r.duration_s;
    return m;
}

MetricsSummary aggregate_functions(const std::vector<MetricsSummary>& functions) {
    if (functions.empty()) throw EvalError("no per-function summaries to aggregate");
    return mean_of(functions);
}

std::vector<double> flatten_scores(const SimilarityMatrix& matrix) {
    return matrix.scores;
}

Histogram similarity_histogram(const std::vector<double>& scores, double bin_width,
                               double threshold_marker) {
    if (bin_width <= 0) throw EvalError("histogram bin width must be positive");
    Histogram h;
    h.bin_width = bin_width;
    h.threshold_marker = threshold_marker;
    h.total = scores.size();
    if (scores.empty()) return h;

    auto bin_index = [bin_width](double s) {
        return static_cast<long long>(std::floor(s / bin_width + 1e-9));
    };
    long long lo = bin_index(scores.front());
    long long hi = lo;
    for (double s : scores) {
        lo = std::min(lo, bin_index(s));
        hi = std::max(hi, bin_index(s));
    }
    h.bins.resize(static_cast<std::size_t>(hi - lo + 1));
    for (std::size_t k = 0; k < h.bins.size(); ++k) {
        h.bins[k].lower = static_cast<double>(lo + static_cast<long long>(k)) * bin_width;
        h.bins[k].upper = h.bins[k].lower + bin_width;
    }
    for (double s : scores) ++h.bins[static_cast<std::size_t>(bin_index(s) - lo)].count;
    return h;
}

}  // namespace ghl
