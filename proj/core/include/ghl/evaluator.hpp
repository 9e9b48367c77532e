#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "ghl/gateway.hpp"

namespace ghl {

// Row-major truth x generated score grid.
struct SimilarityMatrix {
    std::size_t truth_count = 0;
    std::size_t generated_count = 0;
    std::vector<double> scores;

    double at(std::size_t truth, std::size_t generated) const {
        return scores[truth * generated_count + generated];
    }
    double& at(std::size_t truth, std::size_t generated) {
        return scores[truth * generated_count + generated];
    }
};

enum class RoundingMode {
    one_decimal,  // half-up round the score to one decimal before comparing
    raw,
};

std::string to_string(RoundingMode mode);
RoundingMode rounding_mode_from_string(const std::string& name);

struct MatchRule {
    RoundingMode mode = RoundingMode::one_decimal;
    double threshold = 0.7;
};

// Whether one similarity score counts as a match under the rule.
bool matches(double score, const MatchRule& rule);

struct MatchedPair {
    std::size_t truth_index = 0;
    std::size_t generated_index = 0;
    double score = 0.0;
};

// Many-to-many: one truth case may be covered by several generated cases and
// one generated case may cover several truth cases.
struct MatchSet {
    std::vector<MatchedPair> pairs;  // ordered by (truth_index, generated_index)
    std::size_t covered_truth = 0;
    std::size_t valid_generated = 0;
};

MatchSet match_threshold(const SimilarityMatrix& matrix, const MatchRule& rule);

// Clamped to [-1, 1]. Throws EvalError on dimension mismatch or a zero-norm
// vector.
double cosine_similarity(const std::vector<double>& a, const std::vector<double>& b);

struct EvaluatorOptions {
    std::string embedding_model;
    // Textually identical pairs score exactly 1.0 without consulting the
    // embedding space.
    bool identical_text_fast_path = true;
};

// Embeds each distinct text once, then fills the grid with cosine scores.
SimilarityMatrix build_similarity_matrix(const std::vector<std::string>& truth_texts,
                                         const std::vector<std::string>& generated_texts,
                                         Gateway& gateway, const EvaluatorOptions& options);

// Aggregated summaries carry arithmetic means, so counts are fractional.
struct MetricsSummary {
    double truth_total = 0;      // A
    double generated_total = 0;  // B
    double covered_truth = 0;    // C
    double valid_generated = 0;  // D
    double ratio = 0;            // B / A
    double precision = 0;        // D / B
    double recall = 0;           // C / A
    double f1 = 0;               // 2PR / (P + R)
    double duration_s = 0;
};

MetricsSummary compute_metrics(const SimilarityMatrix& matrix, const MatchRule& rule,
                               double duration_s = 0.0);
MetricsSummary compute_metrics_from_counts(double truth_total, double generated_total,
                                           double covered_truth, double valid_generated,
                                           double duration_s = 0.0);

// Repeated runs of one function: mean of every count and metric, duration
// summed. All runs must share the same truth total.
MetricsSummary aggregate_runs(const std::vector<MetricsSummary>& runs);

// Across functions: plain arithmetic mean of every field, duration included.
MetricsSummary aggregate_functions(const std::vector<MetricsSummary>& functions);

struct HistogramBin {
    double lower = 0;
    double upper = 0;
    std::size_t count = 0;
};

struct Histogram {
    double bin_width = 0.05;
    double threshold_marker = 0.7;
    std::size_t total = 0;
    std::vector<HistogramBin> bins;  // contiguous, aligned to bin_width multiples
};

Histogram similarity_histogram(const std::vector<double>& scores, double bin_width,
                               double threshold_marker);

// Convenience: all scores of a matrix, row-major.
std::vector<double> flatten_scores(const SimilarityMatrix& matrix);

}  // namespace ghl
