#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "ghl/evaluator.hpp"
#include "ghl/pipeline.hpp"

namespace ghl {

// Counts can be fractional after aggregation; print up to two decimals and
// strip trailing zeros ("4", "3.5", "2.33").
std::string format_count(double value);
// Two decimals, half-up ("1.42", "0.60").
std::string format_ratio(double value);
// Three decimals ("0.808").
std::string format_score(double value);
// h:mm:ss with unpadded hours ("0:20:10").
std::string format_duration(double seconds);

// One function under one strategy, aggregated across repeats. The matrix and
// texts come from the final repeat and feed the example sections.
struct StrategyFunctionReport {
    std::string function_key;
    MetricsSummary aggregate;
    std::vector<MetricsSummary> runs;
    std::vector<TestDesignTechnique> techniques;
    std::vector<GenerationFailure> failures;
    std::vector<std::string> truth_keys;
    std::vector<std::string> generated_texts;
    SimilarityMatrix matrix;
    MatchRule rule;
};

struct DatasetReport {
    std::string dataset_name;
    double bin_width = 0.05;
    double threshold_marker = 0.7;
    std::vector<std::pair<Strategy, std::vector<StrategyFunctionReport>>> strategies;
};

// Markdown: one metrics table per strategy with an average row, followed by
// a technique tally for the technique-driven strategies.
std::string render_summary(const DatasetReport& report);

// Markdown page for one function across all strategies in the report.
std::string render_function_page(const std::string& function_key, const DatasetReport& report);

// Highest-scoring matched pairs, score shown with two decimals. Ties resolve
// by truth then generated position.
std::string render_match_examples(const std::vector<std::string>& truth_keys,
                                  const std::vector<std::string>& generated_texts,
                                  const SimilarityMatrix& matrix, const MatchRule& rule,
                                  std::size_t top_k);

// Closest generated cases for one truth case, best first, three-decimal
// scores. Throws ReportError when the key is not in truth_keys.
std::string render_nearest_neighbors(const std::string& truth_key,
                                     const std::vector<std::string>& truth_keys,
                                     const std::vector<std::string>& generated_texts,
                                     const SimilarityMatrix& matrix, std::size_t top_k);

std::string metrics_csv(const std::vector<StrategyFunctionReport>& rows);

// CSV with a leading comment line carrying bin width, threshold marker and
// total score count.
std::string emit_histogram_data(const Histogram& histogram);

std::string render_technique_tally(const std::vector<StrategyFunctionReport>& rows);

// Writes summary.md, per_function/<key>.md, tables/*.csv and
// histograms/*.csv under report_dir.
void write_report(const std::filesystem::path& report_dir, const DatasetReport& report);

}  // namespace ghl
