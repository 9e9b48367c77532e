#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ghl/evaluator.hpp"
#include "ghl/pipeline.hpp"

namespace ghl {

using ordered_json = nlohmann::ordered_json;

// Full record of one evaluation pass: what was compared, every score, the
// matches and the resulting metrics.
struct EvaluationArtifact {
    std::string function_key;
    Strategy strategy = Strategy::zero_shot;
    int run_index = 0;
    std::string embedding_model;
    MatchRule rule;
    std::vector<std::string> truth_keys;
    std::vector<std::string> generated_texts;
    SimilarityMatrix matrix;
    MatchSet matches;
    MetricsSummary metrics;
};

// Score grids beyond this many cells are dropped from the JSON (the matches
// and metrics derived from them are kept).
inline constexpr std::size_t kMatrixSerializationCap = 250000;

ordered_json to_json(const GenerationRun& run);
GenerationRun generation_run_from_json(const ordered_json& j);

ordered_json to_json(const EvaluationArtifact& artifact);
EvaluationArtifact evaluation_from_json(const ordered_json& j);

ordered_json metrics_to_json(const MetricsSummary& metrics);
MetricsSummary metrics_from_json(const ordered_json& j);

void save_json_file(const std::filesystem::path& path, const ordered_json& j);
ordered_json load_json_file(const std::filesystem::path& path);

}  // namespace ghl
