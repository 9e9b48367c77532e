#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "ghl/evaluator.hpp"
#include "ghl/http_gateway.hpp"
#include "ghl/pipeline.hpp"

namespace ghl {

struct RunConfig {
    // models
    std::string completion_model = "gpt-4o";
    std::string embedding_model = "text-embedding-3-small";

    // generation
    double temperature = 0.0;
    std::int64_t seed = 7;
    std::uint32_t max_output_tokens = 4096;
    std::size_t chunk_max_words = 4000;
    std::size_t chunk_overlap_words = 200;
    bool attach_strategy = true;
    std::string output_format;               // empty selects the built-in default
    std::filesystem::path template_dir;      // optional prompt overrides

    // evaluation
    double threshold = 0.7;
    RoundingMode rounding = RoundingMode::one_decimal;
    double bin_width = 0.05;
    bool identical_text_fast_path = true;

    // execution
    int repeats = 3;
    int concurrency = 4;
    GatewayMode mode = GatewayMode::replay_only;
    std::string endpoint = "https://api.openai.com/v1";
    std::string credential_env = "GHL_API_KEY";
    int max_attempts = 3;
    int backoff_initial_ms = 1000;
    int timeout_s = 120;

    // paths (relative entries resolve against the config file's directory)
    std::filesystem::path cache_file = "ghl_cache.bin";
    std::filesystem::path output_dir = "out";
    std::vector<std::filesystem::path> manifests;
};

// Parses the grouped JSON config. Unknown keys are rejected so typos fail
// loudly instead of silently falling back to defaults.
RunConfig load_run_config(const std::filesystem::path& path);

// Throws ConfigError on out-of-range values; replay mode additionally
// requires the cache file to exist.
void validate(const RunConfig& config);

GatewayConfig gateway_config(const RunConfig& config);
GenOptions gen_options(const RunConfig& config);
MatchRule match_rule(const RunConfig& config);
EvaluatorOptions evaluator_options(const RunConfig& config);

}  // namespace ghl
