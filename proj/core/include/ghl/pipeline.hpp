#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ghl/chunker.hpp"
#include "ghl/corpus.hpp"
#include "ghl/gateway.hpp"
#include "ghl/prompts.hpp"
#include "ghl/techniques.hpp"

namespace ghl {

enum class Strategy { zero_shot, ghl, ghl_f };

std::string to_string(Strategy strategy);
Strategy strategy_from_string(const std::string& name);

struct Provenance {
    std::size_t chunk_index = 0;
    std::size_t line_index = 0;  // position within the parsed reply
    std::string transcript_digest;

    bool operator==(const Provenance&) const = default;
};

struct GeneratedTestCase {
    std::string text;
    std::optional<std::string> technique;  // canonical name; empty for zero-shot and combos
    Provenance provenance;
};

struct Transcript {
    std::string label;
    std::size_t chunk_index = 0;
    std::string request_digest;
    std::string response_digest;
    std::uint64_t input_tokens = 0;
    std::uint64_t output_tokens = 0;
    bool from_cache = false;
};

struct GenerationFailure {
    std::string stage;  // "extract_techniques", "per_technique:<name>", "function_combos", "zero_shot"
    std::size_t chunk_index = 0;
    std::string message;
};

struct GenerationParams {
    std::string completion_model;
    double temperature = 0.0;
    std::int64_t seed = 0;
    std::uint32_t max_output_tokens = 4096;
    std::size_t chunk_max_words = 4000;
    std::size_t chunk_overlap_words = 200;
};

struct GenerationRun {
    std::string function_key;
    Strategy strategy = Strategy::zero_shot;
    int run_index = 0;
    GenerationParams params;
    std::vector<TestDesignTechnique> techniques_used;  // ordered union across chunks
    std::vector<GeneratedTestCase> cases;
    std::vector<Transcript> transcripts;
    std::vector<GenerationFailure> failures;
    std::size_t chunk_count = 0;
    double duration_s = 0.0;
};

struct GenOptions {
    std::string completion_model = "gpt-4o";
    double temperature = 0.0;
    std::int64_t seed = 0;
    std::uint32_t max_output_tokens = 4096;
    std::size_t chunk_max_words = 4000;
    std::size_t chunk_overlap_words = 200;
    // When off, test-case prompts see a placeholder note instead of the
    // function's test strategy document.
    bool attach_strategy = true;
    std::string output_format;  // empty selects the built-in default
};

// Splits a model reply into candidate test-case texts. Handles numbered and
// bulleted lists, bold markers and "Test case N:" prefixes; unmarked lines
// count only when they read like a test case. Falls back to sentence
// scanning when the reply has no usable lines at all.
std::vector<std::string> parse_case_list(const std::string& reply);

// Display form: trimmed, inner whitespace collapsed, case preserved.
std::string normalize_case_text(const std::string& raw);

// Key used for duplicate collapse across a whole run.
std::string case_dedup_key(const std::string& text);

class GenerationPipeline {
public:
    GenerationPipeline(Gateway& gateway, const TemplateStore& templates, GenOptions options);

    // One full generation pass for one function with one strategy.
    // run_index feeds the request seed so repeats produce distinct requests.
    GenerationRun run(Strategy strategy, const RequirementDocument& doc,
                      const std::optional<TestStrategyDocument>& strategy_doc, int run_index) const;

private:
    struct CallOutcome {
        std::string text;
        std::string request_digest;
    };

    CallOutcome complete_and_log(GenerationRun& run, const std::string& label,
                                 std::size_t chunk_index, const std::string& prompt,
                                 int run_index) const;
    std::vector<TestDesignTechnique> techniques_for_chunk(GenerationRun& run,
                                                          const DocumentChunk& chunk,
                                                          int run_index) const;
    void generate_cases(GenerationRun& run, const std::string& label, std::size_t chunk_index,
                        const std::string& prompt, const std::optional<std::string>& technique,
                        int run_index, std::vector<GeneratedTestCase>& sink) const;

    Gateway& gateway_;
    const TemplateStore& templates_;
    GenOptions options_;
};

}  // namespace ghl
