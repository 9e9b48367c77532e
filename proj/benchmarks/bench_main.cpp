// Microbenchmarks for the hot paths: similarity math over embedding-sized
// vectors, threshold matching over large score grids, document chunking,
// id parsing and request digesting.

#include <benchmark/benchmark.h>

#include <random>
#include <string>
#include <vector>

#include "ghl/bluetooth_id.hpp"
#include "ghl/cache.hpp"
#include "ghl/chunker.hpp"
#include "ghl/corpus.hpp"
#include "ghl/evaluator.hpp"
#include "ghl/pipeline.hpp"

namespace {

std::vector<double> random_vector(std::size_t dim, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    std::vector<double> v(dim);
    for (auto& x : v) x = dist(rng);
    return v;
}

void bm_cosine_similarity(benchmark::State& state) {
    const auto dim = static_cast<std::size_t>(state.range(0));
    const std::vector<double> a = random_vector(dim, 1);
    const std::vector<double> b = random_vector(dim, 2);
    for (auto _ : state) benchmark::DoNotOptimize(ghl::cosine_similarity(a, b));
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()));
}
BENCHMARK(bm_cosine_similarity)->Arg(256)->Arg(1536)->Arg(3072);

void bm_match_threshold(benchmark::State& state) {
    const auto side = static_cast<std::size_t>(state.range(0));
    ghl::SimilarityMatrix matrix;
    matrix.truth_count = side;
    matrix.generated_count = side;
    matrix.scores = random_vector(side * side, 3);
    for (auto& s : matrix.scores) s = std::abs(s);
    const ghl::MatchRule rule{ghl::RoundingMode::one_decimal, 0.7};
    for (auto _ : state) benchmark::DoNotOptimize(ghl::match_threshold(matrix, rule));
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
                            static_cast<std::int64_t>(side * side));
}
BENCHMARK(bm_match_threshold)->Arg(30)->Arg(300);

void bm_chunk_document(benchmark::State& state) {
    const auto words = static_cast<std::size_t>(state.range(0));
    std::string body;
    body.reserve(words * 8);
    for (std::size_t i = 0; i < words; ++i) {
        if (i % 120 == 0) body += "\n## Section " + std::to_string(i / 120) + "\n";
        body += "requirement" + std::to_string(i % 997) + " ";
    }
    const ghl::RequirementDocument doc = ghl::ingest_requirement_text(body, "bench");
    for (auto _ : state) benchmark::DoNotOptimize(ghl::chunk_document(doc, 4000, 200));
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
                            static_cast<std::int64_t>(words));
}
BENCHMARK(bm_chunk_document)->Arg(10000)->Arg(100000);

void bm_parse_bluetooth_id(benchmark::State& state) {
    const std::string text = "AVRCP/CT/MDI/SUB/CAP/BV-42-C";
    for (auto _ : state) benchmark::DoNotOptimize(ghl::parse_bluetooth_id(text));
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()));
}
BENCHMARK(bm_parse_bluetooth_id);

void bm_cache_key(benchmark::State& state) {
    ghl::CompletionRequest req;
    req.model_id = "gpt-4o";
    req.user_text = std::string(4096, 'q');
    req.attachments = {{"requirements", std::string(16384, 'r')}};
    req.temperature = 0.0;
    req.seed = 7;
    for (auto _ : state) benchmark::DoNotOptimize(ghl::cache_key(req));
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()));
}
BENCHMARK(bm_cache_key);

void bm_parse_case_list(benchmark::State& state) {
    std::string reply;
    for (int i = 1; i <= 50; ++i)
        reply += std::to_string(i) + ". Verify that feature " + std::to_string(i) +
                 " behaves as required when the input is boundary value " +
                 std::to_string(i * 3) + ".\n";
    for (auto _ : state) benchmark::DoNotOptimize(ghl::parse_case_list(reply));
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) * 50);
}
BENCHMARK(bm_parse_case_list);

}  // namespace

BENCHMARK_MAIN();
