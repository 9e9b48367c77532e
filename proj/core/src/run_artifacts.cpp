#include "ghl/run_artifacts.hpp"

#include <fstream>

#include "ghl/errors.hpp"

namespace fs = std::filesystem;

namespace ghl {

namespace {

TechniqueCategory category_from_string(const std::string& name) {
    if (name == "specification_based") return TechniqueCategory::specification_based;
    if (name == "structure_based") return TechniqueCategory::structure_based;
    if (name == "experience_based") return TechniqueCategory::experience_based;
    return TechniqueCategory::uncatalogued;
}

}  // namespace

ordered_json metrics_to_json(const MetricsSummary& m) {
    return ordered_json{{"truth_total", m.truth_total},
                        {"generated_total", m.generated_total},
                        {"covered_truth", m.covered_truth},
                        {"valid_generated", m.valid_generated},
                        {"ratio", m.ratio},
                        {"precision", m.precision},
                        {"recall", m.recall},
                        {"f1", m.f1},
                        {"duration_s", m.duration_s}};
}

MetricsSummary metrics_from_json(const ordered_json& j) {
    MetricsSummary m;
    m.truth_total = j.value("truth_total", 0.0);
    m.generated_total = j.value("generated_total", 0.0);
    m.covered_truth = j.value("covered_truth", 0.0);
    m.valid_generated = j.value("valid_generated", 0.0);
    m.ratio = j.value("ratio", 0.0);
    m.precision = j.value("precision", 0.0);
    m.recall = j.value("recall", 0.0);
    m.f1 = j.value("f1", 0.0);
    m.duration_s = j.value("duration_s", 0.0);
    return m;
}

ordered_json to_json(const GenerationRun& run) {
    ordered_json j;
    j["function_key"] = run.function_key;
    j["strategy"] = to_string(run.strategy);
    j["run_index"] = run.run_index;
    j["params"] = ordered_json{{"completion_model", run.params.completion_model},
                               {"temperature", run.params.temperature},
                               {"seed", run.params.seed},
                               {"max_output_tokens", run.params.max_output_tokens},
                               {"chunk_max_words", run.params.chunk_max_words},
                               {"chunk_overlap_words", run.params.chunk_overlap_words}};
    j["chunk_count"] = run.chunk_count;
    ordered_json techniques = ordered_json::array();
    for (const auto& t : run.techniques_used)
        techniques.push_back(ordered_json{{"name", t.name}, {"category", to_string(t.category)}});
    j["techniques_used"] = std::move(techniques);
    ordered_json cases = ordered_json::array();
    for (const auto& c : run.cases) {
        ordered_json item;
        item["text"] = c.text;
        if (c.technique)
            item["technique"] = *c.technique;
        else
            item["technique"] = nullptr;
        item["chunk_index"] = c.provenance.chunk_index;
        item["line_index"] = c.provenance.line_index;
        item["transcript_digest"] = c.provenance.transcript_digest;
        cases.push_back(std::move(item));
    }
    j["cases"] = std::move(cases);
    ordered_json transcripts = ordered_json::array();
    for (const auto& t : run.transcripts)
        transcripts.push_back(ordered_json{{"label", t.label},
                                           {"chunk_index", t.chunk_index},
                                           {"request_digest", t.request_digest},
                                           {"response_digest", t.response_digest},
                                           {"input_tokens", t.input_tokens},
                                           {"output_tokens", t.output_tokens},
                                           {"from_cache", t.from_cache}});
    j["transcripts"] = std::move(transcripts);
    ordered_json failures = ordered_json::array();
    for (const auto& f : run.failures)
        failures.push_back(ordered_json{
            {"stage", f.stage}, {"chunk_index", f.chunk_index}, {"message", f.message}});
    j["failures"] = std::move(failures);
    j["duration_s"] = run.duration_s;
    return j;
}

GenerationRun generation_run_from_json(const ordered_json& j) {
    GenerationRun run;
    run.function_key = j.value("function_key", "");
    run.strategy = strategy_from_string(j.value("strategy", "zero-shot"));
    run.run_index = j.value("run_index", 0);
    if (j.contains("params")) {
        const auto& p = j["params"];
        run.params.completion_model = p.value("completion_model", "");
        run.params.temperature = p.value("temperature", 0.0);
        run.params.seed = p.value("seed", std::int64_t{0});
        run.params.max_output_tokens = p.value("max_output_tokens", std::uint32_t{4096});
        run.params.chunk_max_words = p.value("chunk_max_words", std::size_t{4000});
        run.params.chunk_overlap_words = p.value("chunk_overlap_words", std::size_t{200});
    }
    run.chunk_count = j.value("chunk_count", std::size_t{0});
    for (const auto& t : j.value("techniques_used", ordered_json::array()))
        run.techniques_used.push_back(
            {t.value("name", ""), category_from_string(t.value("category", ""))});
    for (const auto& c : j.value("cases", ordered_json::array())) {
        GeneratedTestCase item;
        item.text = c.value("text", "");
        if (c.contains("technique") && !c["technique"].is_null())
            item.technique = c["technique"].get<std::string>();
        item.provenance.chunk_index = c.value("chunk_index", std::size_t{0});
        item.provenance.line_index = c.value("line_index", std::size_t{0});
        item.provenance.transcript_digest = c.value("transcript_digest", "");
        run.cases.push_back(std::move(item));
    }
    for (const auto& t : j.value("transcripts", ordered_json::array())) {
        Transcript item;
        item.label = t.value("label", "");
        item.chunk_index = t.value("chunk_index", std::size_t{0});
        item.request_digest = t.value("request_digest", "");
        item.response_digest = t.value("response_digest", "");
        item.input_tokens = t.value("input_tokens", std::uint64_t{0});
        item.output_tokens = t.value("output_tokens", std::uint64_t{0});
        item.from_cache = t.value("from_cache", false);
        run.transcripts.push_back(std::move(item));
    }
    for (const auto& f : j.value("failures", ordered_json::array()))
        run.failures.push_back({f.value("stage", ""), f.value("chunk_index", std::size_t{0}),
                                f.value("message", "")});
    run.duration_s = j.value("duration_s", 0.0);
    return run;
}

ordered_json to_json(const EvaluationArtifact& a) {
    ordered_json j;
    j["function_key"] = a.function_key;
    j["strategy"] = to_string(a.strategy);
    j["run_index"] = a.run_index;
    j["embedding_model"] = a.embedding_model;
    j["rule"] = ordered_json{{"mode", to_string(a.rule.mode)}, {"threshold", a.rule.threshold}};
    j["truth_keys"] = a.truth_keys;
    j["generated_texts"] = a.generated_texts;
    ordered_json matrix;
    matrix["truth_count"] = a.matrix.truth_count;
    matrix["generated_count"] = a.matrix.generated_count;
    if (a.matrix.scores.size() <= kMatrixSerializationCap)
        matrix["scores"] = a.matrix.scores;
    else
        matrix["scores"] = nullptr;
    j["matrix"] = std::move(matrix);
    ordered_json pairs = ordered_json::array();
    for (const auto& p : a.matches.pairs)
        pairs.push_back(ordered_json{{"truth_index", p.truth_index},
                                     {"generated_index", p.generated_index},
                                     {"score", p.score}});
    j["matches"] = std::move(pairs);
    j["covered_truth"] = a.matches.covered_truth;
    j["valid_generated"] = a.matches.valid_generated;
    j["metrics"] = metrics_to_json(a.metrics);
    return j;
}

EvaluationArtifact evaluation_from_json(const ordered_json& j) {
    EvaluationArtifact a;
    a.function_key = j.value("function_key", "");
    a.strategy = strategy_from_string(j.value("strategy", "zero-shot"));
    a.run_index = j.value("run_index", 0);
    a.embedding_model = j.value("embedding_model", "");
    if (j.contains("rule")) {
        a.rule.mode = rounding_mode_from_string(j["rule"].value("mode", "one-decimal"));
        a.rule.threshold = j["rule"].value("threshold", 0.7);
    }
    a.truth_keys = j.value("truth_keys", std::vector<std::string>{});
    a.generated_texts = j.value("generated_texts", std::vector<std::string>{});
    if (j.contains("matrix")) {
        const auto& m = j["matrix"];
        a.matrix.truth_count = m.value("truth_count", std::size_t{0});
        a.matrix.generated_count = m.value("generated_count", std::size_t{0});
        if (m.contains("scores") && m["scores"].is_array())
            a.matrix.scores = m["scores"].get<std::vector<double>>();
    }
    for (const auto& p : j.value("matches", ordered_json::array()))
        a.matches.pairs.push_back({p.value("truth_index", std::size_t{0}),
                                   p.value("generated_index", std::size_t{0}),
                                   p.value("score", 0.0)});
    a.matches.covered_truth = j.value("covered_truth", std::size_t{0});
    a.matches.valid_generated = j.value("valid_generated", std::size_t{0});
    if (j.contains("metrics")) a.metrics = metrics_from_json(j["metrics"]);
    return a;
}

void save_json_file(const fs::path& path, const ordered_json& j) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw PipelineError("cannot write artifact: " + path.string());
    out << j.dump(2) << '\n';
    if (!out) throw PipelineError("artifact write failed: " + path.string());
}

ordered_json load_json_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw PipelineError("cannot read artifact: " + path.string());
    ordered_json j = ordered_json::parse(in, nullptr, false);
    if (j.is_discarded()) throw PipelineError("artifact is not valid JSON: " + path.string());
    return j;
}

}  // namespace ghl
