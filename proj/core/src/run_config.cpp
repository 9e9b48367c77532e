#include "ghl/run_config.hpp"

#include <fstream>
#include <set>

#include <nlohmann/json.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace ghl {

namespace {

void reject_unknown_keys(const json& obj, const std::string& group,
                         std::initializer_list<const char*> known) {
    for (const auto& [key, _] : obj.items()) {
        bool ok = false;
        for (const char* k : known)
            if (key == k) ok = true;
        if (!ok) throw ConfigError("config: unknown key '" + key + "' in " + group);
    }
}

fs::path resolve(const fs::path& base, const fs::path& p) {
    if (p.empty() || p.is_absolute()) return p;
    return base / p;
}

}  // namespace

RunConfig load_run_config(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("config file not readable: " + path.string());
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded()) throw ConfigError("config is not valid JSON: " + path.string());
    if (!j.is_object()) throw ConfigError("config root must be an object: " + path.string());

    reject_unknown_keys(j, "config root",
                        {"models", "generation", "evaluation", "execution", "paths"});

    RunConfig c;
    const fs::path base = path.has_parent_path() ? path.parent_path() : fs::path(".");

    if (j.contains("models")) {
        const auto& m = j["models"];
        reject_unknown_keys(m, "models", {"completion", "embedding"});
        c.completion_model = m.value("completion", c.completion_model);
        c.embedding_model = m.value("embedding", c.embedding_model);
    }
    if (j.contains("generation")) {
        const auto& g = j["generation"];
        reject_unknown_keys(g, "generation",
                            {"temperature", "seed", "max_output_tokens", "chunk_max_words",
                             "chunk_overlap_words", "attach_strategy", "output_format",
                             "template_dir"});
        c.temperature = g.value("temperature", c.temperature);
        c.seed = g.value("seed", c.seed);
        c.max_output_tokens = g.value("max_output_tokens", c.max_output_tokens);
        c.chunk_max_words = g.value("chunk_max_words", c.chunk_max_words);
        c.chunk_overlap_words = g.value("chunk_overlap_words", c.chunk_overlap_words);
        c.attach_strategy = g.value("attach_strategy", c.attach_strategy);
        if (g.contains("output_format") && !g["output_format"].is_null())
            c.output_format = g["output_format"].get<std::string>();
        if (g.contains("template_dir") && !g["template_dir"].is_null())
            c.template_dir = resolve(base, g["template_dir"].get<std::string>());
    }
    if (j.contains("evaluation")) {
        const auto& e = j["evaluation"];
        reject_unknown_keys(e, "evaluation",
                            {"threshold", "rounding", "bin_width", "identical_text_fast_path"});
        c.threshold = e.value("threshold", c.threshold);
        if (e.contains("rounding"))
            c.rounding = rounding_mode_from_string(e["rounding"].get<std::string>());
        c.bin_width = e.value("bin_width", c.bin_width);
        c.identical_text_fast_path =
            e.value("identical_text_fast_path", c.identical_text_fast_path);
    }
    if (j.contains("execution")) {
        const auto& x = j["execution"];
        reject_unknown_keys(x, "execution",
                            {"repeats", "concurrency", "mode", "endpoint", "credential_env",
                             "max_attempts", "backoff_initial_ms", "timeout_s"});
        c.repeats = x.value("repeats", c.repeats);
        c.concurrency = x.value("concurrency", c.concurrency);
        if (x.contains("mode")) c.mode = gateway_mode_from_string(x["mode"].get<std::string>());
        c.endpoint = x.value("endpoint", c.endpoint);
        c.credential_env = x.value("credential_env", c.credential_env);
        c.max_attempts = x.value("max_attempts", c.max_attempts);
        c.backoff_initial_ms = x.value("backoff_initial_ms", c.backoff_initial_ms);
        c.timeout_s = x.value("timeout_s", c.timeout_s);
    }
    if (j.contains("paths")) {
        const auto& p = j["paths"];
        reject_unknown_keys(p, "paths", {"cache_file", "output_dir", "manifests"});
        if (p.contains("cache_file"))
            c.cache_file = resolve(base, p["cache_file"].get<std::string>());
        if (p.contains("output_dir"))
            c.output_dir = resolve(base, p["output_dir"].get<std::string>());
        for (const auto& m : p.value("manifests", json::array()))
            c.manifests.push_back(resolve(base, m.get<std::string>()));
    }
    return c;
}

void validate(const RunConfig& c) {
    if (c.completion_model.empty()) throw ConfigError("config: completion model is empty");
    if (c.embedding_model.empty()) throw ConfigError("config: embedding model is empty");
    if (c.repeats < 1) throw ConfigError("config: repeats must be >= 1");
    if (c.concurrency < 1) throw ConfigError("config: concurrency must be >= 1");
    if (c.max_attempts < 1) throw ConfigError("config: max_attempts must be >= 1");
    if (c.threshold < 0.0 || c.threshold > 1.0)
        throw ConfigError("config: threshold must be within [0, 1]");
    if (c.bin_width <= 0.0) throw ConfigError("config: bin_width must be positive");
    if (c.chunk_max_words == 0) throw ConfigError("config: chunk_max_words must be positive");
    if (c.chunk_overlap_words >= c.chunk_max_words)
        throw ConfigError("config: chunk_overlap_words must be smaller than chunk_max_words");
    if (c.mode == GatewayMode::replay_only && !fs::exists(c.cache_file))
        throw ConfigError("config: replay-only mode needs an existing cache file, missing: " +
                          c.cache_file.string());
    if (!c.template_dir.empty() && !fs::is_directory(c.template_dir))
        throw ConfigError("config: template_dir is not a directory: " +
                          c.template_dir.string());
}

GatewayConfig gateway_config(const RunConfig& c) {
    GatewayConfig g;
    g.endpoint = c.endpoint;
    g.completion_model = c.completion_model;
    g.embedding_model = c.embedding_model;
    g.credential_env = c.credential_env;
    g.mode = c.mode;
    g.max_attempts = c.max_attempts;
    g.backoff_initial_ms = c.backoff_initial_ms;
    g.timeout_s = c.timeout_s;
    return g;
}

GenOptions gen_options(const RunConfig& c) {
    GenOptions o;
    o.completion_model = c.completion_model;
    o.temperature = c.temperature;
    o.seed = c.seed;
    o.max_output_tokens = c.max_output_tokens;
    o.chunk_max_words = c.chunk_max_words;
    o.chunk_overlap_words = c.chunk_overlap_words;
    o.attach_strategy = c.attach_strategy;
    o.output_format = c.output_format;
    return o;
}

MatchRule match_rule(const RunConfig& c) { return {c.rounding, c.threshold}; }

EvaluatorOptions evaluator_options(const RunConfig& c) {
    return {c.embedding_model, c.identical_text_fast_path};
}

}  // namespace ghl
