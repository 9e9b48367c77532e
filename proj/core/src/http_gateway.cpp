#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include "ghl/http_gateway.hpp"

#include <chrono>
#include <cstdlib>
#include <thread>

using nlohmann::json;

namespace ghl {

std::string to_string(GatewayMode mode) {
    return mode == GatewayMode::live_record ? "live_record" : "replay_only";
}

GatewayMode gateway_mode_from_string(const std::string& name) {
    if (name == "live_record") return GatewayMode::live_record;
    if (name == "replay_only") return GatewayMode::replay_only;
    throw ConfigError("unknown gateway mode: '" + name + "'");
}

namespace {

struct SplitUrl {
    std::string origin;  // scheme://host[:port]
    std::string prefix;  // path part, no trailing slash
};

SplitUrl split_url(const std::string& endpoint) {
    auto scheme_end = endpoint.find("://");
    if (scheme_end == std::string::npos)
        throw ConfigError("endpoint must include a scheme: '" + endpoint + "'");
    auto path_start = endpoint.find('/', scheme_end + 3);
    SplitUrl out;
    if (path_start == std::string::npos) {
        out.origin = endpoint;
    } else {
        out.origin = endpoint.substr(0, path_start);
        out.prefix = endpoint.substr(path_start);
    }
    while (!out.prefix.empty() && out.prefix.back() == '/') out.prefix.pop_back();
    return out;
}

bool looks_like_context_overflow(const std::string& body) {
    return body.find("context_length") != std::string::npos ||
           body.find("maximum context length") != std::string::npos;
}

}  // namespace

HttpGateway::HttpGateway(GatewayConfig config, std::shared_ptr<CacheStore> cache)
    : config_(std::move(config)), cache_(std::move(cache)) {
    if (!cache_) throw ConfigError("gateway requires a cache store");
    split_url(config_.endpoint);  // validate eagerly
    if (config_.max_attempts < 1) throw ConfigError("gateway max_attempts must be >= 1");
}

std::string HttpGateway::bearer_token() const {
    const char* value = std::getenv(config_.credential_env.c_str());
    if (value == nullptr || *value == '\0')
        throw AuthError("credential environment variable " + config_.credential_env +
                        " is not set");
    return value;
}

json HttpGateway::post_json(const std::string& path, const json& body) {
    const SplitUrl url = split_url(config_.endpoint);
    const std::string token = bearer_token();
    const std::string payload = body.dump();

    std::string last_error;
    for (int attempt = 1; attempt <= config_.max_attempts; ++attempt) {
        if (attempt > 1) {
            auto delay = std::chrono::milliseconds(
                static_cast<std::int64_t>(config_.backoff_initial_ms) << (attempt - 2));
            std::this_thread::sleep_for(delay);
        }
        httplib::Client client(url.origin);
        client.set_connection_timeout(config_.timeout_s, 0);
        client.set_read_timeout(config_.timeout_s, 0);
        client.set_bearer_token_auth(token);
        live_calls_.fetch_add(1);
        auto res = client.Post(url.prefix + path, payload, "application/json");
        if (!res) {
            last_error = "network error: " + httplib::to_string(res.error());
            continue;
        }
        if (res->status == 200) {
            json parsed = json::parse(res->body, nullptr, false);
            if (parsed.is_discarded())
                throw ProviderError("provider returned unparseable JSON", res->status, false);
            return parsed;
        }
        if (res->status == 401 || res->status == 403)
            throw AuthError("provider rejected credentials (HTTP " +
                            std::to_string(res->status) + ")");
        if (res->status == 400 && looks_like_context_overflow(res->body))
            throw ContextLengthError("provider reports the request exceeds the model context");
        if (res->status == 429 || res->status >= 500) {
            last_error = "HTTP " + std::to_string(res->status) + ": " + res->body.substr(0, 300);
            continue;
        }
        throw ProviderError("HTTP " + std::to_string(res->status) + ": " +
                                res->body.substr(0, 300),
                            res->status, false);
    }
    throw ProviderError("provider unavailable after " + std::to_string(config_.max_attempts) +
                            " attempts (" + last_error + ")",
                        0, true);
}

CompletionResult HttpGateway::complete(const CompletionRequest& request) {
    const std::string digest = cache_key(request);
    if (auto hit = cache_->find(digest)) {
        CompletionResult out;
        out.text = hit->value("text", "");
        out.input_tokens = hit->value("input_tokens", std::uint64_t{0});
        out.output_tokens = hit->value("output_tokens", std::uint64_t{0});
        out.latency_ms = hit->value("latency_ms", std::uint64_t{0});
        out.from_cache = true;
        return out;
    }
    if (config_.mode == GatewayMode::replay_only) throw CacheMissError(digest);

    std::string user_content = request.user_text;
    for (const auto& att : request.attachments)
        user_content += "\n\n[attachment: " + att.label + "]\n" + att.body;

    json messages = json::array();
    if (request.system_text)
        messages.push_back({{"role", "system"}, {"content", *request.system_text}});
    messages.push_back({{"role", "user"}, {"content", user_content}});

    json body{{"model", request.model_id},
              {"messages", messages},
              {"temperature", request.temperature},
              {"seed", request.seed},
              {"max_tokens", request.max_output_tokens}};

    const auto started = std::chrono::steady_clock::now();
    json reply = post_json("/chat/completions", body);
    const auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
                             std::chrono::steady_clock::now() - started)
                             .count();

    CompletionResult out;
    try {
        out.text = reply.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const json::exception&) {
        throw ProviderError("completion reply is missing choices[0].message.content", 200, false);
    }
    if (reply.contains("usage")) {
        out.input_tokens = reply["usage"].value("prompt_tokens", std::uint64_t{0});
        out.output_tokens = reply["usage"].value("completion_tokens", std::uint64_t{0});
    }
    out.latency_ms = static_cast<std::uint64_t>(elapsed);
    out.from_cache = false;

    cache_->put(digest, CacheKind::completion,
                json{{"text", out.text},
                     {"input_tokens", out.input_tokens},
                     {"output_tokens", out.output_tokens},
                     {"latency_ms", out.latency_ms}});
    return out;
}

std::vector<EmbeddingVector> HttpGateway::embed_batch(const std::vector<std::string>& texts,
                                                      const std::string& model_id) {
    std::vector<EmbeddingVector> out(texts.size());
    std::vector<std::size_t> missing;
    for (std::size_t i = 0; i < texts.size(); ++i) {
        const std::string digest = embedding_cache_key(texts[i], model_id);
        if (auto hit = cache_->find(digest)) {
            out[i].components = hit->value("components", std::vector<double>{});
            out[i].model_id = model_id;
        } else {
            missing.push_back(i);
        }
    }
    if (missing.empty()) return out;
    if (config_.mode == GatewayMode::replay_only)
        throw CacheMissError(embedding_cache_key(texts[missing.front()], model_id));

    for (std::size_t begin = 0; begin < missing.size(); begin += config_.embed_batch_limit) {
        const std::size_t end = std::min(missing.size(), begin + config_.embed_batch_limit);
        json input = json::array();
        for (std::size_t k = begin; k < end; ++k) input.push_back(texts[missing[k]]);
        json reply = post_json("/embeddings", json{{"model", model_id}, {"input", input}});
        if (!reply.contains("data") || !reply["data"].is_array() ||
            reply["data"].size() != end - begin)
            throw ProviderError("embedding reply size does not match the request", 200, false);
        for (const auto& item : reply["data"]) {
            std::size_t idx = item.value("index", json::size_type{0});
            if (idx >= end - begin)
                throw ProviderError("embedding reply has an out-of-range index", 200, false);
            const std::size_t target = missing[begin + idx];
            out[target].components = item.at("embedding").get<std::vector<double>>();
            out[target].model_id = model_id;
            cache_->put(embedding_cache_key(texts[target], model_id), CacheKind::embedding,
                        json{{"components", out[target].components}});
        }
    }
    for (std::size_t i = 0; i < out.size(); ++i)
        if (out[i].components.empty())
            throw ProviderError("embedding reply left a text without a vector", 200, false);
    return out;
}

}  // namespace ghl
