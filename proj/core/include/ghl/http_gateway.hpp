#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "ghl/cache.hpp"
#include "ghl/gateway.hpp"

namespace ghl {

enum class GatewayMode {
    live_record,  // consult cache first, dial out on miss, record the reply
    replay_only,  // never dial; a cache miss is an error
};

std::string to_string(GatewayMode mode);
GatewayMode gateway_mode_from_string(const std::string& name);

struct GatewayConfig {
    std::string endpoint = "https://api.openai.com/v1";
    std::string completion_model = "gpt-4o";
    std::string embedding_model = "text-embedding-3-small";
    std::string credential_env = "GHL_API_KEY";
    GatewayMode mode = GatewayMode::replay_only;
    int max_attempts = 3;
    int backoff_initial_ms = 1000;
    int timeout_s = 120;
    std::size_t embed_batch_limit = 128;
};

// Chat-completion and embedding client with a write-through record/replay
// cache. Every reply is cached by request digest; replay_only answers from
// the cache alone, so runs against a recorded cache make zero network calls.
class HttpGateway : public Gateway {
public:
    HttpGateway(GatewayConfig config, std::shared_ptr<CacheStore> cache);

    CompletionResult complete(const CompletionRequest& request) override;
    std::vector<EmbeddingVector> embed_batch(const std::vector<std::string>& texts,
                                             const std::string& model_id) override;

    // Number of HTTP requests actually dialed (cache hits excluded).
    std::size_t live_call_count() const { return live_calls_.load(); }

    const GatewayConfig& config() const { return config_; }

private:
    nlohmann::json post_json(const std::string& path, const nlohmann::json& body);
    std::string bearer_token() const;

    GatewayConfig config_;
    std::shared_ptr<CacheStore> cache_;
    std::atomic<std::size_t> live_calls_{0};
};

}  // namespace ghl
