#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ghl/errors.hpp"

namespace ghl {

struct Attachment {
    std::string label;
    std::string body;
    bool operator==(const Attachment&) const = default;
};

struct CompletionRequest {
    std::string model_id;
    std::optional<std::string> system_text;
    std::string user_text;
    std::vector<Attachment> attachments;  // inlined into the prompt as labeled blocks
    double temperature = 0.0;
    std::int64_t seed = 0;
    std::uint32_t max_output_tokens = 4096;
};

struct CompletionResult {
    std::string text;
    std::uint64_t input_tokens = 0;
    std::uint64_t output_tokens = 0;
    std::uint64_t latency_ms = 0;
    bool from_cache = false;
};

struct EmbeddingVector {
    std::vector<double> components;
    std::string model_id;
};

struct GatewayError : Error {
    using Error::Error;
};

/// Replay-only mode was asked for a request that is not in the cache.
struct CacheMissError : GatewayError {
    explicit CacheMissError(std::string digest_)
        : GatewayError("cache miss in replay-only mode, digest " + digest_),
          digest(std::move(digest_)) {}
    std::string digest;
};

struct AuthError : GatewayError {
    using GatewayError::GatewayError;
};

/// The provider rejected the request as too long; callers should chunk.
struct ContextLengthError : GatewayError {
    using GatewayError::GatewayError;
};

struct ProviderError : GatewayError {
    ProviderError(const std::string& msg, int status_, bool retryable_)
        : GatewayError(msg), status(status_), retryable(retryable_) {}
    int status = 0;
    bool retryable = false;
};

/// Provider-agnostic chat-completion + embedding access. Implementations must
/// be safe to call from multiple threads.
class Gateway {
  public:
    virtual ~Gateway() = default;

    virtual CompletionResult complete(const CompletionRequest& req) = 0;

    /// Output order matches input order; one vector per text.
    virtual std::vector<EmbeddingVector> embed_batch(const std::vector<std::string>& texts,
                                                     const std::string& model_id) = 0;
};

}  // namespace ghl
