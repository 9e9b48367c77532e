#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ghl/gateway.hpp"

namespace ghl {

enum class CacheKind { completion, embedding };

std::string to_string(CacheKind kind);

/// Canonical content digest of a completion request. Covers every semantic
/// field (model, texts, attachments in order, temperature, seed, token limit)
/// and nothing else.
std::string cache_key(const CompletionRequest& req);

/// Per-text digest for embedding requests.
std::string embedding_cache_key(const std::string& text, const std::string& model_id);

struct CacheRecord {
    std::string digest;
    CacheKind kind = CacheKind::completion;
    nlohmann::json payload;
    std::string created_at;  // UTC, informational only
};

struct CacheVerifyReport {
    std::size_t valid_records = 0;
    std::size_t checksum_failures = 0;
    std::vector<std::string> warnings;
};

/// Append-only record store backed by one file. Records are length-prefixed
/// JSON blobs; a truncated trailing record is skipped with a warning instead
/// of failing the load. Existing records are never rewritten.
///
/// Thread-safe: lookups may run concurrently, appends are serialized.
class CacheStore {
  public:
    CacheStore() = default;  // in-memory only (tests)
    explicit CacheStore(std::filesystem::path file);

    std::optional<nlohmann::json> find(const std::string& digest) const;

    /// No-op if the digest is already present (first record wins).
    void put(const std::string& digest, CacheKind kind, nlohmann::json payload);

    std::size_t size() const;
    std::size_t count(CacheKind kind) const;

    /// Load-time warnings (e.g. skipped truncated trailing record).
    std::vector<std::string> warnings() const;

    /// Re-reads the file, recomputing each record's checksum.
    CacheVerifyReport verify() const;

    const std::filesystem::path& file() const { return file_; }

  private:
    void load();
    void append_to_file(const CacheRecord& rec);

    std::filesystem::path file_;
    mutable std::mutex mutex_;
    std::map<std::string, CacheRecord> records_;
    std::vector<std::string> warnings_;
};

}  // namespace ghl
