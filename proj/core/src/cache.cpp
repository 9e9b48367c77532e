#include "ghl/cache.hpp"

#include <chrono>
#include <cstring>
#include <ctime>
#include <fstream>

#include "ghl/util.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace ghl {

std::string to_string(CacheKind kind) {
    return kind == CacheKind::completion ? "completion" : "embedding";
}

namespace {

std::string now_utc() {
    std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string record_checksum(const std::string& digest, CacheKind kind, const json& payload) {
    return sha256_hex(digest + "\n" + to_string(kind) + "\n" + payload.dump());
}

json record_to_json(const CacheRecord& rec) {
    return json{{"digest", rec.digest},
                {"kind", to_string(rec.kind)},
                {"payload", rec.payload},
                {"created_at", rec.created_at},
                {"checksum", record_checksum(rec.digest, rec.kind, rec.payload)}};
}

// Walks the length-prefixed records in `data`, invoking fn(record_json, ok).
// Returns load warnings; a short/garbled tail yields a warning, not an error.
template <typename Fn>
std::vector<std::string> scan_records(const std::string& data, Fn&& fn) {
    std::vector<std::string> warnings;
    std::size_t pos = 0;
    while (pos < data.size()) {
        if (pos + 4 > data.size()) {
            warnings.push_back("cache: truncated record header at byte " + std::to_string(pos) +
                               ", skipped");
            break;
        }
        std::uint32_t len = 0;
        std::memcpy(&len, data.data() + pos, 4);
        if (pos + 4 + len > data.size()) {
            warnings.push_back("cache: truncated trailing record at byte " + std::to_string(pos) +
                               ", skipped");
            break;
        }
        json rec = json::parse(data.substr(pos + 4, len), nullptr, false);
        if (rec.is_discarded() || !rec.is_object()) {
            warnings.push_back("cache: unparseable record at byte " + std::to_string(pos) +
                               ", scan stopped");
            break;
        }
        fn(rec);
        pos += 4 + len;
    }
    return warnings;
}

std::string read_all(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return data;
}

}  // namespace

std::string cache_key(const CompletionRequest& req) {
    json canon;
    canon["kind"] = "completion";
    canon["model_id"] = req.model_id;
    if (req.system_text)
        canon["system_text"] = *req.system_text;
    else
        canon["system_text"] = nullptr;
    canon["user_text"] = req.user_text;
    json atts = json::array();
    for (const auto& a : req.attachments) atts.push_back(json::array({a.label, a.body}));
    canon["attachments"] = atts;
    canon["temperature"] = req.temperature;
    canon["seed"] = req.seed;
    canon["max_output_tokens"] = req.max_output_tokens;
    return sha256_hex(canon.dump());
}

std::string embedding_cache_key(const std::string& text, const std::string& model_id) {
    json canon;
    canon["kind"] = "embedding";
    canon["model_id"] = model_id;
    canon["text"] = text;
    return sha256_hex(canon.dump());
}

CacheStore::CacheStore(fs::path file) : file_(std::move(file)) { load(); }

void CacheStore::load() {
    if (file_.empty() || !fs::exists(file_)) return;
    const std::string data = read_all(file_);
    warnings_ = scan_records(data, [&](const json& rec) {
        CacheRecord r;
        r.digest = rec.value("digest", "");
        r.kind = rec.value("kind", "completion") == "embedding" ? CacheKind::embedding
                                                                : CacheKind::completion;
        r.payload = rec.value("payload", json());
        r.created_at = rec.value("created_at", "");
        if (!r.digest.empty()) records_.emplace(r.digest, std::move(r));
    });
}

std::optional<json> CacheStore::find(const std::string& digest) const {
    std::lock_guard lock(mutex_);
    auto it = records_.find(digest);
    if (it == records_.end()) return std::nullopt;
    return std::make_optional(it->second.payload);
}

void CacheStore::put(const std::string& digest, CacheKind kind, json payload) {
    std::lock_guard lock(mutex_);
    if (records_.contains(digest)) return;
    CacheRecord rec{digest, kind, std::move(payload), now_utc()};
    if (!file_.empty()) append_to_file(rec);
    records_.emplace(digest, std::move(rec));
}

void CacheStore::append_to_file(const CacheRecord& rec) {
    const std::string blob = record_to_json(rec).dump();
    const auto len = static_cast<std::uint32_t>(blob.size());
    std::ofstream out(file_, std::ios::binary | std::ios::app);
    if (!out) throw GatewayError("cache file not writable: " + file_.string());
    out.write(reinterpret_cast<const char*>(&len), 4);
    out.write(blob.data(), static_cast<std::streamsize>(blob.size()));
    out.flush();
    if (!out) throw GatewayError("cache append failed: " + file_.string());
}

std::size_t CacheStore::size() const {
    std::lock_guard lock(mutex_);
    return records_.size();
}

std::size_t CacheStore::count(CacheKind kind) const {
    std::lock_guard lock(mutex_);
    std::size_t n = 0;
    for (const auto& [_, rec] : records_)
        if (rec.kind == kind) ++n;
    return n;
}

std::vector<std::string> CacheStore::warnings() const {
    std::lock_guard lock(mutex_);
    return warnings_;
}

CacheVerifyReport CacheStore::verify() const {
    CacheVerifyReport report;
    if (file_.empty() || !fs::exists(file_)) return report;
    const std::string data = read_all(file_);
    auto scan_warnings = scan_records(data, [&](const json& rec) {
        const std::string digest = rec.value("digest", "");
        CacheKind kind =
            rec.value("kind", "completion") == "embedding" ? CacheKind::embedding : CacheKind::completion;
        const std::string stored = rec.value("checksum", "");
        if (stored == record_checksum(digest, kind, rec.value("payload", json()))) {
            ++report.valid_records;
        } else {
            ++report.checksum_failures;
            report.warnings.push_back("cache: checksum mismatch for digest " + digest);
        }
    });
    report.warnings.insert(report.warnings.end(), scan_warnings.begin(), scan_warnings.end());
    return report;
}

}  // namespace ghl
