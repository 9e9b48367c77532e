#include "ghl/corpus.hpp"

#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "ghl/errors.hpp"
#include "ghl/util.hpp"

namespace fs = std::filesystem;

namespace ghl {

std::string to_string(IdScheme scheme) {
    return scheme == IdScheme::bluetooth ? "bluetooth" : "freetext";
}

IdScheme id_scheme_from_string(std::string_view name) {
    if (name == "bluetooth") return IdScheme::bluetooth;
    if (name == "freetext") return IdScheme::freetext;
    throw CorpusError("unknown id_scheme \"" + std::string(name) + "\" (expected bluetooth or freetext)");
}

namespace {

std::string read_file(const fs::path& path, const char* what) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CorpusError(std::string(what) + " not readable: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return std::move(buf).str();
}

fs::path resolve_relative(const fs::path& base_dir, const fs::path& p) {
    return p.is_absolute() ? p : base_dir / p;
}

void require_exists(const fs::path& p, const std::string& where) {
    if (!fs::exists(p))
        throw CorpusError("manifest: dangling path in " + where + ": " + p.string());
}

/// Markdown heading ("# Title") or numbered heading ("3.", "2.1 Scope").
/// Returns the heading text without the marker, or nullopt.
std::optional<std::string> heading_text(std::string_view line) {
    std::string_view t = trim(line);
    if (t.empty()) return std::nullopt;
    if (t[0] == '#') {
        std::size_t hashes = 0;
        while (hashes < t.size() && t[hashes] == '#') ++hashes;
        if (hashes <= 6 && hashes < t.size() && t[hashes] == ' ')
            return std::string(trim(t.substr(hashes)));
        return std::nullopt;
    }
    // "N." / "N.N" style: digits, optionally .digits groups, optional final dot,
    // then at least one space and some text.
    std::size_t i = 0;
    if (!std::isdigit(static_cast<unsigned char>(t[0]))) return std::nullopt;
    while (i < t.size() && std::isdigit(static_cast<unsigned char>(t[i]))) ++i;
    bool saw_dot = false;
    while (i + 1 < t.size() && t[i] == '.' && std::isdigit(static_cast<unsigned char>(t[i + 1]))) {
        saw_dot = true;
        ++i;
        while (i < t.size() && std::isdigit(static_cast<unsigned char>(t[i]))) ++i;
    }
    if (i < t.size() && t[i] == '.') {
        saw_dot = true;
        ++i;
    }
    // A bare "7 days retention" sentence is body text, not a heading.
    if (!saw_dot) return std::nullopt;
    if (i >= t.size() || t[i] != ' ') return std::nullopt;
    std::string_view rest = trim(t.substr(i));
    if (rest.empty()) return std::nullopt;
    return std::string(rest);
}

}  // namespace

DatasetManifest load_manifest(const fs::path& path) {
    if (!fs::exists(path)) throw CorpusError("manifest not found: " + path.string());
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(read_file(path, "manifest"));
    } catch (const nlohmann::json::exception& e) {
        throw CorpusError("manifest " + path.string() + " is not valid JSON: " + e.what());
    }

    DatasetManifest manifest;
    try {
        manifest.dataset_name = doc.at("dataset_name").get<std::string>();
        if (trim(manifest.dataset_name).empty())
            throw CorpusError("manifest: dataset_name is empty");
        if (!doc.contains("functions") || !doc["functions"].is_array())
            throw CorpusError("manifest: missing functions array");
        if (doc["functions"].empty()) throw CorpusError("manifest has no functions");

        const fs::path base = path.has_parent_path() ? path.parent_path() : fs::path(".");
        std::set<std::string> seen_keys;
        for (std::size_t i = 0; i < doc["functions"].size(); ++i) {
            const auto& f = doc["functions"][i];
            const std::string where = "functions[" + std::to_string(i) + "]";
            FunctionEntry entry;
            entry.function_key = f.at("function_key").get<std::string>();
            if (trim(entry.function_key).empty())
                throw CorpusError("manifest: empty function_key in " + where);
            if (!seen_keys.insert(entry.function_key).second)
                throw CorpusError("manifest: duplicate function_key \"" + entry.function_key + "\"");

            if (!f.contains("requirement_paths") || !f["requirement_paths"].is_array() ||
                f["requirement_paths"].empty())
                throw CorpusError("manifest: " + where + " has no requirement_paths");
            for (const auto& rp : f["requirement_paths"]) {
                fs::path p = resolve_relative(base, fs::path(rp.get<std::string>()));
                require_exists(p, where + ".requirement_paths");
                entry.requirement_paths.push_back(p);
            }

            entry.truth_path = resolve_relative(base, fs::path(f.at("truth_path").get<std::string>()));
            require_exists(entry.truth_path, where + ".truth_path (" + entry.function_key + ")");

            entry.id_scheme = id_scheme_from_string(f.at("id_scheme").get<std::string>());

            if (f.contains("strategy_path") && !f["strategy_path"].is_null()) {
                fs::path sp = resolve_relative(base, fs::path(f["strategy_path"].get<std::string>()));
                require_exists(sp, where + ".strategy_path");
                entry.strategy_path = sp;
            }
            manifest.functions.push_back(std::move(entry));
        }
    } catch (const nlohmann::json::exception& e) {
        throw CorpusError("manifest " + path.string() + ": malformed record: " + e.what());
    }
    return manifest;
}

RequirementDocument ingest_requirement_text(std::string body, const std::string& function_key) {
    if (trim(body).empty()) throw CorpusError("requirement document is empty (" + function_key + ")");

    RequirementDocument doc;
    doc.function_key = function_key;
    doc.body = std::move(body);
    doc.word_count = word_count(doc.body);

    // Heading line start offsets, scanning the raw body so spans stay byte-accurate.
    std::vector<std::pair<std::size_t, std::string>> headings;
    std::size_t pos = 0;
    while (pos <= doc.body.size()) {
        std::size_t nl = doc.body.find('\n', pos);
        std::size_t line_end = (nl == std::string::npos) ? doc.body.size() : nl;
        std::string_view line(doc.body.data() + pos, line_end - pos);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (auto h = heading_text(line)) headings.emplace_back(pos, *h);
        if (nl == std::string::npos) break;
        pos = nl + 1;
    }

    if (headings.empty()) {
        doc.sections.push_back({"", 0, doc.body.size()});
        return doc;
    }
    if (headings.front().first > 0) {
        // preamble before the first heading
        doc.sections.push_back({"", 0, headings.front().first});
    }
    for (std::size_t i = 0; i < headings.size(); ++i) {
        std::size_t end = (i + 1 < headings.size()) ? headings[i + 1].first : doc.body.size();
        doc.sections.push_back({headings[i].second, headings[i].first, end});
    }
    return doc;
}

RequirementDocument ingest_requirement(const fs::path& path, const std::string& function_key) {
    return ingest_requirement_text(read_file(path, "requirement document"), function_key);
}

TestStrategyDocument ingest_strategy(const fs::path& path) {
    TestStrategyDocument doc;
    doc.body = read_file(path, "test strategy document");
    doc.source = path;
    if (trim(doc.body).empty()) throw CorpusError("test strategy document is empty: " + path.string());
    return doc;
}

std::vector<TruthTestCase> ingest_truth_cases_text(std::string_view text, IdScheme scheme,
                                                   const std::string& function_key) {
    std::vector<TruthTestCase> cases;
    std::set<std::string> seen;
    std::size_t line_no = 0;
    for (std::string_view raw : split_lines(text)) {
        ++line_no;
        std::string_view line = trim(raw);
        if (line.empty()) continue;

        TruthTestCase tc;
        tc.function_key = function_key;
        if (scheme == IdScheme::bluetooth) {
            BluetoothTestCaseId id;
            try {
                id = parse_bluetooth_id(line);
            } catch (const CorpusError& e) {
                throw CorpusError("truth file line " + std::to_string(line_no) + ": " + e.what());
            }
            tc.case_key = format_bluetooth_id(id);
            tc.description = tc.case_key;
            tc.structured_id = std::move(id);
        } else {
            std::size_t tab = line.find('\t');
            if (tab != std::string_view::npos) {
                tc.case_key = std::string(trim(line.substr(0, tab)));
                tc.description = std::string(trim(line.substr(tab + 1)));
            } else {
                tc.case_key = std::string(line);
                tc.description = std::string(line);
            }
            if (tc.case_key.empty() || tc.description.empty())
                throw CorpusError("truth file line " + std::to_string(line_no) +
                                  ": empty key or description");
        }
        if (!seen.insert(tc.case_key).second)
            throw CorpusError("truth file line " + std::to_string(line_no) + ": duplicate key \"" +
                              tc.case_key + "\"");
        cases.push_back(std::move(tc));
    }
    return cases;
}

std::vector<TruthTestCase> ingest_truth_cases(const fs::path& path, IdScheme scheme,
                                              const std::string& function_key) {
    return ingest_truth_cases_text(read_file(path, "truth file"), scheme, function_key);
}

}  // namespace ghl
