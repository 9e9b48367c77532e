#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "ghl/bluetooth_id.hpp"

namespace ghl {

enum class IdScheme { bluetooth, freetext };

std::string to_string(IdScheme scheme);
IdScheme id_scheme_from_string(std::string_view name);

struct FunctionEntry {
    std::string function_key;
    std::vector<std::filesystem::path> requirement_paths;
    std::filesystem::path truth_path;
    IdScheme id_scheme = IdScheme::freetext;
    std::optional<std::filesystem::path> strategy_path;
};

struct DatasetManifest {
    std::string dataset_name;
    std::vector<FunctionEntry> functions;
};

/// One detected section: heading text plus a half-open character range of the body.
struct DocumentSection {
    std::string heading;
    std::size_t begin = 0;
    std::size_t end = 0;
};

struct RequirementDocument {
    std::string function_key;
    std::string body;  // preserved byte-exact
    std::size_t word_count = 0;
    std::vector<DocumentSection> sections;
};

struct TestStrategyDocument {
    std::string body;
    std::filesystem::path source;
};

struct TruthTestCase {
    std::string case_key;
    std::string description;
    std::optional<BluetoothTestCaseId> structured_id;
    std::string function_key;
};

/// Loads and validates a JSON dataset manifest. Relative paths inside the
/// manifest are resolved against the manifest's own directory.
/// Throws CorpusError naming the offending field on any violation.
DatasetManifest load_manifest(const std::filesystem::path& path);

/// Reads a UTF-8 text/markdown file, counts words and detects sections from
/// markdown ("# ...") and numbered ("1.", "2.3 ...") heading lines. Documents
/// without headings get one whole-document section.
RequirementDocument ingest_requirement(const std::filesystem::path& path,
                                       const std::string& function_key);

/// Same, for an in-memory body.
RequirementDocument ingest_requirement_text(std::string body, const std::string& function_key);

TestStrategyDocument ingest_strategy(const std::filesystem::path& path);

/// One case per line. freetext lines are "key<TAB>description" or a bare
/// description (which then doubles as the key); bluetooth lines are one ID
/// each, stored canonically formatted. File order is preserved. Throws
/// CorpusError with the line number on duplicates and unparseable IDs.
std::vector<TruthTestCase> ingest_truth_cases(const std::filesystem::path& path, IdScheme scheme,
                                              const std::string& function_key);

std::vector<TruthTestCase> ingest_truth_cases_text(std::string_view text, IdScheme scheme,
                                                   const std::string& function_key);

}  // namespace ghl
