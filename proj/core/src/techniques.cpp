#include "ghl/techniques.hpp"

#include <algorithm>
#include <cctype>

#include "ghl/util.hpp"

namespace ghl {

namespace {

// Lowercase, punctuation folded to spaces, whitespace collapsed, with one
// trailing "testing"/"technique(s)"/"test" word dropped.
std::string canonical_key(const std::string& raw) {
    std::string s;
    s.reserve(raw.size());
    for (char c : raw) {
        if (std::isalnum(static_cast<unsigned char>(c)))
            s.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
        else
            s.push_back(' ');
    }
    s = collapse_whitespace(s);
    for (const char* suffix : {" testing", " techniques", " technique", " tests", " test"}) {
        std::string suf(suffix);
        if (s.size() > suf.size() && s.ends_with(suf)) {
            s.erase(s.size() - suf.size());
            break;
        }
    }
    return s;
}

std::string capitalize_words(const std::string& raw) {
    std::string out = collapse_whitespace(trim(raw));
    bool at_word_start = true;
    for (char& c : out) {
        if (c == ' ') {
            at_word_start = true;
        } else {
            if (at_word_start) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
            at_word_start = false;
        }
    }
    return out;
}

struct LineItem {
    std::string text;
    bool marked;  // came from a numbered/bulleted/bold list entry
};

bool strip_list_marker(std::string& line) {
    std::string t(trim(line));
    bool marked = false;
    if (!t.empty() && (t[0] == '-' || t[0] == '*' || t[0] == '+')) {
        std::size_t i = 0;
        while (i < t.size() && (t[i] == '-' || t[i] == '*' || t[i] == '+')) ++i;
        if (i < t.size() && t[i] == ' ') {
            t = trim(t.substr(i));
            marked = true;
        }
    }
    if (t.size() >= 3 && t.compare(0, 3, "\xE2\x80\xA2") == 0) {  // bullet •
        t = trim(t.substr(3));
        marked = true;
    }
    std::size_t digits = 0;
    while (digits < t.size() && std::isdigit(static_cast<unsigned char>(t[digits]))) ++digits;
    if (digits > 0 && digits < t.size() && (t[digits] == '.' || t[digits] == ')')) {
        t = trim(t.substr(digits + 1));
        marked = true;
    }
    if (t.find("**") != std::string::npos) marked = true;
    std::string cleaned;
    cleaned.reserve(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (i + 1 < t.size() && t[i] == '*' && t[i + 1] == '*') {
            ++i;
            continue;
        }
        cleaned.push_back(t[i]);
    }
    line = trim(cleaned);
    return marked;
}

std::vector<std::string> split_fragments(const std::string& text) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t comma = text.find(',', start);
        std::string piece =
            comma == std::string::npos ? text.substr(start) : text.substr(start, comma - start);
        std::string frag(trim(piece));
        if (frag.size() > 4 && frag.compare(0, 4, "and ") == 0) frag = trim(frag.substr(4));
        while (!frag.empty() && (frag.back() == '.' || frag.back() == ';')) frag.pop_back();
        frag = trim(frag);
        if (!frag.empty()) out.push_back(frag);
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return out;
}

}  // namespace

std::string to_string(TechniqueCategory category) {
    switch (category) {
        case TechniqueCategory::specification_based: return "specification_based";
        case TechniqueCategory::structure_based: return "structure_based";
        case TechniqueCategory::experience_based: return "experience_based";
        case TechniqueCategory::uncatalogued: return "uncatalogued";
    }
    return "uncatalogued";
}

void TechniqueCatalog::add(std::string name, TechniqueCategory category,
                           std::vector<std::string> aliases) {
    entries_.push_back({std::move(name), category});
    const std::size_t idx = entries_.size() - 1;
    aliases_.push_back({canonical_key(entries_[idx].name), idx});
    for (auto& alias : aliases) aliases_.push_back({canonical_key(alias), idx});
}

const TechniqueCatalog& TechniqueCatalog::iso_default() {
    static const TechniqueCatalog catalog = [] {
        TechniqueCatalog c;
        using TC = TechniqueCategory;
        c.add("Equivalence Partitioning", TC::specification_based,
              {"equivalence class partitioning", "equivalence partition", "equivalence classes"});
        c.add("Boundary Value Analysis", TC::specification_based,
              {"boundary value", "boundary values analysis", "boundary analysis"});
        c.add("State Transition Testing", TC::specification_based, {"state transition"});
        c.add("Decision Table Testing", TC::specification_based, {"decision table"});
        c.add("Combinatorial Testing", TC::specification_based,
              {"combinatorial", "pairwise", "all pairs"});
        c.add("Use Case Testing", TC::specification_based, {"use case"});
        c.add("Scenario Testing", TC::specification_based, {"scenario", "scenario based"});
        c.add("Random Testing", TC::specification_based, {"random"});
        c.add("Control Flow Testing", TC::structure_based, {"control flow"});
        c.add("Data Flow Testing", TC::structure_based, {"data flow"});
        c.add("Branch Testing", TC::structure_based, {"branch", "branch coverage"});
        c.add("Statement Coverage", TC::structure_based, {"statement"});
        c.add("Exploratory Testing", TC::experience_based, {"exploratory"});
        c.add("Error Guessing", TC::experience_based, {"error guess"});
        c.add("Ad-hoc Testing", TC::experience_based, {"ad hoc", "adhoc"});
        c.add("Performance Testing", TC::uncatalogued, {"performance"});
        c.add("Regression Testing", TC::uncatalogued, {"regression"});
        c.add("Security Testing", TC::uncatalogued, {"security"});
        c.add("Compatibility Testing", TC::uncatalogued, {"compatibility"});
        c.add("Integration Testing", TC::uncatalogued, {"integration"});
        c.add("Model-Based Testing", TC::uncatalogued, {"model based"});
        c.add("Risk-Based Testing", TC::uncatalogued, {"risk based"});
        c.add("System Testing", TC::uncatalogued, {"system"});
        c.add("User Acceptance Testing", TC::uncatalogued, {"user acceptance", "acceptance"});
        c.add("Data Integrity Testing", TC::uncatalogued, {"data integrity"});
        c.add("Database Testing", TC::uncatalogued, {"database"});
        c.add("Negative Testing", TC::uncatalogued, {"negative"});
        c.add("Query Testing", TC::uncatalogued, {"query"});
        c.add("Requirement-based Testing", TC::uncatalogued,
              {"requirement based", "requirements based"});
        c.add("Session Testing", TC::uncatalogued, {"session", "session based"});
        c.add("Usability Testing", TC::uncatalogued, {"usability"});
        return c;
    }();
    return catalog;
}

std::optional<TestDesignTechnique> TechniqueCatalog::find(const std::string& raw) const {
    const std::string key = canonical_key(raw);
    if (key.empty()) return std::nullopt;
    for (const auto& alias : aliases_)
        if (alias.key == key) return entries_[alias.entry];
    return std::nullopt;
}

TestDesignTechnique TechniqueCatalog::normalize(const std::string& raw) const {
    if (auto hit = find(raw)) return *hit;
    return {capitalize_words(raw), TechniqueCategory::uncatalogued};
}

std::vector<TestDesignTechnique> TechniqueCatalog::specification_defaults() {
    const auto& cat = iso_default();
    std::vector<TestDesignTechnique> out;
    for (const char* name : {"Equivalence Partitioning", "Boundary Value Analysis",
                             "State Transition Testing", "Decision Table Testing",
                             "Combinatorial Testing"})
        out.push_back(*cat.find(name));
    return out;
}

std::vector<TestDesignTechnique> parse_technique_list(const std::string& reply,
                                                      const TechniqueCatalog& catalog) {
    std::vector<TestDesignTechnique> out;
    std::vector<std::string> seen_keys;
    auto push = [&](const TestDesignTechnique& t) {
        std::string key = to_lower(t.name);
        if (std::find(seen_keys.begin(), seen_keys.end(), key) != seen_keys.end()) return;
        seen_keys.push_back(std::move(key));
        out.push_back(t);
    };

    for (std::string_view raw : split_lines(reply)) {
        std::string line(raw);
        bool marked = strip_list_marker(line);
        if (line.empty()) continue;
        std::size_t colon = line.find(':');
        std::string head =
            colon == std::string::npos ? line : std::string(trim(line.substr(0, colon)));
        if (head.empty()) continue;
        for (const std::string& frag : split_fragments(head)) {
            if (auto hit = catalog.find(frag)) {
                push(*hit);
            } else if (marked && word_count(frag) <= 6) {
                bool has_letter = std::any_of(frag.begin(), frag.end(), [](unsigned char c) {
                    return std::isalpha(c) != 0;
                });
                if (has_letter) push(catalog.normalize(frag));
            }
        }
    }
    return out;
}

}  // namespace ghl
