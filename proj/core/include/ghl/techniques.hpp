#pragma once

#include <optional>
#include <string>
#include <vector>

namespace ghl {

enum class TechniqueCategory {
    specification_based,
    structure_based,
    experience_based,
    uncatalogued,
};

std::string to_string(TechniqueCategory category);

struct TestDesignTechnique {
    std::string name;
    TechniqueCategory category = TechniqueCategory::uncatalogued;

    bool operator==(const TestDesignTechnique&) const = default;
};

// Known test design technique names with alias lookup. Matching is
// case-insensitive, ignores punctuation, and ignores a trailing
// "testing"/"technique(s)" word, so "state transition", "State Transition
// Testing" and "**State-Transition testing:**" all land on the same entry.
class TechniqueCatalog {
public:
    static const TechniqueCatalog& iso_default();

    // Canonical entry for a raw mention; unmatched names come back as
    // uncatalogued with each word capitalised.
    TestDesignTechnique normalize(const std::string& raw) const;

    std::optional<TestDesignTechnique> find(const std::string& raw) const;

    // Fallback set used when a technique-extraction reply yields nothing.
    static std::vector<TestDesignTechnique> specification_defaults();

    const std::vector<TestDesignTechnique>& entries() const { return entries_; }

private:
    struct Alias {
        std::string key;
        std::size_t entry;
    };
    std::vector<TestDesignTechnique> entries_;
    std::vector<Alias> aliases_;

    void add(std::string name, TechniqueCategory category, std::vector<std::string> aliases);
};

// Pulls technique names out of a model reply. List items (numbered, bulleted
// or bold) are taken whole; any line fragment that matches the catalog is
// accepted too. Order of first mention is preserved and duplicates collapse
// onto their canonical entry.
std::vector<TestDesignTechnique> parse_technique_list(const std::string& reply,
                                                      const TechniqueCatalog& catalog);

}  // namespace ghl
