#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "ghl/errors.hpp"

namespace ghl {

enum class TemplateId {
    ZeroShot,
    GhlExtractTechniques,
    GhlPerTechnique,
    GhlfFunctionCombos,
};

std::string template_file_name(TemplateId id);

struct PromptTemplate {
    TemplateId id;
    std::string name;
    std::string body;

    // Placeholder names referenced by the body, in order of first appearance.
    std::vector<std::string> placeholders() const;
};

// Substitutes {name} placeholders in a single pass. Bound values are inserted
// verbatim and never rescanned, so braces inside documents are safe. A
// placeholder with no binding raises TemplateError. Brace runs that do not
// form a {lower_snake_case} token are copied through untouched.
std::string render_prompt(const PromptTemplate& tmpl,
                          const std::map<std::string, std::string>& bindings);

// Built-in prompt texts, optionally overridden per-template by files in a
// directory (file names from template_file_name).
class TemplateStore {
public:
    TemplateStore();
    static TemplateStore with_overrides(const std::filesystem::path& dir);

    const PromptTemplate& get(TemplateId id) const;

private:
    std::vector<PromptTemplate> templates_;
};

// Appended to test-case-producing prompts so replies arrive one case per line.
extern const char* const kDefaultOutputFormat;

// Bound to {strategy} when a function has no test strategy document.
extern const char* const kNoStrategyText;

}  // namespace ghl
