#include "ghl/prompts.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;

namespace ghl {

const char* const kDefaultOutputFormat = "List each test case on its own line, numbered.";
const char* const kNoStrategyText = "(no test strategy provided)";

namespace {

const char* const kZeroShotBody =
    "You are software testing expert.\n"
    "The attached file1 shows requirements of a system.\n"
    "The attached file2 shows test strategy of the system.\n"
    "Can you extract as much as possible test cases from the requirements, including normal "
    "cases and abnormal cases in the test strategy?\n"
    "\n"
    "[file1: requirements]\n"
    "{requirements}\n"
    "\n"
    "[file2: test strategy]\n"
    "{strategy}\n"
    "\n"
    "{output_format}\n";

const char* const kGhlExtractBody =
    "The attached file shows requirements of the system.\n"
    "Can you extract as much as possible candidate test design techniques in ISO/IEC/IEEE "
    "29119-4:2021 for the requirements?\n"
    "If you can't extract the test design techniques, extract as much as possible popular test "
    "design techniques in the ISO/IEC/IEEE 29119-4:2021 in general.\n"
    "\n"
    "[file: requirements]\n"
    "{requirements}\n";

const char* const kGhlPerTechniqueBody =
    "The attached file shows requirements of the system.\n"
    "Extract test cases as much as possible, according with the {technique} technique including "
    "normal cases and abnormal cases in the test strategy.\n"
    "\n"
    "[file: requirements]\n"
    "{requirements}\n"
    "\n"
    "[test strategy]\n"
    "{strategy}\n"
    "\n"
    "{output_format}\n";

const char* const kGhlfCombosBody =
    "The attached file shows requirements of the system.\n"
    "Extract as much as possible functions for each section and create combinations of the "
    "functions as test cases.\n"
    "\n"
    "[file: requirements]\n"
    "{requirements}\n"
    "\n"
    "{output_format}\n";

bool placeholder_char(char c) {
    return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_';
}

// Finds {token} spans; returns token or empty if the span is not a placeholder.
std::string token_at(const std::string& body, std::size_t open, std::size_t& close) {
    close = body.find('}', open + 1);
    if (close == std::string::npos) return {};
    std::string token = body.substr(open + 1, close - open - 1);
    if (token.empty()) return {};
    if (!(token[0] >= 'a' && token[0] <= 'z')) return {};
    for (char c : token)
        if (!placeholder_char(c)) return {};
    return token;
}

}  // namespace

std::string template_file_name(TemplateId id) {
    switch (id) {
        case TemplateId::ZeroShot: return "zero_shot.txt";
        case TemplateId::GhlExtractTechniques: return "ghl_extract_techniques.txt";
        case TemplateId::GhlPerTechnique: return "ghl_per_technique.txt";
        case TemplateId::GhlfFunctionCombos: return "ghlf_function_combos.txt";
    }
    throw TemplateError("unknown template id");
}

std::vector<std::string> PromptTemplate::placeholders() const {
    std::vector<std::string> names;
    std::size_t pos = 0;
    while ((pos = body.find('{', pos)) != std::string::npos) {
        std::size_t close = 0;
        std::string token = token_at(body, pos, close);
        if (token.empty()) {
            ++pos;
            continue;
        }
        if (std::find(names.begin(), names.end(), token) == names.end()) names.push_back(token);
        pos = close + 1;
    }
    return names;
}

std::string render_prompt(const PromptTemplate& tmpl,
                          const std::map<std::string, std::string>& bindings) {
    std::string out;
    out.reserve(tmpl.body.size());
    std::size_t pos = 0;
    while (pos < tmpl.body.size()) {
        std::size_t open = tmpl.body.find('{', pos);
        if (open == std::string::npos) {
            out.append(tmpl.body, pos, std::string::npos);
            break;
        }
        out.append(tmpl.body, pos, open - pos);
        std::size_t close = 0;
        std::string token = token_at(tmpl.body, open, close);
        if (token.empty()) {
            out.push_back('{');
            pos = open + 1;
            continue;
        }
        auto it = bindings.find(token);
        if (it == bindings.end())
            throw TemplateError("template '" + tmpl.name + "' has unbound placeholder {" + token +
                                "}");
        out.append(it->second);
        pos = close + 1;
    }
    return out;
}

TemplateStore::TemplateStore() {
    templates_ = {
        {TemplateId::ZeroShot, "zero_shot", kZeroShotBody},
        {TemplateId::GhlExtractTechniques, "ghl_extract_techniques", kGhlExtractBody},
        {TemplateId::GhlPerTechnique, "ghl_per_technique", kGhlPerTechniqueBody},
        {TemplateId::GhlfFunctionCombos, "ghlf_function_combos", kGhlfCombosBody},
    };
}

TemplateStore TemplateStore::with_overrides(const fs::path& dir) {
    TemplateStore store;
    if (dir.empty()) return store;
    if (!fs::is_directory(dir))
        throw TemplateError("template override directory not found: " + dir.string());
    for (auto& tmpl : store.templates_) {
        fs::path candidate = dir / template_file_name(tmpl.id);
        if (!fs::exists(candidate)) continue;
        std::ifstream in(candidate, std::ios::binary);
        std::ostringstream buf;
        buf << in.rdbuf();
        tmpl.body = buf.str();
        if (tmpl.body.empty())
            throw TemplateError("template override is empty: " + candidate.string());
    }
    return store;
}

const PromptTemplate& TemplateStore::get(TemplateId id) const {
    for (const auto& t : templates_)
        if (t.id == id) return t;
    throw TemplateError("unknown template id");
}

}  // namespace ghl
