#include "ghl/pipeline.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <map>

#include "ghl/bluetooth_id.hpp"
#include "ghl/cache.hpp"
#include "ghl/errors.hpp"
#include "ghl/util.hpp"

namespace ghl {

std::string to_string(Strategy strategy) {
    switch (strategy) {
        case Strategy::zero_shot: return "zero-shot";
        case Strategy::ghl: return "ghl";
        case Strategy::ghl_f: return "ghl-f";
    }
    return "zero-shot";
}

Strategy strategy_from_string(const std::string& name) {
    if (name == "zero-shot" || name == "zero_shot") return Strategy::zero_shot;
    if (name == "ghl") return Strategy::ghl;
    if (name == "ghl-f" || name == "ghl_f" || name == "ghlf") return Strategy::ghl_f;
    throw ConfigError("unknown strategy: '" + name + "'");
}

namespace {

bool starts_with_ci(const std::string& s, const char* prefix) {
    std::size_t n = std::char_traits<char>::length(prefix);
    if (s.size() < n) return false;
    for (std::size_t i = 0; i < n; ++i)
        if (std::tolower(static_cast<unsigned char>(s[i])) != prefix[i]) return false;
    return true;
}

bool first_word_is_case_verb(const std::string& s) {
    for (const char* verb : {"verify", "test", "check"}) {
        if (!starts_with_ci(s, verb)) continue;
        std::size_t n = std::char_traits<char>::length(verb);
        if (s.size() == n) return true;
        char next = s[n];
        if (!std::isalnum(static_cast<unsigned char>(next))) return true;
        // "Test" may run straight into a number ("Test2") but not a word.
        if (std::isdigit(static_cast<unsigned char>(next))) return true;
    }
    return false;
}

bool reads_like_bluetooth_id(const std::string& s) {
    std::string head = s;
    if (auto colon = head.find(':'); colon != std::string::npos) head = trim(head.substr(0, colon));
    return try_parse_bluetooth_id(head).has_value();
}

// Strips list decoration; reports whether the line carried any.
std::string strip_case_marker(const std::string& raw, bool& marked) {
    std::string t(trim(raw));
    marked = false;
    if (t.size() >= 3 && t.compare(0, 3, "\xE2\x80\xA2") == 0) {  // bullet •
        t = trim(t.substr(3));
        marked = true;
    }
    if (!t.empty() && (t[0] == '-' || t[0] == '*' || t[0] == '+')) {
        std::size_t i = 0;
        while (i < t.size() && (t[i] == '-' || t[i] == '*' || t[i] == '+')) ++i;
        if (i < t.size() && t[i] == ' ') {
            t = trim(t.substr(i));
            marked = true;
        }
    }
    std::size_t digits = 0;
    while (digits < t.size() && std::isdigit(static_cast<unsigned char>(t[digits]))) ++digits;
    if (digits > 0 && digits < t.size() && (t[digits] == '.' || t[digits] == ')')) {
        t = trim(t.substr(digits + 1));
        marked = true;
    }
    // bold markers
    std::string cleaned;
    cleaned.reserve(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (i + 1 < t.size() && t[i] == '*' && t[i + 1] == '*') {
            ++i;
            marked = true;
            continue;
        }
        cleaned.push_back(t[i]);
    }
    t = trim(cleaned);
    if (starts_with_ci(t, "test case")) {
        std::size_t pos = 9;
        while (pos < t.size() && (std::isspace(static_cast<unsigned char>(t[pos])) ||
                                  std::isdigit(static_cast<unsigned char>(t[pos]))))
            ++pos;
        if (pos < t.size() && (t[pos] == ':' || t[pos] == '-' || t[pos] == '.')) {
            t = trim(t.substr(pos + 1));
            marked = true;
        }
    }
    return t;
}

std::vector<std::string> sentence_fallback(const std::string& reply) {
    std::vector<std::string> out;
    std::string current;
    auto flush = [&] {
        std::string s(trim(current));
        current.clear();
        if (s.empty()) return;
        if (first_word_is_case_verb(s) && word_count(s) >= 3) out.push_back(s);
    };
    for (char c : reply) {
        if (c == '.' || c == '!' || c == '?' || c == '\n') {
            if (c != '\n') current.push_back(c);
            flush();
        } else {
            current.push_back(c);
        }
    }
    flush();
    return out;
}

}  // namespace

std::vector<std::string> parse_case_list(const std::string& reply) {
    std::vector<std::string> out;
    for (std::string_view raw : split_lines(reply)) {
        bool marked = false;
        std::string line = strip_case_marker(std::string(raw), marked);
        if (line.empty()) continue;
        if (line.back() == ':') continue;  // section header inside the reply
        const bool bt_id = reads_like_bluetooth_id(line);
        if (!marked && !bt_id && !first_word_is_case_verb(line)) continue;
        if (!bt_id && word_count(line) < 3) continue;
        out.push_back(line);
    }
    if (out.empty()) return sentence_fallback(reply);
    return out;
}

std::string normalize_case_text(const std::string& raw) {
    return collapse_whitespace(trim(raw));
}

std::string case_dedup_key(const std::string& text) {
    std::string key = to_lower(collapse_whitespace(trim(text)));
    while (!key.empty() && (key.back() == '.' || key.back() == ' ')) key.pop_back();
    return key;
}

GenerationPipeline::GenerationPipeline(Gateway& gateway, const TemplateStore& templates,
                                       GenOptions options)
    : gateway_(gateway), templates_(templates), options_(std::move(options)) {
    if (options_.output_format.empty()) options_.output_format = kDefaultOutputFormat;
}

GenerationPipeline::CallOutcome GenerationPipeline::complete_and_log(GenerationRun& run,
                                                                     const std::string& label,
                                                                     std::size_t chunk_index,
                                                                     const std::string& prompt,
                                                                     int run_index) const {
    CompletionRequest req;
    req.model_id = options_.completion_model;
    req.user_text = prompt;
    req.temperature = options_.temperature;
    req.seed = options_.seed + run_index;
    req.max_output_tokens = options_.max_output_tokens;

    const std::string digest = cache_key(req);
    CompletionResult result = gateway_.complete(req);

    Transcript t;
    t.label = label;
    t.chunk_index = chunk_index;
    t.request_digest = digest;
    t.response_digest = sha256_hex(result.text);
    t.input_tokens = result.input_tokens;
    t.output_tokens = result.output_tokens;
    t.from_cache = result.from_cache;
    run.transcripts.push_back(std::move(t));

    return {result.text, digest};
}

std::vector<TestDesignTechnique> GenerationPipeline::techniques_for_chunk(
    GenerationRun& run, const DocumentChunk& chunk, int run_index) const {
    const PromptTemplate& tmpl = templates_.get(TemplateId::GhlExtractTechniques);
    const std::string prompt = render_prompt(tmpl, {{"requirements", chunk.body}});
    std::vector<TestDesignTechnique> techniques;
    try {
        CallOutcome outcome =
            complete_and_log(run, "extract_techniques", chunk.index, prompt, run_index);
        techniques = parse_technique_list(outcome.text, TechniqueCatalog::iso_default());
    } catch (const ContextLengthError& e) {
        run.failures.push_back({"extract_techniques", chunk.index, e.what()});
    } catch (const ProviderError& e) {
        run.failures.push_back({"extract_techniques", chunk.index, e.what()});
    }
    if (techniques.empty()) techniques = TechniqueCatalog::specification_defaults();
    return techniques;
}

void GenerationPipeline::generate_cases(GenerationRun& run, const std::string& label,
                                        std::size_t chunk_index, const std::string& prompt,
                                        const std::optional<std::string>& technique, int run_index,
                                        std::vector<GeneratedTestCase>& sink) const {
    std::string text;
    std::string digest;
    try {
        CallOutcome outcome = complete_and_log(run, label, chunk_index, prompt, run_index);
        text = std::move(outcome.text);
        digest = std::move(outcome.request_digest);
    } catch (const ContextLengthError& e) {
        run.failures.push_back({label, chunk_index, e.what()});
        return;
    } catch (const ProviderError& e) {
        run.failures.push_back({label, chunk_index, e.what()});
        return;
    }
    const std::vector<std::string> lines = parse_case_list(text);
    for (std::size_t i = 0; i < lines.size(); ++i) {
        GeneratedTestCase c;
        c.text = normalize_case_text(lines[i]);
        c.technique = technique;
        c.provenance = {chunk_index, i, digest};
        sink.push_back(std::move(c));
    }
}

GenerationRun GenerationPipeline::run(Strategy strategy, const RequirementDocument& doc,
                                      const std::optional<TestStrategyDocument>& strategy_doc,
                                      int run_index) const {
    const auto started = std::chrono::steady_clock::now();

    GenerationRun out;
    out.function_key = doc.function_key;
    out.strategy = strategy;
    out.run_index = run_index;
    out.params = {options_.completion_model, options_.temperature,
                  options_.seed + run_index,  options_.max_output_tokens,
                  options_.chunk_max_words,   options_.chunk_overlap_words};

    const std::vector<DocumentChunk> chunks =
        chunk_document(doc, options_.chunk_max_words, options_.chunk_overlap_words);
    out.chunk_count = chunks.size();

    // Zero-shot always sees the real strategy document when one exists; the
    // attach_strategy switch governs the technique-driven prompts only.
    const std::string strategy_text = strategy_doc ? strategy_doc->body : kNoStrategyText;
    const std::string ghl_strategy_text =
        (options_.attach_strategy && strategy_doc) ? strategy_doc->body : kNoStrategyText;

    std::vector<GeneratedTestCase> technique_cases;
    std::vector<GeneratedTestCase> combo_cases;

    if (strategy == Strategy::zero_shot) {
        const PromptTemplate& tmpl = templates_.get(TemplateId::ZeroShot);
        for (const auto& chunk : chunks) {
            const std::string prompt = render_prompt(tmpl, {{"requirements", chunk.body},
                                                            {"strategy", strategy_text},
                                                            {"output_format", options_.output_format}});
            generate_cases(out, "zero_shot", chunk.index, prompt, std::nullopt, run_index,
                           technique_cases);
        }
    } else {
        const PromptTemplate& per_tech = templates_.get(TemplateId::GhlPerTechnique);
        const PromptTemplate& combos = templates_.get(TemplateId::GhlfFunctionCombos);
        for (const auto& chunk : chunks) {
            const auto techniques = techniques_for_chunk(out, chunk, run_index);
            for (const auto& tech : techniques) {
                bool known = std::any_of(out.techniques_used.begin(), out.techniques_used.end(),
                                         [&](const auto& t) { return t.name == tech.name; });
                if (!known) out.techniques_used.push_back(tech);
            }
            for (const auto& tech : techniques) {
                const std::string prompt =
                    render_prompt(per_tech, {{"technique", tech.name},
                                             {"requirements", chunk.body},
                                             {"strategy", ghl_strategy_text},
                                             {"output_format", options_.output_format}});
                generate_cases(out, "per_technique:" + tech.name, chunk.index, prompt, tech.name,
                               run_index, technique_cases);
            }
            if (strategy == Strategy::ghl_f) {
                const std::string prompt =
                    render_prompt(combos, {{"requirements", chunk.body},
                                           {"output_format", options_.output_format}});
                generate_cases(out, "function_combos", chunk.index, prompt, std::nullopt,
                               run_index, combo_cases);
            }
        }
        std::map<std::string, std::size_t> tech_rank;
        for (std::size_t i = 0; i < out.techniques_used.size(); ++i)
            tech_rank.emplace(out.techniques_used[i].name, i);
        std::stable_sort(technique_cases.begin(), technique_cases.end(),
                         [&](const GeneratedTestCase& a, const GeneratedTestCase& b) {
                             const std::size_t ra = a.technique ? tech_rank.at(*a.technique) : 0;
                             const std::size_t rb = b.technique ? tech_rank.at(*b.technique) : 0;
                             if (ra != rb) return ra < rb;
                             if (a.provenance.chunk_index != b.provenance.chunk_index)
                                 return a.provenance.chunk_index < b.provenance.chunk_index;
                             return a.provenance.line_index < b.provenance.line_index;
                         });
    }

    out.cases = std::move(technique_cases);
    out.cases.insert(out.cases.end(), std::make_move_iterator(combo_cases.begin()),
                     std::make_move_iterator(combo_cases.end()));

    std::vector<GeneratedTestCase> unique;
    std::vector<std::string> seen;
    unique.reserve(out.cases.size());
    for (auto& c : out.cases) {
        std::string key = case_dedup_key(c.text);
        if (std::find(seen.begin(), seen.end(), key) != seen.end()) continue;
        seen.push_back(std::move(key));
        unique.push_back(std::move(c));
    }
    out.cases = std::move(unique);

    out.duration_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    return out;
}

}  // namespace ghl
