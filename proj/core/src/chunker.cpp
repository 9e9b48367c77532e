#include "ghl/chunker.hpp"

#include <algorithm>

#include "ghl/errors.hpp"
#include "ghl/util.hpp"

namespace ghl {

namespace {

struct Unit {
    std::size_t section = 0;
    std::size_t word_begin = 0;
    std::size_t word_end = 0;
};

// Paragraph id per character offset boundary: increments at blank lines.
std::vector<std::size_t> paragraph_breaks(const std::string& body) {
    std::vector<std::size_t> breaks;  // char offsets where a new paragraph starts
    std::size_t pos = 0;
    bool prev_blank = false;
    while (pos <= body.size()) {
        std::size_t nl = body.find('\n', pos);
        std::size_t line_end = (nl == std::string::npos) ? body.size() : nl;
        bool blank = trim(std::string_view(body.data() + pos, line_end - pos)).empty();
        if (prev_blank && !blank) breaks.push_back(pos);
        prev_blank = blank;
        if (nl == std::string::npos) break;
        pos = nl + 1;
    }
    return breaks;
}

}  // namespace

std::vector<DocumentChunk> chunk_document(const RequirementDocument& doc, std::size_t max_words,
                                          std::size_t overlap_words) {
    if (max_words == 0) throw PipelineError("chunk_document: max_words must be positive");
    if (overlap_words >= max_words)
        throw PipelineError("chunk_document: overlap_words must be smaller than max_words");

    const auto spans = word_spans(doc.body);
    const std::size_t n = spans.size();

    auto char_begin = [&](std::size_t word_idx) {
        return word_idx < n ? spans[word_idx].begin : doc.body.size();
    };
    auto make_chunk = [&](std::size_t index, std::size_t s, std::size_t e) {
        std::size_t from = (index == 0) ? 0 : char_begin(s);
        std::size_t to = (e >= n) ? doc.body.size() : char_begin(e);
        return DocumentChunk{doc.function_key, index, doc.body.substr(from, to - from), s, e};
    };

    if (n <= max_words) return {make_chunk(0, 0, n)};

    // Section index per word.
    std::vector<std::size_t> section_of(n, 0);
    for (std::size_t w = 0, sec = 0; w < n; ++w) {
        while (sec + 1 < doc.sections.size() && spans[w].begin >= doc.sections[sec].end) ++sec;
        section_of[w] = sec;
    }
    // Paragraph index per word.
    const auto breaks = paragraph_breaks(doc.body);
    std::vector<std::size_t> para_of(n, 0);
    for (std::size_t w = 0, b = 0; w < n; ++w) {
        while (b < breaks.size() && spans[w].begin >= breaks[b]) ++b;
        para_of[w] = b;
    }
    // Atomic units: maximal word runs within one (section, paragraph).
    std::vector<Unit> units;
    for (std::size_t w = 0; w < n;) {
        std::size_t start = w;
        while (w < n && section_of[w] == section_of[start] && para_of[w] == para_of[start]) ++w;
        units.push_back({section_of[start], start, w});
    }

    std::vector<std::pair<std::size_t, std::size_t>> ranges;  // word ranges per chunk
    std::size_t chunk_start = 0;
    std::size_t cursor = 0;  // next word to place

    auto chunk_words = [&] { return cursor - chunk_start; };
    auto close_chunk = [&] {
        if (cursor == chunk_start) return;  // nothing placed yet
        ranges.emplace_back(chunk_start, cursor);
        std::size_t eff = std::min(overlap_words, cursor - chunk_start);
        chunk_start = cursor - eff;
    };
    auto append_words = [&](std::size_t count) {
        // Caller guarantees it fits; closes automatically only via hard split.
        cursor += count;
    };
    auto hard_fill = [&](std::size_t word_end) {
        while (cursor < word_end) {
            std::size_t room = max_words - chunk_words();
            if (room == 0) {
                close_chunk();
                continue;
            }
            append_words(std::min(room, word_end - cursor));
        }
    };

    std::size_t u = 0;
    while (u < units.size()) {
        // Whole section = run of units sharing a section id.
        std::size_t section_end_unit = u;
        while (section_end_unit < units.size() && units[section_end_unit].section == units[u].section)
            ++section_end_unit;
        std::size_t section_words = units[section_end_unit - 1].word_end - units[u].word_begin;

        if (section_words <= max_words - chunk_words()) {
            append_words(section_words);
            u = section_end_unit;
            continue;
        }
        if (section_words + overlap_words <= max_words) {
            close_chunk();
            append_words(section_words);
            u = section_end_unit;
            continue;
        }
        // Oversized section: place its paragraphs one by one.
        for (; u < section_end_unit; ++u) {
            std::size_t unit_words = units[u].word_end - units[u].word_begin;
            if (unit_words <= max_words - chunk_words()) {
                append_words(unit_words);
            } else if (unit_words + overlap_words <= max_words) {
                close_chunk();
                append_words(unit_words);
            } else {
                hard_fill(units[u].word_end);
            }
        }
    }
    if (cursor > chunk_start) ranges.emplace_back(chunk_start, cursor);

    std::vector<DocumentChunk> chunks;
    chunks.reserve(ranges.size());
    for (std::size_t i = 0; i < ranges.size(); ++i)
        chunks.push_back(make_chunk(i, ranges[i].first, ranges[i].second));
    return chunks;
}

}  // namespace ghl
