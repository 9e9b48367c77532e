#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "ghl/corpus.hpp"

namespace ghl {

struct DocumentChunk {
    std::string function_key;
    std::size_t index = 0;
    std::string body;           // exact substring of the parent body
    std::size_t word_begin = 0; // word-index range within the parent
    std::size_t word_end = 0;
};

/// Splits a document into chunks of at most max_words words (overlap included).
/// Whole sections are kept together when they fit; oversized sections fall back
/// to paragraph boundaries, then to hard word splits. Consecutive chunks share
/// the trailing overlap_words words of their predecessor. Deterministic.
///
/// Dropping each chunk's overlap prefix and concatenating the rest yields the
/// parent body byte-exactly.
///
/// Throws PipelineError when max_words == 0 or overlap_words >= max_words.
std::vector<DocumentChunk> chunk_document(const RequirementDocument& doc, std::size_t max_words,
                                          std::size_t overlap_words);

}  // namespace ghl
