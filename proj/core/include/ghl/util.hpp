#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace ghl {

/// SHA-256 of the input, as a lowercase hex string.
std::string sha256_hex(std::string_view data);

std::string_view trim(std::string_view s);
std::string to_lower(std::string_view s);

/// Collapses every whitespace run to a single space and trims the ends.
std::string collapse_whitespace(std::string_view s);

/// Splits on '\n'; a trailing '\r' on each line is dropped.
std::vector<std::string_view> split_lines(std::string_view text);

/// Number of whitespace-delimited tokens.
std::size_t word_count(std::string_view text);

/// Byte offsets [begin, end) of every whitespace-delimited token.
struct WordSpan {
    std::size_t begin = 0;
    std::size_t end = 0;
};
std::vector<WordSpan> word_spans(std::string_view text);

/// Half-up rounding to the given number of decimal places.
double round_half_up(double value, int decimals);

/// Fixed-decimal formatting with half-up rounding ("0.73", "0.808").
std::string format_fixed(double value, int decimals);

/// Seconds to "h:mm:ss" (hours unpadded, e.g. 1210 -> "0:20:10").
std::string format_hms(double seconds);

}  // namespace ghl
