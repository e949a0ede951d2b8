#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace mdseval::text {

// Decodes UTF-8 into code points. Invalid byte sequences become U+FFFD and
// consume one byte, so decoding is total.
std::vector<uint32_t> decode_utf8(std::string_view s);

std::string encode_utf8(uint32_t cp);
std::string encode_utf8(const std::vector<uint32_t>& cps);

bool is_space(uint32_t cp);

// Width folding: full-width ASCII forms (U+FF01..U+FF5E) map to their ASCII
// counterparts, half-width CJK punctuation (U+FF61..U+FF64) maps to the
// canonical full-width form, ideographic space maps to ' '.
uint32_t fold_width(uint32_t cp);

// Width-folds and removes all whitespace. The normalization used for scoring,
// containment checks and endpoint grounding.
std::string normalize_for_match(std::string_view s);

// Width-folds and collapses whitespace runs to a single ' ', trimming the
// ends. The normalization used for document cleaning and deduplication.
std::string normalize_for_dedup(std::string_view s);

// Collapses whitespace runs to one ' ' and trims, leaving widths untouched.
std::string collapse_whitespace(std::string_view s);

// Code-point tokens of the raw string (no normalization applied).
std::vector<std::string> char_tokens(std::string_view s);

// Number of code points.
size_t length(std::string_view s);

// Splits on Chinese terminal punctuation 。！？； (plus ASCII !?;). Closing
// quotes and brackets after the terminal stay attached to the sentence.
std::vector<std::string> split_sentences(std::string_view s);

bool contains_normalized(std::string_view haystack, std::string_view needle);

}  // namespace mdseval::text
