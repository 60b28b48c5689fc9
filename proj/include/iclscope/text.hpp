#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace iclscope::text {

// Character offsets throughout the project are Unicode code point indices,
// matching Python `str` indexing on the extractor side.
std::size_t codepoint_length(std::string_view utf8);

// Substring by code point interval [start, end).
std::string slice(std::string_view utf8, std::size_t start, std::size_t end);

// Byte offset of the code point at index `cp` (== size() when cp == length).
std::size_t byte_offset(std::string_view utf8, std::size_t cp);

// Code point index of a byte offset that falls on a code point boundary.
std::size_t codepoint_index(std::string_view utf8, std::size_t byte);

// Lowercase ASCII, replace punctuation with spaces, collapse whitespace, trim.
std::string normalize(std::string_view s);

std::string to_lower(std::string_view s);

std::string spell_number(int n);

}  // namespace iclscope::text
