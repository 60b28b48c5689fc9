#include "iclscope/text.hpp"

#include <array>
#include <cctype>

#include "iclscope/error.hpp"

namespace iclscope::text {

namespace {
bool is_continuation(unsigned char c) { return (c & 0xC0) == 0x80; }
}  // namespace

std::size_t codepoint_length(std::string_view utf8) {
  std::size_t n = 0;
  for (unsigned char c : utf8) {
    if (!is_continuation(c)) ++n;
  }
  return n;
}

std::size_t byte_offset(std::string_view utf8, std::size_t cp) {
  std::size_t seen = 0;
  for (std::size_t i = 0; i < utf8.size(); ++i) {
    if (is_continuation(static_cast<unsigned char>(utf8[i]))) continue;
    if (seen == cp) return i;
    ++seen;
  }
  if (seen == cp) return utf8.size();
  throw Error(ErrorCode::kInvalidArgument, "code point index past end of string");
}

std::size_t codepoint_index(std::string_view utf8, std::size_t byte) {
  return codepoint_length(utf8.substr(0, byte));
}

std::string slice(std::string_view utf8, std::size_t start, std::size_t end) {
  if (end < start) {
    throw Error(ErrorCode::kInvalidArgument, "slice end precedes start");
  }
  const std::size_t b0 = byte_offset(utf8, start);
  const std::size_t b1 = byte_offset(utf8, end);
  return std::string(utf8.substr(b0, b1 - b0));
}

std::string to_lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string normalize(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  bool pending_space = false;
  for (unsigned char c : s) {
    const bool keep = std::isalnum(c) || c >= 0x80;
    if (!keep) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(static_cast<char>(std::tolower(c)));
  }
  return out;
}

std::string spell_number(int n) {
  static constexpr std::array<const char*, 21> kWords = {
      "zero", "one", "two", "three", "four", "five", "six", "seven",
      "eight", "nine", "ten", "eleven", "twelve", "thirteen", "fourteen",
      "fifteen", "sixteen", "seventeen", "eighteen", "nineteen", "twenty"};
  if (n >= 0 && n < static_cast<int>(kWords.size())) return kWords[static_cast<std::size_t>(n)];
  return std::to_string(n);
}

}  // namespace iclscope::text
