#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace scholmig {

/// Lowercases ASCII, turns commas, semicolons, hyphens, slashes and other
/// separators into spaces, drops remaining ASCII punctuation and collapses
/// whitespace. Non-ASCII bytes pass through unchanged.
std::string normalize_text(std::string_view text);

/// Tokens of normalize_text(text), split on whitespace.
std::vector<std::string> tokenize(std::string_view text);

/// True when `bytes` is well-formed UTF-8.
bool is_valid_utf8(std::string_view bytes);

/// 64-bit FNV-1a. Stable across platforms and runs.
std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t seed = 14695981039346656037ULL);

/// 16 lowercase hex digits.
std::string to_hex(std::uint64_t value);

/// Splits on a single-character delimiter, keeping empty pieces.
std::vector<std::string_view> split(std::string_view text, char delim);

}  // namespace scholmig
