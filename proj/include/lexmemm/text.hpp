#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace lexmemm::text {

// Splits a UTF-8 string into code points. Invalid bytes are passed through
// one at a time as their own "code point" so that no input is lost.
std::vector<char32_t> decode_utf8(std::string_view s);
std::string encode_utf8(char32_t cp);
std::string encode_utf8(const std::vector<char32_t>& cps, std::size_t begin, std::size_t end);

// Case classification covers ASCII, Latin-1, Latin Extended-A, Greek and
// Cyrillic. Other scripts are treated as uncased.
bool is_upper(char32_t cp);
bool is_lower(char32_t cp);
char32_t to_lower(char32_t cp);
std::string to_lower(std::string_view s);

bool contains_digit(std::string_view s);
bool contains_upper(std::string_view s);
// True iff s has at least one letter and none of its cased characters is lowercase.
bool all_upper(std::string_view s);

// Splits on a single delimiter character, keeping empty fields.
std::vector<std::string_view> split(std::string_view s, char delim);

// Removes one trailing '\r' (CRLF input).
std::string_view chomp_cr(std::string_view s);

// 64-bit FNV-1a.
std::uint64_t fnv1a64(std::string_view data, std::uint64_t seed = 0xcbf29ce484222325ULL);
std::string hex64(std::uint64_t v);

}  // namespace lexmemm::text
