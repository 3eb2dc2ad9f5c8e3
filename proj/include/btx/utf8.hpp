#pragma once

#include <cstdint>
#include <string>
#include <string_view>

// Minimal UTF-8 walking and character classification for the text pipeline.
// The pipeline only tokenizes round-trip English output, so lowercasing
// covers ASCII and Latin-1; other codepoints pass through unchanged.
namespace btx::utf8 {

// Decodes the codepoint starting at byte offset i. Returns the number of
// bytes consumed (>= 1). Malformed bytes are consumed one at a time and
// reported as U+FFFD.
std::size_t decode(std::string_view s, std::size_t i, char32_t& cp);

void append(std::string& out, char32_t cp);

char32_t to_lower(char32_t cp);

bool is_space(char32_t cp);
bool is_digit(char32_t cp);
bool is_letter(char32_t cp);
bool is_upper(char32_t cp);

// ASCII apostrophe or U+2019 (right single quotation mark).
bool is_apostrophe(char32_t cp);

// Collapses whitespace runs to single spaces and trims the ends.
std::string normalize_whitespace(std::string_view text);

}  // namespace btx::utf8
