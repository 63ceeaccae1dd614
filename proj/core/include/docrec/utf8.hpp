#pragma once

#include <string>
#include <string_view>

namespace docrec::utf8 {

// Throws FormatError on malformed input (overlong forms, surrogates, truncation).
std::u32string decode(std::string_view bytes);

std::string encode(std::u32string_view codepoints);
void append(std::string& out, char32_t cp);

bool is_valid(std::string_view bytes);

// Number of codepoints; invalid input counts bytes.
std::size_t length(std::string_view bytes);

}  // namespace docrec::utf8
