#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace pergen {

// Minimal UTF-8 helpers. Lengths and truncation are defined in Unicode
// scalar values, not bytes. Malformed bytes are treated as one scalar
// each so the functions never fail on arbitrary input.

inline bool is_utf8_continuation(unsigned char b) { return (b & 0xC0) == 0x80; }

inline std::size_t scalar_count(std::string_view text) {
    std::size_t n = 0;
    for (unsigned char b : text) {
        if (!is_utf8_continuation(b)) ++n;
    }
    return n;
}

/// Byte length of the prefix holding the first `n` scalars.
inline std::size_t scalar_prefix_bytes(std::string_view text, std::size_t n) {
    if (n == 0) return 0;
    std::size_t seen = 0;
    for (std::size_t i = 0; i < text.size(); ++i) {
        if (!is_utf8_continuation(static_cast<unsigned char>(text[i]))) {
            if (seen == n) return i;
            ++seen;
        }
    }
    return text.size();
}

inline std::string_view scalar_prefix(std::string_view text, std::size_t n) {
    return text.substr(0, scalar_prefix_bytes(text, n));
}

inline std::string truncate_scalars(std::string_view text, std::size_t n) {
    return std::string(scalar_prefix(text, n));
}

/// Decodes one code point starting at byte `i`; advances `i` past it.
/// Malformed sequences decode as U+FFFD one byte at a time.
inline char32_t decode_scalar(std::string_view text, std::size_t& i) {
    unsigned char b0 = static_cast<unsigned char>(text[i]);
    std::size_t len = 1;
    char32_t cp = 0xFFFD;
    if (b0 < 0x80) {
        cp = b0;
    } else if ((b0 & 0xE0) == 0xC0) {
        len = 2;
        cp = b0 & 0x1F;
    } else if ((b0 & 0xF0) == 0xE0) {
        len = 3;
        cp = b0 & 0x0F;
    } else if ((b0 & 0xF8) == 0xF0) {
        len = 4;
        cp = b0 & 0x07;
    } else {
        ++i;
        return 0xFFFD;
    }
    if (i + len > text.size()) {
        ++i;
        return 0xFFFD;
    }
    for (std::size_t k = 1; k < len; ++k) {
        unsigned char bk = static_cast<unsigned char>(text[i + k]);
        if (!is_utf8_continuation(bk)) {
            ++i;
            return 0xFFFD;
        }
        cp = (cp << 6) | (bk & 0x3F);
    }
    i += len;
    return cp;
}

inline char ascii_lower(char c) {
    return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
}

inline std::string ascii_lower_copy(std::string_view s) {
    std::string out(s);
    for (char& c : out) c = ascii_lower(c);
    return out;
}

}  // namespace pergen
