#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "pergen/unicode.hpp"

namespace pergen {

/// Contiguous substring of a source text. Snippets of a document
/// concatenate back to the exact original text.
struct Snippet {
    std::string doc_id;
    std::size_t snippet_index = 0;
    std::string text;
    std::size_t char_len = 0;  // scalar count of text
};

struct SentenceSpan {
    std::size_t begin = 0;  // byte offsets
    std::size_t end = 0;
};

/// Splits text into sentence spans that partition it exactly. A boundary
/// sits after '.', '!' or '?' when the next scalar is whitespace or the
/// end of text; the whitespace run stays with the preceding sentence.
inline std::vector<SentenceSpan> split_sentences(std::string_view text) {
    std::vector<SentenceSpan> spans;
    if (text.empty()) return spans;
    auto is_ws = [](char c) {
        return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
    };
    std::size_t start = 0;
    std::size_t i = 0;
    while (i < text.size()) {
        char c = text[i];
        if (c == '.' || c == '!' || c == '?') {
            std::size_t j = i + 1;
            if (j == text.size() || is_ws(text[j])) {
                while (j < text.size() && is_ws(text[j])) ++j;
                spans.push_back({start, j});
                start = j;
                i = j;
                continue;
            }
        }
        ++i;
    }
    if (start < text.size()) spans.push_back({start, text.size()});
    return spans;
}

/// Greedy snippet construction: sentences are appended until the snippet
/// reaches `target_chars` scalars (it may overshoot by its last sentence)
/// or the text ends.
inline std::vector<Snippet> make_snippets(std::string_view text, const std::string& doc_id,
                                          std::size_t target_chars = 250) {
    std::vector<Snippet> snippets;
    auto spans = split_sentences(text);
    std::size_t chars = 0;
    std::size_t span_start = 0;
    auto close = [&](std::size_t end_byte) {
        Snippet s;
        s.doc_id = doc_id;
        s.snippet_index = snippets.size();
        s.text = std::string(text.substr(span_start, end_byte - span_start));
        s.char_len = scalar_count(s.text);
        snippets.push_back(std::move(s));
    };
    for (std::size_t k = 0; k < spans.size(); ++k) {
        if (chars == 0) span_start = spans[k].begin;
        chars += scalar_count(text.substr(spans[k].begin, spans[k].end - spans[k].begin));
        if (chars >= target_chars) {
            close(spans[k].end);
            chars = 0;
        }
    }
    if (chars > 0) close(spans.back().end);
    return snippets;
}

/// Lowercased word tokens: maximal runs of alphanumeric scalars. Scalars
/// outside ASCII count as word characters (no Unicode tables here), so
/// accented words survive intact.
inline std::vector<std::string> tokenize_words(std::string_view text) {
    std::vector<std::string> tokens;
    std::string current;
    std::size_t i = 0;
    while (i < text.size()) {
        std::size_t start = i;
        char32_t cp = decode_scalar(text, i);
        bool word = (cp >= '0' && cp <= '9') || (cp >= 'a' && cp <= 'z') ||
                    (cp >= 'A' && cp <= 'Z') || cp >= 0x80;
        if (word) {
            for (std::size_t b = start; b < i; ++b) current.push_back(ascii_lower(text[b]));
        } else if (!current.empty()) {
            tokens.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty()) tokens.push_back(std::move(current));
    return tokens;
}

}  // namespace pergen
