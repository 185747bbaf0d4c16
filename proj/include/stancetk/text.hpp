#ifndef STANCETK_TEXT_HPP
#define STANCETK_TEXT_HPP

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace stancetk {

// ---------------------------------------------------------------------------
// UTF-8
// ---------------------------------------------------------------------------

// Decodes the codepoint starting at byte i and advances i. Invalid or
// truncated sequences decode as U+FFFD, one byte at a time.
inline char32_t decode_utf8(std::string_view s, size_t& i) {
    const auto byte = [&](size_t k) { return static_cast<unsigned char>(s[k]); };
    const unsigned char b0 = byte(i);
    if (b0 < 0x80) {
        ++i;
        return b0;
    }
    size_t len = 0;
    char32_t cp = 0;
    if ((b0 & 0xE0) == 0xC0) {
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
    if (i + len > s.size()) {
        ++i;
        return 0xFFFD;
    }
    for (size_t k = 1; k < len; ++k) {
        if ((byte(i + k) & 0xC0) != 0x80) {
            ++i;
            return 0xFFFD;
        }
        cp = (cp << 6) | (byte(i + k) & 0x3F);
    }
    // Reject overlong encodings and surrogates.
    if ((len == 2 && cp < 0x80) || (len == 3 && cp < 0x800) ||
        (len == 4 && cp < 0x10000) || (cp >= 0xD800 && cp <= 0xDFFF) ||
        cp > 0x10FFFF) {
        ++i;
        return 0xFFFD;
    }
    i += len;
    return cp;
}

inline void append_utf8(std::string& out, char32_t cp) {
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

// ---------------------------------------------------------------------------
// Character classes. Codepoint tables cover the scripts a Turkish tweet
// corpus actually contains (Latin incl. extensions, Greek, Cyrillic);
// everything else is a separator.
// ---------------------------------------------------------------------------

inline bool is_ascii_digit(char32_t c) { return c >= U'0' && c <= U'9'; }

inline bool is_letter(char32_t c) {
    if (c < 0x80) return (c >= U'A' && c <= U'Z') || (c >= U'a' && c <= U'z');
    if (c >= 0x00C0 && c <= 0x00FF) return c != 0x00D7 && c != 0x00F7;
    if (c >= 0x0100 && c <= 0x024F) return true;  // Latin Extended-A/B
    if (c >= 0x0370 && c <= 0x03FF) return c != 0x0374 && c != 0x0375 && c != 0x037E && c != 0x0387;
    if (c >= 0x0400 && c <= 0x04FF) return true;  // Cyrillic
    return false;
}

inline bool is_word_char(char32_t c) { return is_letter(c) || is_ascii_digit(c); }

inline bool is_hashtag_char(char32_t c) { return is_word_char(c) || c == U'_'; }

inline bool is_space_char(char32_t c) {
    return c == U' ' || c == U'\t' || c == U'\n' || c == U'\r' || c == U'\f' ||
           c == U'\v' || c == 0x00A0;
}

// Turkish-aware lowercase: I -> dotless i, dotted capital I -> i, plus the
// simple case pairs of Latin-1, Latin Extended-A, Greek and Cyrillic.
inline char32_t fold_codepoint(char32_t c) {
    if (c == U'I') return 0x0131;  // ı
    if (c == 0x0130) return U'i';  // İ
    if (c >= U'A' && c <= U'Z') return c + 0x20;
    if (c >= 0x00C0 && c <= 0x00DE && c != 0x00D7) return c + 0x20;
    if (c >= 0x0100 && c <= 0x0137 && (c % 2) == 0) return c + 1;
    if (c >= 0x0139 && c <= 0x0147 && (c % 2) == 1) return c + 1;
    if (c >= 0x014A && c <= 0x0176 && (c % 2) == 0) return c + 1;
    if (c == 0x0178) return 0x00FF;  // Ÿ -> ÿ
    if (c == 0x0179 || c == 0x017B || c == 0x017D) return c + 1;
    if (c >= 0x0391 && c <= 0x03A9 && c != 0x03A2) return c + 0x20;
    if (c >= 0x0410 && c <= 0x042F) return c + 0x20;
    if (c >= 0x0400 && c <= 0x040F) return c + 0x50;
    return c;
}

inline std::string fold_case(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    size_t i = 0;
    while (i < s.size()) append_utf8(out, fold_codepoint(decode_utf8(s, i)));
    return out;
}

// ---------------------------------------------------------------------------
// Tweet text operations
// ---------------------------------------------------------------------------

// '#' followed by a maximal run of letters, digits or underscore. Casing
// preserved, appearance order, duplicates kept.
inline std::vector<std::string> extract_hashtags(std::string_view text) {
    std::vector<std::string> tags;
    size_t i = 0;
    while (i < text.size()) {
        if (text[i] == '#') {
            const size_t start = i;
            size_t j = i + 1;
            while (j < text.size()) {
                size_t next = j;
                if (!is_hashtag_char(decode_utf8(text, next))) break;
                j = next;
            }
            if (j > i + 1) {
                tags.emplace_back(text.substr(start, j - start));
                i = j;
                continue;
            }
        }
        decode_utf8(text, i);
    }
    return tags;
}

namespace detail {

inline bool starts_with_icase(std::string_view s, size_t pos, std::string_view prefix) {
    if (pos + prefix.size() > s.size()) return false;
    for (size_t k = 0; k < prefix.size(); ++k) {
        char a = s[pos + k];
        if (a >= 'A' && a <= 'Z') a = static_cast<char>(a + 0x20);
        if (a != prefix[k]) return false;
    }
    return true;
}

inline size_t skip_to_whitespace(std::string_view s, size_t pos) {
    while (pos < s.size()) {
        size_t next = pos;
        if (is_space_char(decode_utf8(s, next))) break;
        pos = next;
    }
    return pos;
}

} // namespace detail

// Removes '@'-mentions and URLs (http/https schemes and bare t.co hosts)
// always, hashtags when keep_hashtags is false. Whitespace runs collapse to
// single spaces and the ends are trimmed.
inline std::string strip_entities(std::string_view text, bool keep_hashtags) {
    std::string kept;
    kept.reserve(text.size());
    size_t i = 0;
    bool prev_word = false;
    while (i < text.size()) {
        const char c = text[i];
        if (detail::starts_with_icase(text, i, "http://") ||
            detail::starts_with_icase(text, i, "https://")) {
            i = detail::skip_to_whitespace(text, i);
            prev_word = false;
            continue;
        }
        if (!prev_word && detail::starts_with_icase(text, i, "t.co") &&
            (i + 4 == text.size() || text[i + 4] == '/' || [&] {
                size_t k = i + 4;
                return is_space_char(decode_utf8(text, k));
            }())) {
            i = detail::skip_to_whitespace(text, i);
            prev_word = false;
            continue;
        }
        if (c == '@' || (c == '#' && !keep_hashtags)) {
            // Bare markers go too: the stripped text never contains '@',
            // nor '#' unless hashtags are kept.
            size_t j = i + 1;
            while (j < text.size()) {
                size_t next = j;
                if (!is_hashtag_char(decode_utf8(text, next))) break;
                j = next;
            }
            i = j;
            prev_word = false;
            continue;
        }
        if (c == '#' && keep_hashtags) {
            // Keep the whole tag, including any word characters, so the
            // word-boundary state stays consistent.
            size_t j = i + 1;
            while (j < text.size()) {
                size_t next = j;
                if (!is_hashtag_char(decode_utf8(text, next))) break;
                j = next;
            }
            kept.append(text.substr(i, j - i));
            prev_word = j > i + 1;
            i = j;
            continue;
        }
        size_t next = i;
        const char32_t cp = decode_utf8(text, next);
        kept.append(text.substr(i, next - i));
        prev_word = is_word_char(cp);
        i = next;
    }

    // Collapse whitespace and trim.
    std::string out;
    out.reserve(kept.size());
    bool pending_space = false;
    size_t k = 0;
    while (k < kept.size()) {
        const size_t start = k;
        const char32_t cp = decode_utf8(kept, k);
        if (is_space_char(cp)) {
            pending_space = !out.empty();
        } else {
            if (pending_space) out.push_back(' ');
            pending_space = false;
            out.append(kept.substr(start, k - start));
        }
    }
    return out;
}

// Splits on anything that is not a letter or digit, folds case, drops tokens
// shorter than two codepoints or with no letter.
inline std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> tokens;
    std::string current;
    size_t length = 0;
    bool has_letter = false;
    const auto flush = [&] {
        if (length >= 2 && has_letter) tokens.push_back(current);
        current.clear();
        length = 0;
        has_letter = false;
    };
    size_t i = 0;
    while (i < text.size()) {
        const char32_t cp = decode_utf8(text, i);
        if (is_word_char(cp)) {
            append_utf8(current, fold_codepoint(cp));
            ++length;
            has_letter = has_letter || is_letter(cp);
        } else {
            flush();
        }
    }
    flush();
    return tokens;
}

inline std::string join_tokens(const std::vector<std::string>& tokens) {
    std::string out;
    for (size_t i = 0; i < tokens.size(); ++i) {
        if (i) out.push_back(' ');
        out += tokens[i];
    }
    return out;
}

} // namespace stancetk

#endif // STANCETK_TEXT_HPP
