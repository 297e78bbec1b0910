#include "revsplit/textnorm.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <limits>

namespace revsplit {

namespace {

bool is_ascii_alpha(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
}

bool is_ascii_alnum(char c) {
    return is_ascii_alpha(c) || (c >= '0' && c <= '9');
}

bool is_space_or_tab(char c) {
    return c == ' ' || c == '\t';
}

bool is_ws(char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

// Latin letters with diacritics, as two-byte UTF-8 sequences, folded to
// their unaccented ASCII base. Covers the Latin-1 supplement plus the
// Latin Extended-A letters that show up in European names and titles.
struct Fold2 {
    unsigned char b0, b1;
    const char* base;
};

constexpr std::array<Fold2, 98> kUtf8Folds = {{
    {0xC3, 0x80, "A"}, {0xC3, 0x81, "A"}, {0xC3, 0x82, "A"}, {0xC3, 0x83, "A"},
    {0xC3, 0x84, "A"}, {0xC3, 0x85, "A"}, {0xC3, 0x86, "AE"}, {0xC3, 0x87, "C"},
    {0xC3, 0x88, "E"}, {0xC3, 0x89, "E"}, {0xC3, 0x8A, "E"}, {0xC3, 0x8B, "E"},
    {0xC3, 0x8C, "I"}, {0xC3, 0x8D, "I"}, {0xC3, 0x8E, "I"}, {0xC3, 0x8F, "I"},
    {0xC3, 0x91, "N"}, {0xC3, 0x92, "O"}, {0xC3, 0x93, "O"}, {0xC3, 0x94, "O"},
    {0xC3, 0x95, "O"}, {0xC3, 0x96, "O"}, {0xC3, 0x98, "O"}, {0xC3, 0x99, "U"},
    {0xC3, 0x9A, "U"}, {0xC3, 0x9B, "U"}, {0xC3, 0x9C, "U"}, {0xC3, 0x9D, "Y"},
    {0xC3, 0x9F, "ss"},
    {0xC3, 0xA0, "a"}, {0xC3, 0xA1, "a"}, {0xC3, 0xA2, "a"}, {0xC3, 0xA3, "a"},
    {0xC3, 0xA4, "a"}, {0xC3, 0xA5, "a"}, {0xC3, 0xA6, "ae"}, {0xC3, 0xA7, "c"},
    {0xC3, 0xA8, "e"}, {0xC3, 0xA9, "e"}, {0xC3, 0xAA, "e"}, {0xC3, 0xAB, "e"},
    {0xC3, 0xAC, "i"}, {0xC3, 0xAD, "i"}, {0xC3, 0xAE, "i"}, {0xC3, 0xAF, "i"},
    {0xC3, 0xB1, "n"}, {0xC3, 0xB2, "o"}, {0xC3, 0xB3, "o"}, {0xC3, 0xB4, "o"},
    {0xC3, 0xB5, "o"}, {0xC3, 0xB6, "o"}, {0xC3, 0xB8, "o"}, {0xC3, 0xB9, "u"},
    {0xC3, 0xBA, "u"}, {0xC3, 0xBB, "u"}, {0xC3, 0xBC, "u"}, {0xC3, 0xBD, "y"},
    {0xC3, 0xBF, "y"},
    {0xC4, 0x80, "A"}, {0xC4, 0x81, "a"}, {0xC4, 0x82, "A"}, {0xC4, 0x83, "a"},
    {0xC4, 0x84, "A"}, {0xC4, 0x85, "a"}, {0xC4, 0x86, "C"}, {0xC4, 0x87, "c"},
    {0xC4, 0x8C, "C"}, {0xC4, 0x8D, "c"}, {0xC4, 0x8E, "D"}, {0xC4, 0x8F, "d"},
    {0xC4, 0x98, "E"}, {0xC4, 0x99, "e"}, {0xC4, 0x9A, "E"}, {0xC4, 0x9B, "e"},
    {0xC4, 0x9E, "G"}, {0xC4, 0x9F, "g"}, {0xC4, 0xB0, "I"}, {0xC4, 0xB1, "i"},
    {0xC5, 0x81, "L"}, {0xC5, 0x82, "l"}, {0xC5, 0x83, "N"}, {0xC5, 0x84, "n"},
    {0xC5, 0x87, "N"}, {0xC5, 0x88, "n"}, {0xC5, 0x90, "O"}, {0xC5, 0x91, "o"},
    {0xC5, 0x98, "R"}, {0xC5, 0x99, "r"}, {0xC5, 0x9A, "S"}, {0xC5, 0x9B, "s"},
    {0xC5, 0xA0, "S"}, {0xC5, 0xA1, "s"}, {0xC5, 0xAE, "U"}, {0xC5, 0xAF, "u"},
    {0xC5, 0xB0, "U"}, {0xC5, 0xB1, "u"}, {0xC5, 0xBD, "Z"}, {0xC5, 0xBE, "z"},
}};

const char* fold_utf8_pair(unsigned char b0, unsigned char b1) {
    for (const auto& f : kUtf8Folds)
        if (f.b0 == b0 && f.b1 == b1)
            return f.base;
    return nullptr;
}

bool is_accent_mark(char c) {
    switch (c) {
    case '"': case '\'': case '`': case '^': case '~': case '=': case '.':
        return true;
    default:
        return false;
    }
}

bool is_accent_letter_macro(char c) {
    // \c{c}, \v{s}, \u{g}, \H{o}, \k{a}, \r{u}, \b{x}, \d{x}
    switch (c) {
    case 'c': case 'v': case 'u': case 'H': case 'k': case 'r': case 'b': case 'd':
        return true;
    default:
        return false;
    }
}

struct Piece {
    char ch;
    std::size_t src_begin;
    std::size_t src_end;
};

// Stage 1: fold LaTeX accent macros and UTF-8 diacritics, canonicalize
// quote artifacts. Works on raw bytes.
std::vector<Piece> fold_pass(std::string_view s) {
    std::vector<Piece> out;
    out.reserve(s.size());
    std::size_t i = 0;
    const std::size_t n = s.size();

    auto emit = [&out](char c, std::size_t b, std::size_t e) { out.push_back({c, b, e}); };
    auto emit_str = [&emit](const char* t, std::size_t b, std::size_t e) {
        for (; *t; ++t)
            emit(*t, b, e);
    };

    while (i < n) {
        const char c = s[i];

        // LaTeX accents: \"u  \"{u}  \'e  \c{c} ...
        if (c == '\\' && i + 1 < n) {
            const char m = s[i + 1];
            if (is_accent_mark(m)) {
                if (i + 2 < n && is_ascii_alpha(s[i + 2])) {
                    emit(s[i + 2], i, i + 3);
                    i += 3;
                    continue;
                }
                if (i + 4 < n && s[i + 2] == '{' && is_ascii_alpha(s[i + 3]) && s[i + 4] == '}') {
                    emit(s[i + 3], i, i + 5);
                    i += 5;
                    continue;
                }
            }
            if (is_accent_letter_macro(m) && i + 4 < n && s[i + 2] == '{' &&
                is_ascii_alpha(s[i + 3]) && s[i + 4] == '}') {
                emit(s[i + 3], i, i + 5);
                i += 5;
                continue;
            }
            if (s.compare(i, 3, "\\ss") == 0 && (i + 3 >= n || !is_ascii_alpha(s[i + 3]))) {
                std::size_t e = (i + 4 < n && s.compare(i + 3, 2, "{}") == 0) ? i + 5 : i + 3;
                emit_str("ss", i, e);
                i = e;
                continue;
            }
        }

        // UTF-8 two-byte diacritics
        if ((static_cast<unsigned char>(c) == 0xC3 || static_cast<unsigned char>(c) == 0xC4 ||
             static_cast<unsigned char>(c) == 0xC5) &&
            i + 1 < n) {
            if (const char* base = fold_utf8_pair(static_cast<unsigned char>(c),
                                                  static_cast<unsigned char>(s[i + 1]))) {
                emit_str(base, i, i + 2);
                i += 2;
                continue;
            }
        }

        // Unicode curly quotes (three-byte, E2 80 98/99/9C/9D)
        if (static_cast<unsigned char>(c) == 0xE2 && i + 2 < n &&
            static_cast<unsigned char>(s[i + 1]) == 0x80) {
            const unsigned char b2 = static_cast<unsigned char>(s[i + 2]);
            if (b2 == 0x98 || b2 == 0x99) {
                emit('\'', i, i + 3);
                i += 3;
                continue;
            }
            if (b2 == 0x9C || b2 == 0x9D) {
                emit('"', i, i + 3);
                i += 3;
                continue;
            }
        }

        // TeX quote ligatures
        if ((c == '`' || c == '\'') && i + 1 < n && s[i + 1] == c) {
            emit('"', i, i + 2);
            i += 2;
            continue;
        }

        // "66" misread for an opening quote: word boundary before, letter after
        if (c == '6' && i + 1 < n && s[i + 1] == '6' && i + 2 < n && is_ascii_alpha(s[i + 2]) &&
            (i == 0 || is_ws(s[i - 1]) || s[i - 1] == '(')) {
            emit('"', i, i + 2);
            i += 2;
            continue;
        }

        // "99" misread for a closing quote: letter before, boundary after
        if (c == '9' && i + 1 < n && s[i + 1] == '9' && i > 0 && is_ascii_alpha(s[i - 1]) &&
            (i + 2 >= n || is_ws(s[i + 2]) || s[i + 2] == ')' || s[i + 2] == '.' ||
             s[i + 2] == ',')) {
            emit('"', i, i + 2);
            i += 2;
            continue;
        }

        emit(c, i, i + 1);
        ++i;
    }
    return out;
}

// Stage 2: collapse whitespace runs to one space, drop outer whitespace.
std::vector<Piece> collapse_ws_pass(const std::vector<Piece>& in) {
    std::vector<Piece> out;
    out.reserve(in.size());
    std::size_t i = 0;
    const std::size_t n = in.size();
    while (i < n) {
        if (is_ws(in[i].ch)) {
            std::size_t j = i;
            while (j < n && is_ws(in[j].ch))
                ++j;
            if (!out.empty() && j < n)
                out.push_back({' ', in[i].src_begin, in[j - 1].src_end});
            i = j;
        } else {
            out.push_back(in[i]);
            ++i;
        }
    }
    return out;
}

struct Token {
    std::vector<Piece> chars; // '~' marks already removed
    bool tilde_start = false; // raw token began with '~'
};

// A leading '~' belongs to the word it marks: fold its bytes into the first
// kept character so mapped-back spans include the mark instead of dangling
// just before a match boundary.
void absorb_leading_tilde(Token& token, std::size_t tilde_begin) {
    if (!token.chars.empty() && token.chars.front().src_begin > tilde_begin)
        token.chars.front().src_begin = tilde_begin;
}

// Stage 3: '~' removal plus joining of spaced-out letters. A '~'-marked
// letter opens a word that absorbs following unmarked single letters; an
// unmarked run of >= 4 single letters is OCR letterspacing and joins too.
std::vector<Piece> despace_pass(const std::vector<Piece>& in) {
    std::vector<Token> tokens;
    {
        Token cur;
        bool raw_empty = true;
        std::size_t tilde_begin = 0;
        auto flush = [&]() {
            if (!cur.chars.empty()) {
                if (cur.tilde_start)
                    absorb_leading_tilde(cur, tilde_begin);
                tokens.push_back(std::move(cur));
            }
            cur = Token{};
            raw_empty = true;
        };
        for (const Piece& p : in) {
            if (p.ch == ' ') {
                flush();
                continue;
            }
            if (p.ch == '~') {
                if (raw_empty) {
                    cur.tilde_start = true;
                    tilde_begin = p.src_begin;
                }
                raw_empty = false;
                continue; // '~' itself is dropped
            }
            cur.chars.push_back(p);
            raw_empty = false;
        }
        flush();
    }

    auto is_single_letter = [](const Token& t) {
        return t.chars.size() == 1 && is_ascii_alnum(t.chars[0].ch);
    };

    std::vector<std::vector<Piece>> words;
    std::size_t i = 0;
    while (i < tokens.size()) {
        if (tokens[i].tilde_start && is_single_letter(tokens[i])) {
            // tilde-marked word start: absorb unmarked single letters
            std::vector<Piece> w = tokens[i].chars;
            std::size_t j = i + 1;
            while (j < tokens.size() && !tokens[j].tilde_start && is_single_letter(tokens[j])) {
                w.push_back(tokens[j].chars[0]);
                ++j;
            }
            words.push_back(std::move(w));
            i = j;
            continue;
        }
        if (!tokens[i].tilde_start && is_single_letter(tokens[i])) {
            std::size_t j = i;
            while (j < tokens.size() && !tokens[j].tilde_start && is_single_letter(tokens[j]))
                ++j;
            if (j - i >= 4) {
                std::vector<Piece> w;
                for (std::size_t k = i; k < j; ++k)
                    w.push_back(tokens[k].chars[0]);
                words.push_back(std::move(w));
                i = j;
                continue;
            }
            for (std::size_t k = i; k < j; ++k)
                words.push_back(tokens[k].chars);
            i = j;
            continue;
        }
        words.push_back(tokens[i].chars);
        ++i;
    }

    std::vector<Piece> out;
    for (std::size_t w = 0; w < words.size(); ++w) {
        if (w > 0 && !out.empty() && !words[w].empty()) {
            // separator inherits the gap between the adjacent words
            out.push_back({' ', out.back().src_end, words[w].front().src_begin});
        }
        for (const Piece& p : words[w])
            out.push_back(p);
    }
    return out;
}

// Confusable classes ('0'/'O', 'l'/'1') count as equal during matching but
// never rewrite the canonical text. Folding both comparands to one
// representative implements the equivalence.
std::string fold_confusables(std::string_view s) {
    std::string out(s);
    for (char& c : out) {
        if (c == 'O')
            c = '0';
        else if (c == 'l')
            c = '1';
    }
    return out;
}

MappedText assemble(const std::vector<Piece>& pieces) {
    MappedText m;
    m.text.reserve(pieces.size());
    m.src_begin.reserve(pieces.size());
    m.src_end.reserve(pieces.size());
    for (const Piece& p : pieces) {
        m.text.push_back(p.ch);
        m.src_begin.push_back(p.src_begin);
        m.src_end.push_back(p.src_end);
    }
    return m;
}

// Minimum edit distance of `needle` against any substring of `haystack`
// ending at each position (Sellers' variant: free start).
std::vector<int> substring_end_distances(std::string_view haystack, std::string_view needle) {
    const std::size_t n = needle.size();
    const std::size_t h = haystack.size();
    std::vector<int> col(n + 1), prev(n + 1);
    std::vector<int> best(h + 1, 0);
    for (std::size_t i = 0; i <= n; ++i)
        prev[i] = static_cast<int>(i);
    best[0] = prev[n];
    for (std::size_t j = 1; j <= h; ++j) {
        col[0] = 0;
        for (std::size_t i = 1; i <= n; ++i) {
            const int sub = prev[i - 1] + (needle[i - 1] == haystack[j - 1] ? 0 : 1);
            col[i] = std::min({sub, prev[i] + 1, col[i - 1] + 1});
        }
        best[j] = col[n];
        std::swap(col, prev);
    }
    return best;
}

} // namespace

std::string_view to_string(MatchMode mode) {
    switch (mode) {
    case MatchMode::exact: return "exact";
    case MatchMode::normalized: return "normalized";
    case MatchMode::fuzzy: return "fuzzy";
    }
    return "exact";
}

std::optional<MatchMode> match_mode_from_string(std::string_view s) {
    if (s == "exact")
        return MatchMode::exact;
    if (s == "normalized")
        return MatchMode::normalized;
    if (s == "fuzzy")
        return MatchMode::fuzzy;
    return std::nullopt;
}

int levenshtein(std::string_view a, std::string_view b) {
    if (a.size() > b.size())
        std::swap(a, b);
    const std::size_t n = a.size(), m = b.size();
    if (n == 0)
        return static_cast<int>(m);
    std::vector<int> row(n + 1);
    for (std::size_t i = 0; i <= n; ++i)
        row[i] = static_cast<int>(i);
    for (std::size_t j = 1; j <= m; ++j) {
        int diag = row[0];
        row[0] = static_cast<int>(j);
        for (std::size_t i = 1; i <= n; ++i) {
            const int sub = diag + (a[i - 1] == b[j - 1] ? 0 : 1);
            diag = row[i];
            row[i] = std::min({sub, diag + 1, row[i - 1] + 1});
        }
    }
    return row[n];
}

IndexMap strip_spaces_with_map(std::string_view s) {
    IndexMap m;
    m.stripped.reserve(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (is_space_or_tab(s[i]))
            continue;
        m.stripped.push_back(s[i]);
        m.to_original.push_back(i);
    }
    return m;
}

MappedText normalize_ocr_mapped(std::string_view s) {
    auto pieces = fold_pass(s);
    pieces = collapse_ws_pass(pieces);
    pieces = despace_pass(pieces);
    return assemble(pieces);
}

std::string normalize_ocr(std::string_view s) {
    return normalize_ocr_mapped(s).text;
}

std::optional<Match> locate_title_normalized(const MappedText& content, std::string_view title) {
    const std::string needle = fold_confusables(normalize_ocr(title));
    if (needle.empty())
        return std::nullopt;
    const std::string hay = fold_confusables(content.text);
    const std::size_t pos = hay.find(needle);
    if (pos == std::string::npos)
        return std::nullopt;
    Match m;
    m.start = content.src_begin[pos];
    m.end = content.src_end[pos + needle.size() - 1];
    m.distance = 0;
    m.mode = MatchMode::normalized;
    return m;
}

std::optional<Match> locate_title_fuzzy(const MappedText& content, std::string_view title,
                                        double threshold) {
    const std::string needle = fold_confusables(normalize_ocr(title));
    if (needle.empty() || content.text.empty())
        return std::nullopt;
    const int k = static_cast<int>(std::floor(threshold * static_cast<double>(needle.size())));
    if (k < 0)
        return std::nullopt;

    const std::string hay_folded = fold_confusables(content.text);
    const std::string_view hay = hay_folded;
    const auto end_dist = substring_end_distances(hay, needle);
    int best = std::numeric_limits<int>::max();
    for (std::size_t j = 1; j <= hay.size(); ++j)
        best = std::min(best, end_dist[j]);
    if (best > k)
        return std::nullopt;

    // leftmost start achieving the optimum, via the reversed problem
    std::string rhay(hay.rbegin(), hay.rend());
    std::string rneedle(needle.rbegin(), needle.rend());
    const auto start_dist = substring_end_distances(rhay, rneedle);
    std::size_t start = 0;
    for (std::size_t s = 0; s < hay.size(); ++s) {
        if (start_dist[hay.size() - s] == best) {
            start = s;
            break;
        }
    }

    // shortest window from that start with distance == best
    const std::size_t max_len = std::min(hay.size() - start, needle.size() + static_cast<std::size_t>(k));
    const std::string_view window = hay.substr(start, max_len);
    const std::size_t n = needle.size();
    std::vector<int> col(n + 1), prev(n + 1);
    for (std::size_t i = 0; i <= n; ++i)
        prev[i] = static_cast<int>(i);
    std::size_t win_len = 0;
    bool found = false;
    if (prev[n] == best) { // degenerate: empty window already optimal
        found = true;
    }
    for (std::size_t j = 1; j <= window.size() && !found; ++j) {
        col[0] = static_cast<int>(j);
        for (std::size_t i = 1; i <= n; ++i) {
            const int sub = prev[i - 1] + (needle[i - 1] == window[j - 1] ? 0 : 1);
            col[i] = std::min({sub, prev[i] + 1, col[i - 1] + 1});
        }
        if (col[n] == best) {
            win_len = j;
            found = true;
        }
        std::swap(col, prev);
    }
    if (!found || win_len == 0)
        return std::nullopt;

    Match m;
    m.start = content.src_begin[start];
    m.end = content.src_end[start + win_len - 1];
    m.distance = best;
    m.mode = MatchMode::fuzzy;
    return m;
}

std::optional<Match> locate_title(std::string_view content, std::string_view title, MatchMode mode,
                                  double fuzzy_threshold) {
    if (title.empty())
        return std::nullopt;
    switch (mode) {
    case MatchMode::exact: {
        const std::size_t pos = content.find(title);
        if (pos == std::string_view::npos)
            return std::nullopt;
        return Match{pos, pos + title.size(), 0, MatchMode::exact};
    }
    case MatchMode::normalized:
        return locate_title_normalized(normalize_ocr_mapped(content), title);
    case MatchMode::fuzzy:
        return locate_title_fuzzy(normalize_ocr_mapped(content), title, fuzzy_threshold);
    }
    return std::nullopt;
}

} // namespace revsplit
