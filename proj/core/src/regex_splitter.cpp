#include "revsplit/regex_splitter.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <sstream>
#include <vector>

namespace revsplit {

namespace {

bool is_upper(char c) {
    return c >= 'A' && c <= 'Z';
}

bool is_lower(char c) {
    return c >= 'a' && c <= 'z';
}

bool is_digit(char c) {
    return c >= '0' && c <= '9';
}

bool is_alpha(char c) {
    return is_upper(c) || is_lower(c);
}

bool is_ws(char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r';
}

std::string_view trim_view(std::string_view s) {
    while (!s.empty() && is_ws(s.front()))
        s.remove_prefix(1);
    while (!s.empty() && is_ws(s.back()))
        s.remove_suffix(1);
    return s;
}

// Candidate boundary titles in cascade preference order; the original title
// is printed on the page, the (possibly translated) title is the fallback.
std::vector<std::string_view> title_candidates(const MetadataRow& row) {
    std::vector<std::string_view> titles;
    if (row.original_title && !row.original_title->empty())
        titles.push_back(*row.original_title);
    if (!row.title.empty())
        titles.push_back(row.title);
    return titles;
}

std::optional<Match> locate_cascade(std::string_view content, const MappedText& normalized,
                                    const std::vector<std::string_view>& titles,
                                    double fuzzy_threshold) {
    for (const MatchMode mode : {MatchMode::exact, MatchMode::normalized, MatchMode::fuzzy}) {
        for (const std::string_view title : titles) {
            std::optional<Match> m;
            switch (mode) {
            case MatchMode::exact:
                m = locate_title(content, title, MatchMode::exact);
                break;
            case MatchMode::normalized:
                m = locate_title_normalized(normalized, title);
                break;
            case MatchMode::fuzzy:
                m = locate_title_fuzzy(normalized, title, fuzzy_threshold);
                break;
            }
            if (m)
                return m;
        }
    }
    return std::nullopt;
}

// A line carrying only a page number: digits or roman numerals with
// optional trailing punctuation.
bool is_page_number_line(std::string_view line) {
    line = trim_view(line);
    if (line.empty())
        return false;
    if (line.back() == '.' || line.back() == ',')
        line.remove_suffix(1);
    if (line.empty() || line.size() > 8)
        return false;
    const auto all = [&line](auto pred) { return std::all_of(line.begin(), line.end(), pred); };
    if (all(is_digit))
        return true;
    const auto roman_lower = [](char c) {
        return c == 'i' || c == 'v' || c == 'x' || c == 'l' || c == 'c' || c == 'd' || c == 'm';
    };
    const auto roman_upper = [&roman_lower](char c) {
        return roman_lower(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    };
    return all(roman_lower) || all(roman_upper);
}

std::vector<std::string_view> split_lines(std::string_view text) {
    std::vector<std::string_view> lines;
    std::size_t begin = 0;
    while (begin <= text.size()) {
        const std::size_t nl = text.find('\n', begin);
        if (nl == std::string_view::npos) {
            lines.push_back(text.substr(begin));
            break;
        }
        lines.push_back(text.substr(begin, nl - begin));
        begin = nl + 1;
    }
    return lines;
}

// Citation residue reads as numbers and punctuation, not prose.
bool is_citation_residue(std::string_view prefix) {
    prefix = trim_view(prefix);
    if (prefix.empty())
        return false;
    std::size_t alpha = 0, digits = 0;
    for (const char c : prefix) {
        if (is_alpha(c))
            ++alpha;
        else if (is_digit(c))
            ++digits;
    }
    if (digits == 0)
        return false;
    return static_cast<double>(alpha) < 0.35 * static_cast<double>(prefix.size());
}

// Drop a leading digit-heavy fragment that precedes the first sentence
// start (an uppercase letter, '$', or '\' command after whitespace).
std::string_view strip_leading_residue(std::string_view text) {
    const std::size_t limit = std::min<std::size_t>(text.size(), 200);
    for (std::size_t p = 0; p < limit; ++p) {
        const char c = text[p];
        const bool starts_sentence = is_upper(c) || c == '$' || c == '\\';
        if (!starts_sentence)
            continue;
        if (p == 0)
            return text; // already starts with a sentence
        if (!is_ws(text[p - 1]))
            continue;
        const std::string_view prefix = trim_view(text.substr(0, p));
        if (prefix.empty())
            return text; // only whitespace before the first sentence
        if (text[p - 1] != '\n' && !prefix.empty() && prefix.back() != '.' && prefix.back() != ')')
            continue;
        if (is_citation_residue(prefix))
            return text.substr(p);
        return text;
    }
    return text;
}

bool is_name_word(std::string_view word) {
    static constexpr std::array<std::string_view, 9> particles = {
        "v", "von", "van", "de", "der", "di", "da", "del", "zu"};
    std::string_view bare = word;
    if (!bare.empty() && bare.back() == '.')
        bare.remove_suffix(1);
    if (bare.empty())
        return false;
    for (const auto particle : particles)
        if (bare == particle)
            return true;
    if (!is_upper(bare.front()))
        return false;
    return std::all_of(bare.begin() + 1, bare.end(),
                       [](char c) { return is_alpha(c) || c == '\'' || c == '-'; });
}

bool is_initial(std::string_view word) {
    return word.size() == 2 && is_upper(word[0]) && word[1] == '.';
}

std::vector<std::string_view> split_words(std::string_view line) {
    std::vector<std::string_view> words;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && is_ws(line[i]))
            ++i;
        std::size_t j = i;
        while (j < line.size() && !is_ws(line[j]))
            ++j;
        if (j > i)
            words.push_back(line.substr(i, j - i));
        i = j;
    }
    return words;
}

// Reviewer signatures close a review as "H. Weyl (Princeton)." or
// "J. v. Neumann.". Plain sentences must not qualify, so the period form
// requires leading initials.
bool is_signature_line(std::string_view line) {
    line = trim_view(line);
    if (line.empty() || line.size() > 64)
        return false;

    // "Name (Place)." form
    if (line.back() == '.')
        line.remove_suffix(1);
    if (!line.empty() && line.back() == ')') {
        const std::size_t open = line.rfind('(');
        if (open != std::string_view::npos && open > 0 && line.size() - open <= 42) {
            const auto words = split_words(trim_view(line.substr(0, open)));
            if (!words.empty() && words.size() <= 5 &&
                std::all_of(words.begin(), words.end(),
                            [](std::string_view w) { return is_initial(w) || is_name_word(w); }))
                return true;
        }
        return false;
    }

    // "J. v. Neumann" form (the trailing period was removed above)
    const auto words = split_words(line);
    if (words.size() < 2 || words.size() > 5)
        return false;
    for (std::size_t i = 0; i + 1 < words.size(); ++i) {
        std::string_view w = words[i];
        bool particle = false;
        std::string_view bare = w;
        if (!bare.empty() && bare.back() == '.')
            bare.remove_suffix(1);
        for (const std::string_view p : {"v", "von", "van", "de", "der"})
            if (bare == p)
                particle = true;
        if (!is_initial(w) && !particle)
            return false;
    }
    return is_name_word(words.back());
}

} // namespace

std::string_view to_string(SplitMethod method) {
    switch (method) {
    case SplitMethod::regex: return "regex";
    case SplitMethod::llm_single: return "llm_single";
    case SplitMethod::llm_vote: return "llm_vote";
    }
    return "regex";
}

std::optional<SplitMethod> split_method_from_string(std::string_view s) {
    if (s == "regex")
        return SplitMethod::regex;
    if (s == "llm_single")
        return SplitMethod::llm_single;
    if (s == "llm_vote")
        return SplitMethod::llm_vote;
    return std::nullopt;
}

ExtractionResult ExtractionResult::make_text(std::int64_t id, std::string text,
                                             SplitMethod method) {
    ExtractionResult r;
    r.zbmath_internal_id = id;
    r.status = Status::text;
    r.text = std::move(text);
    r.method = method;
    return r;
}

ExtractionResult ExtractionResult::make_not_reviewed(std::int64_t id, SplitMethod method) {
    ExtractionResult r;
    r.zbmath_internal_id = id;
    r.status = Status::not_reviewed;
    r.method = method;
    return r;
}

ExtractionResult ExtractionResult::make_failed(std::int64_t id, std::string reason,
                                               SplitMethod method) {
    ExtractionResult r;
    r.zbmath_internal_id = id;
    r.status = Status::failed;
    r.reason = std::move(reason);
    r.method = method;
    return r;
}

std::string trim_extraneous(std::string_view text, std::string_view source) {
    // leading source citation, matched fuzzily near the start of the span
    if (!source.empty()) {
        const std::string_view head = text.substr(0, std::min<std::size_t>(text.size(), 200));
        if (const auto m = locate_title(head, source, MatchMode::fuzzy, 0.3))
            text.remove_prefix(m->end);
    }
    text = strip_leading_residue(text);

    // standalone page-number lines
    std::string kept;
    kept.reserve(text.size());
    {
        const auto lines = split_lines(text);
        bool first = true;
        for (const std::string_view line : lines) {
            if (is_page_number_line(line))
                continue;
            if (!first)
                kept.push_back('\n');
            kept.append(line);
            first = false;
        }
    }

    // trailing reviewer signature, only when review text precedes it
    {
        while (!kept.empty() && is_ws(kept.back()))
            kept.pop_back();
        const std::size_t last_nl = kept.find_last_of('\n');
        if (last_nl != std::string::npos) {
            const std::string_view tail = std::string_view(kept).substr(last_nl + 1);
            const std::string_view before = trim_view(std::string_view(kept).substr(0, last_nl));
            if (!before.empty() && is_signature_line(tail))
                kept.resize(last_nl);
        }
    }

    return std::string(trim_view(kept));
}

ExtractionResult split_document(const SplitTask& task, const SplitOptions& options) {
    const std::int64_t id = task.row.zbmath_internal_id;
    const std::string_view content = task.latex_content;

    const auto opening_titles = title_candidates(task.row);
    if (opening_titles.empty())
        return ExtractionResult::make_failed(id, "row title not found", SplitMethod::regex);

    const MappedText normalized_content = normalize_ocr_mapped(content);
    const auto opening =
        locate_cascade(content, normalized_content, opening_titles, options.fuzzy_threshold);
    if (!opening)
        return ExtractionResult::make_failed(id, "row title not found", SplitMethod::regex);

    const std::size_t start = opening->end;
    const std::string_view rest = content.substr(start);

    std::vector<std::string_view> closing_titles;
    if (task.sentinel_appended)
        closing_titles.push_back(kSentinelTitle);
    else if (task.next_row)
        closing_titles = title_candidates(*task.next_row);
    if (closing_titles.empty())
        return ExtractionResult::make_failed(id, "next title not found", SplitMethod::regex);

    const MappedText normalized_rest = normalize_ocr_mapped(rest);
    const auto closing =
        locate_cascade(rest, normalized_rest, closing_titles, options.fuzzy_threshold);
    if (!closing)
        return ExtractionResult::make_failed(id, "next title not found", SplitMethod::regex);

    const std::size_t end = start + closing->start;
    std::string trimmed = trim_extraneous(content.substr(start, end - start), task.row.source);

    ExtractionResult result = trimmed.empty()
                                  ? ExtractionResult::make_not_reviewed(id, SplitMethod::regex)
                                  : ExtractionResult::make_text(id, std::move(trimmed),
                                                                SplitMethod::regex);
    result.boundary_modes = {opening->mode, closing->mode};
    return result;
}

} // namespace revsplit
