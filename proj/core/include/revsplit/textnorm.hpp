#ifndef REVSPLIT_TEXTNORM_HPP
#define REVSPLIT_TEXTNORM_HPP

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace revsplit {

enum class MatchMode { exact, normalized, fuzzy };

std::string_view to_string(MatchMode mode);
std::optional<MatchMode> match_mode_from_string(std::string_view s);

/// A located title occurrence. Indexes are byte offsets into the searched
/// text; [start, end) covers the matched window. distance is 0 for exact
/// and normalized matches.
struct Match {
    std::size_t start = 0;
    std::size_t end = 0;
    int distance = 0;
    MatchMode mode = MatchMode::exact;
};

/// Space-stripped view of a text plus the mapping from each stripped
/// character back to its byte offset in the original. Only ASCII space and
/// tab are stripped; newlines are retained.
struct IndexMap {
    std::string stripped;
    std::vector<std::size_t> to_original; // strictly increasing, one per stripped char
};

/// Normalized text where every output character remembers the byte range of
/// the raw input it came from. src ranges are non-overlapping and ordered,
/// so a normalized match [i, j) maps back to raw [src_begin[i], src_end[j-1]).
struct MappedText {
    std::string text;
    std::vector<std::size_t> src_begin;
    std::vector<std::size_t> src_end;
};

/// Single-character insert/delete/substitute edit distance.
int levenshtein(std::string_view a, std::string_view b);

IndexMap strip_spaces_with_map(std::string_view s);

/// Canonical matching form for OCR LaTeX. Fixed rule set:
///   1. diacritics and LaTeX accent macros fold to base letters ("Über",
///      "\"Uber", "\"{U}ber" all become "Uber")
///   2. quote artifacts canonicalize to '"' (``, '', and 66/99 digit pairs
///      sitting on word boundaries)
///   3. whitespace runs collapse to a single space, outer whitespace drops
///   4. '~' marks are removed; a '~'-marked letter starts a word and absorbs
///      following spaced-out single letters ("~t i t l e" -> "title");
///      unmarked runs of 4+ spaced-out single letters are joined too
/// Visually confusable pairs ('0'/'O', 'l'/'1') stay in the text but compare
/// equal inside locate_title. The result is for comparison only and never
/// appears in output.
std::string normalize_ocr(std::string_view s);

/// normalize_ocr plus the per-character source map needed to translate match
/// positions back into the raw text.
MappedText normalize_ocr_mapped(std::string_view s);

/// Find a title inside OCR content.
///   exact      first literal occurrence
///   normalized first occurrence after normalizing both sides, indexes
///              mapped back to the raw content
///   fuzzy      the window minimizing edit distance against the normalized
///              title, accepted when distance <= floor(threshold * |title|)
///              (normalized length); ties break leftmost, then shortest
std::optional<Match> locate_title(std::string_view content, std::string_view title,
                                  MatchMode mode, double fuzzy_threshold = 0.3);

/// Variants taking content whose normalized form was computed once by the
/// caller. Used by the splitter to avoid renormalizing per cascade step.
std::optional<Match> locate_title_normalized(const MappedText& content, std::string_view title);
std::optional<Match> locate_title_fuzzy(const MappedText& content, std::string_view title,
                                        double threshold = 0.3);

} // namespace revsplit

#endif
