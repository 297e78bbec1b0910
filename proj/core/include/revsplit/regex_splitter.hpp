#ifndef REVSPLIT_REGEX_SPLITTER_HPP
#define REVSPLIT_REGEX_SPLITTER_HPP

#include "revsplit/corpus.hpp"
#include "revsplit/textnorm.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>

namespace revsplit {

enum class SplitMethod { regex, llm_single, llm_vote };

std::string_view to_string(SplitMethod method);
std::optional<SplitMethod> split_method_from_string(std::string_view s);

/// Per-document splitting outcome. NotReviewed is the canonical result for
/// a catalogue entry with no review text on the page.
struct ExtractionResult {
    enum class Status { text, not_reviewed, failed };

    std::int64_t zbmath_internal_id = 0;
    Status status = Status::failed;
    std::string text;   // status == text, never empty
    std::string reason; // status == failed
    SplitMethod method = SplitMethod::regex;
    // opening/closing match modes, regex method only
    std::optional<std::pair<MatchMode, MatchMode>> boundary_modes;

    static ExtractionResult make_text(std::int64_t id, std::string text, SplitMethod method);
    static ExtractionResult make_not_reviewed(std::int64_t id, SplitMethod method);
    static ExtractionResult make_failed(std::int64_t id, std::string reason, SplitMethod method);
};

struct SplitOptions {
    double fuzzy_threshold = 0.3;
};

/// Metadata-anchored splitting: locate the row title (cascade of
/// original title / title across exact, normalized, fuzzy modes), locate the
/// boundary title the same way in the remaining content, extract the text
/// between the end of the first match and the start of the second, and trim
/// extraneous material. Absent boundaries become failed results, an empty
/// trimmed span becomes NotReviewed; never throws.
ExtractionResult split_document(const SplitTask& task, const SplitOptions& options = {});

/// Strip non-document material from an extracted span, in order: leading
/// source-citation residue (the row's source, fuzzy-matched in the first 200
/// characters, plus any digit-heavy prefix before the first sentence),
/// standalone page-number lines, a trailing reviewer-signature line, and
/// outer whitespace.
std::string trim_extraneous(std::string_view text, std::string_view source = {});

} // namespace revsplit

#endif
