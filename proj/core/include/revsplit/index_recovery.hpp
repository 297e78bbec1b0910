#ifndef REVSPLIT_INDEX_RECOVERY_HPP
#define REVSPLIT_INDEX_RECOVERY_HPP

#include "revsplit/corpus.hpp"
#include "revsplit/regex_splitter.hpp"

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace revsplit {

/// Exact character span of an extracted document in the source LaTeX, or a
/// classified non-result. Found satisfies
/// strip_spaces(content[start, end)) == strip_spaces(extracted text).
struct IndexOutcome {
    enum class Status { found, not_reviewed, unsuccessful };

    std::int64_t zbmath_internal_id = 0;
    Status status = Status::unsuccessful;
    std::size_t start = 0; // status == found
    std::size_t end = 0;
    std::vector<std::string> source_pages; // pages the span touches

    bool covered() const { return status != Status::unsuccessful; }
};

std::string_view to_string(IndexOutcome::Status status);

/// Map an extraction back to exact indexes by exact matching after removing
/// spaces and tabs from both sides (newlines must match as-is). The first
/// occurrence wins; extractions the model altered beyond whitespace find no
/// occurrence and come back Unsuccessful, which is the hallucination filter.
/// NotReviewed passes through; Failed extractions are Unsuccessful.
IndexOutcome recover_indexes(std::string_view content, const ExtractionResult& extraction);

/// Same, with source_pages filled from the task's page offsets.
IndexOutcome recover_indexes(const SplitTask& task, const ExtractionResult& extraction);

} // namespace revsplit

#endif
