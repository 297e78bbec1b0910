#include "revsplit/index_recovery.hpp"

#include "revsplit/textnorm.hpp"

namespace revsplit {

std::string_view to_string(IndexOutcome::Status status) {
    switch (status) {
    case IndexOutcome::Status::found: return "found";
    case IndexOutcome::Status::not_reviewed: return "not_reviewed";
    case IndexOutcome::Status::unsuccessful: return "unsuccessful";
    }
    return "unsuccessful";
}

IndexOutcome recover_indexes(std::string_view content, const ExtractionResult& extraction) {
    IndexOutcome outcome;
    outcome.zbmath_internal_id = extraction.zbmath_internal_id;

    if (extraction.status == ExtractionResult::Status::not_reviewed) {
        outcome.status = IndexOutcome::Status::not_reviewed;
        return outcome;
    }
    if (extraction.status != ExtractionResult::Status::text)
        return outcome; // failed extraction: nothing to locate

    const IndexMap haystack = strip_spaces_with_map(content);
    const IndexMap needle = strip_spaces_with_map(extraction.text);
    if (needle.stripped.empty())
        return outcome;

    const std::size_t pos = haystack.stripped.find(needle.stripped);
    if (pos == std::string::npos)
        return outcome;

    outcome.status = IndexOutcome::Status::found;
    outcome.start = haystack.to_original[pos];
    outcome.end = haystack.to_original[pos + needle.stripped.size() - 1] + 1;
    return outcome;
}

IndexOutcome recover_indexes(const SplitTask& task, const ExtractionResult& extraction) {
    IndexOutcome outcome = recover_indexes(task.latex_content, extraction);
    if (outcome.status != IndexOutcome::Status::found)
        return outcome;

    const std::size_t content_end =
        task.latex_content.size() - (task.sentinel_appended ? kSentinelBlock.size() : 0);
    for (std::size_t i = 0; i < task.page_span.size(); ++i) {
        const std::size_t page_begin = task.page_offsets[i];
        const std::size_t page_end = i + 1 < task.page_offsets.size()
                                         ? task.page_offsets[i + 1] - 1 // joining newline
                                         : content_end;
        if (page_begin < outcome.end && outcome.start < page_end)
            outcome.source_pages.push_back(task.page_span[i]);
    }
    return outcome;
}

} // namespace revsplit
