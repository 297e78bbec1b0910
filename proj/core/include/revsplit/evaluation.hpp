#ifndef REVSPLIT_EVALUATION_HPP
#define REVSPLIT_EVALUATION_HPP

#include "revsplit/corpus.hpp"
#include "revsplit/index_recovery.hpp"
#include "revsplit/regex_splitter.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace revsplit {

/// Expected outcome for one document: the exact text (after the splitter's
/// permitted corrections) or the not-reviewed marker, plus optional exact
/// character indexes.
struct GoldRecord {
    std::int64_t zbmath_internal_id = 0;
    bool not_reviewed = false;
    std::string gold_text; // meaningful when !not_reviewed
    std::optional<std::pair<std::size_t, std::size_t>> gold_indexes;
};

/// Splitting accuracy over the documents that were attempted. A result is
/// correct when both sides are NotReviewed or both texts match exactly
/// after trimming outer whitespace; Failed counts as attempted and wrong.
struct EvalReport {
    std::size_t total = 0;     // gold records
    std::size_t attempted = 0; // result records
    std::size_t correct = 0;
    double accuracy = 0.0; // correct / attempted
    std::string method;

    // per-status breakdown of the results
    std::size_t text_results = 0;
    std::size_t not_reviewed_results = 0;
    std::size_t failed_results = 0;
    std::size_t correct_text = 0;
    std::size_t correct_not_reviewed = 0;
};

EvalReport score_splitting(const std::vector<ExtractionResult>& results,
                           const std::vector<GoldRecord>& gold);

/// Index-recovery scorecard. covered = Found or NotReviewed; an outcome is
/// correct when the indexes equal the gold pair exactly or both sides are
/// NotReviewed. overall <= coverage and overall <= accuracy_on_covered.
struct IndexScore {
    std::size_t total = 0;
    std::size_t covered_count = 0;
    std::size_t found_count = 0;
    std::size_t not_reviewed_count = 0;
    std::size_t correct = 0;
    double coverage = 0.0;
    double accuracy_on_covered = 0.0;
    double overall = 0.0;
};

IndexScore score_indexes(const std::vector<IndexOutcome>& outcomes,
                         const std::vector<GoldRecord>& gold);

/// Sentence BLEU-4 with uniform weights, no smoothing, whitespace tokens.
/// Candidates shorter than four tokens use the largest order they support;
/// an empty candidate scores 0.
double bleu(std::string_view candidate, std::string_view reference);

/// levenshtein / max(|candidate|, |reference|), 0 for two empty strings.
double normalized_edit_distance(std::string_view candidate, std::string_view reference);

/// Page-macro averages of both OCR metrics for one engine.
struct OcrMetricsRow {
    std::string engine;
    double average_bleu = 0.0;
    double average_edit_distance = 0.0;
    std::size_t pages = 0;
};

OcrMetricsRow ocr_eval(const std::vector<std::pair<std::string, std::string>>& pairs,
                       std::string engine_name);

/// Correctness of one scored document together with the pages it came from.
struct DocOutcome {
    std::int64_t zbmath_internal_id = 0;
    bool correct = false;
    std::vector<std::string> page_ids;
};

/// Does the OCR confidence rate predict splitting errors? Summarizes error
/// counts above/below the corpus mean confidence and inside the k
/// lowest-confidence documents.
struct ConfidenceReport {
    bool available = false;
    double mean_confidence = 0.0;
    std::size_t errors_above_mean = 0;
    std::size_t errors_at_or_below_mean = 0;
    std::size_t correct_above_mean = 0;
    std::size_t correct_at_or_below_mean = 0;
    int k_lowest = 0;
    std::size_t errors_in_k_lowest = 0;

    struct PerDoc {
        std::int64_t zbmath_internal_id = 0;
        std::optional<double> avg_confidence;
        bool correct = false;
    };
    std::vector<PerDoc> docs;
};

ConfidenceReport confidence_correlation(const std::vector<DocOutcome>& outcomes,
                                        const PageStore& pages, int k_lowest = 10);

} // namespace revsplit

#endif
