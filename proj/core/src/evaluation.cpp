#include "revsplit/evaluation.hpp"

#include "revsplit/errors.hpp"
#include "revsplit/textnorm.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <unordered_map>

namespace revsplit {

namespace {

std::string_view trim_outer(std::string_view s) {
    const auto is_ws = [](char c) {
        return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
    };
    while (!s.empty() && is_ws(s.front()))
        s.remove_prefix(1);
    while (!s.empty() && is_ws(s.back()))
        s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> tokenize(std::string_view s) {
    std::vector<std::string_view> tokens;
    std::size_t i = 0;
    const auto is_ws = [](char c) {
        return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
    };
    while (i < s.size()) {
        while (i < s.size() && is_ws(s[i]))
            ++i;
        std::size_t j = i;
        while (j < s.size() && !is_ws(s[j]))
            ++j;
        if (j > i)
            tokens.push_back(s.substr(i, j - i));
        i = j;
    }
    return tokens;
}

std::unordered_map<std::string, int> ngram_counts(const std::vector<std::string_view>& tokens,
                                                  std::size_t n) {
    std::unordered_map<std::string, int> counts;
    if (tokens.size() < n)
        return counts;
    for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
        std::string key;
        for (std::size_t j = 0; j < n; ++j) {
            if (j > 0)
                key.push_back('\x1f');
            key.append(tokens[i + j]);
        }
        ++counts[key];
    }
    return counts;
}

template <typename T>
std::map<std::int64_t, const T*> index_gold(const std::vector<T>& gold) {
    std::map<std::int64_t, const T*> by_id;
    for (const T& g : gold) {
        if (!by_id.emplace(g.zbmath_internal_id, &g).second)
            throw EvalError("duplicate id in gold: " + std::to_string(g.zbmath_internal_id));
    }
    return by_id;
}

} // namespace

EvalReport score_splitting(const std::vector<ExtractionResult>& results,
                           const std::vector<GoldRecord>& gold) {
    const auto gold_by_id = index_gold(gold);

    EvalReport report;
    report.total = gold.size();
    report.attempted = results.size();
    if (!results.empty())
        report.method = std::string(to_string(results.front().method));

    std::set<std::int64_t> seen;
    for (const ExtractionResult& result : results) {
        if (!seen.insert(result.zbmath_internal_id).second)
            throw EvalError("duplicate id in results: " +
                            std::to_string(result.zbmath_internal_id));
        const auto it = gold_by_id.find(result.zbmath_internal_id);
        if (it == gold_by_id.end())
            throw EvalError("result id " + std::to_string(result.zbmath_internal_id) +
                            " is missing from gold");
        const GoldRecord& expected = *it->second;

        bool correct = false;
        switch (result.status) {
        case ExtractionResult::Status::text:
            ++report.text_results;
            correct = !expected.not_reviewed &&
                      trim_outer(result.text) == trim_outer(expected.gold_text);
            report.correct_text += correct ? 1 : 0;
            break;
        case ExtractionResult::Status::not_reviewed:
            ++report.not_reviewed_results;
            correct = expected.not_reviewed;
            report.correct_not_reviewed += correct ? 1 : 0;
            break;
        case ExtractionResult::Status::failed:
            ++report.failed_results;
            break;
        }
        report.correct += correct ? 1 : 0;
    }

    report.accuracy = report.attempted == 0
                          ? 0.0
                          : static_cast<double>(report.correct) /
                                static_cast<double>(report.attempted);
    return report;
}

IndexScore score_indexes(const std::vector<IndexOutcome>& outcomes,
                         const std::vector<GoldRecord>& gold) {
    const auto gold_by_id = index_gold(gold);

    IndexScore score;
    score.total = outcomes.size();

    std::set<std::int64_t> seen;
    for (const IndexOutcome& outcome : outcomes) {
        if (!seen.insert(outcome.zbmath_internal_id).second)
            throw EvalError("duplicate id in outcomes: " +
                            std::to_string(outcome.zbmath_internal_id));
        const auto it = gold_by_id.find(outcome.zbmath_internal_id);
        if (it == gold_by_id.end())
            throw EvalError("outcome id " + std::to_string(outcome.zbmath_internal_id) +
                            " is missing from gold");
        const GoldRecord& expected = *it->second;

        switch (outcome.status) {
        case IndexOutcome::Status::found: {
            ++score.covered_count;
            ++score.found_count;
            if (!expected.not_reviewed) {
                if (!expected.gold_indexes)
                    throw EvalError("gold record " +
                                    std::to_string(expected.zbmath_internal_id) +
                                    " has text but no gold indexes");
                if (outcome.start == expected.gold_indexes->first &&
                    outcome.end == expected.gold_indexes->second)
                    ++score.correct;
            }
            break;
        }
        case IndexOutcome::Status::not_reviewed:
            ++score.covered_count;
            ++score.not_reviewed_count;
            if (expected.not_reviewed)
                ++score.correct;
            break;
        case IndexOutcome::Status::unsuccessful:
            break;
        }
    }

    const auto ratio = [](std::size_t num, std::size_t den) {
        return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
    };
    score.coverage = ratio(score.covered_count, score.total);
    score.accuracy_on_covered = ratio(score.correct, score.covered_count);
    score.overall = ratio(score.correct, score.total);
    return score;
}

double bleu(std::string_view candidate, std::string_view reference) {
    const auto cand = tokenize(candidate);
    const auto ref = tokenize(reference);
    if (cand.empty())
        return 0.0;

    const std::size_t max_order = std::min<std::size_t>(4, cand.size());
    double log_sum = 0.0;
    for (std::size_t n = 1; n <= max_order; ++n) {
        const auto cand_counts = ngram_counts(cand, n);
        const auto ref_counts = ngram_counts(ref, n);
        long matched = 0;
        long total = 0;
        for (const auto& [gram, count] : cand_counts) {
            total += count;
            const auto it = ref_counts.find(gram);
            if (it != ref_counts.end())
                matched += std::min(count, it->second);
        }
        if (matched == 0)
            return 0.0;
        log_sum += std::log(static_cast<double>(matched) / static_cast<double>(total));
    }
    const double precision = std::exp(log_sum / static_cast<double>(max_order));

    double brevity = 1.0;
    if (cand.size() < ref.size())
        brevity = std::exp(1.0 - static_cast<double>(ref.size()) /
                                     static_cast<double>(cand.size()));
    return brevity * precision;
}

double normalized_edit_distance(std::string_view candidate, std::string_view reference) {
    const std::size_t longest = std::max(candidate.size(), reference.size());
    if (longest == 0)
        return 0.0;
    return static_cast<double>(levenshtein(candidate, reference)) /
           static_cast<double>(longest);
}

OcrMetricsRow ocr_eval(const std::vector<std::pair<std::string, std::string>>& pairs,
                       std::string engine_name) {
    if (pairs.empty())
        throw EvalError("ocr_eval needs at least one candidate/reference pair");
    OcrMetricsRow row;
    row.engine = std::move(engine_name);
    row.pages = pairs.size();
    double bleu_sum = 0.0, edit_sum = 0.0;
    for (const auto& [cand, ref] : pairs) {
        bleu_sum += bleu(cand, ref);
        edit_sum += normalized_edit_distance(cand, ref);
    }
    row.average_bleu = bleu_sum / static_cast<double>(pairs.size());
    row.average_edit_distance = edit_sum / static_cast<double>(pairs.size());
    return row;
}

ConfidenceReport confidence_correlation(const std::vector<DocOutcome>& outcomes,
                                        const PageStore& pages, int k_lowest) {
    ConfidenceReport report;
    report.k_lowest = k_lowest;

    double sum = 0.0;
    std::size_t with_confidence = 0;
    for (const DocOutcome& doc : outcomes) {
        ConfidenceReport::PerDoc entry;
        entry.zbmath_internal_id = doc.zbmath_internal_id;
        entry.correct = doc.correct;
        double page_sum = 0.0;
        std::size_t page_count = 0;
        for (const std::string& page_id : doc.page_ids) {
            const ScanPage* page = pages.find(page_id);
            if (page != nullptr && page->confidence) {
                page_sum += *page->confidence;
                ++page_count;
            }
        }
        if (page_count > 0) {
            entry.avg_confidence = page_sum / static_cast<double>(page_count);
            sum += *entry.avg_confidence;
            ++with_confidence;
        }
        report.docs.push_back(std::move(entry));
    }

    if (with_confidence == 0)
        return report; // no confidence data anywhere
    report.available = true;
    report.mean_confidence = sum / static_cast<double>(with_confidence);

    std::vector<const ConfidenceReport::PerDoc*> ranked;
    for (const auto& doc : report.docs) {
        if (!doc.avg_confidence)
            continue;
        ranked.push_back(&doc);
        const bool above = *doc.avg_confidence > report.mean_confidence;
        if (doc.correct)
            (above ? report.correct_above_mean : report.correct_at_or_below_mean) += 1;
        else
            (above ? report.errors_above_mean : report.errors_at_or_below_mean) += 1;
    }

    std::sort(ranked.begin(), ranked.end(),
              [](const ConfidenceReport::PerDoc* a, const ConfidenceReport::PerDoc* b) {
                  if (*a->avg_confidence != *b->avg_confidence)
                      return *a->avg_confidence < *b->avg_confidence;
                  return a->zbmath_internal_id < b->zbmath_internal_id;
              });
    const std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(std::max(0, k_lowest)),
                                                ranked.size());
    for (std::size_t i = 0; i < k; ++i)
        report.errors_in_k_lowest += ranked[i]->correct ? 0 : 1;

    return report;
}

} // namespace revsplit
