#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "revsplit/errors.hpp"
#include "revsplit/evaluation.hpp"
#include "support/oracles.hpp"

#include <random>
#include <string>

using namespace revsplit;
using namespace revsplit::testsupport;

namespace {

GoldRecord gold_text(std::int64_t id, const std::string& text) {
    GoldRecord g;
    g.zbmath_internal_id = id;
    g.gold_text = text;
    return g;
}

GoldRecord gold_nr(std::int64_t id) {
    GoldRecord g;
    g.zbmath_internal_id = id;
    g.not_reviewed = true;
    return g;
}

IndexOutcome outcome(std::int64_t id, IndexOutcome::Status status, std::size_t start = 0,
                     std::size_t end = 0) {
    IndexOutcome o;
    o.zbmath_internal_id = id;
    o.status = status;
    o.start = start;
    o.end = end;
    return o;
}

std::string join_tokens(const std::vector<std::string>& tokens) {
    std::string s;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (i > 0)
            s.push_back(' ');
        s += tokens[i];
    }
    return s;
}

} // namespace

TEST_CASE("score_splitting") {
    SUBCASE("two exact matches and one failure give two thirds") {
        const std::vector<GoldRecord> gold = {gold_text(1, "alpha"), gold_text(2, "beta"),
                                              gold_text(3, "gamma")};
        const std::vector<ExtractionResult> results = {
            ExtractionResult::make_text(1, "alpha", SplitMethod::regex),
            ExtractionResult::make_text(2, "beta", SplitMethod::regex),
            ExtractionResult::make_failed(3, "row title not found", SplitMethod::regex)};
        const EvalReport report = score_splitting(results, gold);
        CHECK(report.total == 3);
        CHECK(report.attempted == 3);
        CHECK(report.correct == 2);
        CHECK(report.accuracy == doctest::Approx(2.0 / 3.0));
        CHECK(report.failed_results == 1);
    }
    SUBCASE("matching not-reviewed statuses are correct") {
        const EvalReport report = score_splitting(
            {ExtractionResult::make_not_reviewed(1, SplitMethod::llm_vote)}, {gold_nr(1)});
        CHECK(report.correct == 1);
    }
    SUBCASE("one character off is incorrect") {
        const EvalReport report = score_splitting(
            {ExtractionResult::make_text(1, "alphz", SplitMethod::regex)},
            {gold_text(1, "alpha")});
        CHECK(report.correct == 0);
    }
    SUBCASE("outer whitespace is forgiven") {
        const EvalReport report = score_splitting(
            {ExtractionResult::make_text(1, "  alpha\n", SplitMethod::regex)},
            {gold_text(1, "alpha")});
        CHECK(report.correct == 1);
    }
    SUBCASE("unattempted documents count toward total only") {
        const EvalReport report = score_splitting(
            {ExtractionResult::make_text(1, "alpha", SplitMethod::regex)},
            {gold_text(1, "alpha"), gold_text(2, "beta")});
        CHECK(report.total == 2);
        CHECK(report.attempted == 1);
        CHECK(report.accuracy == doctest::Approx(1.0));
    }
    SUBCASE("a result id missing from gold is an error") {
        CHECK_THROWS_AS(score_splitting(
                            {ExtractionResult::make_text(9, "x", SplitMethod::regex)},
                            {gold_text(1, "x")}),
                        EvalError);
    }
}

TEST_CASE("score_indexes") {
    SUBCASE("nine covered of ten, all of them right") {
        std::vector<GoldRecord> gold;
        std::vector<IndexOutcome> outcomes;
        for (int i = 0; i < 8; ++i) {
            GoldRecord g = gold_text(i, "t");
            g.gold_indexes = {10, 20};
            gold.push_back(g);
            outcomes.push_back(outcome(i, IndexOutcome::Status::found, 10, 20));
        }
        gold.push_back(gold_nr(8));
        outcomes.push_back(outcome(8, IndexOutcome::Status::not_reviewed));
        GoldRecord g9 = gold_text(9, "t");
        g9.gold_indexes = {1, 2};
        gold.push_back(g9);
        outcomes.push_back(outcome(9, IndexOutcome::Status::unsuccessful));

        const IndexScore score = score_indexes(outcomes, gold);
        CHECK(score.total == 10);
        CHECK(score.coverage == doctest::Approx(0.9));
        CHECK(score.accuracy_on_covered == doctest::Approx(1.0));
        CHECK(score.overall == doctest::Approx(0.9));
    }
    SUBCASE("all unsuccessful is all zero") {
        const IndexScore score = score_indexes(
            {outcome(1, IndexOutcome::Status::unsuccessful)}, {gold_text(1, "t")});
        CHECK(score.coverage == doctest::Approx(0.0));
        CHECK(score.overall == doctest::Approx(0.0));
    }
    SUBCASE("perfect run is all ones") {
        GoldRecord g = gold_text(1, "t");
        g.gold_indexes = {3, 9};
        const IndexScore score =
            score_indexes({outcome(1, IndexOutcome::Status::found, 3, 9)}, {g});
        CHECK(score.coverage == doctest::Approx(1.0));
        CHECK(score.accuracy_on_covered == doctest::Approx(1.0));
        CHECK(score.overall == doctest::Approx(1.0));
    }
    SUBCASE("wrong indexes are covered but incorrect") {
        GoldRecord g = gold_text(1, "t");
        g.gold_indexes = {3, 9};
        const IndexScore score =
            score_indexes({outcome(1, IndexOutcome::Status::found, 3, 8)}, {g});
        CHECK(score.coverage == doctest::Approx(1.0));
        CHECK(score.overall == doctest::Approx(0.0));
    }
    SUBCASE("overall never exceeds coverage or covered accuracy") {
        std::mt19937 rng(13);
        for (int trial = 0; trial < 100; ++trial) {
            std::vector<GoldRecord> gold;
            std::vector<IndexOutcome> outcomes;
            const int n = 1 + static_cast<int>(rng() % 20);
            for (int i = 0; i < n; ++i) {
                GoldRecord g = gold_text(i, "t");
                g.gold_indexes = {0, 5};
                gold.push_back(g);
                switch (rng() % 3) {
                case 0:
                    outcomes.push_back(outcome(i, IndexOutcome::Status::found, 0,
                                               rng() % 2 == 0 ? 5 : 6));
                    break;
                case 1:
                    outcomes.push_back(outcome(i, IndexOutcome::Status::not_reviewed));
                    break;
                default:
                    outcomes.push_back(outcome(i, IndexOutcome::Status::unsuccessful));
                }
            }
            const IndexScore score = score_indexes(outcomes, gold);
            CHECK(score.overall <= score.coverage + 1e-12);
            CHECK(score.overall <= score.accuracy_on_covered + 1e-12);
        }
    }
}

TEST_CASE("bleu") {
    SUBCASE("identity on four or more tokens") {
        CHECK(bleu("a b c d", "a b c d") == doctest::Approx(1.0));
        CHECK(bleu("w x y z q r", "w x y z q r") == doctest::Approx(1.0));
    }
    SUBCASE("empty candidate scores zero") {
        CHECK(bleu("", "a b") == doctest::Approx(0.0));
    }
    SUBCASE("one differing token out of four zeroes the 4-gram precision") {
        const double reference_value =
            bleu_oracle({"a", "b", "c", "d"}, {"a", "b", "c", "e"});
        CHECK(bleu("a b c d", "a b c e") == doctest::Approx(reference_value).epsilon(1e-12));
        CHECK(reference_value == doctest::Approx(0.0));
    }
    SUBCASE("short candidates use the largest supported order") {
        CHECK(bleu("a b c", "a b c") == doctest::Approx(1.0));
        CHECK(bleu("a", "a") == doctest::Approx(1.0));
    }
    SUBCASE("brevity penalty applies when the candidate is short") {
        const double value = bleu("a b", "a b c d");
        CHECK(value == doctest::Approx(std::exp(1.0 - 2.0) * 1.0));
    }
    SUBCASE("agrees with the counting oracle on random pairs") {
        std::mt19937 rng(29);
        const std::vector<std::string> vocab = {"a", "b", "c", "d", "e"};
        for (int trial = 0; trial < 300; ++trial) {
            std::vector<std::string> cand, ref;
            const std::size_t cn = rng() % 15;
            const std::size_t rn = rng() % 15;
            for (std::size_t i = 0; i < cn; ++i)
                cand.push_back(vocab[rng() % vocab.size()]);
            for (std::size_t i = 0; i < rn; ++i)
                ref.push_back(vocab[rng() % vocab.size()]);
            const double mine = bleu(join_tokens(cand), join_tokens(ref));
            const double oracle = bleu_oracle(cand, ref);
            CHECK(mine == doctest::Approx(oracle).epsilon(1e-9));
        }
    }
}

TEST_CASE("normalized_edit_distance") {
    CHECK(normalized_edit_distance("same text", "same text") == doctest::Approx(0.0));
    CHECK(normalized_edit_distance("ab", "") == doctest::Approx(1.0));
    CHECK(normalized_edit_distance("", "") == doctest::Approx(0.0));
    CHECK(normalized_edit_distance("abcd", "abed") == doctest::Approx(0.25));
    SUBCASE("symmetric") {
        std::mt19937 rng(31);
        for (int i = 0; i < 100; ++i) {
            std::string a, b;
            for (std::size_t k = 0; k < rng() % 12; ++k)
                a.push_back(static_cast<char>('a' + rng() % 3));
            for (std::size_t k = 0; k < rng() % 12; ++k)
                b.push_back(static_cast<char>('a' + rng() % 3));
            CHECK(normalized_edit_distance(a, b) ==
                  doctest::Approx(normalized_edit_distance(b, a)));
        }
    }
}

TEST_CASE("ocr_eval") {
    SUBCASE("perfect OCR gives 1.0 BLEU and 0.0 edit distance") {
        const OcrMetricsRow row =
            ocr_eval({{"page one text here", "page one text here"},
                      {"page two text here", "page two text here"}},
                     "perfect");
        CHECK(row.average_bleu == doctest::Approx(1.0));
        CHECK(row.average_edit_distance == doctest::Approx(0.0));
        CHECK(row.pages == 2);
    }
    SUBCASE("the row is the arithmetic mean of the page metrics") {
        const std::string c1 = "a b c d e", r1 = "a b c d e";
        const std::string c2 = "x y z w q", r2 = "x y z w different";
        const OcrMetricsRow row = ocr_eval({{c1, r1}, {c2, r2}}, "mixed");
        CHECK(row.average_bleu == doctest::Approx((bleu(c1, r1) + bleu(c2, r2)) / 2.0));
        CHECK(row.average_edit_distance ==
              doctest::Approx((normalized_edit_distance(c1, r1) +
                               normalized_edit_distance(c2, r2)) /
                              2.0));
        CHECK(row.average_bleu > 0.0);
        CHECK(row.average_bleu < 1.0);
    }
    SUBCASE("no pairs is an error") {
        CHECK_THROWS_AS(ocr_eval({}, "none"), EvalError);
    }
}

TEST_CASE("confidence_correlation") {
    // sixty documents, one page each, strictly increasing confidence
    PageStore store;
    std::vector<DocOutcome> outcomes;
    for (int i = 0; i < 60; ++i) {
        ScanPage page;
        page.scan_document_id = "001/" + std::to_string(100 + i);
        page.latex_content = "text";
        page.confidence = 0.4 + 0.005 * i;
        store.insert(page);
        DocOutcome doc;
        doc.zbmath_internal_id = i;
        doc.correct = true;
        doc.page_ids = {page.scan_document_id};
        outcomes.push_back(doc);
    }

    SUBCASE("planted error counts split at the mean") {
        // mean confidence = 0.4 + 0.005 * 29.5 = 0.5475; docs 30.. are above
        for (const int i : {7, 12, 13, 14, 15, 16, 17, 18, 19, 20}) // below the mean
            outcomes[static_cast<std::size_t>(i)].correct = false;
        for (const int i : {31, 32, 33, 34, 35, 36, 37, 38}) // above the mean
            outcomes[static_cast<std::size_t>(i)].correct = false;
        const ConfidenceReport report = confidence_correlation(outcomes, store, 10);
        REQUIRE(report.available);
        CHECK(report.errors_above_mean == 8);
        CHECK(report.errors_at_or_below_mean == 10);
        CHECK(report.errors_in_k_lowest == 1); // only doc 7 sits in the lowest ten
    }
    SUBCASE("no errors anywhere") {
        const ConfidenceReport report = confidence_correlation(outcomes, store, 10);
        CHECK(report.errors_above_mean == 0);
        CHECK(report.errors_at_or_below_mean == 0);
        CHECK(report.errors_in_k_lowest == 0);
    }
    SUBCASE("constant confidence is degenerate but well-formed") {
        PageStore flat;
        std::vector<DocOutcome> docs;
        for (int i = 0; i < 5; ++i) {
            ScanPage page;
            page.scan_document_id = "002/" + std::to_string(i);
            page.latex_content = "x";
            page.confidence = 0.7;
            flat.insert(page);
            docs.push_back({i, i % 2 == 0, {page.scan_document_id}});
        }
        const ConfidenceReport report = confidence_correlation(docs, flat, 3);
        REQUIRE(report.available);
        CHECK(report.mean_confidence == doctest::Approx(0.7));
        CHECK(report.errors_above_mean == 0); // nothing is strictly above
        CHECK(report.errors_at_or_below_mean == 2);
    }
    SUBCASE("no confidence data marks the report unavailable") {
        PageStore bare;
        ScanPage page;
        page.scan_document_id = "003/001";
        page.latex_content = "x";
        bare.insert(page);
        const ConfidenceReport report =
            confidence_correlation({{1, true, {"003/001"}}}, bare, 10);
        CHECK_FALSE(report.available);
    }
}
