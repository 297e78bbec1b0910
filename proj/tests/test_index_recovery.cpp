#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "revsplit/index_recovery.hpp"
#include "revsplit/textnorm.hpp"

#include <random>
#include <string>

using namespace revsplit;

namespace {

ExtractionResult text_result(std::int64_t id, const std::string& text) {
    return ExtractionResult::make_text(id, text, SplitMethod::llm_vote);
}

std::string strip(const std::string& s) {
    return strip_spaces_with_map(s).stripped;
}

} // namespace

TEST_CASE("recover_indexes") {
    SUBCASE("space-corrected text maps back to the raw span") {
        const std::string content = "xx a b c yy";
        const IndexOutcome o = recover_indexes(content, text_result(1, "abc"));
        REQUIRE(o.status == IndexOutcome::Status::found);
        CHECK(o.start == 3);
        CHECK(o.end == 8);
        CHECK(content.substr(o.start, o.end - o.start) == "a b c");
    }
    SUBCASE("not reviewed passes through") {
        const IndexOutcome o = recover_indexes(
            "anything", ExtractionResult::make_not_reviewed(2, SplitMethod::llm_vote));
        CHECK(o.status == IndexOutcome::Status::not_reviewed);
    }
    SUBCASE("a hallucinated token makes recovery unsuccessful") {
        const IndexOutcome o =
            recover_indexes("the real page content", text_result(3, "real page zebra"));
        CHECK(o.status == IndexOutcome::Status::unsuccessful);
    }
    SUBCASE("failed extractions are unsuccessful") {
        const IndexOutcome o = recover_indexes(
            "content", ExtractionResult::make_failed(4, "row title not found",
                                                     SplitMethod::regex));
        CHECK(o.status == IndexOutcome::Status::unsuccessful);
    }
    SUBCASE("identity on space-free content") {
        const std::string content = "abc\ndef";
        const IndexOutcome o = recover_indexes(content, text_result(5, content));
        REQUIRE(o.status == IndexOutcome::Status::found);
        CHECK(o.start == 0);
        CHECK(o.end == content.size());
    }
    SUBCASE("first occurrence wins") {
        const std::string content = "ab ab ab";
        const IndexOutcome o = recover_indexes(content, text_result(6, "ab"));
        REQUIRE(o.status == IndexOutcome::Status::found);
        CHECK(o.start == 0);
        CHECK(o.end == 2);
    }
    SUBCASE("newline differences are not forgiven") {
        const IndexOutcome o =
            recover_indexes("line one line two", text_result(7, "line one\nline two"));
        CHECK(o.status == IndexOutcome::Status::unsuccessful);
    }
}

TEST_CASE("recovery round-trip property") {
    std::mt19937 rng(77);
    const std::string alphabet = "ab \tq\n";
    for (int trial = 0; trial < 300; ++trial) {
        std::string content;
        const std::size_t len = 5 + rng() % 60;
        for (std::size_t i = 0; i < len; ++i)
            content.push_back(alphabet[rng() % alphabet.size()]);

        // take a substring and perturb its spaces; recovery must invert it
        const std::size_t begin = rng() % content.size();
        const std::size_t span = 1 + rng() % (content.size() - begin);
        std::string extracted;
        for (const char c : content.substr(begin, span)) {
            if ((c == ' ' || c == '\t') && rng() % 2 == 0)
                continue; // the model removed an OCR space
            extracted.push_back(c);
            if (c != ' ' && c != '\t' && rng() % 7 == 0)
                extracted.push_back(' '); // or inserted one
        }
        const ExtractionResult result = text_result(trial, extracted);
        const IndexOutcome o = recover_indexes(content, result);
        if (strip(extracted).empty()) {
            CHECK(o.status == IndexOutcome::Status::unsuccessful);
            continue;
        }
        REQUIRE(o.status == IndexOutcome::Status::found);
        CHECK(strip(content.substr(o.start, o.end - o.start)) == strip(extracted));
    }
}

TEST_CASE("source pages cover exactly the found span") {
    SplitTask task;
    task.row.zbmath_internal_id = 9;
    task.latex_content = "first page text\nsecond page text";
    task.page_span = {"001/005", "001/006"};
    task.page_offsets = {0, 16};

    SUBCASE("span inside one page") {
        const IndexOutcome o = recover_indexes(task, text_result(9, "first page"));
        REQUIRE(o.status == IndexOutcome::Status::found);
        CHECK(o.source_pages == std::vector<std::string>{"001/005"});
    }
    SUBCASE("span across the page break") {
        const IndexOutcome o = recover_indexes(task, text_result(9, "text\nsecond"));
        REQUIRE(o.status == IndexOutcome::Status::found);
        CHECK(o.source_pages == std::vector<std::string>{"001/005", "001/006"});
    }
    SUBCASE("not reviewed has no source pages") {
        const IndexOutcome o = recover_indexes(
            task, ExtractionResult::make_not_reviewed(9, SplitMethod::llm_vote));
        CHECK(o.source_pages.empty());
    }
}
