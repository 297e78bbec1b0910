#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "revsplit/corpus.hpp"
#include "revsplit/errors.hpp"
#include "support/temp_dir.hpp"

#include <nlohmann/json.hpp>

#include <fstream>
#include <set>
#include <string>

using namespace revsplit;
using revsplit::testsupport::TempDir;

namespace {

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    out << content;
}

const std::string kHeader = "scan_document_id\tzbmath_internal_id\ttitle\toriginal_title\tsource\n";

std::string three_row_tsv() {
    return kHeader +
           "001/005\t3000000\tFoundations of applied analysis. Vol. 1.\tGrundlagen der "
           "angewandten Analysis. Bd. 1.\tBerlin: Springer. XIV, 469 S. (1931).\n"
           "001/005\t3000001\tOn the structure of arithmetic\tZum Aufbau der Arithmetik\tJahresber. "
           "Ver. 40, 22-37 (1931).\n"
           "001/006\t3000002\tNotes on a determinant bound\t\tJahresber. Ver. 40, 49-53 (1931).\n";
}

void write_page(const std::filesystem::path& dir, const std::string& volume,
                const std::string& page, const std::string& latex,
                std::optional<double> confidence = std::nullopt) {
    nlohmann::ordered_json j;
    j["scan_document_id"] = volume + "/" + page;
    j["latex"] = latex;
    if (confidence)
        j["confidence"] = *confidence;
    write_file(dir / (volume + "_" + page + ".json"), j.dump());
}

} // namespace

TEST_CASE("load_metadata parses the delimited table") {
    TempDir tmp;
    const auto path = tmp / "metadata.tsv";
    write_file(path, three_row_tsv());

    const MetadataLoad load = load_metadata(path);
    REQUIRE(load.table.size() == 3);
    CHECK(load.issues.empty());
    CHECK(load.table.rows[0].zbmath_internal_id == 3000000);
    CHECK(load.table.rows[0].scan_document_id == "001/005");
    CHECK(load.table.rows[0].volume() == "001");
    CHECK(load.table.rows[0].page() == "005");
    REQUIRE(load.table.rows[1].original_title.has_value());
    CHECK(*load.table.rows[1].original_title == "Zum Aufbau der Arithmetik");
    CHECK_FALSE(load.table.rows[2].original_title.has_value()); // empty cell means absent

    // successive rows of one volume are boundary pairs
    REQUIRE(load.table.boundary_next[0].has_value());
    CHECK(load.table.boundary_next[0]->zbmath_internal_id == 3000001);
    REQUIRE(load.table.boundary_next[1].has_value());
    CHECK_FALSE(load.table.boundary_next[2].has_value()); // last of its volume
}

TEST_CASE("load_metadata edge cases") {
    TempDir tmp;
    SUBCASE("header-only file yields an empty table") {
        write_file(tmp / "m.tsv", kHeader);
        const MetadataLoad load = load_metadata(tmp / "m.tsv");
        CHECK(load.table.empty());
        CHECK(load.issues.empty());
    }
    SUBCASE("missing file throws") {
        CHECK_THROWS_AS(load_metadata(tmp / "absent.tsv"), CorpusError);
    }
    SUBCASE("missing required column throws") {
        write_file(tmp / "m.tsv", "scan_document_id\tzbmath_internal_id\ttitle\toriginal_title\n");
        CHECK_THROWS_AS(load_metadata(tmp / "m.tsv"), CorpusError);
    }
    SUBCASE("empty title is rejected with its line number") {
        write_file(tmp / "m.tsv", kHeader + "001/005\t1\t\t\tsrc\n001/005\t2\tGood title\t\tsrc\n");
        const MetadataLoad load = load_metadata(tmp / "m.tsv");
        CHECK(load.table.size() == 1);
        REQUIRE(load.issues.size() == 1);
        CHECK(load.issues[0].line == 2);
        CHECK(load.issues[0].rejected);
    }
    SUBCASE("duplicate zbmath_internal_id throws") {
        write_file(tmp / "m.tsv", kHeader + "001/005\t7\tA title\t\tsrc\n001/006\t7\tB title\t\tsrc\n");
        CHECK_THROWS_AS(load_metadata(tmp / "m.tsv"), CorpusError);
    }
    SUBCASE("malformed scan id is rejected") {
        write_file(tmp / "m.tsv", kHeader + "no-slash\t1\tA title\t\tsrc\n");
        const MetadataLoad load = load_metadata(tmp / "m.tsv");
        CHECK(load.table.empty());
        REQUIRE(load.issues.size() == 1);
        CHECK(load.issues[0].rejected);
    }
    SUBCASE("bad integer id is rejected") {
        write_file(tmp / "m.tsv", kHeader + "001/005\tnotanumber\tA title\t\tsrc\n");
        const MetadataLoad load = load_metadata(tmp / "m.tsv");
        CHECK(load.table.empty());
        CHECK(load.issues.size() == 1);
    }
    SUBCASE("page order regression is reported but kept") {
        write_file(tmp / "m.tsv",
                   kHeader + "001/006\t1\tA title\t\tsrc\n001/005\t2\tB title\t\tsrc\n");
        const MetadataLoad load = load_metadata(tmp / "m.tsv");
        CHECK(load.table.size() == 2);
        REQUIRE(load.issues.size() == 1);
        CHECK_FALSE(load.issues[0].rejected);
    }
}

TEST_CASE("load_pages") {
    TempDir tmp;
    SUBCASE("two valid page files") {
        write_page(tmp.path, "001", "005", "page five text");
        write_page(tmp.path, "001", "006", "page six text");
        const PageStore store = load_pages(tmp.path);
        CHECK(store.size() == 2);
        CHECK(store.usable("001/005"));
        REQUIRE(store.find("001/006") != nullptr);
        CHECK(store.find("001/006")->latex_content == "page six text");
    }
    SUBCASE("confidence passes through") {
        write_page(tmp.path, "001", "005", "text", 0.95);
        const PageStore store = load_pages(tmp.path);
        REQUIRE(store.find("001/005") != nullptr);
        REQUIRE(store.find("001/005")->confidence.has_value());
        CHECK(*store.find("001/005")->confidence == doctest::Approx(0.95));
    }
    SUBCASE("corrupt file loads as a known-missing page") {
        write_page(tmp.path, "001", "005", "good");
        write_file(tmp / "001_006.json", "{not json at all");
        const PageStore store = load_pages(tmp.path);
        CHECK(store.size() == 1);
        REQUIRE(store.missing().size() == 1);
        CHECK(store.missing()[0].scan_document_id == "001/006");
        CHECK_FALSE(store.usable("001/006"));
    }
    SUBCASE("empty latex marks the page as failed OCR") {
        write_page(tmp.path, "001", "005", "");
        const PageStore store = load_pages(tmp.path);
        REQUIRE(store.find("001/005") != nullptr);
        CHECK(store.find("001/005")->ocr_failed);
        CHECK_FALSE(store.usable("001/005"));
    }
    SUBCASE("missing directory throws") {
        CHECK_THROWS_AS(load_pages(tmp / "nope"), CorpusError);
    }
}

TEST_CASE("exclude_incomplete") {
    TempDir tmp;
    const auto meta = tmp / "m.tsv";

    SUBCASE("a missing page excludes the row that spans it") {
        write_file(meta, kHeader + "001/001\t1\tFirst title\t\tsrc\n001/002\t2\tSecond title\t\tsrc\n");
        write_page(tmp.path, "001", "001", "text one");
        write_file(tmp / "001_002.json", "broken");
        const MetadataLoad load = load_metadata(meta);
        const PageStore store = load_pages(tmp.path);
        const auto [retained, report] = exclude_incomplete(load.table, store);
        CHECK(retained.empty());
        REQUIRE(report.excluded.size() == 2);
        CHECK(report.excluded[0].zbmath_internal_id == 1);
        CHECK(report.excluded[0].reason == "missing page 001/002");
    }
    SUBCASE("all pages present keeps the table unchanged") {
        write_file(meta, kHeader + "001/001\t1\tFirst title\t\tsrc\n001/002\t2\tSecond title\t\tsrc\n");
        write_page(tmp.path, "001", "001", "text one");
        write_page(tmp.path, "001", "002", "text two");
        const MetadataLoad load = load_metadata(meta);
        const PageStore store = load_pages(tmp.path);
        const auto [retained, report] = exclude_incomplete(load.table, store);
        CHECK(retained.size() == 2);
        CHECK(report.empty());
    }
    SUBCASE("five rows, one broken page, four retained") {
        // rows 1-2 on page 005, rows 3-5 on page 006; page 007 exists but is
        // unreadable, so only the last row (whose span runs to the volume's
        // final page) is excluded
        write_file(meta, kHeader + "001/005\t1\tTitle one\t\tsrc\n001/005\t2\tTitle two\t\tsrc\n"
                                   "001/006\t3\tTitle three\t\tsrc\n001/006\t4\tTitle four\t\tsrc\n"
                                   "001/006\t5\tTitle five\t\tsrc\n");
        write_page(tmp.path, "001", "005", "page five");
        write_page(tmp.path, "001", "006", "page six");
        write_file(tmp / "001_007.json", "unreadable");
        const MetadataLoad load = load_metadata(meta);
        const PageStore store = load_pages(tmp.path);
        const auto [retained, report] = exclude_incomplete(load.table, store);
        CHECK(retained.size() == 4);
        REQUIRE(report.excluded.size() == 1);
        CHECK(report.excluded[0].zbmath_internal_id == 5);
        CHECK(report.excluded[0].reason == "missing page 001/007");
    }
    SUBCASE("gaps in numeric page ranges are detected") {
        write_file(meta, kHeader + "001/001\t1\tFirst title\t\tsrc\n001/003\t2\tSecond title\t\tsrc\n");
        write_page(tmp.path, "001", "001", "one");
        write_page(tmp.path, "001", "003", "three");
        // 001/002 has no file at all; the numeric span still requires it
        const MetadataLoad load = load_metadata(meta);
        const PageStore store = load_pages(tmp.path);
        const auto [retained, report] = exclude_incomplete(load.table, store);
        CHECK(retained.size() == 1); // row 2 spans only its own page
        REQUIRE(report.excluded.size() == 1);
        CHECK(report.excluded[0].reason == "missing page 001/002");
    }
}

TEST_CASE("assemble_task") {
    TempDir tmp;
    const auto meta = tmp / "m.tsv";
    write_file(meta, kHeader + "001/005\t1\tTitle one\t\tsrc one\n"
                               "001/005\t2\tTitle two\t\tsrc two\n"
                               "001/006\t3\tTitle three\t\tsrc three\n");
    write_page(tmp.path, "001", "005", "five line A\nfive line B");
    write_page(tmp.path, "001", "006", "six line A");
    const MetadataLoad load = load_metadata(meta);
    const PageStore store = load_pages(tmp.path);

    SUBCASE("row and successor on the same page") {
        const SplitTask task = assemble_task(load.table, store, 0);
        CHECK(task.page_span == std::vector<std::string>{"001/005"});
        CHECK(task.latex_content == "five line A\nfive line B");
        CHECK_FALSE(task.sentinel_appended);
        REQUIRE(task.next_row.has_value());
        CHECK(task.next_row->zbmath_internal_id == 2);
    }
    SUBCASE("span covers both boundary pages joined by one newline") {
        const SplitTask task = assemble_task(load.table, store, 1);
        CHECK(task.page_span == std::vector<std::string>{"001/005", "001/006"});
        CHECK(task.latex_content == "five line A\nfive line B\nsix line A");
        CHECK(task.page_offsets == std::vector<std::size_t>{0, 24});
    }
    SUBCASE("last row of the volume gets the sentinel") {
        const SplitTask task = assemble_task(load.table, store, 2);
        CHECK(task.sentinel_appended);
        CHECK_FALSE(task.next_row.has_value());
        const std::string& content = task.latex_content;
        REQUIRE(content.size() > kSentinelBlock.size());
        CHECK(content.substr(content.size() - kSentinelBlock.size()) == kSentinelBlock);
    }
    SUBCASE("byte-identical on repeated assembly") {
        const SplitTask a = assemble_task(load.table, store, 1);
        const SplitTask b = assemble_task(load.table, store, 1);
        CHECK(a.latex_content == b.latex_content);
        CHECK(a.page_span == b.page_span);
    }
    SUBCASE("every retained row's span resolves in the store") {
        const auto [retained, report] = exclude_incomplete(load.table, store);
        REQUIRE(retained.size() == 3);
        std::size_t spanned_pages = 0;
        std::set<std::string> own_pages;
        for (std::size_t i = 0; i < retained.size(); ++i) {
            const SplitTask task = assemble_task(retained, store, i);
            for (const std::string& page : task.page_span)
                CHECK(store.usable(page));
            spanned_pages += std::set<std::string>(task.page_span.begin(),
                                                   task.page_span.end())
                                 .size();
            own_pages.insert(retained.rows[i].scan_document_id);
        }
        // spans overlap at boundaries but never undercount the rows' pages
        CHECK(spanned_pages >= own_pages.size());
    }
    SUBCASE("missing page throws") {
        TempDir tmp2;
        write_file(tmp2 / "m.tsv", kHeader + "001/001\t1\tOnly title\t\tsrc\n");
        const MetadataLoad load2 = load_metadata(tmp2 / "m.tsv");
        const PageStore empty_store = load_pages(tmp2.path);
        CHECK_THROWS_AS(assemble_task(load2.table, empty_store, 0), CorpusError);
    }
}
