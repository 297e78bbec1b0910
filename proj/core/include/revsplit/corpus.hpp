#ifndef REVSPLIT_CORPUS_HPP
#define REVSPLIT_CORPUS_HPP

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace revsplit {

/// One catalogue entry. scan_document_id has the form "<volume>/<page>" and
/// names the page where the document's title is printed.
struct MetadataRow {
    std::string scan_document_id;
    std::int64_t zbmath_internal_id = 0;
    std::string title;
    std::optional<std::string> original_title;
    std::string source;

    std::string volume() const;
    std::string page() const;
};

/// One OCR-converted page. A page whose conversion produced no LaTeX is
/// marked ocr_failed and treated like a missing page downstream.
struct ScanPage {
    std::string scan_document_id;
    std::string latex_content;
    std::optional<double> confidence;
    bool ocr_failed = false;
};

/// Ordered metadata rows. For each row the table also carries the boundary
/// row whose title closes the document: the next catalogue entry of the same
/// volume, captured when the table is built. Filtering rows out never
/// changes the boundary pairing of the survivors.
struct CorpusTable {
    std::vector<MetadataRow> rows;
    std::vector<std::optional<MetadataRow>> boundary_next;

    std::size_t size() const { return rows.size(); }
    bool empty() const { return rows.empty(); }
};

struct RowIssue {
    std::size_t line = 0; // 1-based line in the metadata file
    std::string message;
    bool rejected = false;
};

struct MetadataLoad {
    CorpusTable table;
    std::vector<RowIssue> issues;
};

struct MissingPage {
    std::string scan_document_id;
    std::string file;
    std::string reason;
};

/// Page contents keyed by scan_document_id, plus the pages known to exist
/// but unusable (unreadable file, failed conversion). Immutable after load.
class PageStore {
public:
    void insert(ScanPage page);
    void mark_missing(MissingPage missing);

    const ScanPage* find(const std::string& scan_document_id) const;
    bool usable(const std::string& scan_document_id) const;

    /// Page components of one volume in page order, including known-missing
    /// pages. Empty when the volume is unknown.
    std::vector<std::string> volume_pages(std::string_view volume) const;
    std::optional<std::string> last_page_of_volume(std::string_view volume) const;

    std::size_t size() const { return pages_.size(); }
    const std::map<std::string, ScanPage>& pages() const { return pages_; }
    const std::vector<MissingPage>& missing() const { return missing_; }

private:
    std::map<std::string, ScanPage> pages_;
    std::vector<MissingPage> missing_;
    // volume -> page components (both usable and known-missing)
    std::map<std::string, std::vector<std::string>, std::less<>> volume_index_;
};

struct Exclusion {
    std::int64_t zbmath_internal_id = 0;
    std::string scan_document_id;
    std::string reason;
};

struct ExclusionReport {
    std::vector<Exclusion> excluded;
    bool empty() const { return excluded.empty(); }
};

/// One unit of splitting work: a row, its boundary row, and the LaTeX of the
/// spanned pages joined with single newlines. For the last document of a
/// volume a sentinel title block is appended instead of a boundary row.
struct SplitTask {
    MetadataRow row;
    std::optional<MetadataRow> next_row;
    std::string latex_content;
    std::vector<std::string> page_span;     // scan_document_ids, in order
    std::vector<std::size_t> page_offsets;  // byte offset of each page in latex_content
    bool sentinel_appended = false;
};

/// Synthetic closing title appended after the last page of a volume.
inline constexpr std::string_view kSentinelTitle = "@@END_OF_VOLUME_SENTINEL@@";
inline constexpr std::string_view kSentinelBlock = "\n@@END_OF_VOLUME_SENTINEL@@\n";

/// Parse the tab-separated metadata table. Structural defects (missing
/// file, missing column, duplicate zbmath_internal_id) throw CorpusError;
/// malformed rows are rejected and reported with their line numbers.
MetadataLoad load_metadata(const std::filesystem::path& path);

/// Load every "<volume>_<page>.json" page record under dir. Unreadable or
/// malformed files become known-missing pages rather than errors.
PageStore load_pages(const std::filesystem::path& dir);

/// Drop every row that cannot be assembled because a page of its span is
/// missing or unusable. Retained rows keep their original boundary pairing.
std::pair<CorpusTable, ExclusionReport> exclude_incomplete(const CorpusTable& table,
                                                           const PageStore& store);

/// Page ids a row's task must cover: from the row's own page through its
/// boundary row's page (or the volume's last known page) inclusive.
std::vector<std::string> task_page_span(const CorpusTable& table, const PageStore& store,
                                        std::size_t row_index);

/// Build the split task for one retained row. Throws CorpusError when a
/// spanned page is missing (excluded row, or the store changed under us).
SplitTask assemble_task(const CorpusTable& table, const PageStore& store, std::size_t row_index);

} // namespace revsplit

#endif
