#include "revsplit/corpus.hpp"

#include "revsplit/errors.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

namespace revsplit {

namespace {

std::string_view volume_of(std::string_view scan_document_id) {
    const auto slash = scan_document_id.find('/');
    return slash == std::string_view::npos ? scan_document_id : scan_document_id.substr(0, slash);
}

std::string_view page_of(std::string_view scan_document_id) {
    const auto slash = scan_document_id.find('/');
    return slash == std::string_view::npos ? std::string_view{} : scan_document_id.substr(slash + 1);
}

std::optional<long> numeric_page(std::string_view page) {
    if (page.empty() || page.size() > 9)
        return std::nullopt;
    long value = 0;
    const auto [ptr, ec] = std::from_chars(page.data(), page.data() + page.size(), value);
    if (ec != std::errc{} || ptr != page.data() + page.size())
        return std::nullopt;
    return value;
}

// Page ordering inside one volume: numeric when both components are, else
// lexicographic. Numeric pages sort before non-numeric ones.
bool page_less(std::string_view a, std::string_view b) {
    const auto na = numeric_page(a);
    const auto nb = numeric_page(b);
    if (na && nb)
        return *na < *nb;
    if (na != nb)
        return na.has_value();
    return a < b;
}

std::string make_page_id(std::string_view volume, std::string_view page) {
    std::string id(volume);
    id.push_back('/');
    id.append(page);
    return id;
}

std::string pad_page(long value, std::size_t width) {
    std::string digits = std::to_string(value);
    if (digits.size() < width)
        digits.insert(0, width - digits.size(), '0');
    return digits;
}

std::vector<std::string> split_tsv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::size_t begin = 0;
    while (true) {
        const std::size_t tab = line.find('\t', begin);
        if (tab == std::string::npos) {
            fields.push_back(line.substr(begin));
            break;
        }
        fields.push_back(line.substr(begin, tab - begin));
        begin = tab + 1;
    }
    return fields;
}

std::string strip_cr(std::string s) {
    if (!s.empty() && s.back() == '\r')
        s.pop_back();
    return s;
}

// Enumerate the page ids between two boundary pages of one volume,
// inclusive. With numeric page components every intermediate page is
// generated (zero-padded like the boundaries), so gaps in the store are
// detectable; otherwise the store's own ordering fills the interior.
std::vector<std::string> enumerate_span(const PageStore& store, std::string_view volume,
                                        std::string_view from_page, std::string_view to_page) {
    std::vector<std::string> span;
    const auto a = numeric_page(from_page);
    const auto b = numeric_page(to_page);
    if (a && b && *a <= *b && from_page.size() == to_page.size()) {
        for (long p = *a; p <= *b; ++p)
            span.push_back(make_page_id(volume, pad_page(p, from_page.size())));
        return span;
    }
    span.push_back(make_page_id(volume, std::string(from_page)));
    if (from_page != to_page) {
        for (const std::string& page : store.volume_pages(volume)) {
            if (page_less(from_page, page) && page_less(page, to_page))
                span.push_back(make_page_id(volume, page));
        }
        span.push_back(make_page_id(volume, std::string(to_page)));
    }
    return span;
}

void capture_boundaries(CorpusTable& table) {
    table.boundary_next.assign(table.rows.size(), std::nullopt);
    for (std::size_t i = 0; i + 1 < table.rows.size(); ++i) {
        if (table.rows[i].volume() == table.rows[i + 1].volume())
            table.boundary_next[i] = table.rows[i + 1];
    }
}

} // namespace

std::string MetadataRow::volume() const {
    return std::string(volume_of(scan_document_id));
}

std::string MetadataRow::page() const {
    return std::string(page_of(scan_document_id));
}

void PageStore::insert(ScanPage page) {
    const std::string vol(volume_of(page.scan_document_id));
    const std::string pg(page_of(page.scan_document_id));
    volume_index_[vol].push_back(pg);
    pages_.emplace(page.scan_document_id, std::move(page));
}

void PageStore::mark_missing(MissingPage missing) {
    const std::string vol(volume_of(missing.scan_document_id));
    const std::string pg(page_of(missing.scan_document_id));
    if (!vol.empty() && !pg.empty())
        volume_index_[vol].push_back(pg);
    missing_.push_back(std::move(missing));
}

const ScanPage* PageStore::find(const std::string& scan_document_id) const {
    const auto it = pages_.find(scan_document_id);
    return it == pages_.end() ? nullptr : &it->second;
}

bool PageStore::usable(const std::string& scan_document_id) const {
    const ScanPage* page = find(scan_document_id);
    return page != nullptr && !page->ocr_failed;
}

std::vector<std::string> PageStore::volume_pages(std::string_view volume) const {
    const auto it = volume_index_.find(volume);
    if (it == volume_index_.end())
        return {};
    std::vector<std::string> pages = it->second;
    std::sort(pages.begin(), pages.end(), page_less);
    pages.erase(std::unique(pages.begin(), pages.end()), pages.end());
    return pages;
}

std::optional<std::string> PageStore::last_page_of_volume(std::string_view volume) const {
    const auto pages = volume_pages(volume);
    if (pages.empty())
        return std::nullopt;
    return pages.back();
}

MetadataLoad load_metadata(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw CorpusError("cannot open metadata file: " + path.string());

    std::string line;
    if (!std::getline(in, line))
        throw CorpusError("metadata file is empty (no header): " + path.string());

    const auto header = split_tsv_line(strip_cr(line));
    const auto column = [&header](std::string_view name) -> std::optional<std::size_t> {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i] == name)
                return i;
        return std::nullopt;
    };
    const auto col_scan = column("scan_document_id");
    const auto col_id = column("zbmath_internal_id");
    const auto col_title = column("title");
    const auto col_orig = column("original_title");
    const auto col_source = column("source");
    for (const auto& [col, name] :
         {std::pair{col_scan, "scan_document_id"}, {col_id, "zbmath_internal_id"},
          {col_title, "title"}, {col_orig, "original_title"}, {col_source, "source"}}) {
        if (!col)
            throw CorpusError(std::string("metadata header is missing column '") + name + "': " +
                              path.string());
    }

    MetadataLoad load;
    std::set<std::int64_t> seen_ids;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        line = strip_cr(line);
        if (line.empty())
            continue;
        const auto fields = split_tsv_line(line);
        const auto reject = [&](std::string message) {
            load.issues.push_back({line_no, std::move(message), true});
        };
        if (fields.size() < header.size()) {
            reject("expected " + std::to_string(header.size()) + " fields, got " +
                   std::to_string(fields.size()));
            continue;
        }

        MetadataRow row;
        row.scan_document_id = fields[*col_scan];
        row.title = fields[*col_title];
        row.source = fields[*col_source];
        if (!fields[*col_orig].empty())
            row.original_title = fields[*col_orig];

        if (row.scan_document_id.empty() ||
            row.scan_document_id.find('/') == std::string::npos ||
            page_of(row.scan_document_id).empty()) {
            reject("scan_document_id '" + row.scan_document_id +
                   "' is not of the form <volume>/<page>");
            continue;
        }
        if (row.title.empty()) {
            reject("title is empty");
            continue;
        }
        const std::string& id_text = fields[*col_id];
        const auto [ptr, ec] = std::from_chars(id_text.data(), id_text.data() + id_text.size(),
                                               row.zbmath_internal_id);
        if (ec != std::errc{} || ptr != id_text.data() + id_text.size()) {
            reject("zbmath_internal_id '" + id_text + "' is not an integer");
            continue;
        }
        if (!seen_ids.insert(row.zbmath_internal_id).second)
            throw CorpusError("duplicate zbmath_internal_id " +
                              std::to_string(row.zbmath_internal_id) + " at line " +
                              std::to_string(line_no));

        // Ordering is file-given; page order per volume is validated, not fixed.
        if (!load.table.rows.empty()) {
            const MetadataRow& prev = load.table.rows.back();
            if (prev.volume() == row.volume() && page_less(row.page(), prev.page()))
                load.issues.push_back(
                    {line_no,
                     "page order regression within volume " + row.volume() + ": " +
                         prev.scan_document_id + " -> " + row.scan_document_id,
                     false});
        }
        load.table.rows.push_back(std::move(row));
    }

    capture_boundaries(load.table);
    return load;
}

PageStore load_pages(const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir))
        throw CorpusError("pages directory does not exist: " + dir.string());

    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".json")
            files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());

    PageStore store;
    for (const auto& file : files) {
        // "<volume>_<page>.json" names the page even when the record is bad
        std::string fallback_id = file.stem().string();
        if (const auto underscore = fallback_id.find('_'); underscore != std::string::npos)
            fallback_id[underscore] = '/';

        std::ifstream in(file);
        if (!in) {
            store.mark_missing({fallback_id, file.string(), "unreadable file"});
            continue;
        }
        nlohmann::json record = nlohmann::json::parse(in, nullptr, false);
        if (record.is_discarded() || !record.is_object() ||
            !record.contains("scan_document_id") || !record["scan_document_id"].is_string() ||
            !record.contains("latex") || !record["latex"].is_string()) {
            store.mark_missing({fallback_id, file.string(), "not parseable as a page record"});
            continue;
        }
        ScanPage page;
        page.scan_document_id = record["scan_document_id"].get<std::string>();
        page.latex_content = record["latex"].get<std::string>();
        if (record.contains("confidence")) {
            if (!record["confidence"].is_number()) {
                store.mark_missing({fallback_id, file.string(), "confidence is not a number"});
                continue;
            }
            const double c = record["confidence"].get<double>();
            if (c < 0.0 || c > 1.0) {
                store.mark_missing({fallback_id, file.string(), "confidence outside [0,1]"});
                continue;
            }
            page.confidence = c;
        }
        page.ocr_failed = page.latex_content.empty();
        store.insert(std::move(page));
    }
    return store;
}

std::vector<std::string> task_page_span(const CorpusTable& table, const PageStore& store,
                                        std::size_t row_index) {
    const MetadataRow& row = table.rows.at(row_index);
    const auto& next = table.boundary_next.at(row_index);
    std::string to_page;
    if (next) {
        to_page = next->page();
    } else if (const auto last = store.last_page_of_volume(row.volume())) {
        // last of the volume: span runs to the volume's final known page
        to_page = page_less(row.page(), *last) ? *last : row.page();
    } else {
        to_page = row.page();
    }
    return enumerate_span(store, row.volume(), row.page(), to_page);
}

std::pair<CorpusTable, ExclusionReport> exclude_incomplete(const CorpusTable& table,
                                                           const PageStore& store) {
    CorpusTable retained;
    ExclusionReport report;
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        const MetadataRow& row = table.rows[i];
        std::optional<std::string> missing;
        for (const std::string& page_id : task_page_span(table, store, i)) {
            if (!store.usable(page_id)) {
                missing = page_id;
                break;
            }
        }
        if (missing) {
            report.excluded.push_back(
                {row.zbmath_internal_id, row.scan_document_id, "missing page " + *missing});
        } else {
            retained.rows.push_back(row);
            retained.boundary_next.push_back(table.boundary_next[i]);
        }
    }
    return {std::move(retained), std::move(report)};
}

SplitTask assemble_task(const CorpusTable& table, const PageStore& store, std::size_t row_index) {
    if (row_index >= table.rows.size())
        throw CorpusError("row index " + std::to_string(row_index) + " out of range");

    SplitTask task;
    task.row = table.rows[row_index];
    task.next_row = table.boundary_next.at(row_index);
    task.page_span = task_page_span(table, store, row_index);

    for (const std::string& page_id : task.page_span) {
        const ScanPage* page = store.find(page_id);
        if (page == nullptr || page->ocr_failed)
            throw CorpusError("page " + page_id + " is missing for row " +
                              std::to_string(task.row.zbmath_internal_id));
        if (!task.latex_content.empty())
            task.latex_content.push_back('\n');
        task.page_offsets.push_back(task.latex_content.size());
        task.latex_content.append(page->latex_content);
    }

    if (!task.next_row) {
        task.latex_content.append(kSentinelBlock);
        task.sentinel_appended = true;
    }
    return task;
}

} // namespace revsplit
