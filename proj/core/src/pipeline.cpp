#include "revsplit/pipeline.hpp"

#include "revsplit/errors.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <atomic>
#include <condition_variable>
#include <fstream>
#include <future>
#include <iomanip>
#include <iostream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

namespace revsplit {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string status_name(ExtractionResult::Status status) {
    switch (status) {
    case ExtractionResult::Status::text: return "text";
    case ExtractionResult::Status::not_reviewed: return "not_reviewed";
    case ExtractionResult::Status::failed: return "failed";
    }
    return "failed";
}

// Run produce(0..count) on a small pool and hand results to consume in
// index order. consume runs on the calling thread.
void ordered_parallel_for(std::size_t count, int workers,
                          const std::function<std::string(std::size_t)>& produce,
                          const std::function<void(std::size_t, std::string)>& consume) {
    if (count == 0)
        return;
    workers = std::clamp<int>(workers, 1, static_cast<int>(count));
    if (workers == 1) {
        for (std::size_t i = 0; i < count; ++i)
            consume(i, produce(i));
        return;
    }

    std::atomic<std::size_t> next{0};
    std::map<std::size_t, std::string> done;
    std::mutex mutex;
    std::condition_variable ready;
    std::atomic<bool> abort{false};
    std::exception_ptr error;

    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&]() {
            while (!abort.load()) {
                const std::size_t i = next.fetch_add(1);
                if (i >= count)
                    return;
                std::string line;
                try {
                    line = produce(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(mutex);
                    if (!error)
                        error = std::current_exception();
                    abort.store(true);
                    ready.notify_all();
                    return;
                }
                std::lock_guard<std::mutex> lock(mutex);
                done.emplace(i, std::move(line));
                ready.notify_all();
            }
        });
    }

    std::size_t expected = 0;
    {
        std::unique_lock<std::mutex> lock(mutex);
        while (expected < count) {
            ready.wait(lock, [&]() {
                return abort.load() || (!done.empty() && done.begin()->first == expected);
            });
            if (abort.load() && (done.empty() || done.begin()->first != expected))
                break;
            auto it = done.begin();
            std::string line = std::move(it->second);
            done.erase(it);
            lock.unlock();
            consume(expected, std::move(line));
            ++expected;
            lock.lock();
        }
    }

    for (std::thread& t : pool)
        t.join();
    if (error)
        std::rethrow_exception(error);
}

// Per-backend cap on in-flight requests.
class Gate {
public:
    explicit Gate(int limit) : limit_(std::max(1, limit)) {}

    void acquire() {
        std::unique_lock<std::mutex> lock(mutex_);
        cv_.wait(lock, [this]() { return active_ < limit_; });
        ++active_;
    }

    void release() {
        {
            std::lock_guard<std::mutex> lock(mutex_);
            --active_;
        }
        cv_.notify_one();
    }

private:
    int limit_;
    int active_ = 0;
    std::mutex mutex_;
    std::condition_variable cv_;
};

class GateGuard {
public:
    explicit GateGuard(Gate& gate) : gate_(gate) { gate_.acquire(); }
    ~GateGuard() { gate_.release(); }
    GateGuard(const GateGuard&) = delete;
    GateGuard& operator=(const GateGuard&) = delete;

private:
    Gate& gate_;
};

std::vector<std::string> read_lines(const std::filesystem::path& path, bool& ends_with_newline) {
    std::ifstream in(path, std::ios::binary);
    std::vector<std::string> lines;
    ends_with_newline = true;
    if (!in)
        return lines;
    std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (content.empty())
        return lines;
    ends_with_newline = content.back() == '\n';
    std::size_t begin = 0;
    while (begin < content.size()) {
        std::size_t nl = content.find('\n', begin);
        if (nl == std::string::npos)
            nl = content.size();
        lines.push_back(content.substr(begin, nl - begin));
        begin = nl + 1;
    }
    return lines;
}

void print_eval_report(const EvalReport& report, std::ostream& out) {
    out << "Splitting accuracy";
    if (!report.method.empty())
        out << " (method: " << report.method << ")";
    out << "\n";
    out << "  total      " << report.total << "\n";
    out << "  attempted  " << report.attempted << "\n";
    out << "  correct    " << report.correct << "\n";
    out << "  accuracy   " << std::fixed << std::setprecision(4) << report.accuracy << "\n";
    out << "  results    text=" << report.text_results
        << " not_reviewed=" << report.not_reviewed_results
        << " failed=" << report.failed_results << "\n";
    out << "\n";
    const std::string approach = report.method.empty() ? "unknown" : report.method;
    const std::size_t width = std::max<std::size_t>(10, approach.size() + 2);
    out << std::left << std::setw(static_cast<int>(width)) << "Approach" << "Accuracy\n";
    out << std::left << std::setw(static_cast<int>(width)) << approach
        << std::setprecision(1) << report.accuracy * 100.0 << "%\n";
    out.unsetf(std::ios::floatfield);
}

void print_index_score(const IndexScore& score, std::ostream& out) {
    out << "Index recovery\n";
    out << "  total                " << score.total << "\n";
    out << "  covered              " << score.covered_count << " (found=" << score.found_count
        << " not_reviewed=" << score.not_reviewed_count << ")\n";
    out << "  correct              " << score.correct << "\n";
    out << std::fixed << std::setprecision(4);
    out << "  coverage             " << score.coverage << "\n";
    out << "  accuracy_on_covered  " << score.accuracy_on_covered << "\n";
    out << "  overall              " << score.overall << "\n";
    out.unsetf(std::ios::floatfield);
}

ordered_json eval_report_json(const EvalReport& report) {
    ordered_json j;
    j["total"] = report.total;
    j["attempted"] = report.attempted;
    j["correct"] = report.correct;
    j["accuracy"] = report.accuracy;
    j["method"] = report.method;
    j["results"] = {{"text", report.text_results},
                    {"not_reviewed", report.not_reviewed_results},
                    {"failed", report.failed_results}};
    j["correct_by_status"] = {{"text", report.correct_text},
                              {"not_reviewed", report.correct_not_reviewed}};
    return j;
}

ordered_json index_score_json(const IndexScore& score) {
    ordered_json j;
    j["total"] = score.total;
    j["covered"] = score.covered_count;
    j["found"] = score.found_count;
    j["not_reviewed"] = score.not_reviewed_count;
    j["correct"] = score.correct;
    j["coverage"] = score.coverage;
    j["accuracy_on_covered"] = score.accuracy_on_covered;
    j["overall"] = score.overall;
    return j;
}

} // namespace

std::string_view to_string(RunMethod method) {
    switch (method) {
    case RunMethod::regex: return "regex";
    case RunMethod::llm: return "llm";
    case RunMethod::vote: return "vote";
    }
    return "regex";
}

std::optional<RunMethod> run_method_from_string(std::string_view s) {
    if (s == "regex")
        return RunMethod::regex;
    if (s == "llm")
        return RunMethod::llm;
    if (s == "vote")
        return RunMethod::vote;
    return std::nullopt;
}

void validate(const RunConfig& config) {
    if (config.pages_dir.empty() || config.metadata_path.empty() || config.output_path.empty())
        throw ConfigError("pages dir, metadata path, and output path are all required");
    if (config.worker_count < 1)
        throw ConfigError("worker count must be >= 1");
    if (config.fuzzy_threshold < 0.0 || config.fuzzy_threshold >= 1.0)
        throw ConfigError("fuzzy threshold must lie in [0, 1)");
    if (config.method != RunMethod::regex) {
        if (!config.backends_path)
            throw ConfigError("llm and vote methods need --backends");
        const auto backends = load_backends(*config.backends_path);
        if (config.method == RunMethod::vote && backends.size() != 3)
            throw ConfigError("vote method needs exactly 3 backends, found " +
                              std::to_string(backends.size()));
    }
}

std::string extraction_to_jsonl(const ExtractionResult& result,
                                const std::optional<VoteNote>& vote) {
    ordered_json j;
    j["zbmath_internal_id"] = result.zbmath_internal_id;
    j["status"] = status_name(result.status);
    if (result.status == ExtractionResult::Status::text)
        j["text"] = result.text;
    if (result.status == ExtractionResult::Status::failed)
        j["reason"] = result.reason;
    j["method"] = std::string(to_string(result.method));
    if (result.boundary_modes) {
        j["boundary_modes"] = {std::string(to_string(result.boundary_modes->first)),
                               std::string(to_string(result.boundary_modes->second))};
    }
    if (vote) {
        ordered_json v;
        v["agreement"] = vote->agreement;
        v["decided_by"] = vote->decided_by;
        if (!vote->backend_errors.empty()) {
            ordered_json errors = ordered_json::object();
            for (const auto& [name, message] : vote->backend_errors)
                errors[name] = message;
            v["backend_errors"] = std::move(errors);
        }
        j["vote"] = std::move(v);
    }
    return j.dump();
}

ExtractionResult extraction_from_jsonl(const std::string& line) {
    const ordered_json j = ordered_json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object() || !j.contains("zbmath_internal_id") ||
        !j.contains("status"))
        throw EvalError("malformed result record: " + line.substr(0, 120));

    ExtractionResult result;
    result.zbmath_internal_id = j["zbmath_internal_id"].get<std::int64_t>();
    const std::string status = j["status"].get<std::string>();
    if (j.contains("method")) {
        if (const auto method = split_method_from_string(j["method"].get<std::string>()))
            result.method = *method;
    }
    if (status == "text") {
        if (!j.contains("text") || !j["text"].is_string())
            throw EvalError("text record without text field: " + line.substr(0, 120));
        result = ExtractionResult::make_text(result.zbmath_internal_id,
                                             j["text"].get<std::string>(), result.method);
    } else if (status == "not_reviewed") {
        result = ExtractionResult::make_not_reviewed(result.zbmath_internal_id, result.method);
    } else if (status == "failed") {
        result = ExtractionResult::make_failed(
            result.zbmath_internal_id,
            j.contains("reason") ? j["reason"].get<std::string>() : "", result.method);
    } else {
        throw EvalError("unknown result status '" + status + "'");
    }
    if (j.contains("boundary_modes") && j["boundary_modes"].is_array() &&
        j["boundary_modes"].size() == 2) {
        const auto first = match_mode_from_string(j["boundary_modes"][0].get<std::string>());
        const auto second = match_mode_from_string(j["boundary_modes"][1].get<std::string>());
        if (first && second)
            result.boundary_modes = {*first, *second};
    }
    return result;
}

std::vector<ExtractionResult> load_results(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw EvalError("cannot open results file: " + path.string());
    std::vector<ExtractionResult> results;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        results.push_back(extraction_from_jsonl(line));
    }
    return results;
}

std::string index_outcome_to_jsonl(const IndexOutcome& outcome,
                                   const std::vector<PageOffset>& offsets) {
    ordered_json j;
    j["zbmath_internal_id"] = outcome.zbmath_internal_id;
    j["status"] = std::string(to_string(outcome.status));
    if (outcome.status == IndexOutcome::Status::found) {
        j["start"] = outcome.start;
        j["end"] = outcome.end;
    }
    j["source_pages"] = outcome.source_pages;
    if (!offsets.empty()) {
        ordered_json table = ordered_json::array();
        for (const PageOffset& po : offsets)
            table.push_back({{"page", po.page}, {"offset", po.offset}});
        j["page_offsets"] = std::move(table);
    }
    return j.dump();
}

IndexOutcome index_outcome_from_jsonl(const std::string& line) {
    const ordered_json j = ordered_json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object() || !j.contains("zbmath_internal_id") ||
        !j.contains("status"))
        throw EvalError("malformed index record: " + line.substr(0, 120));

    IndexOutcome outcome;
    outcome.zbmath_internal_id = j["zbmath_internal_id"].get<std::int64_t>();
    const std::string status = j["status"].get<std::string>();
    if (status == "found") {
        outcome.status = IndexOutcome::Status::found;
        outcome.start = j.at("start").get<std::size_t>();
        outcome.end = j.at("end").get<std::size_t>();
    } else if (status == "not_reviewed") {
        outcome.status = IndexOutcome::Status::not_reviewed;
    } else if (status == "unsuccessful") {
        outcome.status = IndexOutcome::Status::unsuccessful;
    } else {
        throw EvalError("unknown index status '" + status + "'");
    }
    if (j.contains("source_pages") && j["source_pages"].is_array())
        outcome.source_pages = j["source_pages"].get<std::vector<std::string>>();
    return outcome;
}

std::vector<IndexOutcome> load_index_outcomes(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw EvalError("cannot open index outcomes file: " + path.string());
    std::vector<IndexOutcome> outcomes;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        outcomes.push_back(index_outcome_from_jsonl(line));
    }
    return outcomes;
}

std::vector<GoldRecord> load_gold(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw EvalError("cannot open gold file: " + path.string());
    std::vector<GoldRecord> gold;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty())
            continue;
        const ordered_json j = ordered_json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object() || !j.contains("zbmath_internal_id"))
            throw EvalError("malformed gold record at line " + std::to_string(line_no));
        GoldRecord record;
        record.zbmath_internal_id = j["zbmath_internal_id"].get<std::int64_t>();
        record.not_reviewed = j.contains("not_reviewed") && j["not_reviewed"].is_boolean() &&
                              j["not_reviewed"].get<bool>();
        if (!record.not_reviewed) {
            if (!j.contains("gold_text") || !j["gold_text"].is_string())
                throw EvalError("gold record at line " + std::to_string(line_no) +
                                " needs gold_text or not_reviewed=true");
            record.gold_text = j["gold_text"].get<std::string>();
        }
        const bool has_start = j.contains("gold_start") && j["gold_start"].is_number();
        const bool has_end = j.contains("gold_end") && j["gold_end"].is_number();
        if (has_start != has_end)
            throw EvalError("gold record at line " + std::to_string(line_no) +
                            " has only one of gold_start/gold_end");
        if (has_start)
            record.gold_indexes = {j["gold_start"].get<std::size_t>(),
                                   j["gold_end"].get<std::size_t>()};
        gold.push_back(std::move(record));
    }
    return gold;
}

std::filesystem::path exclusion_log_path(const std::filesystem::path& output_path) {
    std::filesystem::path log = output_path;
    log.replace_extension(".exclusions.jsonl");
    return log;
}

namespace {

struct LlmRuntime {
    std::vector<BackendConfig> backends;
    std::vector<std::unique_ptr<Gate>> gates;
    std::size_t best_index = 0;

    explicit LlmRuntime(std::vector<BackendConfig> configs) : backends(std::move(configs)) {
        for (std::size_t i = 0; i < backends.size(); ++i) {
            gates.push_back(std::make_unique<Gate>(backends[i].max_concurrent));
            if (backends[i].is_best)
                best_index = i;
        }
    }

    ModelOutput query(std::size_t backend_index, const Prompt& prompt) {
        GateGuard guard(*gates[backend_index]);
        return query_backend(backends[backend_index], prompt);
    }
};

std::string process_task(const SplitTask& task, const RunConfig& config, LlmRuntime* llm) {
    if (config.method == RunMethod::regex) {
        SplitOptions options;
        options.fuzzy_threshold = config.fuzzy_threshold;
        return extraction_to_jsonl(split_document(task, options));
    }

    PromptOptions prompt_options;
    prompt_options.empty_review_clause = true;
    if (config.few_shot)
        prompt_options.few_shot = default_few_shot_examples();
    const Prompt prompt = build_prompt(task, prompt_options);

    if (config.method == RunMethod::llm) {
        const ModelOutput output = llm->query(llm->best_index, prompt);
        return extraction_to_jsonl(
            answer_to_extraction(task.row.zbmath_internal_id, output, SplitMethod::llm_single));
    }

    // vote: the three backend calls for one document run concurrently
    std::array<std::future<ModelOutput>, 3> futures;
    for (std::size_t b = 0; b < 3; ++b)
        futures[b] = std::async(std::launch::async,
                                [llm, b, &prompt]() { return llm->query(b, prompt); });
    std::array<ModelOutput, 3> outputs{futures[0].get(), futures[1].get(), futures[2].get()};

    const VoteOutcome outcome = majority_vote(outputs, llm->backends[llm->best_index].name);
    const ExtractionResult result = vote_to_extraction(task.row.zbmath_internal_id, outcome);

    VoteNote note;
    note.agreement = std::string(to_string(outcome.agreement));
    note.decided_by = outcome.decided_by;
    for (const ModelOutput& output : outcome.per_model) {
        if (output.failed())
            note.backend_errors.emplace_back(output.backend, *output.error);
    }
    return extraction_to_jsonl(result, note);
}

} // namespace

int run_split(const RunConfig& config, std::ostream& log) {
    validate(config);

    const MetadataLoad metadata = load_metadata(config.metadata_path);
    for (const RowIssue& issue : metadata.issues)
        log << "metadata line " << issue.line << ": " << (issue.rejected ? "rejected: " : "")
            << issue.message << "\n";

    const PageStore store = load_pages(config.pages_dir);
    for (const MissingPage& missing : store.missing())
        log << "page " << missing.scan_document_id << " unusable (" << missing.reason << "): "
            << missing.file << "\n";

    const auto [table, exclusions] = exclude_incomplete(metadata.table, store);
    {
        std::ofstream exclusion_log(exclusion_log_path(config.output_path),
                                    std::ios::binary | std::ios::trunc);
        if (!exclusion_log)
            throw ConfigError("cannot write exclusion log next to " +
                              config.output_path.string());
        for (const Exclusion& e : exclusions.excluded) {
            ordered_json j;
            j["zbmath_internal_id"] = e.zbmath_internal_id;
            j["scan_document_id"] = e.scan_document_id;
            j["reason"] = e.reason;
            exclusion_log << j.dump() << "\n";
        }
    }
    log << "retained " << table.size() << " rows, excluded " << exclusions.excluded.size()
        << "\n";

    // resume: keep the valid prefix of an existing output, rerun the rest
    std::set<std::int64_t> already_done;
    std::vector<std::string> kept_lines;
    if (config.resume && std::filesystem::exists(config.output_path)) {
        bool ends_with_newline = true;
        const auto lines = read_lines(config.output_path, ends_with_newline);
        for (std::size_t i = 0; i < lines.size(); ++i) {
            if (lines[i].empty())
                continue;
            if (i + 1 == lines.size() && !ends_with_newline)
                break; // interrupted mid-write; redo this record
            try {
                const ExtractionResult r = extraction_from_jsonl(lines[i]);
                already_done.insert(r.zbmath_internal_id);
                kept_lines.push_back(lines[i]);
            } catch (const EvalError&) {
                break; // damaged tail
            }
        }
    }

    std::ofstream out(config.output_path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw ConfigError("cannot write output file: " + config.output_path.string());
    for (const std::string& line : kept_lines)
        out << line << "\n";
    out.flush();

    std::vector<std::size_t> todo;
    for (std::size_t i = 0; i < table.size(); ++i) {
        if (!already_done.count(table.rows[i].zbmath_internal_id))
            todo.push_back(i);
    }

    std::unique_ptr<LlmRuntime> llm;
    if (config.method != RunMethod::regex)
        llm = std::make_unique<LlmRuntime>(load_backends(*config.backends_path));

    ordered_parallel_for(
        todo.size(), config.worker_count,
        [&](std::size_t i) {
            const SplitTask task = assemble_task(table, store, todo[i]);
            return process_task(task, config, llm.get());
        },
        [&](std::size_t, std::string line) {
            out << line << "\n";
            out.flush();
        });
    out.close();

    // final failure census covers resumed records too
    std::size_t failed_total = 0;
    for (const ExtractionResult& r : load_results(config.output_path))
        if (r.status == ExtractionResult::Status::failed)
            ++failed_total;

    log << "wrote " << (kept_lines.size() + todo.size()) << " records ("
        << kept_lines.size() << " resumed, " << failed_total << " failed)\n";
    return failed_total == 0 ? kExitOk : kExitPartial;
}

int run_recover(const std::filesystem::path& results_path,
                const std::filesystem::path& pages_dir,
                const std::filesystem::path& metadata_path,
                const std::filesystem::path& output_path, std::ostream& log) {
    const std::vector<ExtractionResult> results = load_results(results_path);
    const MetadataLoad metadata = load_metadata(metadata_path);
    const PageStore store = load_pages(pages_dir);
    const auto [table, exclusions] = exclude_incomplete(metadata.table, store);

    std::map<std::int64_t, std::size_t> row_by_id;
    for (std::size_t i = 0; i < table.size(); ++i)
        row_by_id[table.rows[i].zbmath_internal_id] = i;

    std::ofstream out(output_path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw ConfigError("cannot write output file: " + output_path.string());

    std::size_t errors = 0;
    for (const ExtractionResult& result : results) {
        const auto it = row_by_id.find(result.zbmath_internal_id);
        if (it == row_by_id.end()) {
            ordered_json j;
            j["zbmath_internal_id"] = result.zbmath_internal_id;
            j["status"] = "error";
            j["reason"] = "id not present in retained metadata";
            out << j.dump() << "\n";
            log << "record " << result.zbmath_internal_id << ": not in retained metadata\n";
            ++errors;
            continue;
        }
        const SplitTask task = assemble_task(table, store, it->second);
        const IndexOutcome outcome = recover_indexes(task, result);
        std::vector<PageOffset> offsets;
        if (outcome.status == IndexOutcome::Status::found) {
            for (std::size_t p = 0; p < task.page_span.size(); ++p)
                offsets.push_back({task.page_span[p], task.page_offsets[p]});
        }
        out << index_outcome_to_jsonl(outcome, offsets) << "\n";
    }
    return errors == 0 ? kExitOk : kExitPartial;
}

int run_eval(const std::filesystem::path& results_path, const std::filesystem::path& gold_path,
             EvalMode mode, const std::optional<std::filesystem::path>& report_path,
             std::ostream& out) {
    const std::vector<GoldRecord> gold = load_gold(gold_path);

    ordered_json report_json;
    if (mode == EvalMode::text) {
        const EvalReport report = score_splitting(load_results(results_path), gold);
        print_eval_report(report, out);
        report_json = eval_report_json(report);
    } else {
        const IndexScore score = score_indexes(load_index_outcomes(results_path), gold);
        print_index_score(score, out);
        report_json = index_score_json(score);
    }

    if (report_path) {
        std::ofstream report_out(*report_path, std::ios::binary | std::ios::trunc);
        if (!report_out)
            throw ConfigError("cannot write report file: " + report_path->string());
        report_out << report_json.dump(2) << "\n";
    } else {
        out << report_json.dump() << "\n";
    }
    return kExitOk;
}

int run_eval_ocr(const std::filesystem::path& candidates_dir,
                 const std::filesystem::path& references_dir, std::ostream& out) {
    if (!std::filesystem::is_directory(candidates_dir))
        throw EvalError("candidates directory does not exist: " + candidates_dir.string());
    if (!std::filesystem::is_directory(references_dir))
        throw EvalError("references directory does not exist: " + references_dir.string());

    const auto read_file = [](const std::filesystem::path& path) {
        std::ifstream in(path, std::ios::binary);
        if (!in)
            throw EvalError("cannot read " + path.string());
        return std::string((std::istreambuf_iterator<char>(in)),
                           std::istreambuf_iterator<char>());
    };

    const auto engine_pairs = [&](const std::filesystem::path& engine_dir) {
        std::vector<std::filesystem::path> files;
        for (const auto& entry : std::filesystem::directory_iterator(engine_dir))
            if (entry.is_regular_file())
                files.push_back(entry.path());
        std::sort(files.begin(), files.end());
        std::vector<std::pair<std::string, std::string>> pairs;
        for (const auto& file : files) {
            const auto reference = references_dir / file.filename();
            if (!std::filesystem::exists(reference))
                throw EvalError("no reference for " + file.filename().string());
            pairs.emplace_back(read_file(file), read_file(reference));
        }
        return pairs;
    };

    // one subdirectory per engine, or a flat directory for a single engine
    std::vector<std::filesystem::path> engine_dirs;
    for (const auto& entry : std::filesystem::directory_iterator(candidates_dir))
        if (entry.is_directory())
            engine_dirs.push_back(entry.path());
    std::sort(engine_dirs.begin(), engine_dirs.end());

    std::vector<OcrMetricsRow> rows;
    if (engine_dirs.empty()) {
        rows.push_back(ocr_eval(engine_pairs(candidates_dir),
                                candidates_dir.filename().string()));
    } else {
        for (const auto& dir : engine_dirs)
            rows.push_back(ocr_eval(engine_pairs(dir), dir.filename().string()));
    }

    std::size_t name_width = 8;
    for (const OcrMetricsRow& row : rows)
        name_width = std::max(name_width, row.engine.size() + 2);
    out << std::left << std::setw(static_cast<int>(name_width)) << "Engine"
        << std::setw(14) << "Average BLEU" << std::setw(23) << "Average Edit Distance"
        << "Pages\n";
    out << std::fixed << std::setprecision(4);
    for (const OcrMetricsRow& row : rows) {
        out << std::left << std::setw(static_cast<int>(name_width)) << row.engine
            << std::setw(14) << row.average_bleu << std::setw(23) << row.average_edit_distance
            << row.pages << "\n";
    }
    out.unsetf(std::ios::floatfield);
    return kExitOk;
}

} // namespace revsplit
