#ifndef REVSPLIT_PIPELINE_HPP
#define REVSPLIT_PIPELINE_HPP

#include "revsplit/corpus.hpp"
#include "revsplit/evaluation.hpp"
#include "revsplit/index_recovery.hpp"
#include "revsplit/llm.hpp"
#include "revsplit/regex_splitter.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace revsplit {

/// Exit codes shared by every subcommand: batch tools must distinguish
/// "ran with per-document failures" from "could not run at all".
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfigError = 1;
inline constexpr int kExitPartial = 2;

enum class RunMethod { regex, llm, vote };

std::string_view to_string(RunMethod method);
std::optional<RunMethod> run_method_from_string(std::string_view s);

struct RunConfig {
    std::filesystem::path pages_dir;
    std::filesystem::path metadata_path;
    std::filesystem::path output_path;
    RunMethod method = RunMethod::regex;
    std::optional<std::filesystem::path> backends_path;
    int worker_count = 1;
    double fuzzy_threshold = 0.3;
    bool few_shot = false;
    bool resume = false;
};

/// Throws ConfigError on an inconsistent config (llm/vote without backends,
/// vote without exactly three, bad worker count or threshold).
void validate(const RunConfig& config);

// --- JSON-lines record schemas -------------------------------------------

/// Extra per-record context for llm/vote runs: which backends failed and how
/// the vote resolved.
struct VoteNote {
    std::string agreement;
    std::string decided_by;
    std::vector<std::pair<std::string, std::string>> backend_errors; // name -> error
};

std::string extraction_to_jsonl(const ExtractionResult& result,
                                const std::optional<VoteNote>& vote = std::nullopt);
ExtractionResult extraction_from_jsonl(const std::string& line);
std::vector<ExtractionResult> load_results(const std::filesystem::path& path);

struct PageOffset {
    std::string page;
    std::size_t offset = 0;
};

/// Index records carry the page list and per-page offsets so both span and
/// per-page coordinates are derivable.
std::string index_outcome_to_jsonl(const IndexOutcome& outcome,
                                   const std::vector<PageOffset>& offsets = {});
IndexOutcome index_outcome_from_jsonl(const std::string& line);
std::vector<IndexOutcome> load_index_outcomes(const std::filesystem::path& path);

std::vector<GoldRecord> load_gold(const std::filesystem::path& path);

/// Exclusion log written next to the split output, one record per excluded
/// row: "<output stem>.exclusions.jsonl".
std::filesystem::path exclusion_log_path(const std::filesystem::path& output_path);

// --- subcommands ----------------------------------------------------------

/// Split every retained row and stream results to config.output_path in
/// table order (JSON lines, one per row). With resume, rows already present
/// in a valid output file are kept as-is and only missing rows run.
int run_split(const RunConfig& config, std::ostream& log);

/// Recover exact indexes for every record of a results file.
int run_recover(const std::filesystem::path& results_path,
                const std::filesystem::path& pages_dir,
                const std::filesystem::path& metadata_path,
                const std::filesystem::path& output_path, std::ostream& log);

enum class EvalMode { text, index };

/// Score a results (text mode) or index-outcomes (index mode) file against
/// gold; prints the report and optionally writes it as JSON.
int run_eval(const std::filesystem::path& results_path, const std::filesystem::path& gold_path,
             EvalMode mode, const std::optional<std::filesystem::path>& report_path,
             std::ostream& out);

/// OCR quality table: candidates_dir holds one engine's page files (or one
/// subdirectory per engine); every file must pair with a same-named
/// reference.
int run_eval_ocr(const std::filesystem::path& candidates_dir,
                 const std::filesystem::path& references_dir, std::ostream& out);

} // namespace revsplit

#endif
