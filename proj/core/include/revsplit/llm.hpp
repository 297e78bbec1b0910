#ifndef REVSPLIT_LLM_HPP
#define REVSPLIT_LLM_HPP

#include "revsplit/corpus.hpp"
#include "revsplit/regex_splitter.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace revsplit {

/// A rendered extraction request: instruction, the two boundary titles with
/// their sources, and the page-span LaTeX, in that order. Few-shot example
/// pairs, when present, sit between the instruction and the task block.
struct Prompt {
    std::string instruction;
    std::string row_title;
    std::string row_source;
    std::string next_title;
    std::string next_source;
    std::string latex_content;
    std::vector<std::pair<std::string, std::string>> few_shot_examples;
    bool empty_review_clause = false;

    std::string render() const;
};

struct PromptOptions {
    std::vector<std::pair<std::string, std::string>> few_shot;
    bool empty_review_clause = false;
};

/// Spells out the empty-review convention for backends that were not
/// trained on it. Kept verbatim so prompt and answer canonicalization agree.
inline constexpr std::string_view kEmptyReviewClause =
    "If the review is empty, return 'Not reviewed'";

/// Two small worked examples for few-shot prompting.
const std::vector<std::pair<std::string, std::string>>& default_few_shot_examples();

/// One inference endpoint speaking the de-facto chat-completions shape.
struct BackendConfig {
    std::string name;
    std::string endpoint; // e.g. "http://127.0.0.1:8000/v1"
    std::string model;
    double timeout_seconds = 30.0;
    int max_retries = 2;
    bool is_best = false;
    int max_concurrent = 4; // per-backend in-flight request cap
    int max_tokens = 4096;
};

/// Parse the key-value backends file: one [name] section per backend with
/// endpoint/model/timeout/max_retries/best keys; exactly one best = true.
std::vector<BackendConfig> load_backends(const std::filesystem::path& path);

/// Single completion from one backend. A failed call carries its error here
/// instead of throwing; failures never match anything in the vote.
struct ModelOutput {
    std::string backend;
    std::string text;
    std::optional<std::vector<double>> token_logprobs; // each <= 0
    double latency_seconds = 0.0;
    std::optional<std::string> error; // "transport: ..." or "protocol: ..."

    bool failed() const { return error.has_value(); }
};

/// POST the rendered prompt to <endpoint>/chat/completions with temperature
/// 0 and logprobs requested; retry transport failures with exponential
/// backoff up to max_retries. The REVSPLIT_API_KEY_<NAME> environment
/// variable, when set, becomes a bearer token.
ModelOutput query_backend(const BackendConfig& backend, const Prompt& prompt);

enum class Agreement { unanimous, pair, none };

std::string_view to_string(Agreement agreement);

struct VoteOutcome {
    std::string final_text;
    Agreement agreement = Agreement::none;
    std::vector<ModelOutput> per_model;
    std::string decided_by;
};

/// Ensemble rule: any two matching outputs win; with three distinct outputs
/// the designated best backend decides. Matching means equality after
/// trimming outer whitespace and collapsing space runs, with the
/// "Not reviewed" surface forms canonicalized first.
VoteOutcome majority_vote(const std::array<ModelOutput, 3>& outputs, std::string_view best);

/// True for "Not reviewed"/"not reviewed." style answers (case-insensitive,
/// trailing period optional).
bool is_not_reviewed_answer(std::string_view text);

/// Map a model answer (single backend or vote winner) onto the per-document
/// result: not-reviewed answers and empty answers become NotReviewed, failed
/// outputs become Failed.
ExtractionResult answer_to_extraction(std::int64_t zbmath_internal_id, const ModelOutput& output,
                                      SplitMethod method);

/// Same mapping for a vote outcome. An unresolved vote whose deciding
/// backend itself failed becomes a Failed result.
ExtractionResult vote_to_extraction(std::int64_t zbmath_internal_id, const VoteOutcome& outcome);

struct TokenProbStats {
    double first = 0.0;
    double avg_first5 = 0.0;
    double avg_all = 0.0;
};

/// Token-probability summaries (probability = exp(logprob)); nullopt when
/// the backend supplied no logprobs.
std::optional<TokenProbStats> token_prob_stats(const ModelOutput& output);

/// Build the prompt for one task, preferring the original title exactly as
/// the regex path does; sentinel handling is identical too.
Prompt build_prompt(const SplitTask& task, const PromptOptions& options = {});

} // namespace revsplit

#endif
