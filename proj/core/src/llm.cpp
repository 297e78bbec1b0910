#include "revsplit/llm.hpp"

#include "revsplit/errors.hpp"

#define CPPHTTPLIB_NO_EXCEPTIONS
#include <httplib.h>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <thread>

namespace revsplit {

namespace {

constexpr std::string_view kInstruction =
    "You are given the OCR output in LaTeX of consecutive pages from a printed volume of "
    "mathematical reviews. Extract the complete review text of the first document below, "
    "exactly as it appears between that document's heading and the next document's title. "
    "Correct obvious OCR artifacts but do not add, remove, or reorder review sentences, and "
    "do not include titles, sources, page numbers, or other metadata. Return only the review "
    "text.";

std::string trim_outer(std::string_view s) {
    const auto is_ws = [](char c) {
        return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
    };
    while (!s.empty() && is_ws(s.front()))
        s.remove_prefix(1);
    while (!s.empty() && is_ws(s.back()))
        s.remove_suffix(1);
    return std::string(s);
}

// Vote equality key: outer whitespace trimmed, runs of spaces and tabs
// collapsed. Newlines survive, so the winning text stays usable for index
// recovery.
std::string vote_normalize(std::string_view s) {
    std::string trimmed = trim_outer(s);
    std::string out;
    out.reserve(trimmed.size());
    bool in_run = false;
    for (const char c : trimmed) {
        if (c == ' ' || c == '\t') {
            in_run = true;
            continue;
        }
        if (in_run && !out.empty())
            out.push_back(' ');
        in_run = false;
        out.push_back(c);
    }
    return out;
}

// Distinguished vote key for a failed backend; never equal to any text key.
constexpr std::string_view kFailureKey = "\x01__FAILURE__";
// Canonical key for the not-reviewed answer surface forms.
constexpr std::string_view kNotReviewedKey = "\x01__NOT_REVIEWED__";

std::string vote_key(const ModelOutput& output) {
    if (output.failed())
        return std::string(kFailureKey) + output.backend;
    if (is_not_reviewed_answer(output.text))
        return std::string(kNotReviewedKey);
    return vote_normalize(output.text);
}

std::string env_key_name(std::string_view backend_name) {
    std::string key = "REVSPLIT_API_KEY_";
    for (const char c : backend_name)
        key.push_back(std::isalnum(static_cast<unsigned char>(c))
                          ? static_cast<char>(std::toupper(static_cast<unsigned char>(c)))
                          : '_');
    return key;
}

struct EndpointParts {
    std::string host; // scheme://host:port
    std::string path_prefix;
};

std::optional<EndpointParts> parse_endpoint(const std::string& endpoint) {
    const auto scheme_end = endpoint.find("://");
    if (scheme_end == std::string::npos)
        return std::nullopt;
    const auto path_begin = endpoint.find('/', scheme_end + 3);
    EndpointParts parts;
    if (path_begin == std::string::npos) {
        parts.host = endpoint;
    } else {
        parts.host = endpoint.substr(0, path_begin);
        parts.path_prefix = endpoint.substr(path_begin);
        while (!parts.path_prefix.empty() && parts.path_prefix.back() == '/')
            parts.path_prefix.pop_back();
    }
    return parts;
}

bool parse_bool(const std::string& value, bool& out) {
    if (value == "true" || value == "yes" || value == "1") {
        out = true;
        return true;
    }
    if (value == "false" || value == "no" || value == "0") {
        out = false;
        return true;
    }
    return false;
}

} // namespace

std::string Prompt::render() const {
    std::string out;
    out.reserve(instruction.size() + latex_content.size() + 256);
    out.append(instruction);
    if (empty_review_clause) {
        out.push_back('\n');
        out.append(kEmptyReviewClause);
    }
    out.push_back('\n');
    for (const auto& [fragment, gold] : few_shot_examples) {
        out.append("\nExample input:\n");
        out.append(fragment);
        out.append("\nExample output:\n");
        out.append(gold);
        out.push_back('\n');
    }
    out.append("\nTitle: ");
    out.append(row_title);
    out.append("\nSource: ");
    out.append(row_source);
    out.append("\nNext title: ");
    out.append(next_title);
    out.append("\nNext source: ");
    out.append(next_source);
    out.append("\nLaTeX content:\n");
    out.append(latex_content);
    return out;
}

const std::vector<std::pair<std::string, std::string>>& default_few_shot_examples() {
    static const std::vector<std::pair<std::string, std::string>> examples = {
        {"Title: On a class of bounded operators\n"
         "Source: Ann. Math. Stud. 12, 44-51 (1930).\n"
         "Next title: Zur Theorie der Reihen\n"
         "Next source: Math. Z. 3, 1-9 (1930).\n"
         "LaTeX content:\n"
         "On a class of bounded operators\n"
         "Ann. Math. Stud. 12, 44-51 (1930).\n"
         "The author studies bounded operators on a separable space and proves a "
         "decomposition theorem.\n"
         "Zur Theorie der Reihen",
         "The author studies bounded operators on a separable space and proves a "
         "decomposition theorem."},
        {"Title: Remarks on convergence\n"
         "Source: J. Anal. 2, 10-11 (1931).\n"
         "Next title: On prime densities\n"
         "Next source: Acta Arith. 1, 5-19 (1931).\n"
         "LaTeX content:\n"
         "Remarks on convergence\n"
         "J. Anal. 2, 10-11 (1931).\n"
         "On prime densities",
         "Not reviewed"},
    };
    return examples;
}

Prompt build_prompt(const SplitTask& task, const PromptOptions& options) {
    Prompt prompt;
    prompt.instruction = std::string(kInstruction);
    prompt.few_shot_examples = options.few_shot;
    prompt.empty_review_clause = options.empty_review_clause;

    const auto preferred_title = [](const MetadataRow& row) -> std::string {
        if (row.original_title && !row.original_title->empty())
            return *row.original_title;
        return row.title;
    };

    prompt.row_title = preferred_title(task.row);
    prompt.row_source = task.row.source;
    if (task.next_row) {
        prompt.next_title = preferred_title(*task.next_row);
        prompt.next_source = task.next_row->source;
    } else {
        prompt.next_title = std::string(kSentinelTitle);
        prompt.next_source = "";
    }
    prompt.latex_content = task.latex_content;
    return prompt;
}

std::vector<BackendConfig> load_backends(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open backends file: " + path.string());

    std::vector<BackendConfig> backends;
    BackendConfig* current = nullptr;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        const std::string trimmed = trim_outer(line);
        if (trimmed.empty() || trimmed.front() == '#' || trimmed.front() == ';')
            continue;
        if (trimmed.front() == '[') {
            if (trimmed.back() != ']' || trimmed.size() < 3)
                throw ConfigError("malformed section at line " + std::to_string(line_no) + ": " +
                                  trimmed);
            backends.emplace_back();
            current = &backends.back();
            current->name = trimmed.substr(1, trimmed.size() - 2);
            continue;
        }
        if (current == nullptr)
            throw ConfigError("key outside a [backend] section at line " + std::to_string(line_no));
        const auto eq = trimmed.find('=');
        if (eq == std::string::npos)
            throw ConfigError("expected key = value at line " + std::to_string(line_no));
        const std::string key = trim_outer(trimmed.substr(0, eq));
        const std::string value = trim_outer(trimmed.substr(eq + 1));

        try {
            if (key == "endpoint") {
                current->endpoint = value;
            } else if (key == "model") {
                current->model = value;
            } else if (key == "timeout") {
                current->timeout_seconds = std::stod(value);
            } else if (key == "max_retries") {
                current->max_retries = std::stoi(value);
            } else if (key == "max_concurrent") {
                current->max_concurrent = std::stoi(value);
            } else if (key == "max_tokens") {
                current->max_tokens = std::stoi(value);
            } else if (key == "best") {
                if (!parse_bool(value, current->is_best))
                    throw ConfigError("best must be true or false at line " +
                                      std::to_string(line_no));
            } else {
                throw ConfigError("unknown key '" + key + "' at line " + std::to_string(line_no));
            }
        } catch (const std::invalid_argument&) {
            throw ConfigError("bad value for '" + key + "' at line " + std::to_string(line_no));
        } catch (const std::out_of_range&) {
            throw ConfigError("bad value for '" + key + "' at line " + std::to_string(line_no));
        }
    }

    if (backends.empty())
        throw ConfigError("backends file defines no backends: " + path.string());
    int best_count = 0;
    for (const BackendConfig& b : backends) {
        if (b.endpoint.empty())
            throw ConfigError("backend '" + b.name + "' has no endpoint");
        if (b.model.empty())
            throw ConfigError("backend '" + b.name + "' has no model");
        if (b.max_retries < 0 || b.timeout_seconds <= 0 || b.max_concurrent < 1)
            throw ConfigError("backend '" + b.name + "' has invalid limits");
        best_count += b.is_best ? 1 : 0;
    }
    if (best_count != 1)
        throw ConfigError("exactly one backend must set best = true (found " +
                          std::to_string(best_count) + ")");
    return backends;
}

ModelOutput query_backend(const BackendConfig& backend, const Prompt& prompt) {
    ModelOutput output;
    output.backend = backend.name;

    const auto parts = parse_endpoint(backend.endpoint);
    if (!parts) {
        output.error = "transport: malformed endpoint '" + backend.endpoint + "'";
        return output;
    }

    nlohmann::json body;
    body["model"] = backend.model;
    body["messages"] = nlohmann::json::array({{{"role", "user"}, {"content", prompt.render()}}});
    body["temperature"] = 0;
    body["logprobs"] = true;
    body["max_tokens"] = backend.max_tokens;
    const std::string payload = body.dump();

    const char* api_key = std::getenv(env_key_name(backend.name).c_str());

    const auto started = std::chrono::steady_clock::now();
    std::string transport_error;
    const int attempts = 1 + std::max(0, backend.max_retries);
    for (int attempt = 0; attempt < attempts; ++attempt) {
        if (attempt > 0) {
            const auto backoff =
                std::chrono::milliseconds(250) * (1 << std::min(attempt - 1, 4));
            std::this_thread::sleep_for(std::min(backoff, std::chrono::milliseconds(4000)));
        }

        httplib::Client client(parts->host);
        const auto timeout_ms =
            std::chrono::milliseconds(static_cast<long>(backend.timeout_seconds * 1000.0));
        client.set_connection_timeout(timeout_ms);
        client.set_read_timeout(timeout_ms);
        client.set_write_timeout(timeout_ms);
        if (api_key != nullptr)
            client.set_bearer_token_auth(api_key);

        auto res = client.Post(parts->path_prefix + "/chat/completions", payload,
                               "application/json");
        if (!res) {
            transport_error = httplib::to_string(res.error());
            continue; // transport failure: retry
        }
        if (res->status >= 500) {
            transport_error = "server returned " + std::to_string(res->status);
            continue;
        }
        output.latency_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
        if (res->status != 200) {
            output.error = "protocol: unexpected status " + std::to_string(res->status);
            return output;
        }

        nlohmann::json reply = nlohmann::json::parse(res->body, nullptr, false);
        if (reply.is_discarded() || !reply.contains("choices") || !reply["choices"].is_array() ||
            reply["choices"].empty()) {
            output.error = "protocol: response body is not a chat completion";
            return output;
        }
        const auto& choice = reply["choices"][0];
        if (!choice.contains("message") || !choice["message"].contains("content") ||
            !choice["message"]["content"].is_string()) {
            output.error = "protocol: missing choices[0].message.content";
            return output;
        }
        output.text = choice["message"]["content"].get<std::string>();
        if (choice.contains("logprobs") && choice["logprobs"].is_object() &&
            choice["logprobs"].contains("content") && choice["logprobs"]["content"].is_array()) {
            std::vector<double> logprobs;
            for (const auto& token : choice["logprobs"]["content"]) {
                if (token.contains("logprob") && token["logprob"].is_number())
                    logprobs.push_back(std::min(0.0, token["logprob"].get<double>()));
            }
            if (!logprobs.empty())
                output.token_logprobs = std::move(logprobs);
        }
        return output;
    }

    output.latency_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    output.error = "transport: " + (transport_error.empty() ? "request failed" : transport_error) +
                   " after " + std::to_string(attempts) + " attempts";
    return output;
}

std::string_view to_string(Agreement agreement) {
    switch (agreement) {
    case Agreement::unanimous: return "unanimous";
    case Agreement::pair: return "pair";
    case Agreement::none: return "none";
    }
    return "none";
}

bool is_not_reviewed_answer(std::string_view text) {
    std::string t = trim_outer(text);
    if (!t.empty() && t.back() == '.')
        t.pop_back();
    if (t.size() != 12)
        return false;
    std::transform(t.begin(), t.end(), t.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return t == "not reviewed";
}

VoteOutcome majority_vote(const std::array<ModelOutput, 3>& outputs, std::string_view best) {
    VoteOutcome outcome;
    outcome.per_model.assign(outputs.begin(), outputs.end());

    const std::array<std::string, 3> keys = {vote_key(outputs[0]), vote_key(outputs[1]),
                                             vote_key(outputs[2])};

    const bool m01 = keys[0] == keys[1];
    const bool m02 = keys[0] == keys[2];
    const bool m12 = keys[1] == keys[2];

    if (m01 || m02 || m12) {
        const std::size_t winner = m01 || m02 ? 0 : 1;
        outcome.agreement = (m01 && m02) ? Agreement::unanimous : Agreement::pair;
        outcome.decided_by = outputs[winner].backend;
        // the canonical key is what both members equal under normalization;
        // it keeps the outcome independent of output order
        outcome.final_text =
            keys[winner] == kNotReviewedKey ? "not reviewed." : keys[winner];
        return outcome;
    }

    outcome.agreement = Agreement::none;
    outcome.decided_by = std::string(best);
    for (const ModelOutput& o : outputs) {
        if (o.backend == best) {
            outcome.final_text = o.text;
            break;
        }
    }
    return outcome;
}

ExtractionResult answer_to_extraction(std::int64_t zbmath_internal_id, const ModelOutput& output,
                                      SplitMethod method) {
    if (output.failed())
        return ExtractionResult::make_failed(zbmath_internal_id, *output.error, method);
    if (is_not_reviewed_answer(output.text))
        return ExtractionResult::make_not_reviewed(zbmath_internal_id, method);
    std::string text = trim_outer(output.text);
    if (text.empty())
        return ExtractionResult::make_not_reviewed(zbmath_internal_id, method);
    return ExtractionResult::make_text(zbmath_internal_id, std::move(text), method);
}

ExtractionResult vote_to_extraction(std::int64_t zbmath_internal_id, const VoteOutcome& outcome) {
    if (outcome.agreement == Agreement::none) {
        // the tiebreaker is the best backend's own answer, failures included
        for (const ModelOutput& o : outcome.per_model) {
            if (o.backend == outcome.decided_by)
                return answer_to_extraction(zbmath_internal_id, o, SplitMethod::llm_vote);
        }
        return ExtractionResult::make_failed(zbmath_internal_id,
                                             "deciding backend missing from vote",
                                             SplitMethod::llm_vote);
    }
    ModelOutput winner;
    winner.backend = outcome.decided_by;
    winner.text = outcome.final_text;
    return answer_to_extraction(zbmath_internal_id, winner, SplitMethod::llm_vote);
}

std::optional<TokenProbStats> token_prob_stats(const ModelOutput& output) {
    if (!output.token_logprobs || output.token_logprobs->empty())
        return std::nullopt;
    const std::vector<double>& logprobs = *output.token_logprobs;
    TokenProbStats stats;
    stats.first = std::exp(logprobs.front());
    const std::size_t head = std::min<std::size_t>(5, logprobs.size());
    double sum_head = 0.0, sum_all = 0.0;
    for (std::size_t i = 0; i < logprobs.size(); ++i) {
        const double p = std::exp(logprobs[i]);
        if (i < head)
            sum_head += p;
        sum_all += p;
    }
    stats.avg_first5 = sum_head / static_cast<double>(head);
    stats.avg_all = sum_all / static_cast<double>(logprobs.size());
    return stats;
}

} // namespace revsplit
