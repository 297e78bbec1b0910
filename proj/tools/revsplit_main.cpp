#include "revsplit/errors.hpp"
#include "revsplit/pipeline.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>

namespace {

int dispatch(const std::function<int()>& command) {
    try {
        return command();
    } catch (const revsplit::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return revsplit::kExitConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return revsplit::kExitConfigError;
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Split OCR LaTeX volumes into catalogued documents"};
    app.require_subcommand(1);

    // split
    auto* split = app.add_subcommand("split", "Extract one document per metadata row");
    revsplit::RunConfig config;
    std::string method_name = "regex";
    std::string backends;
    split->add_option("--pages-dir", config.pages_dir, "Directory of page JSON files")
        ->required();
    split->add_option("--metadata", config.metadata_path, "Tab-separated metadata table")
        ->required();
    split->add_option("--out", config.output_path, "Output JSON-lines file")->required();
    split->add_option("--method", method_name, "regex, llm, or vote")
        ->check(CLI::IsMember({"regex", "llm", "vote"}))
        ->capture_default_str();
    split->add_option("--backends", backends, "Backends config (required for llm/vote)");
    split->add_option("--workers", config.worker_count, "Worker pool width")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    split->add_option("--fuzzy-threshold", config.fuzzy_threshold,
                      "Max edit distance as a fraction of title length")
        ->capture_default_str();
    split->add_flag("--few-shot", config.few_shot, "Include worked examples in prompts");
    split->add_flag("--resume", config.resume, "Skip rows already in the output file");

    // recover
    auto* recover = app.add_subcommand("recover", "Map extracted texts to exact indexes");
    std::string rec_results, rec_pages, rec_metadata, rec_out;
    recover->add_option("--results", rec_results, "Split results JSON-lines file")->required();
    recover->add_option("--pages-dir", rec_pages, "Directory of page JSON files")->required();
    recover->add_option("--metadata", rec_metadata, "Tab-separated metadata table")->required();
    recover->add_option("--out", rec_out, "Output JSON-lines file")->required();

    // eval
    auto* eval = app.add_subcommand("eval", "Score results against gold");
    std::string eval_results, eval_gold, eval_mode = "text";
    std::string eval_report;
    eval->add_option("--results", eval_results, "Results or index-outcomes file")->required();
    eval->add_option("--gold", eval_gold, "Gold JSON-lines file")->required();
    eval->add_option("--mode", eval_mode, "text or index")
        ->check(CLI::IsMember({"text", "index"}))
        ->capture_default_str();
    eval->add_option("--report", eval_report, "Write the JSON report here");

    // eval-ocr
    auto* eval_ocr = app.add_subcommand("eval-ocr", "OCR quality metrics per engine");
    std::string ocr_candidates, ocr_references;
    eval_ocr->add_option("--candidates", ocr_candidates, "Engine output directory")->required();
    eval_ocr->add_option("--references", ocr_references, "Ground-truth directory")->required();

    CLI11_PARSE(app, argc, argv);

    if (split->parsed()) {
        const auto method = revsplit::run_method_from_string(method_name);
        config.method = method.value_or(revsplit::RunMethod::regex);
        if (!backends.empty())
            config.backends_path = backends;
        return dispatch([&]() { return revsplit::run_split(config, std::cerr); });
    }
    if (recover->parsed()) {
        return dispatch([&]() {
            return revsplit::run_recover(rec_results, rec_pages, rec_metadata, rec_out,
                                         std::cerr);
        });
    }
    if (eval->parsed()) {
        return dispatch([&]() {
            std::optional<std::filesystem::path> report;
            if (!eval_report.empty())
                report = eval_report;
            const auto mode = eval_mode == "index" ? revsplit::EvalMode::index
                                                   : revsplit::EvalMode::text;
            return revsplit::run_eval(eval_results, eval_gold, mode, report, std::cout);
        });
    }
    if (eval_ocr->parsed()) {
        return dispatch(
            [&]() { return revsplit::run_eval_ocr(ocr_candidates, ocr_references, std::cout); });
    }
    return revsplit::kExitConfigError;
}
