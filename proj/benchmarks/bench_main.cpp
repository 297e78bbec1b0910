#include "revsplit/evaluation.hpp"
#include "revsplit/regex_splitter.hpp"
#include "revsplit/textnorm.hpp"

#include <benchmark/benchmark.h>

#include <random>
#include <string>

namespace {

std::string synthetic_page(std::size_t lines, unsigned seed) {
    std::mt19937 rng(seed);
    const std::string words[] = {"the", "spectral", "operator", "bounded", "measure",
                                 "theorem", "proof", "compact", "lattice", "kernel"};
    std::string page;
    for (std::size_t l = 0; l < lines; ++l) {
        for (int w = 0; w < 10; ++w) {
            page += words[rng() % 10];
            page.push_back(w == 9 ? '\n' : ' ');
        }
    }
    return page;
}

void BM_levenshtein(benchmark::State& state) {
    const std::string a = synthetic_page(4, 1);
    const std::string b = synthetic_page(4, 2);
    for (auto _ : state)
        benchmark::DoNotOptimize(revsplit::levenshtein(a, b));
}
BENCHMARK(BM_levenshtein);

void BM_normalize_ocr(benchmark::State& state) {
    const std::string page = "~T h e ~s p e c t r a l  theorem \\\"uber  Flächen\n" +
                             synthetic_page(static_cast<std::size_t>(state.range(0)), 3);
    for (auto _ : state)
        benchmark::DoNotOptimize(revsplit::normalize_ocr(page));
}
BENCHMARK(BM_normalize_ocr)->Arg(8)->Arg(64);

void BM_locate_title_fuzzy(benchmark::State& state) {
    std::string content = synthetic_page(static_cast<std::size_t>(state.range(0)), 4);
    content.insert(content.size() / 2, "A dxmaged title about lattoce kernels\n");
    const std::string title = "A damaged title about lattice kernels";
    for (auto _ : state)
        benchmark::DoNotOptimize(
            revsplit::locate_title(content, title, revsplit::MatchMode::fuzzy, 0.3));
}
BENCHMARK(BM_locate_title_fuzzy)->Arg(16)->Arg(64);

void BM_strip_spaces(benchmark::State& state) {
    const std::string page = synthetic_page(64, 5);
    for (auto _ : state)
        benchmark::DoNotOptimize(revsplit::strip_spaces_with_map(page));
}
BENCHMARK(BM_strip_spaces);

void BM_bleu(benchmark::State& state) {
    const std::string a = synthetic_page(16, 6);
    const std::string b = synthetic_page(16, 7);
    for (auto _ : state)
        benchmark::DoNotOptimize(revsplit::bleu(a, b));
}
BENCHMARK(BM_bleu);

} // namespace

BENCHMARK_MAIN();
