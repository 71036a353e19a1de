#include <benchmark/benchmark.h>

#include <random>

#include "eventcast/engine.hpp"
#include "eventcast/eval.hpp"
#include "eventcast/model_io.hpp"

using namespace eventcast;

namespace {

CompiledPattern fraud_pattern() {
    PatternConfig config;
    config.pattern =
        "(amountDiff > 0) ; (amountDiff > 0) ; (amountDiff > 0) ; (amountDiff > 0) ; "
        "(amountDiff > 0) ; (amountDiff > 0) ; (amountDiff > 0)";
    config.extra_predicates = {"amountDiff > 100"};
    return compile_pattern(config);
}

std::vector<int> random_symbols(size_t n, int t, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> dist(0, t - 1);
    std::vector<int> out(n);
    for (auto& s : out) s = dist(rng);
    return out;
}

}  // namespace

static void BM_classify_event(benchmark::State& state) {
    const auto compiled = fraud_pattern();
    Event e;
    e.timestamp = 1;
    e.partition = "card0";
    e.attributes["amountDiff"] = 42.0;
    for (auto _ : state) {
        auto symbol = compiled.minterms.classify(e);
        benchmark::DoNotOptimize(symbol);
    }
}
BENCHMARK(BM_classify_event);

static void BM_dsfa_step(benchmark::State& state) {
    const auto compiled = fraud_pattern();
    const auto symbols = random_symbols(4096, compiled.minterms.size(), 7);
    size_t i = 0;
    int q = compiled.dsfa.start;
    for (auto _ : state) {
        q = compiled.dsfa.next(q, symbols[i]);
        i = (i + 1) & 4095;
        benchmark::DoNotOptimize(q);
    }
}
BENCHMARK(BM_dsfa_step);

static void BM_wtd_matrix(benchmark::State& state) {
    const auto compiled = fraud_pattern();
    const auto symbols = random_symbols(20000, compiled.minterms.size(), 11);
    auto cst = cst_build(symbols, 4, compiled.minterms.size());
    LearnConfig cfg;
    cfg.m = 3;
    auto pst = learn_pst(cst, cfg);
    auto psa = pst_to_psa(pst, &cst);
    auto emb = embed(compiled.dsfa, psa);
    auto pm = partition_matrix(emb);
    for (auto _ : state) {
        auto wtd = wtd_matrix(pm, 0, static_cast<int>(state.range(0)));
        benchmark::DoNotOptimize(wtd);
    }
}
BENCHMARK(BM_wtd_matrix)->Arg(50)->Arg(200);

static void BM_interval_forecast(benchmark::State& state) {
    WaitingTimeDistribution wtd;
    wtd.horizon = 200;
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double total = 0.0;
    for (int n = 0; n < 200; ++n) {
        wtd.p.push_back(u(rng));
        total += wtd.p.back();
    }
    for (auto& p : wtd.p) p /= total;
    for (auto _ : state) {
        auto fc = interval_forecast(wtd, 0.5);
        benchmark::DoNotOptimize(fc);
    }
}
BENCHMARK(BM_interval_forecast);

static void BM_engine_step(benchmark::State& state) {
    const auto compiled = fraud_pattern();
    const auto symbols = random_symbols(50000, compiled.minterms.size(), 13);
    EngineConfig cfg;
    cfg.mode = static_cast<EngineMode>(state.range(0));
    cfg.learn.m = 3;
    cfg.forecast.type = ForecastType::ClassifyNextW;
    cfg.forecast.w = 8;
    cfg.forecast.horizon = 8;
    Engine engine(&compiled.dsfa, cfg);
    engine.train({symbols});
    size_t i = 0;
    for (auto _ : state) {
        auto result = engine.step("card0", symbols[i % symbols.size()]);
        ++i;
        benchmark::DoNotOptimize(result);
    }
}
BENCHMARK(BM_engine_step)
    ->Arg(static_cast<int>(EngineMode::PsaEmbedding))
    ->Arg(static_cast<int>(EngineMode::PstDirect));

BENCHMARK_MAIN();
