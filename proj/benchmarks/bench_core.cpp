#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "cadence/auth.hpp"
#include "cadence/eval.hpp"
#include "cadence/io.hpp"
#include "cadence/model.hpp"
#include "cadence/rng.hpp"
#include "cadence/series.hpp"

namespace {

cadence::TimeSeries noisy_sine(std::size_t n, double rate) {
    cadence::Xorshift64 rng(12345);
    std::vector<double> t(n), v(n);
    for (std::size_t i = 0; i < n; ++i) {
        t[i] = static_cast<double>(i) / rate;
        v[i] = std::sin(2.0 * 3.14159265358979323846 * t[i]) +
               0.05 * rng.next_gaussian();
    }
    return cadence::make_series(std::move(t), std::move(v), "g");
}

void FitPiecewise(benchmark::State& state) {
    const cadence::TimeSeries s = noisy_sine(static_cast<std::size_t>(state.range(0)), 50.0);
    cadence::FitConfig cfg;
    cfg.period = 1.0;
    for (auto _ : state) {
        auto model = cadence::fit(s, cfg);
        benchmark::DoNotOptimize(model);
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(FitPiecewise)->Range(128, 4096)->Complexity();

void FitAutoPeriod(benchmark::State& state) {
    const cadence::TimeSeries s = noisy_sine(500, 50.0);
    cadence::FitConfig cfg;  // period estimated from the data
    for (auto _ : state) {
        auto model = cadence::fit(s, cfg);
        benchmark::DoNotOptimize(model);
    }
}
BENCHMARK(FitAutoPeriod);

void Predict300(benchmark::State& state) {
    const cadence::TimeSeries s = noisy_sine(500, 50.0);
    cadence::FitConfig cfg;
    cfg.period = 1.0;
    const cadence::AdditiveModel model = cadence::fit(s, cfg);
    for (auto _ : state) {
        auto fc = cadence::predict(model, 300, 0.02, 0.8);
        benchmark::DoNotOptimize(fc);
    }
}
BENCHMARK(Predict300);

void EstimatePeriod(benchmark::State& state) {
    const cadence::TimeSeries s = noisy_sine(static_cast<std::size_t>(state.range(0)), 50.0);
    for (auto _ : state) {
        auto est = cadence::estimate_period(s, 0.2, 2.0);
        benchmark::DoNotOptimize(est);
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(EstimatePeriod)->Range(256, 4096)->Complexity();

void JudgeWindow(benchmark::State& state) {
    cadence::AuthProfile profile;
    cadence::FitConfig cfg;
    cfg.period = 1.0;
    profile = cadence::register_action(std::move(profile), "Jumping",
                                       noisy_sine(500, 50.0), cfg);
    cadence::Xorshift64 rng(9);
    std::vector<double> t(100), v(100);
    for (std::size_t i = 0; i < t.size(); ++i) {
        t[i] = 10.02 + 0.02 * static_cast<double>(i);
        v[i] = std::sin(2.0 * 3.14159265358979323846 * t[i]) +
               0.05 * rng.next_gaussian();
    }
    const cadence::TimeSeries window = cadence::make_series(t, v, "g");
    for (auto _ : state) {
        auto verdict = cadence::judge(profile, "Jumping", window);
        benchmark::DoNotOptimize(verdict);
    }
}
BENCHMARK(JudgeWindow);

}  // namespace

BENCHMARK_MAIN();
