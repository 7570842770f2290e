// Serial reference kernels against their OpenMP counterparts.

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "tsf/arima.hpp"
#include "tsf/diagnostics.hpp"
#include "tsf/kernels.hpp"

namespace {

std::vector<double> series(std::size_t n) {
    std::mt19937_64 rng(42);
    std::normal_distribution<double> z(0.0, 1.0);
    std::vector<double> v(n);
    double level = 60.0;
    for (std::size_t t = 0; t < n; ++t) {
        level += -0.3 + 0.5 * z(rng);
        v[t] = level;
    }
    return v;
}

std::vector<double> grid(double lo, double step, std::size_t count) {
    std::vector<double> g(count);
    for (std::size_t i = 0; i < count; ++i) {
        g[i] = lo + step * static_cast<double>(i);
    }
    return g;
}

void BM_SesGridSerial(benchmark::State& state) {
    const auto y = series(static_cast<std::size_t>(state.range(0)));
    const auto g = grid(0.001, 0.001, 999);
    for (auto _ : state) {
        benchmark::DoNotOptimize(tsf::kernels::ses_grid_sse_serial(y, g));
    }
}

void BM_SesGridParallel(benchmark::State& state) {
    const auto y = series(static_cast<std::size_t>(state.range(0)));
    const auto g = grid(0.001, 0.001, 999);
    for (auto _ : state) {
        benchmark::DoNotOptimize(tsf::kernels::ses_grid_sse(y, g));
    }
}

void BM_HdesGridSerial(benchmark::State& state) {
    const auto y = series(static_cast<std::size_t>(state.range(0)));
    const auto g = grid(0.01, 0.01, 99);
    for (auto _ : state) {
        benchmark::DoNotOptimize(tsf::kernels::hdes_grid_sse_serial(y, g));
    }
}

void BM_HdesGridParallel(benchmark::State& state) {
    const auto y = series(static_cast<std::size_t>(state.range(0)));
    const auto g = grid(0.01, 0.01, 99);
    for (auto _ : state) {
        benchmark::DoNotOptimize(tsf::kernels::hdes_grid_sse(y, g));
    }
}

const tsf::SampleGenerator kNoise = [](std::mt19937_64& rng) {
    std::normal_distribution<double> z;
    std::vector<double> x(38);
    for (auto& v : x) {
        v = z(rng);
    }
    return x;
};
const tsf::RejectionRule kShapiro = [](std::span<const double> x) {
    return tsf::shapiro_wilk(x).reject_at_005;
};

void BM_MonteCarloSerial(benchmark::State& state) {
    for (auto _ : state) {
        benchmark::DoNotOptimize(tsf::rejection_rate_serial(kNoise, kShapiro, 2000, 1));
    }
}

void BM_MonteCarloParallel(benchmark::State& state) {
    for (auto _ : state) {
        benchmark::DoNotOptimize(tsf::rejection_rate(kNoise, kShapiro, 2000, 1));
    }
}

void BM_OrderSearchSerial(benchmark::State& state) {
    const tsf::TimeSeries s(1975, series(38));
    for (auto _ : state) {
        benchmark::DoNotOptimize(tsf::arima_order_search_serial(s, 2, 3, 3));
    }
}

void BM_OrderSearchParallel(benchmark::State& state) {
    const tsf::TimeSeries s(1975, series(38));
    for (auto _ : state) {
        benchmark::DoNotOptimize(tsf::arima_order_search(s, 2, 3, 3));
    }
}

}  // namespace

BENCHMARK(BM_SesGridSerial)->Arg(38)->Arg(1000);
BENCHMARK(BM_SesGridParallel)->Arg(38)->Arg(1000);
BENCHMARK(BM_HdesGridSerial)->Arg(38)->Arg(1000);
BENCHMARK(BM_HdesGridParallel)->Arg(38)->Arg(1000);
BENCHMARK(BM_MonteCarloSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MonteCarloParallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_OrderSearchSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_OrderSearchParallel)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
