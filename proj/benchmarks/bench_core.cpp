#include <benchmark/benchmark.h>

#include "eqgh/metric_core.hpp"
#include "eqgh/shadowing.hpp"
#include "eqgh/systems.hpp"
#include "eqgh/wasserstein.hpp"

namespace {

using namespace eqgh;

SpacePtr random_space(std::uint64_t seed, std::size_t n) {
    std::vector<double> d(n * n, 0.0);
    std::uint64_t state = seed;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            d[i * n + j] = d[j * n + i] = 1.0 + static_cast<double>(splitmix64(state) % 5);
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                d[i * n + j] = std::min(d[i * n + j], d[i * n + k] + d[k * n + j]);
    std::vector<std::string> ids(n);
    for (std::size_t i = 0; i < n; ++i) ids[i] = std::to_string(i);
    return FiniteMetricSpace::from_matrix(std::move(ids), std::move(d));
}

void GhExact(benchmark::State& state) {
    const auto x = random_space(1, state.range(0));
    const auto y = random_space(2, state.range(0));
    for (auto _ : state) {
        auto r = gh_exact(*x, *y);
        benchmark::DoNotOptimize(r.upper);
    }
}
BENCHMARK(GhExact)->DenseRange(3, 6);

void GhaSearch(benchmark::State& state) {
    const auto x = random_space(3, state.range(0));
    const auto y = random_space(4, state.range(0));
    for (auto _ : state) {
        auto r = gha_search(x, y, 20000);
        benchmark::DoNotOptimize(r.epsilon);
    }
}
BENCHMARK(GhaSearch)->RangeMultiplier(2)->Range(8, 32);

void WassersteinFlow(benchmark::State& state) {
    const auto circle = make_circle(1.0, state.range(0));
    std::uint64_t rng = 9;
    std::vector<double> w1(circle->size()), w2(circle->size());
    for (auto& v : w1) v = uniform01(rng) + 1e-3;
    for (auto& v : w2) v = uniform01(rng) + 1e-3;
    const DiscreteMeasure mu(circle, w1), nu(circle, w2);
    for (auto _ : state) {
        auto r = wasserstein(mu, nu, 2.0);
        benchmark::DoNotOptimize(r.value);
    }
}
BENCHMARK(WassersteinFlow)->RangeMultiplier(2)->Range(16, 256);

void Shadowing(benchmark::State& state) {
    const Mat2i cat{2, 1, 1, 1};
    const TorusSystem sys(GeneratedGroup::z(), {cat});
    const auto po = make_pseudo_orbit(sys, 1e-3, state.range(0), 5);
    for (auto _ : state) {
        auto tr = shadow_hyperbolic_toral(po, cat);
        benchmark::DoNotOptimize(tr.epsilon);
    }
}
BENCHMARK(Shadowing)->RangeMultiplier(2)->Range(25, 100);

}  // namespace

BENCHMARK_MAIN();
