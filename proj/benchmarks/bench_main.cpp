#include "affrep/connection.hpp"
#include "affrep/poly.hpp"
#include "affrep/representability.hpp"

#include <benchmark/benchmark.h>

#include <functional>

#include <random>

using namespace affrep;

namespace {

Poly dense(std::size_t m, unsigned degree, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<Term> terms;
    std::vector<unsigned> e(m, 0);
    // every monomial of total degree <= degree, coefficients p/q with small p, q
    std::function<void(std::size_t, unsigned)> fill = [&](std::size_t k, unsigned left) {
        if (k == m) {
            Rational c(static_cast<long>(rng() % 19) - 9, static_cast<long>(rng() % 5) + 1);
            c.canonicalize();
            terms.push_back({Monomial(e), c});
            return;
        }
        for (unsigned d = 0; d <= left; ++d) {
            e[k] = d;
            fill(k + 1, left - d);
        }
        e[k] = 0;
    };
    fill(0, degree);
    return Poly::from_terms(m, std::move(terms));
}

void BM_PolyMultiply(benchmark::State& state) {
    const auto degree = static_cast<unsigned>(state.range(0));
    const Poly a = dense(4, degree, 1), b = dense(4, degree, 2);
    for (auto _ : state) benchmark::DoNotOptimize(a * b);
    state.counters["terms"] = static_cast<double>(a.size());
}
BENCHMARK(BM_PolyMultiply)->Arg(2)->Arg(4)->Arg(6)->Unit(benchmark::kMicrosecond);

void BM_CurvatureAtOrigin(benchmark::State& state) {
    const auto m = static_cast<std::size_t>(state.range(0));
    const auto c = represent_generic(random_operator(m, OperatorClass::Generic, 3));
    for (auto _ : state) benchmark::DoNotOptimize(curvature_at_origin(c));
}
BENCHMARK(BM_CurvatureAtOrigin)->DenseRange(3, 5)->Unit(benchmark::kMicrosecond);

void BM_RicciFlatSeries(benchmark::State& state) {
    const auto m = static_cast<std::size_t>(state.range(0));
    const auto layers = static_cast<std::size_t>(state.range(1));
    const auto a = random_operator(m, OperatorClass::RicciFlat, 5);
    for (auto _ : state) benchmark::DoNotOptimize(ricci_flat_series(a, layers));
}
BENCHMARK(BM_RicciFlatSeries)->Args({3, 3})->Args({3, 4})->Args({4, 3})->Args({4, 4})->Unit(benchmark::kMillisecond);

void BM_RicciFieldOfTruncation(benchmark::State& state) {
    const auto layers = static_cast<std::size_t>(state.range(0));
    const auto t = ricci_flat_series(random_operator(4, OperatorClass::RicciFlat, 5), layers).truncation();
    for (auto _ : state) benchmark::DoNotOptimize(ricci_field(t));
}
BENCHMARK(BM_RicciFieldOfTruncation)->DenseRange(2, 4)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
