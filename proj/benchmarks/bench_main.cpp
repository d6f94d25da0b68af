#include <cmath>
#include <numbers>
#include <random>

#include <benchmark/benchmark.h>

#include "qcomb/bqc.hpp"
#include "qcomb/entropy.hpp"
#include "qcomb/fixtures.hpp"
#include "qcomb/gflow.hpp"
#include "qcomb/mbqc.hpp"
#include "qcomb/operators.hpp"
#include "qcomb/sdp.hpp"

using namespace qcomb;

namespace {

LabeledOperator random_operator(const SpaceLayout& l, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> n;
    const long d = l.total_dim();
    Mat m(d, d);
    for (long i = 0; i < d; ++i)
        for (long j = 0; j < d; ++j) m(i, j) = cplx(n(rng), n(rng));
    return LabeledOperator(l, m * m.adjoint());
}

void BM_PartialTrace(benchmark::State& st) {
    const auto op = random_operator(SpaceLayout({{"A", 4}, {"B", 4}, {"C", 4}}), 1);
    for (auto _ : st) benchmark::DoNotOptimize(partial_trace(op, {"B"}));
}
BENCHMARK(BM_PartialTrace);

void BM_LinkProduct(benchmark::State& st) {
    const auto m = random_operator(SpaceLayout({{"A", 2}, {"B", 4}}), 2);
    const auto n = random_operator(SpaceLayout({{"B", 4}, {"C", 2}}), 3);
    for (auto _ : st) benchmark::DoNotOptimize(link_product(m, n));
}
BENCHMARK(BM_LinkProduct);

void BM_EnumerateGflows(benchmark::State& st) {
    const auto g = fixtures::four_qubit_graph();
    for (auto _ : st) benchmark::DoNotOptimize(enumerate_gflows(g));
}
BENCHMARK(BM_EnumerateGflows);

void BM_BqcSingleRound(benchmark::State& st) {
    const BqcSetup s{fixtures::bqc_triangle(), {1, 2, 3}, closed_angle_set(fixtures::four_angle_seeds(), 4)};
    const auto d = build_D_client_sparse(s);
    for (auto _ : st) benchmark::DoNotOptimize(min_entropy_classical(d));
}
BENCHMARK(BM_BqcSingleRound)->Unit(benchmark::kMillisecond);

void BM_Helstrom(benchmark::State& st) {
    const double h = std::sqrt(0.5);
    Vec a(2), b(2);
    a << h, 0;
    b << 0.5, 0.5;
    for (auto _ : st) benchmark::DoNotOptimize(pure_state_guessing({a, b}));
}
BENCHMARK(BM_Helstrom);

void BM_CalibrationSdp(benchmark::State& st) {
    const auto cq = build_D_calibr(static_cast<int>(st.range(0)));
    for (auto _ : st) benchmark::DoNotOptimize(min_entropy(cq));
}
BENCHMARK(BM_CalibrationSdp)->Arg(2)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);

}  // namespace
