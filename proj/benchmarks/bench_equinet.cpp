#include <benchmark/benchmark.h>

#include "equinet/charge_convnet.hpp"
#include "equinet/invariant_nets.hpp"
#include "equinet/local_ops.hpp"

using namespace equinet;

static void BM_Dft2(benchmark::State& state) {
    int L = static_cast<int>(state.range(0));
    Rng rng(1);
    Signal s = random_signal(GridSpec{0.5, L}, 1, Field::Complex, rng);
    for (auto _ : state) benchmark::DoNotOptimize(dft2(s));
    state.SetComplexityN(2 * L + 1);
}
BENCHMARK(BM_Dft2)->Arg(8)->Arg(16)->Arg(32)->Arg(64)->Complexity();

static void BM_SmoothChain(benchmark::State& state) {
    double lam = 1.0 / static_cast<double>(state.range(0));
    int n = smoothing_chain_length(lam);
    Rng rng(2);
    Signal s = random_signal(GridSpec{lam, n + 8}, 1, Field::Complex, rng);
    for (auto _ : state) benchmark::DoNotOptimize(smooth_chain(s));
}
BENCHMARK(BM_SmoothChain)->Arg(1)->Arg(2)->Arg(4);

static void BM_KernelGap(benchmark::State& state) {
    double lam = 1.0 / static_cast<double>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(kernel_gap(1, 0, lam));
}
BENCHMARK(BM_KernelGap)->Arg(1)->Arg(2)->Arg(4);

static void BM_SymmetricNetEval(benchmark::State& state) {
    int width = static_cast<int>(state.range(0));
    Rng rng(3);
    SymNetWeights w = SymNetWeights::random(width, 24, 3, rng);
    for (double& v : w.c) v = rng.pm1();
    RealMatrix X(6, 3);
    for (double& v : X.data) v = rng.pm1();
    for (auto _ : state) benchmark::DoNotOptimize(symmetric_net_eval(w, X));
}
BENCHMARK(BM_SymmetricNetEval)->Arg(8)->Arg(32)->Arg(128);

static void BM_ChargeForward(benchmark::State& state) {
    double lam = 1.0 / static_cast<double>(state.range(0));
    Rng rng(4);
    ChargeConvNetSpec spec = ChargeConvNetSpec::random(lam, 1.0, 2, 2, 4, 1, rng);
    Signal in = random_signal(GridSpec{lam, spec.in_half_width()}, 1, Field::Real, rng);
    for (auto _ : state) benchmark::DoNotOptimize(forward_signal(spec, in));
}
BENCHMARK(BM_ChargeForward)->Arg(2)->Arg(4)->Arg(8);

BENCHMARK_MAIN();
