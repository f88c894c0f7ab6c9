#include <benchmark/benchmark.h>

#include <cmath>

#include "sinet/bits.hpp"
#include "sinet/gadgets.hpp"
#include "sinet/sis.hpp"
#include "sinet/splines.hpp"

using namespace sinet;

namespace {

SisFunction sample_hat_sis(int j) {
    SisFunction g;
    g.j = j;
    g.generator = bspline_generator(2, 1);
    for (long n = -1; n < (1L << j); ++n) g.coeffs[{n}] = frac((n + 1) * 37 % 63 - 31, 32);
    return g;
}

ApproxParams desk_params(int j) {
    ApproxParams p;
    p.r = p.s = 2;
    p.r_tilde = p.s_tilde = 4;
    p.epsilon = pow2(-6);
    p.delta = pow2(-j - 2);
    return p;
}

}  // namespace

static void BM_Mid3Float(benchmark::State& state) {
    ReluNet net = mid3();
    Vec x{0.3, -1.25, 2.5};
    for (auto _ : state) benchmark::DoNotOptimize(net.eval(x));
}
BENCHMARK(BM_Mid3Float);

static void BM_Mid3Rational(benchmark::State& state) {
    ReluNet net = mid3();
    RVec x{frac(3, 10), frac(-5, 4), frac(5, 2)};
    for (auto _ : state) benchmark::DoNotOptimize(net.eval(x));
}
BENCHMARK(BM_Mid3Rational);

static void BM_SquareFloat(benchmark::State& state) {
    ReluNet net = square_approx(static_cast<int>(state.range(0)));
    Vec x{0.377};
    for (auto _ : state) benchmark::DoNotOptimize(net.eval(x));
}
BENCHMARK(BM_SquareFloat)->Arg(4)->Arg(8)->Arg(16);

static void BM_ProductFloat(benchmark::State& state) {
    const int k = static_cast<int>(state.range(0));
    ReluNet net = product_approx(k, 2, 1);
    Vec x(k, 0.61);
    for (auto _ : state) benchmark::DoNotOptimize(net.eval(x));
}
BENCHMARK(BM_ProductFloat)->DenseRange(2, 4);

static void BM_SplitBitsRational(benchmark::State& state) {
    ReluNet net = split_weighted_bits(8, pow2(-10), static_cast<int>(state.range(0)), 4);
    RVec x{frac(173, 256) + frac(1, 1024)};
    for (auto _ : state) benchmark::DoNotOptimize(net.eval(x));
}
BENCHMARK(BM_SplitBitsRational)->DenseRange(1, 3);

static void BM_BsplineNetFloat(benchmark::State& state) {
    ReluNet net = bspline_net(static_cast<int>(state.range(0)), 1, 2, 1);
    Vec x{1.7};
    for (auto _ : state) benchmark::DoNotOptimize(net.eval(x));
}
BENCHMARK(BM_BsplineNetFloat)->Arg(3)->Arg(4);

static void BM_BuildQNet(benchmark::State& state) {
    const int j = static_cast<int>(state.range(0));
    SisFunction g = sample_hat_sis(j);
    GeneratorNet hat = bspline_phi0(2, 1, 1, 1);
    for (auto _ : state) benchmark::DoNotOptimize(build_q_net(g, desk_params(j), hat.net, hat.error));
}
BENCHMARK(BM_BuildQNet)->Arg(3)->Arg(4)->Unit(benchmark::kMillisecond);

static void BM_UniformNetFloat(benchmark::State& state) {
    const int j = static_cast<int>(state.range(0));
    SisFunction g = sample_hat_sis(j);
    GeneratorNet hat = bspline_phi0(2, 1, 1, 1);
    ReluNet net = build_uniform_net(g, desk_params(j), hat.net, hat.error);
    Vec x{0.4321};
    for (auto _ : state) benchmark::DoNotOptimize(net.eval(x));
}
BENCHMARK(BM_UniformNetFloat)->Arg(3)->Arg(4)->Unit(benchmark::kMicrosecond);

static void BM_UniformNetRational(benchmark::State& state) {
    SisFunction g = sample_hat_sis(3);
    GeneratorNet hat = bspline_phi0(2, 1, 1, 1);
    ReluNet net = build_uniform_net(g, desk_params(3), hat.net, hat.error);
    RVec x{frac(4321, 10000)};
    for (auto _ : state) benchmark::DoNotOptimize(net.eval(x));
}
BENCHMARK(BM_UniformNetRational)->Unit(benchmark::kMillisecond);

static void BM_EvalSis(benchmark::State& state) {
    SisFunction g = sample_hat_sis(6);
    Vec x{0.4321};
    for (auto _ : state) benchmark::DoNotOptimize(eval_sis(g, x));
}
BENCHMARK(BM_EvalSis);
BENCHMARK_MAIN();
