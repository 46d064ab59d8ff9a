#include <benchmark/benchmark.h>

#include "holopnt/geometry.hpp"
#include "holopnt/models.hpp"
#include "holopnt/spectral.hpp"

using namespace holopnt;

static void BM_EnumerateLayer(benchmark::State& state) {
    const fock::ModeSystem sys{static_cast<int>(state.range(0)), 0, {}};
    for (auto _ : state) {
        auto basis = fock::enumerate_layer(sys, 6);
        benchmark::DoNotOptimize(basis.size());
    }
}
BENCHMARK(BM_EnumerateLayer)->Arg(3)->Arg(5)->Arg(7);

static void BM_OperatorMatrix(benchmark::State& state) {
    const fock::ModeSystem sys{2, 0, static_cast<int>(state.range(0))};
    const fock::FockBasis basis = fock::enumerate_truncated(sys);
    const auto expr = fock::parse_expression(
        "a'(1) a'(1) a(1) a(1) + a'(2) a'(2) a(2) a(2) + 0.3 * a'(1) a(2) + 0.3 * a'(2) a(1)");
    for (auto _ : state) {
        auto m = fock::operator_matrix(expr, basis, {});
        benchmark::DoNotOptimize(m(0, 0));
    }
    state.SetComplexityN(basis.size());
}
BENCHMARK(BM_OperatorMatrix)->Arg(8)->Arg(14)->Arg(20)->Complexity();

static void BM_EigenBlocks(benchmark::State& state) {
    const model::ModelSpec spec = model::builtin("fcg4");
    const fock::FockBasis basis = fock::enumerate_layer(spec.system, state.range(0));
    ParameterPoint p;
    for (const auto& n : spec.parameter_names) p.set(n, 0.7);
    const CMatrix h = model::hamiltonian_at(spec, p, basis);
    for (auto _ : state) {
        auto blocks = spectral::eigen_blocks(h, 1e-9);
        benchmark::DoNotOptimize(blocks.size());
    }
}
BENCHMARK(BM_EigenBlocks)->Arg(2)->Arg(4)->Arg(6);

static void BM_KerrUnitary(benchmark::State& state) {
    const model::ModelSpec spec =
        model::builtin("kerr2", {.cutoff = static_cast<int>(state.range(0))});
    const fock::FockBasis basis = fock::enumerate_truncated(spec.system);
    const ParameterPoint p{{"r1", 0.1},     {"r2", 0.1},     {"r3", 0.1},     {"r4", 0.3},
                           {"theta1", 0.2}, {"theta2", 0.4}, {"theta3", 0.6}, {"theta4", 0.7}};
    for (auto _ : state) {
        auto u = model::unitary_at(spec, p, basis);
        benchmark::DoNotOptimize(u(0, 0));
    }
}
BENCHMARK(BM_KerrUnitary)->Arg(10)->Arg(14)->Arg(20)->Unit(benchmark::kMillisecond);

static void BM_ConnectionLambda(benchmark::State& state) {
    const model::ModelSpec spec = model::builtin("lambda");
    const fock::FockBasis f1 = fock::enumerate_layer(spec.system, 1);
    const auto h0 = spectral::h0_blocks(spec, f1);
    const ParameterPoint p{{"theta", 0.6}, {"phi", 1.1}};
    for (auto _ : state) {
        auto conn = geometry::connection_isospectral(spec, f1, h0[1].frame, p);
        benchmark::DoNotOptimize(conn.components[0](0, 0));
    }
}
BENCHMARK(BM_ConnectionLambda);

BENCHMARK_MAIN();
