// Serial reference vs OpenMP kernels. Sizes are chain dimensions 2^n.

#include <benchmark/benchmark.h>

#include "sparselr/disorder.hpp"
#include "sparselr/dynamics.hpp"
#include "sparselr/harness.hpp"
#include "sparselr/kernels.hpp"
#include "sparselr/pauli.hpp"

using namespace sparselr;
namespace ks = sparselr::kernels::serial;
namespace kp = sparselr::kernels::parallel;

namespace {

Matrix rnd(Index n, std::uint64_t seed) {
    SplitMix64 rng(seed);
    return random_matrix(n, rng);
}

RealVector rnd_spectrum(Index n) {
    RealVector e(n);
    SplitMix64 rng(7);
    for (Index i = 0; i < n; ++i) e(i) = 10.0 * rng.uniform();
    return e;
}

template <Matrix (*K)(const Matrix&, const Matrix&)>
void BM_multiply(benchmark::State& st) {
    const Index n = st.range(0);
    const Matrix a = rnd(n, 1), b = rnd(n, 2);
    for (auto _ : st) benchmark::DoNotOptimize(K(a, b));
    st.SetItemsProcessed(st.iterations() * n * n * n);
}

template <Matrix (*K)(const Matrix&, Index, Index)>
void BM_pad(benchmark::State& st) {
    const Index n = st.range(0);
    const Matrix a = rnd(4, 3);
    for (auto _ : st) benchmark::DoNotOptimize(K(a, n / 8, 2));
}

template <Matrix (*K)(const Matrix&, Index, Index, Index)>
void BM_trace(benchmark::State& st) {
    const Index n = st.range(0);
    const Matrix a = rnd(n, 4);
    for (auto _ : st) benchmark::DoNotOptimize(K(a, 2, n / 8, 4));
}

template <void (*K)(Matrix&, const RealVector&, double)>
void BM_phases(benchmark::State& st) {
    const Index n = st.range(0);
    Matrix a = rnd(n, 5);
    const RealVector e = rnd_spectrum(n);
    for (auto _ : st) {
        K(a, e, 0.37);
        benchmark::ClobberMemory();
    }
}

void BM_kron_serial(benchmark::State& st) {
    const Index n = st.range(0);
    const Matrix a = rnd(n / 4, 6), b = rnd(4, 7);
    for (auto _ : st) benchmark::DoNotOptimize(ks::kron(a, b));
}

void BM_kron_parallel(benchmark::State& st) {
    const Index n = st.range(0);
    const Matrix a = rnd(n / 4, 6), b = rnd(4, 7);
    for (auto _ : st) benchmark::DoNotOptimize(kp::kron(a, b));
}

// One Heisenberg evolution on a Heisenberg chain of 2L+1 sites.
void BM_evolve(benchmark::State& st) {
    const int L = static_cast<int>(st.range(0));
    const ChainGeometry geom(L, 2);
    const NNInteraction phi = NNInteraction::translation_invariant(pauli::heisenberg_bond(1.0), geom);
    const EvolutionContext ctx(build_nn_hamiltonian(phi, geom));
    const Matrix a = embed_full(DenseOperator(SiteSupport::site(-L), pauli::sz(), 2), geom).matrix();
    for (auto _ : st) benchmark::DoNotOptimize(ctx.evolve(a, 0.5));
}

}  // namespace

BENCHMARK(BM_multiply<ks::multiply>)->Name("multiply/serial")->Arg(128)->Arg(256)->Arg(512);
BENCHMARK(BM_multiply<kp::multiply>)->Name("multiply/parallel")->Arg(128)->Arg(256)->Arg(512);
BENCHMARK(BM_pad<ks::pad_identity>)->Name("pad_identity/serial")->Arg(256)->Arg(1024);
BENCHMARK(BM_pad<kp::pad_identity>)->Name("pad_identity/parallel")->Arg(256)->Arg(1024);
BENCHMARK(BM_trace<ks::trace_outer>)->Name("trace_outer/serial")->Arg(256)->Arg(1024);
BENCHMARK(BM_trace<kp::trace_outer>)->Name("trace_outer/parallel")->Arg(256)->Arg(1024);
BENCHMARK(BM_phases<ks::apply_phases>)->Name("apply_phases/serial")->Arg(256)->Arg(1024);
BENCHMARK(BM_phases<kp::apply_phases>)->Name("apply_phases/parallel")->Arg(256)->Arg(1024);
BENCHMARK(BM_kron_serial)->Name("kron/serial")->Arg(256)->Arg(1024);
BENCHMARK(BM_kron_parallel)->Name("kron/parallel")->Arg(256)->Arg(1024);
BENCHMARK(BM_evolve)->Name("evolve")->Arg(3)->Arg(4);

BENCHMARK_MAIN();
