#include <benchmark/benchmark.h>

#include "dh/cocycle.hpp"
#include "dh/model.hpp"
#include "dh/spectra.hpp"

#include <cmath>

namespace {

const double kGolden = (std::sqrt(5.0) - 1.0) / 2.0;

dh::ModelParams params(double w0, double w1) {
    dh::ModelParams p;
    p.w0 = w0;
    p.w1 = w1;
    p.alpha = kGolden;
    return p;
}

// One Floquet eigensolve: 4q x 4q Hermitian matrix, Bloch points per band.
void BM_FloquetSpectrum(benchmark::State& st) {
    const long q = st.range(0);
    const dh::ModelParams p = params(1.0, 0.5);
    for (auto _ : st) benchmark::DoNotOptimize(dh::floquet_spectrum(p, {1, q}, 4));
    st.SetComplexityN(q);
}
BENCHMARK(BM_FloquetSpectrum)->Arg(5)->Arg(13)->Arg(34)->Arg(89)->Unit(benchmark::kMillisecond);

// QR-reorthogonalised products of the 8x8 transfer cocycle.
void BM_CocycleIterate(benchmark::State& st) {
    const dh::TransferCocycle c{params(30.0, 0.0), 0.0, 0.0};
    for (auto _ : st) benchmark::DoNotOptimize(dh::iterate(c, 0.1, st.range(0)));
    st.SetItemsProcessed(st.iterations() * st.range(0));
}
BENCHMARK(BM_CocycleIterate)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

// log|det(H - E)| of an N-site truncation by banded LU.
void BM_BandedLogdet(benchmark::State& st) {
    const long n = st.range(0);
    const dh::ModelParams p = params(30.0, 0.0);
    for (auto _ : st) {
        const auto band = dh::build_finite_shifted_band(p, {0, n - 1}, dh::Boundary::minus, {0.3, 0.0});
        benchmark::DoNotOptimize(band.logdet());
    }
    st.SetItemsProcessed(st.iterations() * n);
}
BENCHMARK(BM_BandedLogdet)->Arg(500)->Arg(2000)->Arg(8000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
