#include <benchmark/benchmark.h>

#include "csflow/dynamics.hpp"
#include "csflow/quantum.hpp"
#include "csflow/synth.hpp"

using namespace csflow;

namespace {

LinearHamiltonian su3_h() {
    LinearHamiltonian h;
    for (int i = 1; i <= 3; ++i)
        for (int j = 1; j <= 3; ++j) {
            std::string l = "C" + std::to_string(i) + std::to_string(j);
            h.eps[l] = i == j ? cplx(0.3 * i) : cplx(0.2, i < j ? 0.1 : -0.1);
        }
    return h;
}

void BM_SynthA(benchmark::State& s) {
    const int rank = static_cast<int>(s.range(0));
    for (auto _ : s) benchmark::DoNotOptimize(synth_a_series(rank, Chart::Matrix));
}
BENCHMARK(BM_SynthA)->DenseRange(1, 4)->Unit(benchmark::kMillisecond);

void BM_AssembleSu3(benchmark::State& s) {
    auto rep = synth_su3(Chart::Matrix);
    auto h = su3_h();
    for (auto _ : s) benchmark::DoNotOptimize(assemble_rhs(rep, h));
}
BENCHMARK(BM_AssembleSu3)->Unit(benchmark::kMicrosecond);

void BM_IntegrateSu3(benchmark::State& s) {
    auto field = assemble_rhs(synth_su3(Chart::Matrix), su3_h());
    IntegratorOptions opt;
    opt.rtol = 1e-10;
    opt.atol = 1e-12;
    for (auto _ : s) benchmark::DoNotOptimize(integrate(field, {0.3, cplx(0.1, 0.2), -0.2}, 5.0, opt));
}
BENCHMARK(BM_IntegrateSu3)->Unit(benchmark::kMillisecond);

void BM_KahlerMetricSu3(benchmark::State& s) {
    auto spec = KernelSpec::su3(2, 1);
    CVec z{0.3, cplx(0.1, 0.2), -0.2};
    for (auto _ : s) benchmark::DoNotOptimize(kahler_metric(spec, z));
}
BENCHMARK(BM_KahlerMetricSu3)->Unit(benchmark::kMicrosecond);

} // namespace

BENCHMARK_MAIN();
