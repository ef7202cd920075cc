// Serial references against the OpenMP kernels. Each parallel kernel is
// checked against its serial reference once before timing starts.

#include <benchmark/benchmark.h>
#include <omp.h>

#include <cstdio>
#include <cstdlib>

#include "fraccurve/covariance.hpp"
#include "fraccurve/fracdiff.hpp"
#include "fraccurve/limitsim.hpp"
#include "fraccurve/rng.hpp"

using namespace fraccurve;

namespace {

Matrix shocks(std::size_t T, std::size_t p) {
    Rng rng(11);
    return gaussian_matrix(T, p, rng);
}

void require_close(const Matrix& a, const Matrix& b, double tol, const char* what) {
    const double err = (a - b).cwiseAbs().maxCoeff() / std::max(1.0, b.cwiseAbs().maxCoeff());
    if (err > tol) {
        std::fprintf(stderr, "%s: parallel kernel differs from serial reference (%g)\n", what, err);
        std::exit(1);
    }
}

void BM_FracFilterSerial(benchmark::State& st) {
    const Matrix x = shocks(static_cast<std::size_t>(st.range(0)), 25);
    for (auto _ : st) benchmark::DoNotOptimize(frac_filter_serial(x, 0.95));
}

void BM_FracFilterDirect(benchmark::State& st) {
    const Matrix x = shocks(static_cast<std::size_t>(st.range(0)), 25);
    for (auto _ : st) benchmark::DoNotOptimize(frac_filter_direct(x, 0.95));
}

void BM_FracFilterFft(benchmark::State& st) {
    const Matrix x = shocks(static_cast<std::size_t>(st.range(0)), 25);
    for (auto _ : st) benchmark::DoNotOptimize(frac_filter_fft(x, 0.95));
}

void BM_BartlettSerial(benchmark::State& st) {
    const Matrix z = shocks(1000, 25);
    const auto h = static_cast<std::size_t>(st.range(0));
    for (auto _ : st) benchmark::DoNotOptimize(bartlett_lrcov_serial(z, h));
}

void BM_BartlettParallel(benchmark::State& st) {
    const Matrix z = shocks(1000, 25);
    const auto h = static_cast<std::size_t>(st.range(0));
    for (auto _ : st) benchmark::DoNotOptimize(bartlett_lrcov(z, h));
}

/// Null-law sampler with the team size given by the second argument (1: serial reference).
void BM_NullSample(benchmark::State& st) {
    const int saved = omp_get_max_threads();
    omp_set_num_threads(static_cast<int>(st.range(0)));
    for (auto _ : st) benchmark::DoNotOptimize(simulate_null_sample({1, 2, 3, 4}, 0.95, 0.5, 1000, 500, 3));
    omp_set_num_threads(saved);
}

}  // namespace

BENCHMARK(BM_FracFilterSerial)->Arg(500)->Arg(2000)->Arg(8000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_FracFilterDirect)->Arg(500)->Arg(2000)->Arg(8000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_FracFilterFft)->Arg(500)->Arg(2000)->Arg(8000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BartlettSerial)->Arg(8)->Arg(16)->Arg(64)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_BartlettParallel)->Arg(8)->Arg(16)->Arg(64)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_NullSample)->DenseRange(1, 4, 1)->Unit(benchmark::kMillisecond)->UseRealTime();

int main(int argc, char** argv) {
    const Matrix x = shocks(3000, 6);
    require_close(frac_filter_direct(x, 0.95), frac_filter_serial(x, 0.95), 1e-10, "frac_filter_direct");
    require_close(frac_filter_fft(x, 0.95), frac_filter_serial(x, 0.95), 1e-10, "frac_filter_fft");
    const Matrix z = shocks(1000, 25);
    require_close(bartlett_lrcov(z, 16), bartlett_lrcov_serial(z, 16), 1e-12, "bartlett_lrcov");

    benchmark::Initialize(&argc, argv);
    if (benchmark::ReportUnrecognizedArguments(argc, argv)) return 1;
    benchmark::RunSpecifiedBenchmarks();
    benchmark::Shutdown();
    return 0;
}
