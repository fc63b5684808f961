// Serial reference vs OpenMP kernels on a 22-channel, 288-trial workload.
// SCACSP_THREADS selects the parallel thread count.

#include "scacsp/kernels.hpp"
#include "scacsp/preprocess.hpp"
#include "scacsp/synth.hpp"

#include <benchmark/benchmark.h>

using namespace scacsp;

namespace {

struct Workload {
    std::vector<Matrix> trials;
    std::vector<Matrix> covs;
    Matrix whitener;
    Matrix filters;
    Matrix continuous;
    std::vector<kernels::Biquad> sections;

    Workload() {
        synth::Rng rng(7);
        const Eigen::Index channels = 22, samples = 500;
        for (int i = 0; i < 288; ++i) {
            Matrix x = rng.gaussian_matrix(channels, samples);
            center_rows(x);
            trials.push_back(std::move(x));
        }
        covs = kernels::serial::trial_covariances(trials);
        Matrix composite = Matrix::Zero(channels, channels);
        for (const auto& c : covs) composite += c;
        whitener = whitening_transform(composite / static_cast<double>(covs.size()));
        filters = rng.gaussian_matrix(channels, 9);
        continuous = rng.gaussian_matrix(channels, 100000);
        sections = butterworth_bandpass_sections(BandpassSpec{});
    }
};

const Workload& workload() {
    static const Workload w;
    return w;
}

void covariances_serial(benchmark::State& state) {
    const auto& w = workload();
    for (auto _ : state) benchmark::DoNotOptimize(kernels::serial::trial_covariances(w.trials));
}
void covariances_parallel(benchmark::State& state) {
    const auto& w = workload();
    for (auto _ : state) benchmark::DoNotOptimize(kernels::parallel::trial_covariances(w.trials));
}

void whitened_vecs_serial(benchmark::State& state) {
    const auto& w = workload();
    for (auto _ : state) benchmark::DoNotOptimize(kernels::serial::whitened_vecs(w.covs, w.whitener));
}
void whitened_vecs_parallel(benchmark::State& state) {
    const auto& w = workload();
    for (auto _ : state) benchmark::DoNotOptimize(kernels::parallel::whitened_vecs(w.covs, w.whitener));
}

void quadratic_serial(benchmark::State& state) {
    const auto& w = workload();
    for (auto _ : state) benchmark::DoNotOptimize(kernels::serial::quadratic_features(w.filters, w.covs));
}
void quadratic_parallel(benchmark::State& state) {
    const auto& w = workload();
    for (auto _ : state) benchmark::DoNotOptimize(kernels::parallel::quadratic_features(w.filters, w.covs));
}

void projected_serial(benchmark::State& state) {
    const auto& w = workload();
    for (auto _ : state) benchmark::DoNotOptimize(kernels::serial::projected_variances(w.filters, w.trials));
}
void projected_parallel(benchmark::State& state) {
    const auto& w = workload();
    for (auto _ : state) benchmark::DoNotOptimize(kernels::parallel::projected_variances(w.filters, w.trials));
}

void bandpass_serial(benchmark::State& state) {
    const auto& w = workload();
    for (auto _ : state) benchmark::DoNotOptimize(kernels::serial::filter_rows(w.continuous, w.sections));
}
void bandpass_parallel(benchmark::State& state) {
    const auto& w = workload();
    for (auto _ : state) benchmark::DoNotOptimize(kernels::parallel::filter_rows(w.continuous, w.sections));
}

}  // namespace

BENCHMARK(covariances_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(covariances_parallel)->Unit(benchmark::kMillisecond);
BENCHMARK(whitened_vecs_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(whitened_vecs_parallel)->Unit(benchmark::kMillisecond);
BENCHMARK(quadratic_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(quadratic_parallel)->Unit(benchmark::kMillisecond);
BENCHMARK(projected_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(projected_parallel)->Unit(benchmark::kMillisecond);
BENCHMARK(bandpass_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(bandpass_parallel)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
