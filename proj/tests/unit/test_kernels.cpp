#include "scacsp/kernels.hpp"
#include "scacsp/preprocess.hpp"
#include "support.hpp"

#include <catch_amalgamated.hpp>

using namespace scacsp;

namespace {

std::vector<Matrix> random_trials(int count, Eigen::Index channels, Eigen::Index samples, std::uint64_t seed) {
    synth::Rng rng(seed);
    std::vector<Matrix> out;
    for (int i = 0; i < count; ++i) {
        Matrix x = rng.gaussian_matrix(channels, samples);
        center_rows(x);
        out.push_back(std::move(x));
    }
    return out;
}

struct ThreadScope {
    explicit ThreadScope(int n) { kernels::set_thread_count(n); }
    ~ThreadScope() { kernels::set_thread_count(0); }
};

}  // namespace

TEST_CASE("parallel kernels are bit-identical to the serial reference", "[kernels]") {
    const auto trials = random_trials(37, 7, 120, 5);
    const Matrix w = test_support::random_symmetric(7, 8).leftCols(4);
    const Matrix p = test_support::random_spd(7, 9);
    const BandpassSpec band{};
    const auto sections = butterworth_bandpass_sections(band);

    const auto covs_ref = kernels::serial::trial_covariances(trials);
    const Matrix vecs_ref = kernels::serial::whitened_vecs(covs_ref, p);
    const Matrix quad_ref = kernels::serial::quadratic_features(w, covs_ref);
    const Matrix var_ref = kernels::serial::projected_variances(w, trials);
    const Matrix filt_ref = kernels::serial::filter_rows(trials[0], sections);

    for (int threads : {1, 2, 3, 4}) {
        ThreadScope scope(threads);
        const auto covs = kernels::parallel::trial_covariances(trials);
        REQUIRE(covs.size() == covs_ref.size());
        for (std::size_t i = 0; i < covs.size(); ++i) CHECK(covs[i] == covs_ref[i]);
        CHECK(kernels::parallel::whitened_vecs(covs, p) == vecs_ref);
        CHECK(kernels::parallel::quadratic_features(w, covs) == quad_ref);
        CHECK(kernels::parallel::projected_variances(w, trials) == var_ref);
        CHECK(kernels::parallel::filter_rows(trials[0], sections) == filt_ref);
    }
}

TEST_CASE("covariance kernel uses the unbiased normalization", "[kernels]") {
    Matrix x(2, 4);
    x << 1, -1, 2, -2, 0.5, 0.5, -0.5, -0.5;
    const std::vector<Matrix> trials{x};
    const Matrix c = kernels::trial_covariances(trials)[0];
    CHECK(c(0, 0) == Catch::Approx(10.0 / 3.0));
    CHECK(c(0, 1) == 0.0);
    CHECK(c(1, 1) == Catch::Approx(1.0 / 3.0));
}

TEST_CASE("projected variances equal quadratic forms of the covariance", "[kernels]") {
    const auto trials = random_trials(10, 5, 80, 77);
    const auto covs = kernels::trial_covariances(trials);
    const Matrix w = test_support::random_symmetric(5, 4).leftCols(3);
    const Matrix a = kernels::quadratic_features(w, covs);
    const Matrix b = kernels::projected_variances(w, trials);
    CHECK(test_support::rel_fro(a, b) <= 1e-12);
}

TEST_CASE("thread count honours overrides", "[kernels]") {
    {
        ThreadScope scope(3);
#ifdef _OPENMP
        CHECK(kernels::thread_count() == 3);
#else
        CHECK(kernels::thread_count() == 1);
#endif
    }
    CHECK(kernels::thread_count() >= 1);
}
