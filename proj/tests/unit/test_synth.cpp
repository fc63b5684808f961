#include "scacsp/error.hpp"
#include "scacsp/synth.hpp"
#include "support.hpp"

#include <catch_amalgamated.hpp>

using namespace scacsp;

TEST_CASE("splitmix64 reference values", "[synth]") {
    // first outputs for state 0 from the published reference implementation
    std::uint64_t state = 0;
    CHECK(synth::splitmix64(state) == 0xE220A8397B1DCDAFULL);
    CHECK(synth::splitmix64(state) == 0x6E789E6AA1B965F4ULL);
    CHECK(synth::splitmix64(state) == 0x06C45D188009454FULL);
}

TEST_CASE("uniform and gaussian draws are well-formed", "[synth]") {
    synth::Rng rng(1234);
    double sum = 0.0, sq = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double u = rng.uniform();
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
    }
    for (int i = 0; i < n; ++i) {
        const double g = rng.gaussian();
        sum += g;
        sq += g * g;
    }
    CHECK(std::abs(sum / n) < 0.01);
    CHECK(std::abs(sq / n - 1.0) < 0.02);
}

TEST_CASE("generate is deterministic and seed dependent", "[synth]") {
    const TrialSet a = test_support::make_trials(4, 3, 5, 77, 1.0, 50, 0.1);
    const TrialSet b = test_support::make_trials(4, 3, 5, 77, 1.0, 50, 0.1);
    const TrialSet c = test_support::make_trials(4, 3, 5, 78, 1.0, 50, 0.1);
    REQUIRE(a.size() == 15);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a.trials[i] == b.trials[i]);
    CHECK(a.trials[0] != c.trials[0]);
    CHECK(a.labels == std::vector<int>{1, 2, 3, 1, 2, 3, 1, 2, 3, 1, 2, 3, 1, 2, 3});
    for (const auto& x : a.trials) CHECK(x.rowwise().mean().cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("generated trials follow the class covariance", "[synth]") {
    synth::SynthSpec spec;
    spec.n_channels = 3;
    spec.n_samples = 20000;
    spec.trials_per_class = 1;
    Matrix c(3, 3);
    c << 4, 1, 0, 1, 2, 0.5, 0, 0.5, 1;
    spec.class_covariances = {c, Matrix::Identity(3, 3)};
    spec.seed = 5;
    const TrialSet t = synth::generate(spec);
    const Matrix est = t.trials[0] * t.trials[0].transpose() / (spec.n_samples - 1.0);
    CHECK((est - c).norm() / c.norm() < 0.05);
}

TEST_CASE("trial draws are independent of earlier trials", "[synth]") {
    synth::SynthSpec spec;
    spec.n_channels = 3;
    spec.n_samples = 40;
    spec.trials_per_class = 4;
    spec.class_covariances = synth::separated_class_covariances(3, 2, 1.0, 1);
    spec.seed = 9;
    const TrialSet full = synth::generate(spec);
    spec.trials_per_class = 2;
    const TrialSet half = synth::generate(spec);
    for (std::size_t i = 0; i < half.size(); ++i) CHECK(half.trials[i] == full.trials[i]);
}

TEST_CASE("outliers and jitter change trial scale", "[synth]") {
    synth::SynthSpec spec;
    spec.n_channels = 2;
    spec.n_samples = 500;
    spec.trials_per_class = 50;
    spec.class_covariances = {Matrix::Identity(2, 2), Matrix::Identity(2, 2)};
    spec.outlier_rate = 0.5;
    spec.outlier_scale = 10.0;
    spec.seed = 3;
    const TrialSet t = synth::generate(spec);
    int big = 0;
    for (const auto& x : t.trials) big += x.squaredNorm() / x.size() > 20.0;
    CHECK(big > 25);
    CHECK(big < 75);
}

TEST_CASE("spec validation", "[synth]") {
    synth::SynthSpec spec;
    spec.n_channels = 2;
    spec.n_samples = 10;
    spec.trials_per_class = 1;
    CHECK_THROWS_AS(spec.validate(), InvalidArgument);
    spec.class_covariances = {Matrix::Identity(2, 2)};
    CHECK_NOTHROW(spec.validate());
    spec.class_covariances.push_back(-Matrix::Identity(2, 2));
    CHECK_THROWS_AS(spec.validate(), DefinitenessError);
    spec.class_covariances[1] = Matrix::Identity(3, 3);
    CHECK_THROWS_AS(spec.validate(), InvalidArgument);

    const auto covs = synth::separated_class_covariances(6, 3, 2.0, 4);
    REQUIRE(covs.size() == 3);
    for (const auto& c : covs) CHECK(sym_eig(c).values.minCoeff() > 0.0);
    synth::Rng rng(1);
    const Matrix q = synth::random_orthogonal(5, rng);
    CHECK((q.transpose() * q - Matrix::Identity(5, 5)).norm() <= 1e-12);
}
