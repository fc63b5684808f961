#pragma once

// Shared fixtures for the test binaries.

#include "scacsp/preprocess.hpp"
#include "scacsp/synth.hpp"

#include <cmath>
#include <cstdint>
#include <vector>

namespace test_support {

using scacsp::Matrix;
using scacsp::Vector;

/// Seeded trials from well-conditioned class covariances sharing a rotation.
inline scacsp::TrialSet make_trials(Eigen::Index channels, int classes, int per_class, std::uint64_t seed,
                                    double separation = 1.0, Eigen::Index samples = 0, double jitter = 0.0) {
    scacsp::synth::SynthSpec spec;
    spec.n_channels = channels;
    spec.n_samples = samples > 0 ? samples : 4 * channels + 20;
    spec.trials_per_class = per_class;
    spec.class_covariances = scacsp::synth::separated_class_covariances(channels, classes, separation, seed ^ 0xC0FFEE);
    spec.nonstationarity = jitter;
    spec.seed = seed;
    return scacsp::synth::generate(spec);
}

inline scacsp::CovarianceSet make_cov_set(Eigen::Index channels, int classes, int per_class, std::uint64_t seed,
                                          double separation = 1.0, Eigen::Index samples = 0, double jitter = 0.0) {
    return scacsp::covariances(make_trials(channels, classes, per_class, seed, separation, samples, jitter));
}

/// Smallest, over the columns of a, of the best |cosine| to any column of b.
inline double worst_column_match(const Matrix& a, const Matrix& b) {
    double worst = 1.0;
    for (Eigen::Index i = 0; i < a.cols(); ++i) {
        double best = 0.0;
        for (Eigen::Index j = 0; j < b.cols(); ++j) {
            const double c = std::abs(a.col(i).dot(b.col(j))) / (a.col(i).norm() * b.col(j).norm());
            best = std::max(best, c);
        }
        worst = std::min(worst, best);
    }
    return worst;
}

inline double rel_fro(const Matrix& a, const Matrix& b) {
    const double scale = std::max(a.norm(), b.norm());
    return scale == 0.0 ? 0.0 : (a - b).norm() / scale;
}

/// Random symmetric matrix with N(0,1) upper entries.
inline Matrix random_symmetric(Eigen::Index n, std::uint64_t seed) {
    scacsp::synth::Rng rng(seed);
    const Matrix g = rng.gaussian_matrix(n, n);
    return 0.5 * (g + g.transpose());
}

inline Matrix random_spd(Eigen::Index n, std::uint64_t seed, double condition = 10.0) {
    scacsp::synth::Rng rng(seed);
    return scacsp::synth::random_spd(n, rng, condition);
}

}  // namespace test_support
