#pragma once

// Seeded synthetic trials: X_i = L_i·Z with Z standard Gaussian and
// L_i L_iᵀ the trial covariance.
//
// Random source: std::mt19937_64 (fully specified by the C++ standard),
// seeded per trial with splitmix64(seed, trial index). Uniforms are
// (x >> 11)·2⁻⁵³; Gaussians come from the Box-Muller transform in pairs.
// Per trial the draws are, in order: one uniform for the outlier decision,
// N_c² Gaussians for the jitter matrix (row-major, only when jitter > 0),
// then N_c·N_t Gaussians for Z (row-major).

#include "scacsp/preprocess.hpp"

#include <cstdint>
#include <random>
#include <vector>

namespace scacsp::synth {

std::uint64_t splitmix64(std::uint64_t& state);
/// Seed for trial `index` under master seed `seed`.
std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t index);

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}
    /// [0, 1)
    double uniform();
    double gaussian();
    /// rows × cols, filled row by row.
    Matrix gaussian_matrix(Eigen::Index rows, Eigen::Index cols);

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

struct SynthSpec {
    Eigen::Index n_channels = 0;
    Eigen::Index n_samples = 0;
    int trials_per_class = 0;
    std::vector<Matrix> class_covariances;
    double nonstationarity = 0.0;  // jitter scale: L_i = L_k (I + jitter·G)
    double outlier_rate = 0.0;     // probability a trial is an outlier
    double outlier_scale = 1.0;    // factor applied to an outlier's L_i
    std::uint64_t seed = 0;
    double fs = 250.0;

    /// Throws InvalidArgument; DefinitenessError for a non-SPD class covariance.
    void validate() const;
};

/// Trials interleaved by class (trial i has class i mod N_Ω + 1), rows centered.
TrialSet generate(const SynthSpec& spec);

/// Random SPD matrix Q·diag(e)·Qᵀ with eigenvalues log-uniform in [1, condition].
Matrix random_spd(Eigen::Index n, Rng& rng, double condition = 10.0);
/// Random orthogonal matrix (QR of a Gaussian matrix, sign-fixed).
Matrix random_orthogonal(Eigen::Index n, Rng& rng);

/// Class covariances Q·D_k·Qᵀ sharing a random rotation Q; D_k boosts by
/// (1 + separation) the channels j with j mod N_Ω = k − 1.
std::vector<Matrix> separated_class_covariances(Eigen::Index n_channels, int class_count, double separation,
                                                std::uint64_t seed);

}  // namespace scacsp::synth
