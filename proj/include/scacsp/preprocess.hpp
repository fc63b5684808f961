#pragma once

#include "scacsp/kernels.hpp"
#include "scacsp/linalg.hpp"

#include <string>
#include <vector>

namespace scacsp {

/// Labeled trials sharing one channel/sample layout. Class ids run 1..class_count.
struct TrialSet {
    std::vector<Matrix> trials;  // each channels × samples
    std::vector<int> labels;
    double fs = 0.0;
    int class_count = 0;
    std::vector<std::string> channel_names;

    std::size_t size() const { return trials.size(); }
    Eigen::Index channels() const { return trials.empty() ? 0 : trials.front().rows(); }
    Eigen::Index samples() const { return trials.empty() ? 0 : trials.front().cols(); }

    /// Throws DataError if layouts differ or labels are out of range; with
    /// `require_all_classes` also if some class has no trial.
    void validate(bool require_all_classes = true) const;
    /// Subset in the given index order.
    TrialSet subset(const std::vector<std::size_t>& indices) const;
};

/// Per-trial covariances with the class-mean, composite and whitened forms derived from them.
struct CovarianceSet {
    std::vector<Matrix> per_trial;          // C_i
    std::vector<int> labels;                // aligned with per_trial
    int class_count = 0;
    std::vector<Matrix> class_means;        // C̃_k, index k-1
    Matrix composite;                       // C̃ = Σ_k C̃_k
    Matrix whitener;                        // P_c
    std::vector<Matrix> whitened_per_trial; // R_i = P_cᵀ C_i P_c (symmetrized)

    Eigen::Index channels() const { return composite.rows(); }
    std::vector<int> class_sizes() const;
    Matrix whitened_class_mean(int class_id) const;
};

struct BandpassSpec {
    double low_hz = 7.0;
    double high_hz = 31.0;
    int order = 5;
    double fs = 250.0;

    void validate() const;
};

/// Butterworth band-pass as cascaded second-order sections (analog prototype,
/// low-pass to band-pass transform, bilinear transform with prewarping).
std::vector<kernels::Biquad> butterworth_bandpass_sections(const BandpassSpec& spec);

/// Causal forward filtering of each row of `signal`.
Matrix butterworth_bandpass(const Matrix& signal, const BandpassSpec& spec);

struct Event {
    long long sample = 0;
    int label = 0;
};

/// Window [start_s, end_s) relative to each event, in seconds.
struct EpochWindow {
    double start_s = 0.5;
    double end_s = 2.5;
};

/// Slices one trial per event and centers each row.
TrialSet extract_epochs(const Matrix& continuous, const std::vector<Event>& events, EpochWindow window, double fs,
                        int class_count);

/// Subtracts each row's mean in place.
void center_rows(Matrix& x);

/// Full covariance set for a trial set. Throws RankError if the composite is rank deficient.
CovarianceSet covariances(const TrialSet& trials, RankTolerance tol = {});

/// Builds the set from precomputed per-trial covariances.
CovarianceSet covariance_set_from(std::vector<Matrix> per_trial, std::vector<int> labels, int class_count,
                                  RankTolerance tol = {});

/// As above with caller-supplied class means (e.g. a class-balanced "rest" class).
CovarianceSet covariance_set_from(std::vector<Matrix> per_trial, std::vector<int> labels, int class_count,
                                  std::vector<Matrix> class_means, RankTolerance tol = {});

}  // namespace scacsp
