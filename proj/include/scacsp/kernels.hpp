#pragma once

// Per-trial data-parallel kernels.
//
// Each kernel has a serial reference in `kernels::serial` and an OpenMP
// version in `kernels::parallel`. Every output element is computed by the
// same arithmetic in both, so their results are bit-identical; the test
// suite checks this. The unqualified entry points dispatch to the parallel
// versions (which fall back to serial without OpenMP).

#include "scacsp/linalg.hpp"

#include <span>
#include <vector>

namespace scacsp::kernels {

/// Thread count honoured by the parallel kernels: SCACSP_THREADS if set and
/// positive, otherwise the OpenMP default. Always 1 without OpenMP.
int thread_count();

/// Overrides the thread count (0 restores the environment/default behaviour).
void set_thread_count(int threads);

/// One biquad: y = (b0 + b1 z⁻¹ + b2 z⁻²) / (1 + a1 z⁻¹ + a2 z⁻²).
struct Biquad {
    double b0, b1, b2, a1, a2;
};

namespace serial {
/// C_i = X_i X_iᵀ / (N_t − 1)
std::vector<Matrix> trial_covariances(std::span<const Matrix> trials);
/// Columns vec(sym(Pᵀ C_i P)).
Matrix whitened_vecs(std::span<const Matrix> covs, const Matrix& whitener);
/// out(j, i) = w_jᵀ C_i w_j
Matrix quadratic_features(const Matrix& filters, std::span<const Matrix> covs);
/// out(j, i) = var(w_jᵀ X_i) with the 1/(N_t − 1) normalization (rows of X_i assumed centered).
Matrix projected_variances(const Matrix& filters, std::span<const Matrix> trials);
/// Runs each row through the cascade (transposed direct form II, zero initial state).
Matrix filter_rows(const Matrix& signal, std::span<const Biquad> sections);
}  // namespace serial

namespace parallel {
std::vector<Matrix> trial_covariances(std::span<const Matrix> trials);
Matrix whitened_vecs(std::span<const Matrix> covs, const Matrix& whitener);
Matrix quadratic_features(const Matrix& filters, std::span<const Matrix> covs);
Matrix projected_variances(const Matrix& filters, std::span<const Matrix> trials);
Matrix filter_rows(const Matrix& signal, std::span<const Biquad> sections);
}  // namespace parallel

inline std::vector<Matrix> trial_covariances(std::span<const Matrix> trials) {
    return parallel::trial_covariances(trials);
}
inline Matrix whitened_vecs(std::span<const Matrix> covs, const Matrix& whitener) {
    return parallel::whitened_vecs(covs, whitener);
}
inline Matrix quadratic_features(const Matrix& filters, std::span<const Matrix> covs) {
    return parallel::quadratic_features(filters, covs);
}
inline Matrix projected_variances(const Matrix& filters, std::span<const Matrix> trials) {
    return parallel::projected_variances(filters, trials);
}

inline Matrix filter_rows(const Matrix& signal, std::span<const Biquad> sections) {
    return parallel::filter_rows(signal, sections);
}

}  // namespace scacsp::kernels
