#pragma once

#include "scacsp/linalg.hpp"

#include <span>
#include <string_view>
#include <vector>

namespace scacsp {

/// Where a spatial filter came from.
enum class Provenance {
    csp,
    trcsp,
    scsp,
    strcsp,
    scacsp,
    extra_sb_range,
    extra_sb_null,
    extra_sw_range,
    extra_sw_null,
    extra_st_range,
    extra_st_null,
};

std::string_view to_string(Provenance p);
/// Inverse of to_string; throws InvalidArgument on unknown tags.
Provenance provenance_from_string(std::string_view s);

/// Ordered spatial filters. `filters` live in sensor space (columns w_j);
/// `directions`, when present, are the same filters in whitened space
/// (filters = whitener · directions).
struct FilterBank {
    Matrix filters;
    Matrix directions;
    Vector scores;
    std::vector<Provenance> provenance;
    Matrix whitener;

    Eigen::Index size() const { return filters.cols(); }
    Eigen::Index channels() const { return filters.rows(); }
    /// Throws NumericalError on empty or non-finite filters, InvalidArgument on inconsistent sizes.
    void validate() const;
};

/// Turns projected variances into classifier features. With `log_scale`,
/// entries ≤ 0 are clamped to 1e-300 before the log and a warning is emitted.
Matrix finish_features(Matrix variances, bool log_scale);

/// f_j = log(w_jᵀ C w_j) (or the raw quadratic form).
Vector csp_features(const FilterBank& bank, const Matrix& trial_cov, bool log_scale = true);

/// Features for many trials, one column each, from covariances.
Matrix features_from_covariances(const Matrix& filters, std::span<const Matrix> covs, bool log_scale);
/// Same from centered signals via var(Wᵀ X); equal to the covariance path up to rounding.
Matrix features_from_signals(const Matrix& filters, std::span<const Matrix> trials, bool log_scale);

/// Column-wise u⊗u for each whitened direction u; features are projectionᵀ·vec(R).
Matrix kron_projection(const Matrix& directions);

}  // namespace scacsp
