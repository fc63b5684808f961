#include "scacsp/filters.hpp"

#include "scacsp/diagnostics.hpp"
#include "scacsp/error.hpp"
#include "scacsp/kernels.hpp"

#include <array>
#include <cmath>
#include <string>

namespace scacsp {

namespace {

constexpr std::array<std::pair<Provenance, std::string_view>, 11> provenance_names{{
    {Provenance::csp, "csp"},
    {Provenance::trcsp, "trcsp"},
    {Provenance::scsp, "scsp"},
    {Provenance::strcsp, "strcsp"},
    {Provenance::scacsp, "scacsp"},
    {Provenance::extra_sb_range, "extra:Sb_range"},
    {Provenance::extra_sb_null, "extra:Sb_null"},
    {Provenance::extra_sw_range, "extra:Sw_range"},
    {Provenance::extra_sw_null, "extra:Sw_null"},
    {Provenance::extra_st_range, "extra:St_range"},
    {Provenance::extra_st_null, "extra:St_null"},
}};

}  // namespace

std::string_view to_string(Provenance p) {
    for (const auto& [tag, name] : provenance_names)
        if (tag == p) return name;
    return "unknown";
}

Provenance provenance_from_string(std::string_view s) {
    for (const auto& [tag, name] : provenance_names)
        if (name == s) return tag;
    throw InvalidArgument("unknown filter provenance '" + std::string(s) + "'");
}

void FilterBank::validate() const {
    if (filters.cols() < 1) throw NumericalError("filter bank is empty");
    if (!filters.allFinite()) throw NumericalError("filter bank has non-finite entries");
    if (scores.size() != filters.cols() || provenance.size() != static_cast<std::size_t>(filters.cols()))
        throw InvalidArgument("filter bank: scores/provenance do not match filter count");
    if (directions.size() != 0 && directions.cols() != filters.cols())
        throw InvalidArgument("filter bank: direction count differs from filter count");
}

Matrix finish_features(Matrix variances, bool log_scale) {
    if (!log_scale) return variances;
    Eigen::Index clamped = 0;
    for (Eigen::Index i = 0; i < variances.size(); ++i) {
        double& v = variances.data()[i];
        if (!(v > 0.0)) {
            v = 1e-300;
            ++clamped;
        }
        v = std::log(v);
    }
    if (clamped > 0)
        diag::warn("features: " + std::to_string(clamped) + " non-positive projected variance(s) clamped to 1e-300");
    return variances;
}

Vector csp_features(const FilterBank& bank, const Matrix& trial_cov, bool log_scale) {
    if (trial_cov.rows() != bank.channels() || trial_cov.cols() != bank.channels())
        throw InvalidArgument("csp_features: covariance size does not match the filter bank");
    return features_from_covariances(bank.filters, std::span<const Matrix>(&trial_cov, 1), log_scale).col(0);
}

Matrix features_from_covariances(const Matrix& filters, std::span<const Matrix> covs, bool log_scale) {
    return finish_features(kernels::quadratic_features(filters, covs), log_scale);
}

Matrix features_from_signals(const Matrix& filters, std::span<const Matrix> trials, bool log_scale) {
    return finish_features(kernels::projected_variances(filters, trials), log_scale);
}

Matrix kron_projection(const Matrix& directions) {
    const Eigen::Index n = directions.rows();
    Matrix out(n * n, directions.cols());
    for (Eigen::Index j = 0; j < directions.cols(); ++j) out.col(j) = kron(directions.col(j), directions.col(j));
    return out;
}

}  // namespace scacsp
