#pragma once

#include "scacsp/linalg.hpp"

#include <optional>
#include <vector>

namespace scacsp {

/// Pooled-covariance linear discriminant. Features are columns; class ids 1..class_count.
///
/// Discriminant for class k: δ_k(x) = xᵀ Σ⁻¹ μ_k − ½ μ_kᵀ Σ⁻¹ μ_k + log π_k, where
/// Σ is the pooled within-class covariance plus `ridge`·I.
struct LdaModel {
    int class_count = 0;
    Matrix means;               // dim × class_count
    Matrix pooled_covariance;   // without the ridge
    Vector priors;              // class frequencies
    double ridge = 0.0;
    Matrix weights;             // Σ⁻¹ μ_k per column
    Vector biases;
    bool indistinct = false;    // class means equal up to rounding; only the priors decide

    Eigen::Index dim() const { return means.rows(); }
    Vector decision_values(const Vector& x) const;
};

struct LdaPrediction {
    int label = 0;
    Vector decision;
};

/// `ridge` defaults to 1e-6·trace(Σ)/dim (floored at 1e-12 × mean squared feature
/// when the pooled covariance vanishes). Throws InvalidArgument with fewer than
/// two classes or a class with fewer than `min_per_class` samples, and
/// NumericalError if the regularized covariance is still singular. When all
/// class means agree within 1e-10 of the RMS feature norm they are replaced by
/// the grand mean, so every class gets the same weights.
LdaModel lda_train(const Matrix& features, const std::vector<int>& labels, int class_count,
                   std::optional<double> ridge = std::nullopt, int min_per_class = 2);

/// Highest discriminant wins; ties go to the lowest class id.
LdaPrediction lda_predict(const LdaModel& model, const Vector& feature);

std::vector<int> lda_predict_all(const LdaModel& model, const Matrix& features);

}  // namespace scacsp
