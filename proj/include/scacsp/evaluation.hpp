#pragma once

#include "scacsp/pipeline.hpp"

#include <functional>
#include <span>
#include <vector>

namespace scacsp {

/// Fraction of matching entries. Throws InvalidArgument on empty or misaligned input.
double accuracy(std::span<const int> predicted, std::span<const int> labels);

/// counts(true − 1, predicted − 1).
Eigen::MatrixXi confusion_matrix(std::span<const int> predicted, std::span<const int> labels, int class_count);

/// Fold index (0-based) per trial. Stratified plans shuffle each class with a
/// seeded std::mt19937_64 (Fisher-Yates, j = engine() mod (i+1)) and deal its
/// trials round-robin, continuing the dealing position across classes.
/// Throws DataError when a stratified fold would miss a class.
std::vector<int> assign_folds(const CvPlan& plan, std::span<const int> labels, int class_count);

struct CvPoint {
    double alpha = 0.0;
    double beta = 0.0;
    std::vector<double> fold_accuracy;
    double mean_accuracy = 0.0;
};

struct CvResult {
    std::vector<CvPoint> points;  // grid order: α outer, β inner
    std::size_t best = 0;

    const CvPoint& best_point() const { return points.at(best); }
};

/// Fits on the training indices and predicts the test indices for one grid point.
using FoldFitPredict = std::function<std::vector<int>(std::span<const std::size_t> train, std::span<const std::size_t> test,
                                                      double alpha, double beta)>;

/// Generic grid × fold loop. The best point has the highest mean accuracy,
/// ties going to the smallest α, then the smallest β.
CvResult run_cv(const CvPlan& plan, std::span<const int> labels, int class_count, const RegGrid& grid,
                const FoldFitPredict& fit_predict);

/// Retrains the whole pipeline (filters and classifier) inside every fold.
CvResult cross_validate(const PipelineConfig& config, const CovarianceSet& cov);

/// Covariance set restricted to `indices`, recomputing class means and whitening.
CovarianceSet subset_covariances(const CovarianceSet& cov, std::span<const std::size_t> indices);

}  // namespace scacsp
