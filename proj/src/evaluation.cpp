#include "scacsp/evaluation.hpp"

#include "scacsp/error.hpp"

#include <random>
#include <sstream>

namespace scacsp {

namespace {

void shuffle_indices(std::vector<std::size_t>& v, std::mt19937_64& engine) {
    for (std::size_t i = v.size(); i > 1; --i) {
        const std::size_t j = static_cast<std::size_t>(engine() % i);
        std::swap(v[i - 1], v[j]);
    }
}

std::size_t select_best(const std::vector<CvPoint>& points) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < points.size(); ++i) {
        const auto& p = points[i];
        const auto& b = points[best];
        if (p.mean_accuracy > b.mean_accuracy ||
            (p.mean_accuracy == b.mean_accuracy &&
             (p.alpha < b.alpha || (p.alpha == b.alpha && p.beta < b.beta))))
            best = i;
    }
    return best;
}

std::vector<std::pair<double, double>> grid_points(const RegGrid& grid) {
    std::vector<std::pair<double, double>> out;
    const std::vector<double> betas = grid.betas.empty() ? std::vector<double>{0.0} : grid.betas;
    for (double a : grid.alphas)
        for (double b : betas) out.emplace_back(a, b);
    return out;
}

void split(const std::vector<int>& folds, int f, std::vector<std::size_t>& train, std::vector<std::size_t>& test) {
    train.clear();
    test.clear();
    for (std::size_t i = 0; i < folds.size(); ++i) (folds[i] == f ? test : train).push_back(i);
}

void finish_means(std::vector<CvPoint>& points) {
    for (auto& p : points) {
        double sum = 0.0;
        for (double a : p.fold_accuracy) sum += a;
        p.mean_accuracy = sum / static_cast<double>(p.fold_accuracy.size());
    }
}

}  // namespace

double accuracy(std::span<const int> predicted, std::span<const int> labels) {
    if (predicted.empty()) throw InvalidArgument("accuracy: no predictions");
    if (predicted.size() != labels.size()) throw InvalidArgument("accuracy: prediction and label counts differ");
    std::size_t hits = 0;
    for (std::size_t i = 0; i < labels.size(); ++i) hits += predicted[i] == labels[i] ? 1 : 0;
    return static_cast<double>(hits) / static_cast<double>(labels.size());
}

Eigen::MatrixXi confusion_matrix(std::span<const int> predicted, std::span<const int> labels, int class_count) {
    if (predicted.size() != labels.size()) throw InvalidArgument("confusion_matrix: prediction and label counts differ");
    Eigen::MatrixXi out = Eigen::MatrixXi::Zero(class_count, class_count);
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] < 1 || labels[i] > class_count || predicted[i] < 1 || predicted[i] > class_count)
            throw InvalidArgument("confusion_matrix: class id out of range");
        ++out(labels[i] - 1, predicted[i] - 1);
    }
    return out;
}

std::vector<int> assign_folds(const CvPlan& plan, std::span<const int> labels, int class_count) {
    plan.validate();
    if (labels.size() < static_cast<std::size_t>(plan.folds)) {
        std::ostringstream os;
        os << "cross-validation: " << labels.size() << " trials cannot fill " << plan.folds << " folds";
        throw DataError(os.str());
    }
    std::mt19937_64 engine(plan.seed);
    std::vector<int> folds(labels.size(), -1);
    std::size_t position = 0;
    auto deal = [&](std::vector<std::size_t>& idx) {
        shuffle_indices(idx, engine);
        for (auto i : idx) folds[i] = static_cast<int>(position++ % static_cast<std::size_t>(plan.folds));
    };
    if (plan.stratified) {
        for (int k = 1; k <= class_count; ++k) {
            std::vector<std::size_t> idx;
            for (std::size_t i = 0; i < labels.size(); ++i)
                if (labels[i] == k) idx.push_back(i);
            if (idx.size() < static_cast<std::size_t>(plan.folds)) {
                std::ostringstream os;
                os << "cross-validation: class " << k << " has " << idx.size() << " trials, fewer than the "
                   << plan.folds << " folds";
                throw DataError(os.str());
            }
            deal(idx);
        }
    } else {
        std::vector<std::size_t> idx(labels.size());
        for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
        deal(idx);
    }
    return folds;
}

CvResult run_cv(const CvPlan& plan, std::span<const int> labels, int class_count, const RegGrid& grid,
                const FoldFitPredict& fit_predict) {
    grid.validate();
    const std::vector<int> folds = assign_folds(plan, labels, class_count);
    CvResult result;
    std::vector<std::size_t> train, test;
    for (const auto& [a, b] : grid_points(grid)) {
        CvPoint p{a, b, {}, 0.0};
        for (int f = 0; f < plan.folds; ++f) {
            split(folds, f, train, test);
            const std::vector<int> predicted = fit_predict(train, test, a, b);
            std::vector<int> truth;
            for (auto i : test) truth.push_back(labels[i]);
            p.fold_accuracy.push_back(accuracy(predicted, truth));
        }
        result.points.push_back(std::move(p));
    }
    finish_means(result.points);
    result.best = select_best(result.points);
    return result;
}

CovarianceSet subset_covariances(const CovarianceSet& cov, std::span<const std::size_t> indices) {
    std::vector<Matrix> covs;
    std::vector<int> labels;
    covs.reserve(indices.size());
    for (auto i : indices) {
        covs.push_back(cov.per_trial.at(i));
        labels.push_back(cov.labels.at(i));
    }
    return covariance_set_from(std::move(covs), std::move(labels), cov.class_count);
}

CvResult cross_validate(const PipelineConfig& config, const CovarianceSet& cov) {
    config.validate();
    const RegGrid grid = config.effective_grid();
    const auto points = grid_points(grid);
    const std::vector<int> folds = assign_folds(config.cv, cov.labels, cov.class_count);
    const bool needs_penalty = config.method == Method::scsp || config.method == Method::strcsp;

    CvResult result;
    for (const auto& [a, b] : points) result.points.push_back({a, b, {}, 0.0});
    // Fold outer so per-fold covariances and penalties are built once.
    std::vector<std::size_t> train, test;
    for (int f = 0; f < config.cv.folds; ++f) {
        split(folds, f, train, test);
        const CovarianceSet fold_cov = subset_covariances(cov, train);
        std::vector<Matrix> test_covs;
        std::vector<int> truth;
        for (auto i : test) {
            test_covs.push_back(cov.per_trial[i]);
            truth.push_back(cov.labels[i]);
        }
        const Matrix penalty = needs_penalty ? scsp_penalty(fold_cov) : Matrix();
        for (std::size_t p = 0; p < points.size(); ++p) {
            const PipelineModel model =
                train_pipeline(config, fold_cov, points[p].first, points[p].second, needs_penalty ? &penalty : nullptr);
            result.points[p].fold_accuracy.push_back(accuracy(model.predict_covariances(test_covs), truth));
        }
    }
    finish_means(result.points);
    result.best = select_best(result.points);
    return result;
}

}  // namespace scacsp
