#include "scacsp/lda.hpp"

#include "scacsp/error.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace scacsp {

Vector LdaModel::decision_values(const Vector& x) const {
    if (x.size() != dim()) {
        std::ostringstream os;
        os << "lda: feature has " << x.size() << " entries, model expects " << dim();
        throw InvalidArgument(os.str());
    }
    return weights.transpose() * x + biases;
}

LdaModel lda_train(const Matrix& features, const std::vector<int>& labels, int class_count,
                   std::optional<double> ridge, int min_per_class) {
    if (class_count < 2) throw InvalidArgument("lda_train: need at least two classes");
    if (static_cast<std::size_t>(features.cols()) != labels.size())
        throw InvalidArgument("lda_train: feature and label counts differ");
    if (!features.allFinite()) throw NumericalError("lda_train: non-finite features");

    const Eigen::Index dim = features.rows();
    const auto n = static_cast<Eigen::Index>(labels.size());
    LdaModel model;
    model.class_count = class_count;
    model.means = Matrix::Zero(dim, class_count);
    std::vector<int> counts(static_cast<std::size_t>(class_count), 0);
    for (Eigen::Index i = 0; i < n; ++i) {
        const int l = labels[static_cast<std::size_t>(i)];
        if (l < 1 || l > class_count) throw InvalidArgument("lda_train: label out of range");
        model.means.col(l - 1) += features.col(i);
        ++counts[static_cast<std::size_t>(l - 1)];
    }
    for (int k = 0; k < class_count; ++k) {
        if (counts[static_cast<std::size_t>(k)] < min_per_class) {
            std::ostringstream os;
            os << "lda_train: class " << k + 1 << " has " << counts[static_cast<std::size_t>(k)]
               << " samples, need at least " << min_per_class;
            throw InvalidArgument(os.str());
        }
        model.means.col(k) /= counts[static_cast<std::size_t>(k)];
    }

    // Class means that differ only at rounding level carry no information;
    // leaving them would give weights fitted to noise.
    const Vector grand = features.rowwise().mean();
    const double rms = n > 0 ? std::sqrt(features.squaredNorm() / static_cast<double>(n)) : 0.0;
    double spread = 0.0;
    for (int k = 0; k < class_count; ++k) spread = std::max(spread, (model.means.col(k) - grand).norm());
    model.indistinct = spread <= 1e-10 * rms;

    model.pooled_covariance = Matrix::Zero(dim, dim);
    for (Eigen::Index i = 0; i < n; ++i) {
        const Vector d = features.col(i) - model.means.col(labels[static_cast<std::size_t>(i)] - 1);
        model.pooled_covariance.noalias() += d * d.transpose();
    }
    model.pooled_covariance /= static_cast<double>(std::max<Eigen::Index>(n - class_count, 1));

    if (ridge) {
        if (*ridge < 0.0) throw InvalidArgument("lda_train: ridge must be non-negative");
        model.ridge = *ridge;
    } else {
        const double trace_part = dim > 0 ? 1e-6 * model.pooled_covariance.trace() / static_cast<double>(dim) : 0.0;
        const double scale = n > 0 && dim > 0 ? features.squaredNorm() / static_cast<double>(n * dim) : 0.0;
        model.ridge = std::max(trace_part, 1e-12 * scale);
        if (!(model.ridge > 0.0)) model.ridge = 1.0;  // all-zero features
    }

    model.priors.resize(class_count);
    for (int k = 0; k < class_count; ++k)
        model.priors(k) = static_cast<double>(counts[static_cast<std::size_t>(k)]) / static_cast<double>(n);

    const Matrix regularized = model.pooled_covariance + model.ridge * Matrix::Identity(dim, dim);
    Eigen::LLT<Matrix> llt(regularized);
    if (llt.info() != Eigen::Success)
        throw NumericalError("lda_train: pooled covariance is singular even with ridge; use a larger ridge");
    if (model.indistinct) model.means = grand.replicate(1, class_count);
    model.weights = llt.solve(model.means);
    if (!model.weights.allFinite())
        throw NumericalError("lda_train: pooled covariance is singular even with ridge; use a larger ridge");
    model.biases.resize(class_count);
    for (int k = 0; k < class_count; ++k)
        model.biases(k) = -0.5 * model.means.col(k).dot(model.weights.col(k)) + std::log(model.priors(k));
    return model;
}

LdaPrediction lda_predict(const LdaModel& model, const Vector& feature) {
    LdaPrediction p;
    p.decision = model.decision_values(feature);
    Eigen::Index best = 0;
    for (Eigen::Index k = 1; k < p.decision.size(); ++k)
        if (p.decision(k) > p.decision(best)) best = k;
    p.label = static_cast<int>(best) + 1;
    return p;
}

std::vector<int> lda_predict_all(const LdaModel& model, const Matrix& features) {
    std::vector<int> out;
    out.reserve(static_cast<std::size_t>(features.cols()));
    for (Eigen::Index i = 0; i < features.cols(); ++i) out.push_back(lda_predict(model, features.col(i)).label);
    return out;
}

}  // namespace scacsp
