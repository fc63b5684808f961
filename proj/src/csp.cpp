#include "scacsp/csp.hpp"

#include "scacsp/diagnostics.hpp"
#include "scacsp/error.hpp"

#include <cmath>
#include <sstream>

namespace scacsp {

namespace {

void require_binary(const CovarianceSet& cov, const char* what) {
    if (cov.class_count != 2) {
        std::ostringstream os;
        os << what << ": needs exactly 2 classes, got " << cov.class_count;
        throw InvalidArgument(os.str());
    }
}

void require_filter_count(const CovarianceSet& cov, int m, const char* what) {
    if (m < 1 || 2 * static_cast<Eigen::Index>(m) > cov.channels()) {
        std::ostringstream os;
        os << what << ": 2m = " << 2 * m << " must lie in [2, " << cov.channels() << "]";
        throw InvalidArgument(os.str());
    }
}

void require_nonnegative(double v, const char* name) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw InvalidArgument(std::string(name) + " must be finite and non-negative");
}

// Per-class top-m of C̃_k w = λ D w, class 1 first.
FilterBank per_class_top(const CovarianceSet& cov, int m, const Matrix& denominator, Provenance tag) {
    FilterBank bank;
    const Eigen::Index n = cov.channels();
    bank.filters.resize(n, 2 * m);
    bank.scores.resize(2 * m);
    bank.whitener = cov.whitener;
    for (int k = 0; k < 2; ++k) {
        const SymEig ge = gen_sym_eig(cov.class_means[static_cast<std::size_t>(k)], denominator);
        bank.filters.middleCols(k * m, m) = ge.vectors.leftCols(m);
        bank.scores.segment(k * m, m) = ge.values.head(m);
    }
    bank.provenance.assign(static_cast<std::size_t>(2 * m), tag);
    return bank;
}

Matrix features_for(const FilterBank& bank, std::span<const Matrix> inputs, TrialInput kind, bool log_features) {
    return kind == TrialInput::signal ? features_from_signals(bank.filters, inputs, log_features)
                                      : features_from_covariances(bank.filters, inputs, log_features);
}

}  // namespace

RegGrid RegGrid::standard(bool with_beta) {
    RegGrid g;
    g.alphas = {0.0, 1e-6, 1e-5, 1e-4, 1e-3, 1e-2, 1e-1, 1.0};
    if (with_beta) g.betas = g.alphas;
    return g;
}

void RegGrid::validate() const {
    if (alphas.empty()) throw InvalidArgument("regularization grid: no alpha values");
    for (double a : alphas) require_nonnegative(a, "regularization alpha");
    for (double b : betas) require_nonnegative(b, "regularization beta");
}

FilterBank csp_train(const CovarianceSet& cov, int m) {
    require_binary(cov, "csp_train");
    require_filter_count(cov, m, "csp_train");
    const SymEig e = sym_eig(cov.whitened_class_mean(1));
    const Eigen::Index n = cov.channels();
    if ((e.values.array() - 0.5).abs().maxCoeff() <= 1e-10)
        diag::warn("csp_train: class mean covariances coincide; all eigenvalues are 0.5 and filter selection is arbitrary");

    FilterBank bank;
    bank.directions.resize(n, 2 * m);
    bank.directions << e.vectors.leftCols(m), e.vectors.rightCols(m);
    bank.scores.resize(2 * m);
    bank.scores << e.values.head(m), e.values.tail(m);
    bank.filters = cov.whitener * bank.directions;
    bank.whitener = cov.whitener;
    bank.provenance.assign(static_cast<std::size_t>(2 * m), Provenance::csp);
    return bank;
}

FilterBank trcsp_train(const CovarianceSet& cov, int m, double alpha) {
    require_binary(cov, "trcsp_train");
    require_filter_count(cov, m, "trcsp_train");
    require_nonnegative(alpha, "trcsp_train: alpha");
    const Eigen::Index n = cov.channels();
    return per_class_top(cov, m, cov.composite + alpha * Matrix::Identity(n, n), Provenance::trcsp);
}

Matrix scsp_penalty(const CovarianceSet& cov) {
    const Eigen::Index n = cov.channels();
    Matrix penalty = Matrix::Zero(n, n);
    for (std::size_t i = 0; i < cov.per_trial.size(); ++i) {
        const Matrix diff = cov.per_trial[i] - cov.class_means[static_cast<std::size_t>(cov.labels[i] - 1)];
        const SymEig e = sym_eig(diff);
        penalty += e.vectors * e.values.cwiseAbs().asDiagonal() * e.vectors.transpose();
    }
    return symmetrize(penalty);
}

FilterBank scsp_train(const CovarianceSet& cov, int m, double alpha) {
    require_binary(cov, "scsp_train");
    require_filter_count(cov, m, "scsp_train");
    require_nonnegative(alpha, "scsp_train: alpha");
    const Matrix penalty = alpha > 0.0 ? scsp_penalty(cov) : Matrix::Zero(cov.channels(), cov.channels());
    return per_class_top(cov, m, cov.composite + alpha * penalty, Provenance::scsp);
}

FilterBank strcsp_train(const CovarianceSet& cov, int m, double alpha, double beta) {
    require_binary(cov, "strcsp_train");
    const Matrix penalty = alpha > 0.0 ? scsp_penalty(cov) : Matrix::Zero(cov.channels(), cov.channels());
    return strcsp_train(cov, m, alpha, beta, penalty);
}

FilterBank strcsp_train(const CovarianceSet& cov, int m, double alpha, double beta, const Matrix& penalty) {
    require_binary(cov, "strcsp_train");
    require_filter_count(cov, m, "strcsp_train");
    require_nonnegative(alpha, "strcsp_train: alpha");
    require_nonnegative(beta, "strcsp_train: beta");
    const Eigen::Index n = cov.channels();
    if (penalty.rows() != n || penalty.cols() != n) throw InvalidArgument("strcsp_train: penalty size mismatch");
    return per_class_top(cov, m, cov.composite + alpha * penalty + beta * Matrix::Identity(n, n),
                         Provenance::strcsp);
}

Vector BinaryProblem::margins(const Matrix& features) const {
    Vector out(features.cols());
    for (Eigen::Index i = 0; i < features.cols(); ++i) {
        const Vector d = lda.decision_values(features.col(i));
        out(i) = d(0) - d(1);
    }
    return out;
}

BinaryProblem train_binary_problem(const CovarianceSet& binary_cov, int m, bool log_features, int positive_class,
                                   int negative_class) {
    BinaryProblem p;
    p.positive_class = positive_class;
    p.negative_class = negative_class;
    p.bank = csp_train(binary_cov, m);
    const Matrix f = features_from_covariances(p.bank.filters, binary_cov.per_trial, log_features);
    p.lda = lda_train(f, binary_cov.labels, 2);
    return p;
}

OvrModel multiclass_ovr_train(const CovarianceSet& cov, int m, OvrRest rest, bool log_features) {
    if (cov.class_count < 2) throw InvalidArgument("multiclass_ovr_train: needs at least 2 classes");
    OvrModel model;
    model.class_count = cov.class_count;
    model.rest = rest;
    model.log_features = log_features;
    const Eigen::Index n = cov.channels();
    for (int k = 1; k <= cov.class_count; ++k) {
        std::vector<int> labels(cov.labels.size());
        for (std::size_t i = 0; i < labels.size(); ++i) labels[i] = cov.labels[i] == k ? 1 : 2;
        CovarianceSet binary;
        if (rest == OvrRest::class_mean) {
            Matrix rest_mean = Matrix::Zero(n, n);
            for (int j = 1; j <= cov.class_count; ++j)
                if (j != k) rest_mean += cov.class_means[static_cast<std::size_t>(j - 1)];
            rest_mean /= static_cast<double>(cov.class_count - 1);
            binary = covariance_set_from(cov.per_trial, std::move(labels), 2,
                                         {cov.class_means[static_cast<std::size_t>(k - 1)], rest_mean});
        } else {
            binary = covariance_set_from(cov.per_trial, std::move(labels), 2);
        }
        model.problems.push_back(train_binary_problem(binary, m, log_features, k, 0));
    }
    return model;
}

std::vector<int> multiclass_ovr_predict(const OvrModel& model, std::span<const Matrix> inputs, TrialInput kind) {
    const auto n = static_cast<Eigen::Index>(inputs.size());
    Matrix scores(model.class_count, n);
    for (std::size_t k = 0; k < model.problems.size(); ++k) {
        const auto& p = model.problems[k];
        scores.row(static_cast<Eigen::Index>(k)) = p.margins(features_for(p.bank, inputs, kind, model.log_features)).transpose();
    }
    std::vector<int> out(inputs.size());
    for (Eigen::Index i = 0; i < n; ++i) {
        Eigen::Index best = 0;
        for (Eigen::Index k = 1; k < scores.rows(); ++k)
            if (scores(k, i) > scores(best, i)) best = k;
        out[static_cast<std::size_t>(i)] = static_cast<int>(best) + 1;
    }
    return out;
}

int multiclass_ovr_predict(const OvrModel& model, const Matrix& trial_cov) {
    return multiclass_ovr_predict(model, std::span<const Matrix>(&trial_cov, 1), TrialInput::covariance).front();
}

PwModel multiclass_pw_train(const CovarianceSet& cov, int m, bool log_features) {
    if (cov.class_count < 2) throw InvalidArgument("multiclass_pw_train: needs at least 2 classes");
    PwModel model;
    model.class_count = cov.class_count;
    model.log_features = log_features;
    for (int a = 1; a <= cov.class_count; ++a) {
        for (int b = a + 1; b <= cov.class_count; ++b) {
            std::vector<Matrix> covs;
            std::vector<int> labels;
            for (std::size_t i = 0; i < cov.labels.size(); ++i) {
                if (cov.labels[i] != a && cov.labels[i] != b) continue;
                covs.push_back(cov.per_trial[i]);
                labels.push_back(cov.labels[i] == a ? 1 : 2);
            }
            model.problems.push_back(
                train_binary_problem(covariance_set_from(std::move(covs), std::move(labels), 2), m, log_features, a, b));
        }
    }
    return model;
}

int pw_vote(int class_count, std::span<const std::pair<int, int>> pairs, std::span<const double> margins) {
    std::vector<int> votes(static_cast<std::size_t>(class_count) + 1, 0);
    std::vector<double> strength(static_cast<std::size_t>(class_count) + 1, 0.0);
    for (std::size_t p = 0; p < pairs.size(); ++p) {
        const int winner = margins[p] >= 0.0 ? pairs[p].first : pairs[p].second;
        ++votes[static_cast<std::size_t>(winner)];
        strength[static_cast<std::size_t>(winner)] += std::abs(margins[p]);
    }
    int best = 1;
    for (int k = 2; k <= class_count; ++k) {
        const auto ks = static_cast<std::size_t>(k), bs = static_cast<std::size_t>(best);
        if (votes[ks] > votes[bs] || (votes[ks] == votes[bs] && strength[ks] > strength[bs])) best = k;
    }
    return best;
}

std::vector<int> multiclass_pw_predict(const PwModel& model, std::span<const Matrix> inputs, TrialInput kind) {
    const auto n = static_cast<Eigen::Index>(inputs.size());
    Matrix margins(static_cast<Eigen::Index>(model.problems.size()), n);
    std::vector<std::pair<int, int>> pairs;
    for (std::size_t p = 0; p < model.problems.size(); ++p) {
        const auto& prob = model.problems[p];
        pairs.emplace_back(prob.positive_class, prob.negative_class);
        margins.row(static_cast<Eigen::Index>(p)) =
            prob.margins(features_for(prob.bank, inputs, kind, model.log_features)).transpose();
    }
    std::vector<int> out(inputs.size());
    std::vector<double> column(model.problems.size());
    for (Eigen::Index i = 0; i < n; ++i) {
        for (std::size_t p = 0; p < column.size(); ++p) column[p] = margins(static_cast<Eigen::Index>(p), i);
        out[static_cast<std::size_t>(i)] = pw_vote(model.class_count, pairs, column);
    }
    return out;
}

int multiclass_pw_predict(const PwModel& model, const Matrix& trial_cov) {
    return multiclass_pw_predict(model, std::span<const Matrix>(&trial_cov, 1), TrialInput::covariance).front();
}

}  // namespace scacsp
