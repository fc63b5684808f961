#pragma once

// Classical CSP, its Tikhonov / stationary regularizations, and the
// one-versus-rest and pair-wise multi-class decompositions.

#include "scacsp/filters.hpp"
#include "scacsp/lda.hpp"
#include "scacsp/preprocess.hpp"

#include <span>
#include <vector>

namespace scacsp {

/// Regularization grid. An empty `betas` means a single β = 0.
struct RegGrid {
    std::vector<double> alphas{0.0};
    std::vector<double> betas;

    /// {0, 1e-6, 1e-5, …, 1} for α (and β when `with_beta`).
    static RegGrid standard(bool with_beta = false);
    void validate() const;
    std::size_t size() const { return alphas.size() * std::max<std::size_t>(betas.size(), 1); }
};

/// Binary CSP: 2m filters W = P_c·Ũ for the m largest then m smallest
/// eigenvalues of the whitened class-1 mean. Scores are those eigenvalues.
/// Warns when the two class means coincide.
FilterBank csp_train(const CovarianceSet& cov, int m);

/// Per class k, top-m solutions of C̃_k w = λ (C̃ + α I) w; class 1 first.
FilterBank trcsp_train(const CovarianceSet& cov, int m, double alpha);

/// Σ_k Σ_{i∈Ω_k} |C_i − C̃_k| with |·| flipping negative eigenvalues.
Matrix scsp_penalty(const CovarianceSet& cov);

/// Per class k, top-m solutions of C̃_k w = λ (C̃ + α P_s + β I) w.
FilterBank scsp_train(const CovarianceSet& cov, int m, double alpha);
FilterBank strcsp_train(const CovarianceSet& cov, int m, double alpha, double beta);
/// As above with a precomputed penalty (grid searches reuse it).
FilterBank strcsp_train(const CovarianceSet& cov, int m, double alpha, double beta, const Matrix& penalty);

/// How the "rest" class covariance of a one-versus-rest problem is formed.
enum class OvrRest { class_mean, trial_pool };

/// Whether predictors receive centered trial signals or trial covariances.
enum class TrialInput { signal, covariance };

/// One binary CSP+LDA problem. `negative_class` is 0 for a pooled "rest".
/// The margin is δ(positive) − δ(negative) of the LDA, so positive favours `positive_class`.
struct BinaryProblem {
    int positive_class = 0;
    int negative_class = 0;
    FilterBank bank;
    LdaModel lda;

    /// One margin per input column of `features`.
    Vector margins(const Matrix& features) const;
};

struct OvrModel {
    int class_count = 0;
    OvrRest rest = OvrRest::class_mean;
    bool log_features = true;
    std::vector<BinaryProblem> problems;  // one per class, in class order
};

struct PwModel {
    int class_count = 0;
    bool log_features = true;
    std::vector<BinaryProblem> problems;  // (1,2), (1,3), …, (N−1,N)
};

OvrModel multiclass_ovr_train(const CovarianceSet& cov, int m, OvrRest rest = OvrRest::class_mean,
                              bool log_features = true);
/// argmax over the per-class margins; ties go to the lowest class id.
std::vector<int> multiclass_ovr_predict(const OvrModel& model, std::span<const Matrix> inputs, TrialInput kind);
int multiclass_ovr_predict(const OvrModel& model, const Matrix& trial_cov);

PwModel multiclass_pw_train(const CovarianceSet& cov, int m, bool log_features = true);
/// Majority vote; ties go to the larger sum of winning-margin magnitudes, then the lowest class id.
std::vector<int> multiclass_pw_predict(const PwModel& model, std::span<const Matrix> inputs, TrialInput kind);
int multiclass_pw_predict(const PwModel& model, const Matrix& trial_cov);

/// Vote resolution used by the pair-wise predictor, exposed for testing.
/// `margins[p]` belongs to `pairs[p]` = (a, b); a margin ≥ 0 is a win for a.
int pw_vote(int class_count, std::span<const std::pair<int, int>> pairs, std::span<const double> margins);

/// Binary CSP followed by LDA on the given trials' features.
BinaryProblem train_binary_problem(const CovarianceSet& binary_cov, int m, bool log_features, int positive_class,
                                   int negative_class);

}  // namespace scacsp
