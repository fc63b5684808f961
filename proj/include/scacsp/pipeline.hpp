#pragma once

// End-to-end spatial filtering + LDA models for every supported method.

#include "scacsp/csp.hpp"
#include "scacsp/lda.hpp"
#include "scacsp/scacsp.hpp"
#include "scacsp/subspace.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace scacsp {

enum class Method {
    csp,
    trcsp,
    scsp,
    strcsp,
    csp_ovr,
    csp_pw,
    scacsp,
    scacsp_extrasub,
    scacsp_nsr,
    scacsp_nsr_extrasub,
};

std::string_view to_string(Method m);
Method method_from_string(std::string_view s);
/// Number of regularization parameters the method takes (0, 1 or 2).
int regularizer_count(Method m);
bool binary_only(Method m);
bool is_scacsp(Method m);

struct CvPlan {
    int folds = 10;
    std::uint64_t seed = 0;
    bool stratified = true;

    void validate() const;
};

struct PipelineConfig {
    Method method = Method::csp;
    int m = 3;
    bool bandpass = true;
    BandpassSpec band;
    EpochWindow window;
    SubspaceSelector extra{{Subspace::sw_range}};
    int extra_count = 0;                  // 0 means 2m
    NsrMode nsr = NsrMode::cnsr;
    std::optional<RegGrid> grid;          // unset → RegGrid::standard sized for the method
    CvPlan cv;
    bool log_features = true;
    RankTolerance tol;
    OvrRest ovr_rest = OvrRest::class_mean;
    Selection selection = Selection::automatic;

    /// Throws InvalidArgument on incompatible combinations.
    void validate() const;
    /// The grid actually searched: the configured one, or the standard one sized for the method.
    RegGrid effective_grid() const;
};

/// A trained model. Exactly one of {bank + lda, ovr, pw} is populated.
struct PipelineModel {
    PipelineConfig config;
    int class_count = 0;
    Eigen::Index channels = 0;
    std::vector<std::string> channel_names;
    double alpha = 0.0;
    double beta = 0.0;

    FilterBank bank;
    std::optional<NsrProjector> nsr;  // set when NSR features are used
    LdaModel lda;
    std::optional<OvrModel> ovr;
    std::optional<PwModel> pw;

    /// Features for the single-bank methods, one column per covariance.
    Matrix features_from_covariances(std::span<const Matrix> covs) const;
    /// Predictions from centered, already band-passed trial signals.
    std::vector<int> predict(std::span<const Matrix> trials) const;
    /// Predictions from trial covariances.
    std::vector<int> predict_covariances(std::span<const Matrix> covs) const;
    /// Total number of spatial filters applied at test time.
    Eigen::Index filter_count() const;
};

/// Trains on precomputed covariances. `penalty` may carry a precomputed
/// stationarity penalty for scsp/strcsp.
PipelineModel train_pipeline(const PipelineConfig& config, const CovarianceSet& cov, double alpha = 0.0,
                             double beta = 0.0, const Matrix* penalty = nullptr);

/// Computes covariances and trains.
PipelineModel train_pipeline(const PipelineConfig& config, const TrialSet& trials, double alpha = 0.0,
                             double beta = 0.0);

}  // namespace scacsp
