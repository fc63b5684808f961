#include "scacsp/pipeline.hpp"

#include "scacsp/diagnostics.hpp"
#include "scacsp/error.hpp"
#include "scacsp/kernels.hpp"

#include <array>
#include <sstream>

namespace scacsp {

namespace {

constexpr std::array<std::pair<Method, std::string_view>, 10> method_names{{
    {Method::csp, "csp"},
    {Method::trcsp, "trcsp"},
    {Method::scsp, "scsp"},
    {Method::strcsp, "strcsp"},
    {Method::csp_ovr, "csp-ovr"},
    {Method::csp_pw, "csp-pw"},
    {Method::scacsp, "scacsp"},
    {Method::scacsp_extrasub, "scacsp-extrasub"},
    {Method::scacsp_nsr, "scacsp-nsr"},
    {Method::scacsp_nsr_extrasub, "scacsp-nsr-extrasub"},
}};

bool uses_extra(Method m) { return m == Method::scacsp_extrasub || m == Method::scacsp_nsr_extrasub; }
bool uses_nsr(Method m) { return m == Method::scacsp_nsr || m == Method::scacsp_nsr_extrasub; }

FilterBank scacsp_bank(const PipelineConfig& config, const CovarianceSet& cov) {
    if (cov.class_count == 2 && config.selection != Selection::largest_magnitude)
        return scacsp_binary_train(cov, config.m).bank;
    return scacsp_multi_train(cov, config.m, config.selection, config.tol).bank;
}

NsrProjector choose_projector(const ScatterTriple& scatter, NsrMode mode) {
    NsrProjector p = nsr_projector(scatter, mode);
    if (!p.applicable && mode == NsrMode::cnsr) {
        diag::warn("NSR: falling back from cnsr to bnsr");
        p = nsr_projector(scatter, NsrMode::bnsr);
    }
    if (!p.applicable)
        throw NumericalError("NSR: no applicable null-space reduction for this training set");
    return p;
}

}  // namespace

std::string_view to_string(Method m) {
    for (const auto& [tag, name] : method_names)
        if (tag == m) return name;
    return "unknown";
}

Method method_from_string(std::string_view s) {
    for (const auto& [tag, name] : method_names)
        if (name == s) return tag;
    std::string known;
    for (const auto& [tag, name] : method_names) known += (known.empty() ? "" : ", ") + std::string(name);
    throw InvalidArgument("unknown method '" + std::string(s) + "' (expected one of " + known + ")");
}

int regularizer_count(Method m) {
    switch (m) {
    case Method::trcsp:
    case Method::scsp: return 1;
    case Method::strcsp: return 2;
    default: return 0;
    }
}

bool binary_only(Method m) {
    return m == Method::csp || m == Method::trcsp || m == Method::scsp || m == Method::strcsp;
}

bool is_scacsp(Method m) {
    return m == Method::scacsp || uses_extra(m) || uses_nsr(m);
}

void CvPlan::validate() const {
    if (folds < 2) throw InvalidArgument("cross-validation needs at least 2 folds");
}

void PipelineConfig::validate() const {
    if (m < 1) throw InvalidArgument("m must be positive");
    if (extra_count < 0) throw InvalidArgument("extra filter count must be non-negative");
    if (bandpass) band.validate();
    if (!(window.end_s > window.start_s)) throw InvalidArgument("window end must exceed window start");
    if (!(tol.relative > 0.0)) throw InvalidArgument("rank tolerance must be positive");
    cv.validate();
    if (grid) grid->validate();
    if (uses_nsr(method) && nsr == NsrMode::none)
        throw InvalidArgument(std::string(to_string(method)) + " needs an NSR mode (cnsr or bnsr)");
    if (uses_extra(method) && extra.tags.empty())
        throw InvalidArgument(std::string(to_string(method)) + " needs a non-empty extra subspace selector");
    if (grid && regularizer_count(method) < 2 && !grid->betas.empty() &&
        !(grid->betas.size() == 1 && grid->betas[0] == 0.0))
        throw InvalidArgument(std::string(to_string(method)) + " takes no beta parameter");
    if (grid && regularizer_count(method) == 0 && !(grid->alphas.size() == 1 && grid->alphas[0] == 0.0))
        throw InvalidArgument(std::string(to_string(method)) + " takes no regularization parameters");
}

RegGrid PipelineConfig::effective_grid() const {
    const int r = regularizer_count(method);
    if (r == 0) return RegGrid{};
    if (grid) return *grid;
    return RegGrid::standard(r == 2);
}

Matrix PipelineModel::features_from_covariances(std::span<const Matrix> covs) const {
    if (nsr) {
        const Matrix r = kernels::whitened_vecs(covs, bank.whitener);
        const Matrix projection = kron_projection(bank.directions);
        return projection.transpose() * nsr->reduce_columns(r);
    }
    return scacsp::features_from_covariances(bank.filters, covs, config.log_features);
}

std::vector<int> PipelineModel::predict(std::span<const Matrix> trials) const {
    for (const auto& x : trials)
        if (x.rows() != channels) {
            std::ostringstream os;
            os << "model expects " << channels << " channels, trial has " << x.rows();
            throw DataError(os.str());
        }
    if (ovr) return multiclass_ovr_predict(*ovr, trials, TrialInput::signal);
    if (pw) return multiclass_pw_predict(*pw, trials, TrialInput::signal);
    if (nsr) {
        const auto covs = kernels::trial_covariances(trials);
        return lda_predict_all(lda, features_from_covariances(covs));
    }
    return lda_predict_all(lda, features_from_signals(bank.filters, trials, config.log_features));
}

std::vector<int> PipelineModel::predict_covariances(std::span<const Matrix> covs) const {
    for (const auto& c : covs)
        if (c.rows() != channels || c.cols() != channels) throw DataError("covariance size does not match the model");
    if (ovr) return multiclass_ovr_predict(*ovr, covs, TrialInput::covariance);
    if (pw) return multiclass_pw_predict(*pw, covs, TrialInput::covariance);
    return lda_predict_all(lda, features_from_covariances(covs));
}

Eigen::Index PipelineModel::filter_count() const {
    Eigen::Index n = 0;
    if (ovr)
        for (const auto& p : ovr->problems) n += p.bank.size();
    else if (pw)
        for (const auto& p : pw->problems) n += p.bank.size();
    else
        n = bank.size();
    return n;
}

PipelineModel train_pipeline(const PipelineConfig& config, const CovarianceSet& cov, double alpha, double beta,
                             const Matrix* penalty) {
    config.validate();
    if (binary_only(config.method) && cov.class_count != 2) {
        std::ostringstream os;
        os << to_string(config.method) << " is a binary method but the data has " << cov.class_count
           << " classes; use csp-ovr, csp-pw or a scacsp method";
        throw InvalidArgument(os.str());
    }
    PipelineModel model;
    model.config = config;
    model.class_count = cov.class_count;
    model.channels = cov.channels();
    model.alpha = alpha;
    model.beta = beta;

    switch (config.method) {
    case Method::csp: model.bank = csp_train(cov, config.m); break;
    case Method::trcsp: model.bank = trcsp_train(cov, config.m, alpha); break;
    case Method::scsp:
        model.bank = penalty ? strcsp_train(cov, config.m, alpha, 0.0, *penalty) : scsp_train(cov, config.m, alpha);
        for (auto& p : model.bank.provenance) p = Provenance::scsp;
        break;
    case Method::strcsp:
        model.bank = penalty ? strcsp_train(cov, config.m, alpha, beta, *penalty)
                             : strcsp_train(cov, config.m, alpha, beta);
        break;
    case Method::csp_ovr:
        model.ovr = multiclass_ovr_train(cov, config.m, config.ovr_rest, config.log_features);
        return model;
    case Method::csp_pw:
        model.pw = multiclass_pw_train(cov, config.m, config.log_features);
        return model;
    case Method::scacsp:
    case Method::scacsp_extrasub:
    case Method::scacsp_nsr:
    case Method::scacsp_nsr_extrasub: {
        model.bank = scacsp_bank(config, cov);
        if (uses_extra(config.method) || uses_nsr(config.method)) {
            const ScatterTriple scatter = scatter_matrices(vectorize_covariances(cov), config.tol);
            if (uses_extra(config.method)) {
                const int count = config.extra_count > 0 ? config.extra_count : 2 * config.m;
                model.bank = merge_banks(model.bank, extra_filters(scatter, config.extra, count));
            }
            if (uses_nsr(config.method)) model.nsr = choose_projector(scatter, config.nsr);
        }
        break;
    }
    }
    model.bank.validate();
    const Matrix features = model.features_from_covariances(cov.per_trial);
    model.lda = lda_train(features, cov.labels, cov.class_count);
    return model;
}

PipelineModel train_pipeline(const PipelineConfig& config, const TrialSet& trials, double alpha, double beta) {
    trials.validate();
    PipelineModel model = train_pipeline(config, covariances(trials, config.tol), alpha, beta);
    model.channel_names = trials.channel_names;
    return model;
}

}  // namespace scacsp
