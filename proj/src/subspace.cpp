#include "scacsp/subspace.hpp"

#include "scacsp/diagnostics.hpp"
#include "scacsp/error.hpp"
#include "scacsp/kernels.hpp"
#include "scacsp/lda.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>

namespace scacsp {

namespace {

constexpr double duplicate_cosine = 1.0 - 1e-6;

std::string lower(std::string_view s) {
    std::string out(s);
    for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

bool duplicates_any(const Vector& u, const Matrix& kept, Eigen::Index count) {
    for (Eigen::Index j = 0; j < count; ++j)
        if (std::abs(u.dot(kept.col(j))) > duplicate_cosine * u.norm() * kept.col(j).norm()) return true;
    return false;
}

double accuracy_of(const std::vector<int>& predicted, const std::vector<int>& labels) {
    std::size_t hits = 0;
    for (std::size_t i = 0; i < labels.size(); ++i) hits += predicted[i] == labels[i] ? 1 : 0;
    return static_cast<double>(hits) / static_cast<double>(labels.size());
}

}  // namespace

std::string_view to_string(Subspace s) {
    switch (s) {
    case Subspace::sb_range: return "Sb_range";
    case Subspace::sb_null: return "Sb_null";
    case Subspace::sw_range: return "Sw_range";
    case Subspace::sw_null: return "Sw_null";
    case Subspace::st_range: return "St_range";
    case Subspace::st_null: return "St_null";
    }
    return "unknown";
}

Subspace subspace_from_string(std::string_view s) {
    const std::string key = lower(s);
    for (auto t : all_subspaces)
        if (lower(to_string(t)) == key) return t;
    throw InvalidArgument("unknown subspace '" + std::string(s) + "' (expected Sb_range, Sb_null, Sw_range, Sw_null, St_range or St_null)");
}

ScatterSource source_of(Subspace s) {
    switch (s) {
    case Subspace::sb_range:
    case Subspace::sb_null: return ScatterSource::between;
    case Subspace::sw_range:
    case Subspace::sw_null: return ScatterSource::within;
    default: return ScatterSource::total;
    }
}

BasisKind kind_of(Subspace s) {
    return s == Subspace::sb_range || s == Subspace::sw_range || s == Subspace::st_range ? BasisKind::range
                                                                                          : BasisKind::null;
}

Provenance extra_provenance(Subspace s) {
    switch (s) {
    case Subspace::sb_range: return Provenance::extra_sb_range;
    case Subspace::sb_null: return Provenance::extra_sb_null;
    case Subspace::sw_range: return Provenance::extra_sw_range;
    case Subspace::sw_null: return Provenance::extra_sw_null;
    case Subspace::st_range: return Provenance::extra_st_range;
    case Subspace::st_null: return Provenance::extra_st_null;
    }
    return Provenance::extra_sb_range;
}

OrthoBasis subspace_basis(const ScatterTriple& scatter, Subspace s) {
    return scatter.basis(source_of(s), kind_of(s));
}

bool semi_empty(const ScatterTriple& scatter, Subspace s) {
    const ScatterSpace& sp = scatter.space(source_of(s));
    return (kind_of(s) == BasisKind::range ? sp.range_svec.cols() : sp.null_svec.cols()) == 0;
}

SubspaceSelector SubspaceSelector::parse(std::string_view list) {
    std::vector<bool> seen(all_subspaces.size(), false);
    std::size_t pos = 0;
    while (pos <= list.size()) {
        const auto end = std::min(list.find(',', pos), list.size());
        std::string_view item = list.substr(pos, end - pos);
        while (!item.empty() && std::isspace(static_cast<unsigned char>(item.front()))) item.remove_prefix(1);
        while (!item.empty() && std::isspace(static_cast<unsigned char>(item.back()))) item.remove_suffix(1);
        if (!item.empty()) seen[static_cast<std::size_t>(subspace_from_string(item))] = true;
        pos = end + 1;
    }
    SubspaceSelector sel;
    for (std::size_t i = 0; i < all_subspaces.size(); ++i)
        if (seen[i]) sel.tags.push_back(all_subspaces[i]);
    if (sel.tags.empty()) throw InvalidArgument("subspace selector is empty");
    return sel;
}

std::string SubspaceSelector::to_string() const {
    std::string out;
    for (auto t : tags) {
        if (!out.empty()) out += ',';
        out += scacsp::to_string(t);
    }
    return out;
}

FilterBank extra_filters(const ScatterTriple& scatter, const SubspaceSelector& selector, int m) {
    if (selector.tags.empty()) throw InvalidArgument("extra_filters: subspace selector is empty");
    if (m < 1) throw InvalidArgument("extra_filters: m must be positive");
    const Eigen::Index n = scatter.channels;

    struct Candidate {
        Vector u;
        double magnitude;
        Provenance tag;
    };
    std::vector<Candidate> pool;
    bool any = false;
    for (auto s : selector.tags) {
        if (semi_empty(scatter, s)) {
            diag::warn("extra_filters: subspace " + std::string(to_string(s)) + " is semi-empty and is skipped");
            continue;
        }
        any = true;
        const OrthoBasis b = subspace_basis(scatter, s);
        for (Eigen::Index i = 0; i < b.dim(); ++i) {
            const SymEig e = sym_eig(symmetrize(unvec(b.columns.col(i), n)));
            for (Eigen::Index j = 0; j < n; ++j)
                pool.push_back({e.vectors.col(j), std::abs(e.values(j)), extra_provenance(s)});
        }
    }
    if (!any) throw SemiEmptyError("extra_filters: every selected subspace (" + selector.to_string() + ") is semi-empty");

    std::stable_sort(pool.begin(), pool.end(),
                     [](const Candidate& a, const Candidate& b) { return a.magnitude > b.magnitude; });
    Matrix kept(n, m);
    Vector scores(m);
    std::vector<Provenance> tags;
    Eigen::Index count = 0;
    for (const auto& c : pool) {
        if (count == m) break;
        if (duplicates_any(c.u, kept, count)) continue;
        kept.col(count) = c.u;
        scores(count) = c.magnitude;
        tags.push_back(c.tag);
        ++count;
    }
    if (count < m)
        diag::warn("extra_filters: only " + std::to_string(count) + " distinct filters available, " +
                   std::to_string(m) + " requested");

    FilterBank bank;
    bank.directions = kept.leftCols(count);
    bank.filters = scatter.whitener * bank.directions;
    bank.scores = scores.head(count);
    bank.provenance = std::move(tags);
    bank.whitener = scatter.whitener;
    return bank;
}

FilterBank merge_banks(const FilterBank& primary, const FilterBank& extra) {
    if (primary.directions.cols() != primary.size() || extra.directions.cols() != extra.size())
        throw InvalidArgument("merge_banks: both banks need whitened directions");
    if (primary.channels() != extra.channels()) throw InvalidArgument("merge_banks: channel counts differ");
    const Eigen::Index n = primary.channels();
    Matrix dirs(n, primary.size() + extra.size());
    Vector scores(dirs.cols());
    dirs.leftCols(primary.size()) = primary.directions;
    scores.head(primary.size()) = primary.scores;
    std::vector<Provenance> tags = primary.provenance;
    Eigen::Index count = primary.size();
    for (Eigen::Index j = 0; j < extra.size(); ++j) {
        if (duplicates_any(extra.directions.col(j), dirs, count)) continue;
        dirs.col(count) = extra.directions.col(j);
        scores(count) = extra.scores(j);
        tags.push_back(extra.provenance[static_cast<std::size_t>(j)]);
        ++count;
    }
    FilterBank out;
    out.directions = dirs.leftCols(count);
    out.filters = primary.whitener * out.directions;
    out.scores = scores.head(count);
    out.provenance = std::move(tags);
    out.whitener = primary.whitener;
    return out;
}

std::string_view to_string(NsrMode m) {
    switch (m) {
    case NsrMode::none: return "none";
    case NsrMode::cnsr: return "cnsr";
    case NsrMode::bnsr: return "bnsr";
    }
    return "none";
}

NsrMode nsr_mode_from_string(std::string_view s) {
    const std::string key = lower(s);
    if (key == "none") return NsrMode::none;
    if (key == "cnsr") return NsrMode::cnsr;
    if (key == "bnsr") return NsrMode::bnsr;
    throw InvalidArgument("unknown NSR mode '" + std::string(s) + "' (expected none, cnsr or bnsr)");
}

Vector NsrProjector::reduce(const Vector& r) const {
    if (mode == NsrMode::none) return r;
    if (r.size() != channels * channels) throw InvalidArgument("NSR reduce: sample length mismatch");
    const Matrix x = unvec(r, channels);
    const Matrix skew = 0.5 * (x - x.transpose());
    return range.columns * (range.columns.transpose() * r) + vec(skew);
}

Matrix NsrProjector::reduce_columns(const Matrix& r) const {
    Matrix out(r.rows(), r.cols());
    for (Eigen::Index i = 0; i < r.cols(); ++i) out.col(i) = reduce(r.col(i));
    return out;
}

NsrProjector nsr_projector(const ScatterTriple& scatter, NsrMode mode) {
    NsrProjector p;
    p.mode = mode;
    p.channels = scatter.channels;
    if (mode == NsrMode::none) return p;
    const ScatterSource target = mode == NsrMode::cnsr ? ScatterSource::total : ScatterSource::between;
    p.range = scatter.basis(target, BasisKind::range);
    if (scatter.semi_full(target)) {
        p.applicable = false;
        diag::warn(std::string("NSR: the null space of ") + std::string(to_string(target)) +
                   " is semi-empty; " + std::string(to_string(mode)) + " cannot be applied");
    }
    return p;
}

Vector reduce_features(const NsrProjector& proj, const Matrix& projection, const Vector& r) {
    if (!proj.applicable)
        throw InvalidArgument("reduce_features: " + std::string(to_string(proj.mode)) +
                              " projector is not applicable to this data; fall back to another NSR mode");
    if (projection.rows() != r.size()) throw InvalidArgument("reduce_features: dimension mismatch");
    return projection.transpose() * proj.reduce(r);
}

std::string SubspaceGrid::column_name(std::size_t col) {
    return col == 0 ? std::string("None") : std::string(to_string(all_subspaces[col - 1]));
}

SubspaceGrid empirical_grid(const CovarianceSet& train, const std::vector<Matrix>& test_covs,
                            const std::vector<int>& test_labels, int m, RankTolerance tol) {
    if (test_covs.size() != test_labels.size()) throw InvalidArgument("empirical_grid: test covariance/label count mismatch");
    if (test_covs.empty()) throw InvalidArgument("empirical_grid: no test trials");
    const VecCovSamples v = vectorize_covariances(train);
    const ScatterTriple scatter = scatter_matrices(v, tol);
    const Matrix test_vecs = kernels::whitened_vecs(test_covs, train.whitener);
    const int per_source = 2 * m * (train.class_count - 1);

    SubspaceGrid grid;
    grid.filters_per_source = per_source;
    std::array<Matrix, 7> component_basis;
    std::array<bool, 7> component_ok{};
    component_ok[0] = true;
    for (std::size_t c = 1; c < 7; ++c) {
        component_ok[c] = !semi_empty(scatter, all_subspaces[c - 1]);
        if (component_ok[c]) component_basis[c] = subspace_basis(scatter, all_subspaces[c - 1]).columns;
    }

    for (std::size_t f = 0; f < all_subspaces.size(); ++f) {
        const Subspace source = all_subspaces[f];
        if (semi_empty(scatter, source)) continue;
        Matrix directions;
        try {
            if (source == Subspace::sb_range) {
                const Selection sel = train.class_count == 2 ? Selection::per_tail : Selection::largest_magnitude;
                const int per_direction = train.class_count == 2 ? m : 2 * m;
                directions = scacsp_multi_train(train, per_direction, sel, tol).bank.directions;
            } else {
                directions = extra_filters(scatter, SubspaceSelector{{source}}, per_source).directions;
            }
        } catch (const NumericalError& e) {
            diag::warn(std::string("empirical_grid: no filters from ") + std::string(to_string(source)) + ": " + e.what());
            continue;
        }
        const Matrix va = kron_projection(directions);

        for (std::size_t c = 0; c < 7; ++c) {
            if (!component_ok[c]) continue;
            Matrix train_f, test_f;
            if (c == 0) {
                train_f = finish_features(va.transpose() * v.samples, true);
                test_f = finish_features(va.transpose() * test_vecs, true);
            } else {
                const Matrix& b = component_basis[c];
                const Matrix vb = b.transpose() * va;  // features = (Bᵀ V_a)ᵀ Bᵀ r
                train_f = vb.transpose() * (b.transpose() * v.samples);
                test_f = vb.transpose() * (b.transpose() * test_vecs);
            }
            try {
                const LdaModel lda = lda_train(train_f, train.labels, train.class_count);
                grid.train[f][c] = accuracy_of(lda_predict_all(lda, train_f), train.labels);
                grid.test[f][c] = accuracy_of(lda_predict_all(lda, test_f), test_labels);
            } catch (const Error& e) {
                diag::warn("empirical_grid: cell (" + std::string(to_string(source)) + ", " +
                           SubspaceGrid::column_name(c) + ") skipped: " + e.what());
            }
        }
    }
    return grid;
}

}  // namespace scacsp
