#include "scacsp/scacsp.hpp"

#include "scacsp/diagnostics.hpp"
#include "scacsp/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace scacsp {

namespace {

Matrix to_svec_columns(const Matrix& vec_columns, Eigen::Index n) {
    Matrix out(svec_dim(n), vec_columns.cols());
    for (Eigen::Index j = 0; j < vec_columns.cols(); ++j) out.col(j) = svec_from_vec(vec_columns.col(j), n);
    return out;
}

int count_rank(const Vector& sigma, RankTolerance tol) {
    if (sigma.size() == 0 || !(sigma(0) > 0.0)) return 0;
    int r = 0;
    for (Eigen::Index i = 0; i < sigma.size(); ++i)
        if (sigma(i) > tol.relative * sigma(0)) ++r;
    return r;
}

// Flip each range column so that its projection on the first factor column it
// is not orthogonal to is positive.
void orient_by_factor(Matrix& range, const Matrix& factor_svec) {
    for (Eigen::Index j = 0; j < range.cols(); ++j) {
        for (Eigen::Index k = 0; k < factor_svec.cols(); ++k) {
            const double norm = factor_svec.col(k).norm();
            const double proj = range.col(j).dot(factor_svec.col(k));
            if (norm > 0.0 && std::abs(proj) > 1e-8 * norm) {
                if (proj < 0.0) range.col(j) = -range.col(j);
                break;
            }
        }
    }
}

ScatterSpace space_from_factor(Matrix factor, Eigen::Index n, RankTolerance tol, bool orient) {
    ScatterSpace s;
    const Matrix fs = to_svec_columns(factor, n);
    Eigen::BDCSVD<Matrix> svd(fs, Eigen::ComputeFullU);
    const Vector sigma = svd.singularValues();
    s.rank = count_rank(sigma, tol);
    const Matrix& u = svd.matrixU();
    s.range_svec = u.leftCols(s.rank);
    s.null_svec = u.rightCols(u.cols() - s.rank);
    canonicalize_signs(s.range_svec);
    if (orient) orient_by_factor(s.range_svec, fs);
    canonicalize_signs(s.null_svec);
    s.eigenvalues = sigma.head(s.rank).array().square();
    s.factor = std::move(factor);
    return s;
}

ScaCspModel train_from_between(const Matrix& factor, const Matrix& whitener, int class_count, int m,
                               Selection selection, RankTolerance tol) {
    const Eigen::Index n = whitener.cols();
    if (selection == Selection::automatic)
        selection = class_count == 2 ? Selection::per_tail : Selection::largest_magnitude;
    const Eigen::Index per_direction = selection == Selection::per_tail ? 2 * m : m;
    if (m < 1 || per_direction > n) {
        std::ostringstream os;
        os << "scaCSP: " << per_direction << " filters per direction requested, must lie in [1, " << n << "]";
        throw InvalidArgument(os.str());
    }

    auto [directions, eigenvalues] = between_directions(factor, n, tol);
    if (directions.cols() == 0)
        throw DegeneracyError("scaCSP: between-class scatter is zero; class means coincide");
    if (directions.cols() < class_count - 1) {
        std::ostringstream os;
        os << "scaCSP: between-class scatter rank " << directions.cols() << " below " << class_count - 1
           << "; proceeding with the detected rank";
        diag::warn(os.str());
    }

    ScaCspModel model;
    model.between_directions = directions;
    model.between_eigenvalues = eigenvalues;
    const Eigen::Index total = per_direction * directions.cols();
    Matrix u(n, total);
    Vector scores(total);
    Eigen::Index col = 0;
    for (Eigen::Index i = 0; i < directions.cols(); ++i) {
        const SymEig e = sym_eig(symmetrize(unvec(directions.col(i), n)));
        std::vector<Eigen::Index> picked;
        if (selection == Selection::per_tail) {
            for (Eigen::Index j = 0; j < m; ++j) picked.push_back(j);
            for (Eigen::Index j = n - m; j < n; ++j) picked.push_back(j);
        } else {
            std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
            std::iota(order.begin(), order.end(), Eigen::Index{0});
            std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
                return std::abs(e.values(a)) > std::abs(e.values(b));
            });
            picked.assign(order.begin(), order.begin() + m);
        }
        for (auto j : picked) {
            u.col(col) = e.vectors.col(j);
            scores(col) = e.values(j);
            ++col;
        }
        model.da.push_back(e.values);
    }

    model.bank.directions = u;
    model.bank.filters = whitener * u;
    model.bank.scores = scores;
    model.bank.whitener = whitener;
    model.bank.provenance.assign(static_cast<std::size_t>(total), Provenance::scacsp);
    model.projection = kron_projection(u);
    return model;
}

}  // namespace

VecCovSamples vectorize_covariances(const CovarianceSet& cov) {
    VecCovSamples v;
    v.channels = cov.channels();
    v.class_count = cov.class_count;
    v.labels = cov.labels;
    v.class_sizes = cov.class_sizes();
    v.whitener = cov.whitener;
    const Eigen::Index n2 = v.channels * v.channels;
    const auto count = static_cast<Eigen::Index>(cov.whitened_per_trial.size());
    v.samples.resize(n2, count);
    for (Eigen::Index i = 0; i < count; ++i) v.samples.col(i) = vec(cov.whitened_per_trial[static_cast<std::size_t>(i)]);
    v.class_means = Matrix::Zero(n2, cov.class_count);
    for (Eigen::Index i = 0; i < count; ++i) v.class_means.col(v.labels[static_cast<std::size_t>(i)] - 1) += v.samples.col(i);
    v.grand_mean = Vector::Zero(n2);
    for (int k = 0; k < cov.class_count; ++k) {
        const int size = v.class_sizes[static_cast<std::size_t>(k)];
        if (size == 0) throw DataError("vectorize_covariances: class " + std::to_string(k + 1) + " has no trials");
        v.class_means.col(k) /= static_cast<double>(size);
        v.grand_mean += static_cast<double>(size) * v.class_means.col(k);
    }
    v.grand_mean /= static_cast<double>(count);
    return v;
}

const ScatterSpace& ScatterTriple::space(ScatterSource s) const {
    switch (s) {
    case ScatterSource::between: return between;
    case ScatterSource::within: return within;
    case ScatterSource::total: return total;
    }
    throw InvalidArgument("unknown scatter source");
}

OrthoBasis ScatterTriple::basis(ScatterSource s, BasisKind kind) const {
    const ScatterSpace& sp = space(s);
    OrthoBasis b;
    b.kind = kind;
    b.source = s;
    b.columns = vec_from_svec_columns(kind == BasisKind::range ? sp.range_svec : sp.null_svec, channels);
    return b;
}

Vector ScatterTriple::apply(ScatterSource s, const Vector& x) const {
    const Matrix& d = space(s).factor;
    if (x.size() != d.rows()) throw InvalidArgument("scatter apply: vector length mismatch");
    return d * (d.transpose() * x);
}

Matrix ScatterTriple::explicit_matrix(ScatterSource s) const {
    const Matrix& d = space(s).factor;
    return d * d.transpose();
}

ScatterTriple scatter_matrices(const VecCovSamples& v, RankTolerance tol) {
    const auto count = v.samples.cols();
    if (count < 2) throw InvalidArgument("scatter_matrices: need at least 2 samples");
    ScatterTriple t;
    t.channels = v.channels;
    t.class_count = v.class_count;
    t.whitener = v.whitener;

    Matrix db(v.samples.rows(), v.class_count);
    for (int k = 0; k < v.class_count; ++k)
        db.col(k) = std::sqrt(static_cast<double>(v.class_sizes[static_cast<std::size_t>(k)])) *
                    (v.class_means.col(k) - v.grand_mean);
    Matrix dw(v.samples.rows(), count), dt(v.samples.rows(), count);
    for (Eigen::Index i = 0; i < count; ++i) {
        dw.col(i) = v.samples.col(i) - v.class_means.col(v.labels[static_cast<std::size_t>(i)] - 1);
        dt.col(i) = v.samples.col(i) - v.grand_mean;
    }
    t.between = space_from_factor(std::move(db), v.channels, tol, true);
    t.within = space_from_factor(std::move(dw), v.channels, tol, false);
    t.total = space_from_factor(std::move(dt), v.channels, tol, false);
    return t;
}

std::pair<Matrix, Vector> between_directions(const Matrix& between_factor, Eigen::Index channels,
                                             RankTolerance tol) {
    const Matrix fs = to_svec_columns(between_factor, channels);
    Eigen::BDCSVD<Matrix> svd(fs, Eigen::ComputeThinU);
    const Vector sigma = svd.singularValues();
    const int rank = count_rank(sigma, tol);
    Matrix range = svd.matrixU().leftCols(rank);
    canonicalize_signs(range);
    orient_by_factor(range, fs);
    return {vec_from_svec_columns(range, channels), sigma.head(rank).array().square()};
}

ScaCspModel scacsp_binary_train(const CovarianceSet& cov, int m) {
    if (cov.class_count != 2)
        throw InvalidArgument("scacsp_binary_train: needs exactly 2 classes, got " + std::to_string(cov.class_count));
    const double gap = (cov.whitened_class_mean(1) - cov.whitened_class_mean(2)).norm();
    const double threshold = 1e-12 * std::sqrt(static_cast<double>(cov.channels()));
    if (gap < threshold) {
        std::ostringstream os;
        os << "scacsp_binary_train: class means coincide, ||2d-1||_2 = " << gap << " is below " << threshold;
        throw DegeneracyError(os.str());
    }
    return scacsp_multi_train(cov, m, Selection::per_tail);
}

ScaCspModel scacsp_multi_train(const CovarianceSet& cov, int m, Selection selection, RankTolerance tol) {
    if (cov.class_count < 2) throw InvalidArgument("scacsp_multi_train: needs at least 2 classes");
    const VecCovSamples v = vectorize_covariances(cov);
    Matrix db(v.samples.rows(), v.class_count);
    for (int k = 0; k < v.class_count; ++k)
        db.col(k) = std::sqrt(static_cast<double>(v.class_sizes[static_cast<std::size_t>(k)])) *
                    (v.class_means.col(k) - v.grand_mean);
    return train_from_between(db, cov.whitener, cov.class_count, m, selection, tol);
}

Matrix unwhitened_between_factor(const CovarianceSet& cov) {
    const Eigen::Index n = cov.channels();
    const std::vector<int> sizes = cov.class_sizes();
    const double total = static_cast<double>(cov.per_trial.size());
    Vector grand = Vector::Zero(n * n);
    for (int k = 0; k < cov.class_count; ++k)
        grand += static_cast<double>(sizes[static_cast<std::size_t>(k)]) * vec(cov.class_means[static_cast<std::size_t>(k)]);
    grand /= total;
    Matrix d(n * n, cov.class_count);
    for (int k = 0; k < cov.class_count; ++k)
        d.col(k) = std::sqrt(static_cast<double>(sizes[static_cast<std::size_t>(k)])) *
                   (vec(cov.class_means[static_cast<std::size_t>(k)]) - grand);
    return d;
}

ScaCspModel scacsp_unwhitened_train(const CovarianceSet& cov, int m, Selection selection, RankTolerance tol) {
    if (cov.class_count < 2) throw InvalidArgument("scacsp_unwhitened_train: needs at least 2 classes");
    const Matrix d = unwhitened_between_factor(cov);
    Matrix whitened(d.rows(), d.cols());
    for (Eigen::Index k = 0; k < d.cols(); ++k) whitened.col(k) = kron_whiten_t(cov.whitener, d.col(k));
    return train_from_between(whitened, cov.whitener, cov.class_count, m, selection, tol);
}

Vector scacsp_features(const Matrix& projection, const Vector& r) {
    if (projection.rows() != r.size()) throw InvalidArgument("scacsp_features: dimension mismatch");
    return projection.transpose() * r;
}

Vector kron_whiten_t(const Matrix& whitener, const Vector& x) {
    const Matrix xm = unvec(x, whitener.rows());
    return vec(whitener.transpose() * xm * whitener);
}

Vector kron_whiten(const Matrix& whitener, const Vector& x) {
    const Matrix xm = unvec(x, whitener.cols());
    return vec(whitener * xm * whitener.transpose());
}

Vector kron_apply(const Matrix& c, const Vector& x) {
    const Matrix xm = unvec(x, c.cols());
    return vec(c * xm * c.transpose());
}

}  // namespace scacsp
