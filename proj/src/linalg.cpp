#include "scacsp/linalg.hpp"

#include "scacsp/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <vector>

namespace scacsp {

std::string_view to_string(ScatterSource s) {
    switch (s) {
    case ScatterSource::between: return "Sb";
    case ScatterSource::within: return "Sw";
    case ScatterSource::total: return "St";
    }
    return "?";
}

namespace {

void require_square_finite(const Matrix& a, const char* what) {
    if (a.rows() != a.cols()) {
        std::ostringstream os;
        os << what << ": expected a square matrix, got " << a.rows() << "x" << a.cols();
        throw InvalidArgument(os.str());
    }
    if (!a.allFinite()) throw InvalidArgument(std::string(what) + ": matrix has non-finite entries");
}

// Index of the largest-magnitude entry; the first one wins on near-ties.
Eigen::Index dominant_index(const Eigen::Ref<const Vector>& v) {
    const double peak = v.cwiseAbs().maxCoeff();
    const double cut = peak * (1.0 - 1e-12);
    for (Eigen::Index i = 0; i < v.size(); ++i)
        if (std::abs(v(i)) >= cut) return i;
    return 0;
}

bool lex_greater(const Eigen::Ref<const Vector>& a, const Eigen::Ref<const Vector>& b) {
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        if (a(i) > b(i)) return true;
        if (a(i) < b(i)) return false;
    }
    return false;
}

}  // namespace

void canonicalize_signs(Matrix& columns) {
    for (Eigen::Index j = 0; j < columns.cols(); ++j) {
        if (columns.rows() == 0) continue;
        const Eigen::Index k = dominant_index(columns.col(j));
        if (columns(k, j) < 0.0) columns.col(j) = -columns.col(j);
    }
}

Matrix symmetrize(const Matrix& a) { return 0.5 * (a + a.transpose()); }

SymEig sym_eig(const Matrix& a) {
    require_square_finite(a, "sym_eig");
    const Eigen::Index n = a.rows();
    if (n == 0) return {};

    const double norm = a.norm();
    const double asym = (a - a.transpose()).norm();
    if (asym > 1e-9 * norm) {
        std::ostringstream os;
        os << "sym_eig: matrix is not symmetric (relative asymmetry " << asym / norm << ")";
        throw InvalidArgument(os.str());
    }

    Eigen::SelfAdjointEigenSolver<Matrix> solver(symmetrize(a));
    if (solver.info() != Eigen::Success) throw NumericalError("sym_eig: eigensolver did not converge");

    // Eigen returns ascending order.
    Vector values = solver.eigenvalues().reverse();
    Matrix vectors = solver.eigenvectors().rowwise().reverse();
    canonicalize_signs(vectors);

    // Within runs of (numerically) equal eigenvalues order vectors lexicographically.
    const double tie = 1e-12 * values.cwiseAbs().maxCoeff();
    Eigen::Index start = 0;
    while (start < n) {
        Eigen::Index end = start + 1;
        while (end < n && values(end - 1) - values(end) <= tie) ++end;
        if (end - start > 1) {
            std::vector<Eigen::Index> order(static_cast<std::size_t>(end - start));
            std::iota(order.begin(), order.end(), start);
            std::stable_sort(order.begin(), order.end(), [&](Eigen::Index x, Eigen::Index y) {
                return lex_greater(vectors.col(x), vectors.col(y));
            });
            Matrix block(n, end - start);
            for (std::size_t i = 0; i < order.size(); ++i) block.col(static_cast<Eigen::Index>(i)) = vectors.col(order[i]);
            vectors.middleCols(start, end - start) = block;
        }
        start = end;
    }
    return {std::move(values), std::move(vectors)};
}

SymEig gen_sym_eig(const Matrix& a, const Matrix& b, RankTolerance tol) {
    require_square_finite(a, "gen_sym_eig");
    require_square_finite(b, "gen_sym_eig");
    if (a.rows() != b.rows()) throw InvalidArgument("gen_sym_eig: A and B differ in size");

    const SymEig be = sym_eig(b);
    const double top = be.values(0);
    const double bottom = be.values(be.values.size() - 1);
    if (!(top > 0.0) || !(bottom > tol.relative * top)) {
        std::ostringstream os;
        os << "gen_sym_eig: B is not positive definite (smallest eigenvalue " << bottom
           << ", largest " << top << ")";
        throw DefinitenessError(os.str(), bottom);
    }

    Eigen::LLT<Matrix> llt(symmetrize(b));
    if (llt.info() != Eigen::Success)
        throw DefinitenessError("gen_sym_eig: Cholesky factorization of B failed", bottom);

    const auto l = llt.matrixL();
    Matrix half = l.solve(symmetrize(a));                    // L⁻¹A
    Matrix reduced = l.solve(half.transpose()).transpose();  // L⁻¹AL⁻ᵀ (transpose of L⁻¹(L⁻¹A)ᵀ)
    SymEig std_eig = sym_eig(symmetrize(reduced));

    Matrix w = llt.matrixU().solve(std_eig.vectors);  // L⁻ᵀY
    canonicalize_signs(w);
    return {std::move(std_eig.values), std::move(w)};
}

Matrix whitening_transform(const Matrix& c, RankTolerance tol) {
    const SymEig e = sym_eig(c);
    const Eigen::Index n = e.values.size();
    if (n == 0) throw InvalidArgument("whitening_transform: empty matrix");
    const double top = e.values(0);
    int deficient = 0;
    for (Eigen::Index i = 0; i < n; ++i)
        if (!(e.values(i) > tol.relative * top)) ++deficient;
    if (deficient > 0 || !(top > 0.0)) {
        std::ostringstream os;
        os << "whitening_transform: matrix is rank deficient by " << std::max(deficient, 1)
           << " of " << n << " dimensions";
        throw RankError(os.str(), std::max(deficient, 1));
    }
    return e.vectors * e.values.cwiseSqrt().cwiseInverse().asDiagonal();
}

Vector vec(const Matrix& m) { return Eigen::Map<const Vector>(m.data(), m.size()); }

Matrix unvec(const Vector& v, Eigen::Index n) {
    if (n < 0 || n * n != v.size()) {
        std::ostringstream os;
        os << "unvec: length " << v.size() << " is not " << n << "^2";
        throw InvalidArgument(os.str());
    }
    return Eigen::Map<const Matrix>(v.data(), n, n);
}

Matrix unvec(const Vector& v) {
    const auto n = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(v.size()))));
    if (n * n != v.size()) {
        std::ostringstream os;
        os << "unvec: length " << v.size() << " is not a perfect square";
        throw InvalidArgument(os.str());
    }
    return unvec(v, n);
}

Vector kron(const Vector& a, const Vector& b) {
    Vector out(a.size() * b.size());
    for (Eigen::Index i = 0; i < a.size(); ++i) out.segment(i * b.size(), b.size()) = a(i) * b;
    return out;
}

Eigen::Index svec_dim(Eigen::Index n) { return n * (n + 1) / 2; }

Vector svec(const Matrix& sym) {
    const Eigen::Index n = sym.rows();
    Vector s(svec_dim(n));
    Eigen::Index k = 0;
    for (Eigen::Index j = 0; j < n; ++j) {
        s(k++) = sym(j, j);
        for (Eigen::Index i = j + 1; i < n; ++i) s(k++) = M_SQRT2 * 0.5 * (sym(i, j) + sym(j, i));
    }
    return s;
}

Matrix smat(const Vector& s, Eigen::Index n) {
    if (s.size() != svec_dim(n)) throw InvalidArgument("smat: length does not match n(n+1)/2");
    Matrix m(n, n);
    Eigen::Index k = 0;
    for (Eigen::Index j = 0; j < n; ++j) {
        m(j, j) = s(k++);
        for (Eigen::Index i = j + 1; i < n; ++i) {
            const double x = s(k++) * M_SQRT1_2;
            m(i, j) = x;
            m(j, i) = x;
        }
    }
    return m;
}

Vector svec_from_vec(const Vector& v, Eigen::Index n) {
    if (v.size() != n * n) throw InvalidArgument("svec_from_vec: length does not match n^2");
    Vector s(svec_dim(n));
    Eigen::Index k = 0;
    for (Eigen::Index j = 0; j < n; ++j) {
        s(k++) = v(j * n + j);
        for (Eigen::Index i = j + 1; i < n; ++i) s(k++) = M_SQRT1_2 * (v(j * n + i) + v(i * n + j));
    }
    return s;
}

Vector vec_from_svec(const Vector& s, Eigen::Index n) { return vec(smat(s, n)); }

Matrix vec_from_svec_columns(const Matrix& s, Eigen::Index n) {
    Matrix out(n * n, s.cols());
    for (Eigen::Index j = 0; j < s.cols(); ++j) out.col(j) = vec_from_svec(s.col(j), n);
    return out;
}

std::pair<OrthoBasis, int> range_null_bases(const Matrix& samples, const Vector& center, RankTolerance tol,
                                            ScatterSource source) {
    if (samples.cols() < 1) throw InvalidArgument("range_null_bases: need at least one sample column");
    if (center.size() != samples.rows()) throw InvalidArgument("range_null_bases: center has wrong length");
    const Matrix centered = samples.colwise() - center;

    OrthoBasis basis;
    basis.kind = BasisKind::range;
    basis.source = source;
    if (centered.rows() == 0) {
        basis.columns = Matrix(0, 0);
        return {basis, 0};
    }
    Eigen::BDCSVD<Matrix> svd(centered, Eigen::ComputeThinU);
    const Vector& sigma = svd.singularValues();
    const double top = sigma.size() > 0 ? sigma(0) : 0.0;
    int rank = 0;
    if (top > 0.0)
        for (Eigen::Index i = 0; i < sigma.size(); ++i)
            if (sigma(i) > tol.relative * top) ++rank;
    basis.columns = svd.matrixU().leftCols(rank);
    canonicalize_signs(basis.columns);
    return {basis, rank};
}

Vector principal_cosines(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows()) throw InvalidArgument("principal_cosines: row mismatch");
    auto orth = [](const Matrix& m) {
        Eigen::BDCSVD<Matrix> svd(m, Eigen::ComputeThinU);
        const Vector& s = svd.singularValues();
        Eigen::Index r = 0;
        while (r < s.size() && s(r) > 1e-13 * s(0)) ++r;
        return Matrix(svd.matrixU().leftCols(r));
    };
    const Matrix qa = orth(a);
    const Matrix qb = orth(b);
    if (qa.cols() == 0 || qb.cols() == 0) return Vector();
    Eigen::BDCSVD<Matrix> svd(qa.transpose() * qb);
    return svd.singularValues().cwiseMin(1.0);
}

}  // namespace scacsp
