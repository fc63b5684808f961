#pragma once

// Dense symmetric linear algebra with fixed ordering and sign conventions.
//
// Every eigen-solver in this header returns eigenvalues in non-increasing
// order and eigenvectors whose largest-magnitude entry is positive, so that
// filter banks built on top of them are reproducible run to run.

#include <Eigen/Dense>

#include <string_view>
#include <utility>

namespace scacsp {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Relative cutoff below which singular values / eigenvalues count as zero.
struct RankTolerance {
    double relative = 1e-10;
};

/// Which scatter matrix a basis belongs to.
enum class ScatterSource { between, within, total };
enum class BasisKind { range, null };

std::string_view to_string(ScatterSource s);

/// Symmetric eigendecomposition: values non-increasing, vectors orthonormal.
struct SymEig {
    Vector values;
    Matrix vectors;
};

/// Matrix with orthonormal columns plus a tag saying which subspace it spans.
struct OrthoBasis {
    Matrix columns;
    BasisKind kind = BasisKind::range;
    ScatterSource source = ScatterSource::total;

    Eigen::Index dim() const { return columns.cols(); }
};

/// Eigendecomposition of a symmetric matrix. The input is symmetrized as (A+Aᵀ)/2.
/// Throws InvalidArgument for non-square input, non-finite entries, or
/// relative asymmetry above 1e-9.
SymEig sym_eig(const Matrix& a);

/// Solves A·w = λ·B·w for symmetric A and SPD B by Cholesky reduction.
/// Columns satisfy wᵀBw = 1. Throws DefinitenessError if B is not
/// positive definite at `tol`.
SymEig gen_sym_eig(const Matrix& a, const Matrix& b, RankTolerance tol = {});

/// P = U·Λ^(-1/2) from C = U·Λ·Uᵀ, so that PᵀCP = I.
/// Throws RankError when eigenvalues fall below tol·λ_max.
Matrix whitening_transform(const Matrix& c, RankTolerance tol = {});

/// Column-stacking vectorization.
Vector vec(const Matrix& m);
/// Inverse of vec; throws InvalidArgument if the length is not n·n.
Matrix unvec(const Vector& v, Eigen::Index n);
Matrix unvec(const Vector& v);

/// (A+Aᵀ)/2
Matrix symmetrize(const Matrix& a);

/// Kronecker product a⊗b of two vectors.
Vector kron(const Vector& a, const Vector& b);

/// Half-vectorization isometry between symmetric n×n matrices and
/// R^{n(n+1)/2}: diagonal entries as-is, off-diagonal entries scaled by √2,
/// lower triangle in column-major order. ⟨svec(A), svec(B)⟩ = ⟨A, B⟩_F.
Eigen::Index svec_dim(Eigen::Index n);
Vector svec(const Matrix& sym);
Matrix smat(const Vector& s, Eigen::Index n);
/// svec of the symmetric part of unvec(v).
Vector svec_from_vec(const Vector& v, Eigen::Index n);
/// vec(smat(s)); columns of an orthonormal svec basis map to orthonormal vec columns.
Vector vec_from_svec(const Vector& s, Eigen::Index n);
Matrix vec_from_svec_columns(const Matrix& s, Eigen::Index n);

/// Orthonormal basis of the column space of `samples - center·1ᵀ`.
/// The rank counts singular values above tol·σ_max. The null projector is
/// I − UUᵀ and is never formed explicitly.
std::pair<OrthoBasis, int> range_null_bases(const Matrix& samples, const Vector& center,
                                            RankTolerance tol = {},
                                            ScatterSource source = ScatterSource::total);

/// Flips each column so its largest-magnitude entry (first one on near-ties) is positive.
void canonicalize_signs(Matrix& columns);

/// Cosines of the principal angles between the column spans of a and b
/// (sorted non-increasing). Both inputs may be non-orthonormal.
Vector principal_cosines(const Matrix& a, const Matrix& b);

}  // namespace scacsp
