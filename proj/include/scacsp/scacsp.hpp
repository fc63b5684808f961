#pragma once

// Scatter-based CSP over vectorized whitened covariances.
//
// Each trial contributes r_i = vec(R_i). Between-, within- and total
// scatter of these samples are kept as centered-sample factors D with
// S = D·Dᵀ; their bases are computed in half-vectorized coordinates so that
// antisymmetric directions never enter.

#include "scacsp/filters.hpp"
#include "scacsp/preprocess.hpp"

#include <string_view>
#include <vector>

namespace scacsp {

struct VecCovSamples {
    Eigen::Index channels = 0;
    int class_count = 0;
    Matrix samples;       // N_c² × |Ω|, columns r_i
    Matrix class_means;   // N_c² × N_Ω, columns r̃_k
    Vector grand_mean;    // r̃ = Σ|Ω_k| r̃_k / |Ω|
    std::vector<int> labels;
    std::vector<int> class_sizes;
    Matrix whitener;      // P_c the samples were whitened with
};

VecCovSamples vectorize_covariances(const CovarianceSet& cov);

/// Range / symmetric null split of one scatter matrix.
struct ScatterSpace {
    Matrix factor;        // D with S = D·Dᵀ, vec coordinates
    Matrix range_svec;    // orthonormal, svec coordinates
    Matrix null_svec;     // orthonormal complement of range_svec within svec space
    Vector eigenvalues;   // nonzero eigenvalues of S, non-increasing, paired with range_svec
    int rank = 0;
};

struct ScatterTriple {
    Eigen::Index channels = 0;
    int class_count = 0;
    Matrix whitener;
    ScatterSpace between, within, total;

    const ScatterSpace& space(ScatterSource s) const;
    Eigen::Index symmetric_dim() const { return svec_dim(channels); }
    bool semi_full(ScatterSource s) const { return space(s).rank == symmetric_dim(); }
    /// Orthonormal basis in vec coordinates; null bases are restricted to symmetric vecs.
    OrthoBasis basis(ScatterSource s, BasisKind kind) const;
    /// S·x without forming S.
    Vector apply(ScatterSource s, const Vector& x) const;
    /// Dense N_c²×N_c² scatter; only for small problems and debugging.
    Matrix explicit_matrix(ScatterSource s) const;
};

/// Range bases and ranks of S_b, S_w, S_t. Ranks count singular values of the
/// factors above tol·σ_max.
ScatterTriple scatter_matrices(const VecCovSamples& v, RankTolerance tol = {});

/// Per-direction eigenvector selection.
enum class Selection {
    automatic,          // per-tail for two classes, largest magnitude otherwise
    per_tail,           // m largest and m smallest eigenvalues
    largest_magnitude,  // m eigenvalues of largest |λ|
};

struct ScaCspModel {
    FilterBank bank;                 // provenance scacsp, directions filled
    std::vector<Vector> da;          // full eigenvalue vector per S_b direction (unit norm)
    Matrix projection;               // V_a, columns u⊗u
    Matrix between_directions;       // S_b range basis in vec coordinates
    Vector between_eigenvalues;
};

/// Binary fast path: the single S_b direction, per-tail selection of m filters each.
/// Throws DegeneracyError when ‖R̃₁ − R̃₂‖_F < 1e-12·√N_c.
ScaCspModel scacsp_binary_train(const CovarianceSet& cov, int m);

/// Multi-class scaCSP: every S_b range direction contributes m filters
/// (2m under per-tail selection).
ScaCspModel scacsp_multi_train(const CovarianceSet& cov, int m, Selection selection = Selection::automatic,
                               RankTolerance tol = {});

/// The same filters computed from un-whitened vecs through the Kronecker whitener P_c⊗P_c.
ScaCspModel scacsp_unwhitened_train(const CovarianceSet& cov, int m, Selection selection = Selection::automatic,
                                    RankTolerance tol = {});

/// f = V_aᵀ r.
Vector scacsp_features(const Matrix& projection, const Vector& r);

/// S_b directions (vec coordinates) and eigenvalues from a between-class
/// factor, oriented so each has a positive projection onto the first class
/// mean deviation it is not orthogonal to.
std::pair<Matrix, Vector> between_directions(const Matrix& between_factor, Eigen::Index channels,
                                             RankTolerance tol = {});

/// Kronecker whitener products: Pᵀx = vec(P_cᵀ X P_c), P x = vec(P_c X P_cᵀ), with X = unvec(x).
Vector kron_whiten_t(const Matrix& whitener, const Vector& x);
Vector kron_whiten(const Matrix& whitener, const Vector& x);
/// (C⊗C)x = vec(C X Cᵀ).
Vector kron_apply(const Matrix& c, const Vector& x);

/// Between-class factor of un-whitened vec(C_i) samples: columns √|Ω_k|(c̃_k − c̃).
Matrix unwhitened_between_factor(const CovarianceSet& cov);

}  // namespace scacsp
