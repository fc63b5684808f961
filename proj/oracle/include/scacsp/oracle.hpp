#pragma once

// Brute-force reference computations. Deliberately different algorithms from
// the library's, for cross-checking only.

#include "scacsp/scacsp.hpp"

#include <utility>

namespace scacsp::oracle {

/// Extremum of wᵀAw / wᵀBw via a general eigensolve of B⁻¹A (explicit inverse).
/// Returns (value, unit-norm maximizer or minimizer).
std::pair<double, Vector> rayleigh_extremum(const Matrix& a, const Matrix& b, bool maximize = true);

struct ExplicitScatter {
    Matrix between, within, total;
};

/// Literal double-loop sums of the between-, within- and total scatter of the
/// vectorized samples. Throws InvalidArgument for more than 12 channels.
ExplicitScatter explicit_scatter(const VecCovSamples& v);

/// Roots of the characteristic polynomial of a symmetric 2×2 or 3×3 matrix,
/// non-increasing (closed form / trigonometric method).
Vector small_sym_eigenvalues(const Matrix& a);

/// Rank by counting Gram-matrix eigenvalues above (tol·σ_max)².
int gram_rank(const Matrix& samples, double tol);

}  // namespace scacsp::oracle
