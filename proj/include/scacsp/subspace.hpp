#pragma once

// Filters and feature components drawn from the range / null spaces of the
// scatter matrices of vectorized covariances.

#include "scacsp/scacsp.hpp"

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace scacsp {

enum class Subspace { sb_range, sb_null, sw_range, sw_null, st_range, st_null };

inline constexpr std::array<Subspace, 6> all_subspaces{Subspace::sb_range, Subspace::sb_null, Subspace::sw_range,
                                                       Subspace::sw_null,  Subspace::st_range, Subspace::st_null};

std::string_view to_string(Subspace s);
/// Parses "Sb_range", "Sw_null", … (case-insensitive).
Subspace subspace_from_string(std::string_view s);
ScatterSource source_of(Subspace s);
BasisKind kind_of(Subspace s);
Provenance extra_provenance(Subspace s);

/// Symmetric-restricted basis of a subspace in vec coordinates. Dimension 0 means semi-empty.
OrthoBasis subspace_basis(const ScatterTriple& scatter, Subspace s);
bool semi_empty(const ScatterTriple& scatter, Subspace s);

struct SubspaceSelector {
    std::vector<Subspace> tags;  // canonical order, no duplicates

    /// Comma-separated tags, e.g. "Sw_range,St_range".
    static SubspaceSelector parse(std::string_view list);
    std::string to_string() const;
};

/// Pools the eigenpairs of sym(unvec(b)) over every basis vector b of the
/// selected subspaces, drops near-duplicate directions (|cos| > 1−1e-6, keeping
/// the larger |λ|), and returns the m of largest |λ| mapped through the
/// whitener. Semi-empty subspaces are skipped; SemiEmptyError if all are.
/// Scores are |λ|, non-increasing.
FilterBank extra_filters(const ScatterTriple& scatter, const SubspaceSelector& selector, int m);

/// `primary` followed by the filters of `extra` that do not duplicate any earlier one.
FilterBank merge_banks(const FilterBank& primary, const FilterBank& extra);

enum class NsrMode { none, cnsr, bnsr };
std::string_view to_string(NsrMode m);
NsrMode nsr_mode_from_string(std::string_view s);

/// r ↦ r − QQᵀr with Q the symmetric null basis of S_t (common) or S_b
/// (between-class), stored through the complementary range basis U:
/// r − QQᵀr = UUᵀr + skew part of r.
struct NsrProjector {
    NsrMode mode = NsrMode::none;
    OrthoBasis range;
    bool applicable = true;
    Eigen::Index channels = 0;

    Vector reduce(const Vector& r) const;
    Matrix reduce_columns(const Matrix& r) const;
};

/// Inapplicable (with a warning) when the targeted null space is semi-empty.
NsrProjector nsr_projector(const ScatterTriple& scatter, NsrMode mode);

/// f = Vᵀ(I − QQᵀ)r. Throws InvalidArgument for an inapplicable projector.
Vector reduce_features(const NsrProjector& proj, const Matrix& projection, const Vector& r);

/// Accuracy for every (filter subspace, component subspace) pair.
/// Column 0 is "no projection"; columns 1..6 follow all_subspaces.
struct SubspaceGrid {
    using Row = std::array<std::optional<double>, 7>;
    std::array<Row, 6> train{};
    std::array<Row, 6> test{};
    int filters_per_source = 0;

    static std::string column_name(std::size_t col);
};

/// Filters come from scaCSP for Sb_range and from extra_filters otherwise,
/// 2m(N_Ω−1) per source; features are V_aᵀ·BBᵀr for component basis B
/// (log quadratic forms when unprojected). Semi-empty rows and columns stay empty.
SubspaceGrid empirical_grid(const CovarianceSet& train, const std::vector<Matrix>& test_covs,
                            const std::vector<int>& test_labels, int m, RankTolerance tol = {});

}  // namespace scacsp
