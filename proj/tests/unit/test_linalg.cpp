#include "scacsp/error.hpp"
#include "scacsp/linalg.hpp"
#include "scacsp/oracle.hpp"
#include "support.hpp"

#include <catch_amalgamated.hpp>

#include <limits>

using namespace scacsp;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("sym_eig reconstructs and orders", "[linalg]") {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const Eigen::Index n = 2 + static_cast<Eigen::Index>(seed % 9);
        const Matrix a = test_support::random_symmetric(n, seed);
        const SymEig e = sym_eig(a);
        const Matrix back = e.vectors * e.values.asDiagonal() * e.vectors.transpose();
        CHECK((back - a).norm() <= 1e-12 * std::max(1.0, a.norm()));
        CHECK((e.vectors.transpose() * e.vectors - Matrix::Identity(n, n)).norm() <= 1e-12);
        for (Eigen::Index i = 1; i < n; ++i) CHECK(e.values(i - 1) >= e.values(i));
        for (Eigen::Index j = 0; j < n; ++j) {
            Eigen::Index arg;
            e.vectors.col(j).cwiseAbs().maxCoeff(&arg);
            CHECK(e.vectors(arg, j) > 0.0);
        }
    }
}

TEST_CASE("sym_eig agrees with closed-form roots on 2x2 and 3x3", "[linalg][oracle]") {
    for (std::uint64_t seed = 100; seed < 130; ++seed) {
        const Eigen::Index n = seed % 2 ? 2 : 3;
        const Matrix a = test_support::random_symmetric(n, seed);
        const Vector lib = sym_eig(a).values;
        const Vector ref = oracle::small_sym_eigenvalues(a);
        for (Eigen::Index i = 0; i < n; ++i) CHECK_THAT(lib(i), WithinAbs(ref(i), 1e-10));
    }
    Matrix diag = Matrix::Zero(3, 3);
    diag.diagonal() << 1.0, 5.0, 3.0;
    const Vector v = sym_eig(diag).values;
    CHECK(v(0) == 5.0);
    CHECK(v(1) == 3.0);
    CHECK(v(2) == 1.0);
}

TEST_CASE("sym_eig rejects bad input", "[linalg]") {
    CHECK_THROWS_AS(sym_eig(Matrix::Ones(2, 3)), InvalidArgument);
    Matrix asym = Matrix::Identity(3, 3);
    asym(0, 2) = 1.0;
    CHECK_THROWS_AS(sym_eig(asym), InvalidArgument);
    Matrix nan = Matrix::Identity(2, 2);
    nan(1, 1) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(sym_eig(nan), InvalidArgument);
}

TEST_CASE("gen_sym_eig solves the pencil and matches the Rayleigh extremum", "[linalg][oracle]") {
    for (std::uint64_t seed = 1; seed <= 15; ++seed) {
        const Eigen::Index n = 3 + static_cast<Eigen::Index>(seed % 6);
        const Matrix a = test_support::random_symmetric(n, seed * 7);
        const Matrix b = test_support::random_spd(n, seed * 11, 50.0);
        const SymEig e = gen_sym_eig(a, b);
        CHECK((a * e.vectors - b * e.vectors * e.values.asDiagonal()).norm() <= 1e-9 * a.norm());
        CHECK((e.vectors.transpose() * b * e.vectors - Matrix::Identity(n, n)).norm() <= 1e-9);
        const auto [top, w_top] = oracle::rayleigh_extremum(a, b, true);
        const auto [bottom, w_bottom] = oracle::rayleigh_extremum(a, b, false);
        CHECK_THAT(e.values(0), WithinAbs(top, 1e-9 * std::max(1.0, std::abs(top))));
        CHECK_THAT(e.values(n - 1), WithinAbs(bottom, 1e-9 * std::max(1.0, std::abs(bottom))));
        const Vector u = e.vectors.col(0).normalized();
        CHECK(std::abs(u.dot(w_top)) >= 1.0 - 1e-8);
    }
}

TEST_CASE("gen_sym_eig requires a positive definite right-hand side", "[linalg]") {
    Matrix b = Matrix::Identity(3, 3);
    b(2, 2) = -1.0;
    CHECK_THROWS_AS(gen_sym_eig(Matrix::Identity(3, 3), b), DefinitenessError);
    CHECK_THROWS_AS(gen_sym_eig(Matrix::Identity(3, 3), Matrix::Zero(3, 3)), DefinitenessError);
}

TEST_CASE("whitening_transform whitens and detects rank loss", "[linalg]") {
    const Matrix c = test_support::random_spd(6, 42, 1e3);
    const Matrix p = whitening_transform(c);
    CHECK((p.transpose() * c * p - Matrix::Identity(6, 6)).norm() <= 1e-10);

    Vector u = Vector::Ones(4);
    const Matrix singular = u * u.transpose();
    CHECK_THROWS_AS(whitening_transform(singular), RankError);
    try {
        whitening_transform(singular);
    } catch (const RankError& e) {
        CHECK(e.deficient_dimensions() == 3);
    }
}

TEST_CASE("vec and unvec round-trip", "[linalg]") {
    const Matrix a = test_support::random_symmetric(5, 3) + Matrix::Identity(5, 5);
    Matrix g = a;
    g(0, 4) += 1.0;  // non-symmetric on purpose
    const Vector v = vec(g);
    CHECK(v.size() == 25);
    CHECK(v(1) == g(1, 0));  // column stacking
    CHECK(v(5) == g(0, 1));
    CHECK(unvec(v, 5) == g);
    CHECK(unvec(v) == g);
    CHECK_THROWS_AS(unvec(Vector::Ones(24), 5), InvalidArgument);
    CHECK_THROWS_AS(unvec(Vector::Ones(24)), InvalidArgument);
}

TEST_CASE("svec is an isometry on symmetric matrices", "[linalg]") {
    CHECK(svec_dim(22) == 253);
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const Eigen::Index n = 1 + static_cast<Eigen::Index>(seed % 7);
        const Matrix a = test_support::random_symmetric(n, seed);
        const Matrix b = test_support::random_symmetric(n, seed + 50);
        CHECK_THAT(svec(a).dot(svec(b)), WithinAbs((a.array() * b.array()).sum(), 1e-12));
        CHECK((smat(svec(a), n) - a).norm() <= 1e-14);
        CHECK((vec_from_svec(svec(a), n) - vec(a)).norm() <= 1e-14);
        Matrix g = a;
        g(0, n - 1) += 3.0;
        CHECK((svec_from_vec(vec(g), n) - svec(symmetrize(g))).norm() <= 1e-14);
    }
    const Eigen::Index n = 4;
    const Matrix cols = vec_from_svec_columns(Matrix::Identity(svec_dim(n), svec_dim(n)), n);
    CHECK((cols.transpose() * cols - Matrix::Identity(svec_dim(n), svec_dim(n))).norm() <= 1e-14);
}

TEST_CASE("kron of vectors matches vec of the outer product", "[linalg]") {
    Vector a(3), b(2);
    a << 1.0, -2.0, 3.0;
    b << 4.0, 5.0;
    const Vector k = kron(a, b);
    REQUIRE(k.size() == 6);
    for (Eigen::Index i = 0; i < 3; ++i)
        for (Eigen::Index j = 0; j < 2; ++j) CHECK(k(i * 2 + j) == a(i) * b(j));
    const Vector u = Vector::LinSpaced(4, -1.0, 2.0);
    CHECK((kron(u, u) - vec(u * u.transpose())).norm() == 0.0);
}

TEST_CASE("range_null_bases rank matches the Gram oracle", "[linalg][oracle]") {
    synth::Rng rng(9);
    for (int rank = 1; rank <= 6; ++rank) {
        const Matrix samples = rng.gaussian_matrix(10, rank) * rng.gaussian_matrix(rank, 15);
        const auto [basis, r] = range_null_bases(samples, Vector::Zero(10));
        CHECK(r == rank);
        CHECK(r == oracle::gram_rank(samples, 1e-6));
        CHECK(basis.dim() == rank);
        CHECK((basis.columns.transpose() * basis.columns - Matrix::Identity(rank, rank)).norm() <= 1e-12);
        // every sample lies in the range
        const Matrix resid = samples - basis.columns * (basis.columns.transpose() * samples);
        CHECK(resid.norm() <= 1e-10 * samples.norm());
    }
}

TEST_CASE("principal cosines and sign canonicalization", "[linalg]") {
    const Matrix a = test_support::random_symmetric(6, 1).leftCols(3);
    const Matrix mixed = a * test_support::random_spd(3, 2);
    const Vector same = principal_cosines(a, mixed);
    for (Eigen::Index i = 0; i < same.size(); ++i) CHECK_THAT(same(i), WithinAbs(1.0, 1e-12));
    const Matrix e = Matrix::Identity(4, 4);
    const Vector orth = principal_cosines(e.leftCols(2), e.rightCols(2));
    CHECK(orth.cwiseAbs().maxCoeff() <= 1e-15);

    Matrix cols(3, 2);
    cols << 0.1, 0.5, -0.9, 0.2, 0.3, -0.7;
    canonicalize_signs(cols);
    CHECK(cols(1, 0) == 0.9);
    CHECK(cols(2, 1) == 0.7);
}
