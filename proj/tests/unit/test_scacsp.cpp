#include "scacsp/csp.hpp"
#include "scacsp/error.hpp"
#include "scacsp/kernels.hpp"
#include "scacsp/oracle.hpp"
#include "scacsp/scacsp.hpp"
#include "support.hpp"

#include <catch_amalgamated.hpp>

#include <algorithm>

using namespace scacsp;
using Catch::Matchers::WithinAbs;

TEST_CASE("scatter factors reproduce the explicit scatter sums", "[scacsp][oracle]") {
    for (std::uint64_t seed = 1; seed <= 4; ++seed) {
        const CovarianceSet cov = test_support::make_cov_set(4 + static_cast<Eigen::Index>(seed), 3, 10, seed);
        const VecCovSamples v = vectorize_covariances(cov);
        const ScatterTriple s = scatter_matrices(v);
        const oracle::ExplicitScatter ref = oracle::explicit_scatter(v);
        CHECK(test_support::rel_fro(s.explicit_matrix(ScatterSource::between), ref.between) <= 1e-12);
        CHECK(test_support::rel_fro(s.explicit_matrix(ScatterSource::within), ref.within) <= 1e-12);
        CHECK(test_support::rel_fro(s.explicit_matrix(ScatterSource::total), ref.total) <= 1e-12);
        CHECK(test_support::rel_fro(ref.between + ref.within, ref.total) <= 1e-8);

        synth::Rng rng(seed);
        const Vector x = rng.gaussian_matrix(v.samples.rows(), 1);
        for (auto src : {ScatterSource::between, ScatterSource::within, ScatterSource::total}) {
            const Vector y = s.apply(src, x);
            const Vector z = s.explicit_matrix(src) * x;
            CHECK((y - z).norm() <= 1e-10 * std::max(1.0, z.norm()));
        }
    }
}

TEST_CASE("scatter ranks follow the sample-count formula", "[scacsp][property]") {
    struct Case {
        int per_class, classes;
        Eigen::Index channels;
    };
    for (const Case c : {Case{20, 2, 6}, Case{5, 3, 5}, Case{3, 2, 6}, Case{40, 4, 8}}) {
        const CovarianceSet cov = test_support::make_cov_set(c.channels, c.classes, c.per_class, 17, 1.0, 0, 0.3);
        const ScatterTriple s = scatter_matrices(vectorize_covariances(cov));
        const int total = c.per_class * c.classes;
        const auto d = static_cast<int>(svec_dim(c.channels));
        CHECK(s.between.rank == std::min(c.classes - 1, d));
        CHECK(s.within.rank == std::min(total - c.classes, d));
        CHECK(s.total.rank == std::min(total - 1, d));
        CHECK(s.semi_full(ScatterSource::total) == (total - 1 >= d));
        for (auto src : {ScatterSource::between, ScatterSource::within, ScatterSource::total}) {
            const auto& sp = s.space(src);
            CHECK(sp.range_svec.cols() + sp.null_svec.cols() == d);
            const Matrix all = (Matrix(d, d) << sp.range_svec, sp.null_svec).finished();
            CHECK((all.transpose() * all - Matrix::Identity(d, d)).norm() <= 1e-10);
            CHECK(oracle::gram_rank(sp.factor, 1e-6) == sp.rank);
        }
    }
}

TEST_CASE("binary scaCSP reproduces CSP", "[scacsp]") {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const Eigen::Index n = 4 + static_cast<Eigen::Index>(seed % 5);
        const int per = 15 + static_cast<int>(seed % 3) * 7;
        const CovarianceSet cov = test_support::make_cov_set(n, 2, per, seed * 101, 0.8, 0, 0.1);
        const int m = 2;
        const FilterBank csp = csp_train(cov, m);
        const ScaCspModel sca = scacsp_binary_train(cov, m);
        REQUIRE(sca.bank.size() == 2 * m);
        CHECK(test_support::worst_column_match(sca.bank.filters, csp.filters) >= 1.0 - 1e-8);
        CHECK(test_support::worst_column_match(csp.filters, sca.bank.filters) >= 1.0 - 1e-8);

        const Matrix f_csp = features_from_covariances(csp.filters, cov.per_trial, true);
        const Matrix f_sca = features_from_covariances(sca.bank.filters, cov.per_trial, true);
        // same filters in the same order (largest tail first): features agree elementwise
        CHECK((f_csp - f_sca).cwiseAbs().maxCoeff() <= 1e-8);

        Vector d = sym_eig(cov.whitened_class_mean(1)).values;
        Vector expected = (2.0 * d.array() - 1.0).matrix();
        expected /= expected.norm();
        REQUIRE(sca.da.size() == 1);
        CHECK((sca.da[0] - expected).cwiseAbs().maxCoeff() <= 1e-10);
    }
}

TEST_CASE("scaCSP features equal the quadratic forms of the filters", "[scacsp]") {
    const CovarianceSet cov = test_support::make_cov_set(6, 3, 12, 5, 1.5);
    const ScaCspModel model = scacsp_multi_train(cov, 2);
    CHECK(model.bank.size() == 2 * model.between_directions.cols());
    const Matrix quad = kernels::quadratic_features(model.bank.filters, cov.per_trial);
    for (std::size_t i = 0; i < cov.per_trial.size(); ++i) {
        const Vector f = scacsp_features(model.projection, vec(cov.whitened_per_trial[i]));
        CHECK((f - quad.col(static_cast<Eigen::Index>(i))).cwiseAbs().maxCoeff() <=
              1e-10 * std::max(1.0, quad.col(static_cast<Eigen::Index>(i)).cwiseAbs().maxCoeff()));
    }
}

TEST_CASE("between-class directions are orthonormal and oriented", "[scacsp]") {
    const CovarianceSet cov = test_support::make_cov_set(5, 4, 10, 8, 1.0);
    const ScaCspModel model = scacsp_multi_train(cov, 1);
    const Matrix& dirs = model.between_directions;
    REQUIRE(dirs.cols() == 3);
    CHECK((dirs.transpose() * dirs - Matrix::Identity(3, 3)).norm() <= 1e-12);
    for (Eigen::Index i = 0; i < dirs.cols(); ++i) {
        CHECK((unvec(dirs.col(i), 5) - unvec(dirs.col(i), 5).transpose()).norm() <= 1e-12);
        CHECK(std::abs(model.da[static_cast<std::size_t>(i)].norm() - 1.0) <= 1e-12);
    }
    for (Eigen::Index i = 1; i < 3; ++i) CHECK(model.between_eigenvalues(i - 1) >= model.between_eigenvalues(i));

    // binary: the direction points toward class 1
    const CovarianceSet bin = test_support::make_cov_set(5, 2, 10, 9);
    const ScaCspModel b = scacsp_binary_train(bin, 1);
    const Vector diff = vec(bin.whitened_class_mean(1) - bin.whitened_class_mean(2));
    CHECK(b.between_directions.col(0).dot(diff) > 0.0);
}

TEST_CASE("un-whitened scaCSP matches the whitened path", "[scacsp]") {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const CovarianceSet cov = test_support::make_cov_set(5, 2 + static_cast<int>(seed % 3), 12, seed * 13);
        const ScaCspModel a = scacsp_multi_train(cov, 1);
        const ScaCspModel b = scacsp_unwhitened_train(cov, 1);
        REQUIRE(a.bank.size() == b.bank.size());
        CHECK(test_support::worst_column_match(a.bank.filters, b.bank.filters) >= 1.0 - 1e-8);
    }
}

TEST_CASE("Kronecker whitener identities", "[scacsp]") {
    const CovarianceSet cov = test_support::make_cov_set(6, 2, 10, 21);
    const Matrix& p = cov.whitener;
    const Matrix& c = cov.composite;
    synth::Rng rng(1);
    for (int probe = 0; probe < 5; ++probe) {
        const Vector x = rng.gaussian_matrix(36, 1);
        // Pᵀ(C⊗C)P x = x
        const Vector y = kron_whiten_t(p, kron_apply(c, kron_whiten(p, x)));
        CHECK((y - x).norm() <= 1e-8 * x.norm());
        // Pᵀ vec(C) = vec(PᵀCP)
        CHECK((kron_whiten_t(p, vec(c)) - vec(Matrix::Identity(6, 6))).norm() <= 1e-8);
    }
}

TEST_CASE("degenerate class means are rejected", "[scacsp]") {
    const TrialSet trials = test_support::make_trials(4, 2, 6, 3);
    const std::vector<Matrix> covs(12, test_support::random_spd(4, 5));
    const CovarianceSet cov = covariance_set_from(covs, trials.labels, 2);
    CHECK_THROWS_AS(scacsp_binary_train(cov, 1), DegeneracyError);
    CHECK_THROWS_AS(scacsp_multi_train(cov, 1), DegeneracyError);
    const CovarianceSet ok = test_support::make_cov_set(4, 2, 6, 3);
    CHECK_THROWS_AS(scacsp_binary_train(ok, 3), InvalidArgument);
}
