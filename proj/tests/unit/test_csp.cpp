#include "scacsp/csp.hpp"
#include "scacsp/diagnostics.hpp"
#include "scacsp/error.hpp"
#include "scacsp/kernels.hpp"
#include "scacsp/oracle.hpp"
#include "support.hpp"

#include <catch_amalgamated.hpp>

using namespace scacsp;
using Catch::Matchers::WithinAbs;

TEST_CASE("CSP filters are the extreme Rayleigh-quotient solutions", "[csp][oracle]") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const CovarianceSet cov = test_support::make_cov_set(6, 2, 25, seed);
        const FilterBank bank = csp_train(cov, 2);
        REQUIRE(bank.size() == 4);
        CHECK(bank.provenance == std::vector<Provenance>(4, Provenance::csp));
        const Matrix& c1 = cov.class_means[0];
        const auto [top, w_top] = oracle::rayleigh_extremum(c1, cov.composite, true);
        const auto [bottom, w_bottom] = oracle::rayleigh_extremum(c1, cov.composite, false);
        CHECK_THAT(bank.scores(0), WithinAbs(top, 1e-9));
        CHECK_THAT(bank.scores(3), WithinAbs(bottom, 1e-9));
        CHECK(std::abs(bank.filters.col(0).normalized().dot(w_top)) >= 1.0 - 1e-8);
        CHECK(std::abs(bank.filters.col(3).normalized().dot(w_bottom)) >= 1.0 - 1e-8);
        // simultaneous diagonalization: Wᵀ C̃ W = I, Wᵀ C̃₁ W = diag(scores)
        const Matrix g = bank.filters.transpose() * cov.composite * bank.filters;
        CHECK((g - Matrix::Identity(4, 4)).norm() <= 1e-9);
        const Matrix d = bank.filters.transpose() * c1 * bank.filters;
        CHECK((d - Matrix(bank.scores.asDiagonal())).norm() <= 1e-9);
        for (Eigen::Index j = 0; j < 4; ++j) {
            CHECK(bank.scores(j) > 0.0);
            CHECK(bank.scores(j) < 1.0);
        }
    }
}

TEST_CASE("CSP warns when the class means coincide", "[csp]") {
    const TrialSet trials = test_support::make_trials(4, 2, 10, 2);
    std::vector<Matrix> covs(20, Matrix::Identity(4, 4));
    CovarianceSet cov = covariance_set_from(covs, trials.labels, 2);
    diag::WarningCapture capture;
    csp_train(cov, 1);
    CHECK(!capture.messages().empty());
}

TEST_CASE("regularized variants reduce to CSP at zero regularization", "[csp]") {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const CovarianceSet cov = test_support::make_cov_set(8, 2, 20, seed * 31);
        const int m = 3;
        const FilterBank csp = csp_train(cov, m);
        const Matrix csp_top = csp.filters.leftCols(m), csp_bottom = csp.filters.rightCols(m);
        const Matrix penalty = scsp_penalty(cov);
        for (const FilterBank& bank :
             {trcsp_train(cov, m, 0.0), scsp_train(cov, m, 0.0), strcsp_train(cov, m, 0.0, 0.0, penalty)}) {
            REQUIRE(bank.size() == 2 * m);
            const Vector c1 = principal_cosines(bank.filters.leftCols(m), csp_top);
            const Vector c2 = principal_cosines(bank.filters.rightCols(m), csp_bottom);
            CHECK(c1.minCoeff() >= 1.0 - 1e-8);
            CHECK(c2.minCoeff() >= 1.0 - 1e-8);
        }
    }
}

TEST_CASE("regularization shifts the Rayleigh denominators", "[csp]") {
    const CovarianceSet cov = test_support::make_cov_set(5, 2, 15, 7);
    const double alpha = 0.3;
    const FilterBank tr = trcsp_train(cov, 1, alpha);
    const Matrix b = cov.composite + alpha * Matrix::Identity(5, 5);
    const auto [top, w] = oracle::rayleigh_extremum(cov.class_means[0], b, true);
    CHECK_THAT(tr.scores(0), WithinAbs(top, 1e-9));
    CHECK(std::abs(tr.filters.col(0).normalized().dot(w)) >= 1.0 - 1e-8);
    CHECK(tr.provenance.front() == Provenance::trcsp);

    const Matrix p = scsp_penalty(cov);
    const FilterBank st = strcsp_train(cov, 1, alpha, 0.1);
    const Matrix b2 = cov.composite + alpha * p + 0.1 * Matrix::Identity(5, 5);
    const auto [top2, w2] = oracle::rayleigh_extremum(cov.class_means[1], b2, true);
    CHECK_THAT(st.scores(1), WithinAbs(top2, 1e-9));
    CHECK(std::abs(st.filters.col(1).normalized().dot(w2)) >= 1.0 - 1e-8);
}

TEST_CASE("stationarity penalty is symmetric positive semidefinite", "[csp][property]") {
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        const Eigen::Index n = 3 + static_cast<Eigen::Index>(seed % 5);
        const CovarianceSet cov = test_support::make_cov_set(n, 2 + static_cast<int>(seed % 3), 6, seed, 0.5, 0, 0.2);
        const Matrix p = scsp_penalty(cov);
        CHECK((p - p.transpose()).norm() == 0.0);
        CHECK(sym_eig(p).values.minCoeff() >= -1e-10 * std::max(1.0, p.norm()));
    }
}

TEST_CASE("one-versus-rest and pair-wise problem counts", "[csp]") {
    const CovarianceSet cov = test_support::make_cov_set(8, 4, 20, 12, 2.0);
    const OvrModel ovr = multiclass_ovr_train(cov, 3);
    REQUIRE(ovr.problems.size() == 4);
    for (int k = 0; k < 4; ++k) {
        CHECK(ovr.problems[k].positive_class == k + 1);
        CHECK(ovr.problems[k].negative_class == 0);
        CHECK(ovr.problems[k].bank.size() == 6);
    }
    const PwModel pw = multiclass_pw_train(cov, 3);
    REQUIRE(pw.problems.size() == 6);
    const std::vector<std::pair<int, int>> expected{{1, 2}, {1, 3}, {1, 4}, {2, 3}, {2, 4}, {3, 4}};
    for (std::size_t p = 0; p < 6; ++p) {
        CHECK(pw.problems[p].positive_class == expected[p].first);
        CHECK(pw.problems[p].negative_class == expected[p].second);
    }

    const TrialSet trials = test_support::make_trials(8, 4, 20, 12, 2.0);
    const auto by_cov = multiclass_ovr_predict(ovr, cov.per_trial, TrialInput::covariance);
    const auto by_signal = multiclass_ovr_predict(ovr, trials.trials, TrialInput::signal);
    CHECK(by_cov == by_signal);
    CHECK(multiclass_pw_predict(pw, cov.per_trial, TrialInput::covariance) ==
          multiclass_pw_predict(pw, trials.trials, TrialInput::signal));
    int hits = 0;
    for (std::size_t i = 0; i < by_cov.size(); ++i) hits += by_cov[i] == cov.labels[i];
    CHECK(hits >= 70);
}

TEST_CASE("pair-wise vote tie-breaking", "[csp]") {
    const std::vector<std::pair<int, int>> pairs{{1, 2}, {1, 3}, {2, 3}};
    // 1 beats 2, 3 beats 1, 2 beats 3: three-way tie on votes
    CHECK(pw_vote(3, pairs, std::vector<double>{0.5, -2.0, 1.0}) == 3);
    CHECK(pw_vote(3, pairs, std::vector<double>{3.0, -2.0, 1.0}) == 1);
    // identical margins: lowest id
    CHECK(pw_vote(3, pairs, std::vector<double>{1.0, -1.0, 1.0}) == 1);
    // zero margin counts for the first class of the pair
    CHECK(pw_vote(3, pairs, std::vector<double>{0.0, 0.0, 0.0}) == 1);
    CHECK(pw_vote(3, pairs, std::vector<double>{-1.0, 1.0, 1.0}) == 2);
}

TEST_CASE("OVR rest covariance options differ only with unequal classes", "[csp]") {
    TrialSet trials = test_support::make_trials(5, 3, 12, 3, 1.5);
    std::vector<std::size_t> keep;
    for (std::size_t i = 0; i < trials.size(); ++i)
        if (trials.labels[i] != 3 || i < 12) keep.push_back(i);
    const CovarianceSet unequal = covariances(trials.subset(keep));
    const OvrModel a = multiclass_ovr_train(unequal, 1, OvrRest::class_mean);
    const OvrModel b = multiclass_ovr_train(unequal, 1, OvrRest::trial_pool);
    CHECK((a.problems[0].bank.filters - b.problems[0].bank.filters).norm() > 1e-6);
}
