#include <catch2/catch_amalgamated.hpp>

#include <Eigen/Dense>
#include <cmath>

#include "penreg/classic.hpp"
#include "penreg/model.hpp"
#include "support/test_data.hpp"

using namespace penreg;
using Catch::Matchers::WithinAbs;

TEST_CASE("standardize matches the direct arithmetic on a 3-point column") {
    Dataset d;
    d.x.resize(3, 1);
    d.x << 1.0, 2.0, 3.0;
    d.y.resize(3);
    d.y << 1.0, 0.0, -1.0;

    const StandardizedDesign s = standardize(d);
    // mean 2 removed, scale sqrt(2/3); standardized column is -+sqrt(3/2)
    const double v = std::sqrt(1.5);
    CHECK_THAT(s.col_means(0), WithinAbs(2.0, 1e-15));
    CHECK_THAT(s.col_scales(0), WithinAbs(std::sqrt(2.0 / 3.0), 1e-15));
    CHECK_THAT(s.x(0, 0), WithinAbs(-v, 1e-12));
    CHECK_THAT(s.x(1, 0), WithinAbs(0.0, 1e-12));
    CHECK_THAT(s.x(2, 0), WithinAbs(v, 1e-12));
    CHECK_THAT(s.x.col(0).sum(), WithinAbs(0.0, 1e-12));
    CHECK_THAT(s.x.col(0).squaredNorm(), WithinAbs(3.0, 1e-12));
}

TEST_CASE("standardize is idempotent on its own output") {
    const Dataset d = testing::random_dataset(25, 4, 7);
    const StandardizedDesign s1 = standardize(d);

    Dataset again{s1.x, s1.y};
    const StandardizedDesign s2 = standardize(again);
    CHECK((s2.x - s1.x).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((s2.y - s1.y).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(s2.col_means.cwiseAbs().maxCoeff() < 1e-12);
    CHECK((s2.col_scales.array() - 1.0).abs().maxCoeff() < 1e-10);
}

TEST_CASE("standardized invariants hold on random data") {
    const Dataset d = testing::random_dataset(60, 6, 11);
    const StandardizedDesign s = standardize(d);
    const int n = s.n();
    for (int j = 0; j < s.p(); ++j) {
        CHECK(std::abs(s.x.col(j).sum()) <= 1e-8 * n);
        CHECK(std::abs(s.x.col(j).squaredNorm() - n) <= 1e-6 * n);
    }
    CHECK(std::abs(s.y.sum()) <= 1e-8 * n);
}

TEST_CASE("constant column is a hard error carrying the column index") {
    Dataset d = testing::random_dataset(10, 3, 3);
    d.x.col(1).setConstant(5.0);
    try {
        standardize(d);
        FAIL("expected ZeroVarianceColumn");
    } catch (const ZeroVarianceColumn& e) {
        CHECK(e.column == 1);
    }
}

TEST_CASE("non-finite entries are rejected") {
    Dataset d = testing::random_dataset(10, 3, 4);
    d.x(2, 0) = std::nan("");
    CHECK_THROWS_AS(standardize(d), NonFiniteError);
    Dataset d2 = testing::random_dataset(10, 3, 5);
    d2.y(0) = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(standardize(d2), NonFiniteError);
}

TEST_CASE("degenerate shapes are rejected") {
    Dataset d;
    d.x.resize(1, 2);
    d.x << 1.0, 2.0;
    d.y.resize(1);
    d.y << 1.0;
    CHECK_THROWS_AS(standardize(d), std::invalid_argument);
}

TEST_CASE("recover_original_scale trivial maps") {
    const Dataset d = testing::random_dataset(20, 3, 9);
    const StandardizedDesign s = standardize(d);

    SECTION("zero vector gives zero slopes and intercept y_mean") {
        const CoefficientVector c = recover_original_scale(Eigen::VectorXd::Zero(3), s);
        CHECK(c.slopes.isZero(0.0));
        CHECK(c.support_size() == 0);
        CHECK_THAT(c.intercept, WithinAbs(s.y_mean, 1e-15));
    }

    SECTION("unit scales and zero means give the identity map") {
        StandardizedDesign id = s;
        id.col_means.setZero();
        id.col_scales.setOnes();
        Eigen::VectorXd beta(3);
        beta << 1.5, -2.0, 0.0;
        const CoefficientVector c = recover_original_scale(beta, id);
        CHECK((c.slopes - beta).cwiseAbs().maxCoeff() == 0.0);
        CHECK_THAT(c.intercept, WithinAbs(id.y_mean, 1e-15));
    }
}

TEST_CASE("back-transform reproduces fitted values row by row") {
    const Dataset d = testing::random_dataset(15, 3, 21);
    const StandardizedDesign s = standardize(d);
    Eigen::VectorXd beta(3);
    beta << 0.7, -1.2, 0.4;
    const CoefficientVector c = recover_original_scale(beta, s);

    const Eigen::VectorXd fitted_std = s.x * beta;
    for (int i = 0; i < d.n(); ++i) {
        const double raw = d.x.row(i).dot(c.slopes) + c.intercept;
        CHECK_THAT(raw, WithinAbs(fitted_std(i) + s.y_mean, 1e-10));
    }
}

TEST_CASE("zero coefficients survive the back-transform exactly") {
    const Dataset d = testing::random_dataset(30, 5, 33);
    const StandardizedDesign s = standardize(d);
    Eigen::VectorXd beta(5);
    beta << 0.0, 2.0, 0.0, -1.0, 0.0;
    const CoefficientVector c = recover_original_scale(beta, s);
    CHECK(c.slopes(0) == 0.0);
    CHECK(c.slopes(2) == 0.0);
    CHECK(c.slopes(4) == 0.0);
    CHECK(c.support_size() == 2);
}

TEST_CASE("estimator fitted values are scale invariant end to end") {
    // fit on standardized data and map back: fitted values agree with the
    // standardized-scale fit on every row
    const Dataset d = testing::random_dataset(40, 4, 55);
    const StandardizedDesign s = standardize(d);
    const FitResult fit = fit_ols(s);
    const Eigen::VectorXd fitted_std = s.x * fit.coef.beta;
    for (int i = 0; i < d.n(); ++i) {
        const double raw = d.x.row(i).dot(fit.coef.slopes) + fit.coef.intercept;
        CHECK_THAT(raw, WithinAbs(fitted_std(i) + s.y_mean, 1e-8));
    }
}
