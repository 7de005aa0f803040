#include <catch2/catch_amalgamated.hpp>

#include <Eigen/Dense>
#include <cmath>

#include "penreg/classic.hpp"
#include "penreg/simulate.hpp"
#include "support/oracles.hpp"
#include "support/test_data.hpp"

using namespace penreg;
using Catch::Matchers::WithinAbs;

TEST_CASE("ols on an orthogonal design is X'y / n") {
    Eigen::VectorXd beta(5);
    beta << 2.0, -1.0, 0.5, 0.0, 3.0;
    const StandardizedDesign s = testing::orthonormal_design(4, 5, beta, 0.3, 101);
    const FitResult fit = fit_ols(s);
    const Eigen::VectorXd expected = s.x.transpose() * s.y / s.n();
    CHECK((fit.coef.beta - expected).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("ols recovers an exact linear signal") {
    Dataset d = testing::random_dataset(30, 4, 17);
    Eigen::VectorXd b(4);
    b << 1.0, -2.0, 0.5, 4.0;
    d.y = d.x * b;
    const StandardizedDesign s = standardize(d);
    const FitResult fit = fit_ols(s);
    CHECK((fit.coef.slopes - b).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("ols satisfies the normal equations on a random instance") {
    const Dataset d = testing::random_dataset(20, 3, 23);
    const StandardizedDesign s = standardize(d);
    const FitResult fit = fit_ols(s);
    const Eigen::VectorXd grad = s.x.transpose() * (s.y - s.x * fit.coef.beta);
    CHECK(grad.cwiseAbs().maxCoeff() <= 1e-8);
}

TEST_CASE("duplicated columns make the Gram matrix singular") {
    Dataset d = testing::random_dataset(20, 4, 29);
    d.x.col(3) = d.x.col(1);
    const StandardizedDesign s = standardize(d);
    CHECK_THROWS_AS(fit_ols(s), SingularGram);
    CHECK_THROWS_AS(fit_ridge(s, 0.0), SingularGram);
    CHECK_NOTHROW(fit_ridge(s, 1.0));
}

TEST_CASE("ridge reduces to ols at lambda zero") {
    const Dataset d = testing::random_dataset(25, 5, 31);
    const StandardizedDesign s = standardize(d);
    const FitResult ols = fit_ols(s);
    const FitResult ridge = fit_ridge(s, 0.0);
    CHECK((ols.coef.beta - ridge.coef.beta).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("ridge diagonal algebra on an orthogonal design") {
    Eigen::VectorXd beta(6);
    beta << 1.0, 0.0, -2.0, 0.5, 0.0, 1.5;
    const StandardizedDesign s = testing::orthonormal_design(5, 6, beta, 0.5, 37);
    const double lambda = 7.5;
    const FitResult fit = fit_ridge(s, lambda);
    const Eigen::VectorXd expected = s.x.transpose() * s.y / (s.n() + lambda);
    CHECK((fit.coef.beta - expected).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("ridge shrinks to zero as lambda grows") {
    const Dataset d = testing::random_dataset(30, 5, 41);
    const StandardizedDesign s = standardize(d);
    CHECK(fit_ridge(s, 1e12).coef.beta.norm() <= 1e-6);
}

TEST_CASE("ridge norm is nonincreasing and the path is continuous") {
    const Dataset d = testing::random_dataset(35, 6, 43);
    const StandardizedDesign s = standardize(d);
    double prev_norm = fit_ridge(s, 0.0).coef.beta.norm();
    for (double lambda : {0.1, 1.0, 5.0, 20.0, 100.0, 1000.0}) {
        const double norm = fit_ridge(s, lambda).coef.beta.norm();
        CHECK(norm <= prev_norm + 1e-12);
        prev_norm = norm;

        const Eigen::VectorXd a = fit_ridge(s, lambda).coef.beta;
        const Eigen::VectorXd b = fit_ridge(s, lambda + 1e-6).coef.beta;
        CHECK((a - b).cwiseAbs().maxCoeff() < 1e-4);
    }
}

TEST_CASE("gcv closed forms at the extremes") {
    const Dataset d = testing::random_dataset(24, 5, 47);
    const StandardizedDesign s = standardize(d);
    const int n = s.n(), p = s.p();

    const FitResult ols = fit_ols(s);
    const double rss = (s.y - s.x * ols.coef.beta).squaredNorm();
    CHECK_THAT(gcv_score(s, 0.0), WithinAbs(rss / ((n - p) * double(n - p)), 1e-9));

    const double huge = 1e14;
    CHECK_THAT(gcv_score(s, huge), WithinAbs(s.y.squaredNorm() / (double(n) * n), 1e-6));
}

TEST_CASE("gcv via singular values equals the dense formula") {
    const Dataset d = testing::random_dataset(15, 4, 53);
    const StandardizedDesign s = standardize(d);
    CHECK_THAT(gcv_score(s, 2.0), WithinAbs(testing::gcv_dense(s.x, s.y, 2.0), 1e-9));

    for (std::uint64_t seed : {61, 67, 71}) {
        const Dataset r = testing::random_dataset(50, 8, seed);
        const StandardizedDesign sr = standardize(r);
        for (double lambda : {0.0, 0.5, 3.0, 40.0}) {
            CHECK_THAT(gcv_score(sr, lambda),
                       WithinAbs(testing::gcv_dense(sr.x, sr.y, lambda), 1e-9));
        }
    }
}

TEST_CASE("gcv trace degenerates when n <= p at lambda zero") {
    const Dataset d = testing::random_dataset(6, 8, 59);
    const StandardizedDesign s = standardize(d);
    CHECK_THROWS_AS(gcv_score(s, 0.0), DegenerateTrace);
    CHECK_NOTHROW(gcv_score(s, 1.0));
}

TEST_CASE("select_ridge_lambda basics") {
    const Dataset d = testing::random_dataset(28, 4, 73);
    const StandardizedDesign s = standardize(d);

    SECTION("singleton grid returns its element") {
        const RidgeSelection sel = select_ridge_lambda(s, {3.25});
        CHECK(sel.lambda_star == 3.25);
        CHECK(sel.gcv_values.size() == 1);
    }
    SECTION("duplicate minimum resolves to the smaller (first) lambda") {
        const RidgeSelection sel = select_ridge_lambda(s, {1.0, 1.0, 2.0});
        CHECK(sel.lambda_star == 1.0);
        CHECK(sel.gcv_values[0] == sel.gcv_values[1]);
    }
    SECTION("non-ascending grids are rejected") {
        CHECK_THROWS_AS(select_ridge_lambda(s, {2.0, 1.0}), std::invalid_argument);
        CHECK_THROWS_AS(select_ridge_lambda(s, {}), std::invalid_argument);
    }
    SECTION("lambda_star attains the grid minimum") {
        const RidgeSelection sel = select_ridge_lambda(s, default_ridge_grid(s.n(), s.p()));
        double best = sel.gcv_values[0];
        for (double v : sel.gcv_values) best = std::min(best, v);
        bool found = false;
        for (std::size_t k = 0; k < sel.lambda_grid.size(); ++k)
            if (sel.lambda_grid[k] == sel.lambda_star) found = sel.gcv_values[k] == best;
        CHECK(found);
    }
}

TEST_CASE("strong collinearity pushes the GCV choice off the smallest lambda") {
    ScenarioSpec spec;
    spec.n = 40;
    spec.p = 8;
    spec.beta0 = 4.0;
    spec.beta.resize(8);
    spec.beta << 3.0, 1.5, 0.0, 0.0, 2.0, 0.0, 0.0, 0.0;
    spec.rho = 0.99;
    spec.sigma = 1.0;
    spec.base_seed = 424242;

    int above = 0;
    for (int rep = 0; rep < 100; ++rep) {
        const StandardizedDesign s = standardize(gen_dataset(spec, rep));
        const RidgeSelection sel = select_ridge_lambda(s, {0.1, 1.0, 10.0});
        if (sel.lambda_star > 0.1) ++above;
    }
    CHECK(above > 50);
}

TEST_CASE("sigma2 estimate") {
    SECTION("zero on a noiseless fit") {
        Dataset d = testing::random_dataset(30, 4, 79);
        Eigen::VectorXd b(4);
        b << 1.0, 2.0, -1.0, 0.5;
        d.y = d.x * b;
        const StandardizedDesign s = standardize(d);
        CHECK(estimate_sigma2(s).sigma2_hat < 1e-12);
        CHECK(estimate_sigma2(s).dof == 26);
    }

    SECTION("unbiased over 1000 replications") {
        ScenarioSpec spec;
        spec.n = 40;
        spec.p = 8;
        spec.beta0 = 0.0;
        spec.beta = Eigen::VectorXd::Zero(8);
        spec.beta(0) = 1.0;
        spec.rho = 0.0;
        spec.sigma = 1.0;
        spec.base_seed = 777;
        double sum = 0.0;
        const int reps = 1000;
        for (int rep = 0; rep < reps; ++rep) {
            sum += estimate_sigma2(standardize(gen_dataset(spec, rep))).sigma2_hat;
        }
        // SE of the mean is sqrt(2/(n-p))/sqrt(reps) = 0.0079
        CHECK_THAT(sum / reps, WithinAbs(1.0, 3 * 0.0079));
    }

    SECTION("pure-residual response gives ||y||^2 / (n - p)") {
        Dataset d = testing::random_dataset(22, 3, 83);
        const Eigen::MatrixXd x = d.x.rowwise() - d.x.colwise().mean();  // center like the fit
        const Eigen::MatrixXd hat = x * (x.transpose() * x).inverse() * x.transpose();
        Eigen::VectorXd y = d.y.array() - d.y.mean();
        y = y - hat * y;  // now X'y = 0 on the standardized scale
        d.y = y;
        const StandardizedDesign s = standardize(d);
        const SigmaEstimate est = estimate_sigma2(s);
        CHECK_THAT(est.sigma2_hat, WithinAbs(s.y.squaredNorm() / (22 - 3), 1e-10));
    }
}
