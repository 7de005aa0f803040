#pragma once

#include <Eigen/Dense>
#include <cmath>

#include "penreg/classic.hpp"
#include "penreg/model.hpp"

namespace penreg {

enum class GarroteCriterion { CpAic, Bic };

// Criterion-based lambda rule: sigma2 for Cp/AIC, sigma2 log(n)/2 for BIC.
// The floor keeps the objective well posed when the OLS fit is exact.
inline double garrote_lambda(double sigma2_hat, int n, GarroteCriterion crit) {
    const double lam =
        crit == GarroteCriterion::Bic ? sigma2_hat * std::log(static_cast<double>(n)) / 2.0
                                      : sigma2_hat;
    return std::max(lam, 1e-12);
}

// min_{u >= 0} ||y - Z u||^2 + 2 lambda sum_j w_j u_j
// with Z = X diag(init). weights are all ones for the OLS garrote.
struct GarroteProblem {
    Eigen::MatrixXd z;
    Eigen::VectorXd y;
    Eigen::VectorXd weights;
    Eigen::VectorXd init;  // initial estimate scaling each column of X
    double lambda = 0.0;
};

inline GarroteProblem make_garrote_problem(const StandardizedDesign& s,
                                           const Eigen::VectorXd& init,
                                           const Eigen::VectorXd& weights, double lambda) {
    if (init.size() != s.p() || weights.size() != s.p())
        throw std::invalid_argument("garrote vector length mismatch");
    GarroteProblem prob;
    prob.z = s.x * init.asDiagonal();
    prob.y = s.y;
    prob.weights = weights;
    prob.init = init;
    prob.lambda = lambda;
    return prob;
}

struct GarroteSolution {
    Eigen::VectorXd u;     // elementwise >= 0 with exact zeros
    Eigen::VectorXd beta;  // u_j * init_j
    double kkt_residual = 0.0;
    int sweeps = 0;
};

namespace detail {

// Max violation of stationarity for grad_j = -2 z_j'(y - Zu) + 2 lambda w_j:
// grad_j >= 0 when u_j = 0, grad_j = 0 when u_j > 0. Columns with z_j = 0
// are pinned at u_j = 0 where the objective is flat plus a penalty.
inline double garrote_kkt_residual(const GarroteProblem& prob, const Eigen::VectorXd& u,
                                   const Eigen::VectorXd& residual) {
    const Eigen::VectorXd grad =
        -2.0 * (prob.z.transpose() * residual) + 2.0 * prob.lambda * prob.weights;
    double worst = 0.0;
    for (int j = 0; j < u.size(); ++j) {
        if (prob.z.col(j).isZero(0.0)) continue;
        const double v = u(j) > 0.0 ? std::abs(grad(j)) : std::max(0.0, -grad(j));
        worst = std::max(worst, v);
    }
    return worst;
}

}  // namespace detail

// Cyclic coordinate minimization with nonnegativity clamping. Each
// univariate subproblem is solved exactly: u_j <- max(0, (z_j'r_{-j} -
// lambda w_j) / z_j'z_j). Convergence requires both a small step and the
// KKT certificate at tolerance 1e-6 n.
inline GarroteSolution solve_nn_qp(const GarroteProblem& prob, int max_sweeps = 10000) {
    const int n = static_cast<int>(prob.z.rows());
    const int p = static_cast<int>(prob.z.cols());
    if (prob.lambda <= 0.0) throw std::invalid_argument("garrote lambda must be positive");
    if (prob.weights.minCoeff() < 0.0) throw std::invalid_argument("garrote weights must be >= 0");

    Eigen::VectorXd znorm2(p);
    for (int j = 0; j < p; ++j) znorm2(j) = prob.z.col(j).squaredNorm();

    const double kkt_tol = 1e-6 * n;
    GarroteSolution sol;
    sol.u = Eigen::VectorXd::Zero(p);
    Eigen::VectorXd r = prob.y;

    bool converged = false;
    while (sol.sweeps < max_sweeps) {
        ++sol.sweeps;
        double max_change = 0.0;
        for (int j = 0; j < p; ++j) {
            if (znorm2(j) == 0.0) continue;
            const double g = prob.z.col(j).dot(r) + znorm2(j) * sol.u(j);
            const double unew = std::max(0.0, (g - prob.lambda * prob.weights(j)) / znorm2(j));
            const double change = unew - sol.u(j);
            if (change != 0.0) {
                r -= prob.z.col(j) * change;
                sol.u(j) = unew;
                max_change = std::max(max_change, std::abs(change));
            }
        }
        sol.kkt_residual = detail::garrote_kkt_residual(prob, sol.u, r);
        if (max_change < 1e-10 && sol.kkt_residual < kkt_tol) {
            converged = true;
            break;
        }
    }
    if (!converged) throw IterationLimit(max_sweeps);
    sol.beta = sol.u.cwiseProduct(prob.init);
    return sol;
}

inline FitResult fit_garrote(const StandardizedDesign& s, GarroteCriterion crit) {
    const Eigen::VectorXd beta_ols = detail::solve_penalized_normal(s, 0.0);
    const double sigma2 = detail::sigma2_from_beta(s, beta_ols);
    const double lambda = garrote_lambda(sigma2, s.n(), crit);

    const GarroteProblem prob =
        make_garrote_problem(s, beta_ols, Eigen::VectorXd::Ones(s.p()), lambda);
    const GarroteSolution sol = solve_nn_qp(prob);

    FitResult fit;
    fit.method = crit == GarroteCriterion::Bic ? Method::NgBic : Method::NgAic;
    fit.coef = recover_original_scale(sol.beta, s);
    fit.tuning.lambda = lambda;
    fit.iterations = sol.sweeps;
    return fit;
}

// Ridge-initialized garrote at a fixed ridge parameter. w_j is the (j,j)
// entry of (X'X + lambda_r I)^-1 (X'X); at lambda_r = 0 this reduces to the
// plain garrote. The lambda rule still uses the OLS sigma2, so n > p is
// required just as for fit_garrote.
inline FitResult fit_ridge_garrote_at(const StandardizedDesign& s, double lambda_r,
                                      GarroteCriterion crit) {
    if (lambda_r < 0.0) throw std::invalid_argument("lambda_r must be nonnegative");
    const Eigen::VectorXd beta_ridge = detail::solve_penalized_normal(s, lambda_r);

    Eigen::MatrixXd gram = s.x.transpose() * s.x;
    Eigen::MatrixXd shifted = gram;
    shifted.diagonal().array() += lambda_r;
    const Eigen::VectorXd w = shifted.ldlt().solve(gram).diagonal();

    const double sigma2 = detail::sigma2_from_beta(s, detail::solve_penalized_normal(s, 0.0));
    const double lambda = garrote_lambda(sigma2, s.n(), crit);

    const GarroteProblem prob = make_garrote_problem(s, beta_ridge, w.cwiseMax(0.0), lambda);
    const GarroteSolution sol = solve_nn_qp(prob);

    FitResult fit;
    fit.method = Method::NgRidgeBic;
    fit.coef = recover_original_scale(sol.beta, s);
    fit.tuning.lambda = lambda;
    fit.tuning.lambda_r = lambda_r;
    fit.iterations = sol.sweeps;
    return fit;
}

inline FitResult fit_ridge_garrote(const StandardizedDesign& s, GarroteCriterion crit) {
    const RidgeSelection sel = select_ridge_lambda(s, default_ridge_grid(s.n(), s.p()));
    return fit_ridge_garrote_at(s, sel.lambda_star, crit);
}

}  // namespace penreg
