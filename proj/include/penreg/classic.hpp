#pragma once

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <cmath>
#include <vector>

#include "penreg/model.hpp"

namespace penreg {

struct RidgeSelection {
    std::vector<double> lambda_grid;  // ascending, nonnegative
    std::vector<double> gcv_values;
    double lambda_star = 0.0;
};

struct SigmaEstimate {
    double sigma2_hat = 0.0;
    int dof = 0;  // n - p
};

namespace detail {

// Solve (X'X + lambda I) b = X'y. The positive-definiteness check only
// applies at lambda = 0, where the Gram matrix may be singular.
inline Eigen::VectorXd solve_penalized_normal(const StandardizedDesign& s, double lambda) {
    const int n = s.n();
    Eigen::MatrixXd gram = s.x.transpose() * s.x;
    gram.diagonal().array() += lambda;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(gram);
    if (lambda == 0.0) {
        if (ldlt.info() != Eigen::Success || ldlt.vectorD().minCoeff() < 1e-10 * n)
            throw SingularGram();
    }
    return ldlt.solve(s.x.transpose() * s.y);
}

inline double sigma2_from_beta(const StandardizedDesign& s, const Eigen::VectorXd& beta) {
    const int dof = s.n() - s.p();
    return (s.y - s.x * beta).squaredNorm() / dof;
}

// Singular values of X and U'y, computed once per dataset so a GCV sweep
// costs O(p) per grid point instead of a fresh factorization.
struct DesignSvd {
    Eigen::VectorXd sv;   // singular values d_j
    Eigen::VectorXd uty;  // U'y
    double yty = 0.0;
    int n = 0;

    explicit DesignSvd(const StandardizedDesign& s) {
        Eigen::BDCSVD<Eigen::MatrixXd> svd(s.x, Eigen::ComputeThinU);
        sv = svd.singularValues();
        uty = svd.matrixU().transpose() * s.y;
        yty = s.y.squaredNorm();
        n = s.n();
    }

    // GCV(lambda) = ||(I - A)y||^2 / Trace(I - A)^2 with
    // A = X (X'X + lambda I)^-1 X'; Trace(I - A) = n - sum d^2/(d^2+lambda).
    double gcv(double lambda) const {
        double trace = n;
        double rss = yty - uty.squaredNorm();  // part of y orthogonal to col(U)
        for (int j = 0; j < sv.size(); ++j) {
            const double d2 = sv(j) * sv(j);
            const double denom = d2 + lambda;
            const double a = denom > 0.0 ? d2 / denom : 0.0;
            trace -= a;
            const double one_minus_a = 1.0 - a;
            rss += one_minus_a * one_minus_a * uty(j) * uty(j);
        }
        if (trace <= 0.0) throw DegenerateTrace();
        return rss / (trace * trace);
    }
};

}  // namespace detail

inline FitResult fit_ols(const StandardizedDesign& s) {
    FitResult fit;
    fit.method = Method::Ols;
    fit.coef = recover_original_scale(detail::solve_penalized_normal(s, 0.0), s);
    fit.iterations = 1;
    return fit;
}

inline FitResult fit_ridge(const StandardizedDesign& s, double lambda) {
    if (lambda < 0.0) throw std::invalid_argument("ridge lambda must be nonnegative");
    FitResult fit;
    fit.method = Method::Ridge;
    fit.coef = recover_original_scale(detail::solve_penalized_normal(s, lambda), s);
    fit.tuning.lambda = lambda;
    fit.iterations = 1;
    return fit;
}

inline double gcv_score(const StandardizedDesign& s, double lambda) {
    if (lambda < 0.0) throw std::invalid_argument("gcv lambda must be nonnegative");
    if (lambda == 0.0 && s.n() <= s.p()) throw DegenerateTrace();
    return detail::DesignSvd(s).gcv(lambda);
}

// 100 points log-spaced over [1e-4 n, 1e3 n], plus lambda = 0 when OLS
// exists; spans effective degrees of freedom from ~p down to ~0.
inline std::vector<double> default_ridge_grid(int n, int p) {
    std::vector<double> grid;
    if (n > p) grid.push_back(0.0);
    const double lo = 1e-4 * n;
    const double hi = 1e3 * n;
    const int points = 100;
    for (int k = 0; k < points; ++k) {
        grid.push_back(lo * std::pow(hi / lo, static_cast<double>(k) / (points - 1)));
    }
    return grid;
}

inline RidgeSelection select_ridge_lambda(const StandardizedDesign& s,
                                          const std::vector<double>& grid) {
    if (grid.empty()) throw std::invalid_argument("lambda grid is empty");
    for (std::size_t k = 0; k < grid.size(); ++k) {
        if (grid[k] < 0.0 || (k > 0 && grid[k] < grid[k - 1]))
            throw std::invalid_argument("lambda grid must be ascending and nonnegative");
    }
    detail::DesignSvd svd(s);
    RidgeSelection sel;
    sel.lambda_grid = grid;
    sel.gcv_values.reserve(grid.size());
    std::size_t best = 0;
    for (std::size_t k = 0; k < grid.size(); ++k) {
        sel.gcv_values.push_back(svd.gcv(grid[k]));
        if (sel.gcv_values[k] < sel.gcv_values[best]) best = k;  // ties keep the smaller lambda
    }
    sel.lambda_star = grid[best];
    return sel;
}

inline SigmaEstimate estimate_sigma2(const StandardizedDesign& s) {
    const Eigen::VectorXd beta = detail::solve_penalized_normal(s, 0.0);
    SigmaEstimate est;
    est.dof = s.n() - s.p();
    est.sigma2_hat = detail::sigma2_from_beta(s, beta);
    return est;
}

}  // namespace penreg
