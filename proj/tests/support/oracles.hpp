#pragma once

// Brute-force reference computations for the solver tests. Everything here
// is deliberately independent of the library's solve paths: plain grid
// enumeration and dense matrix formulas only.

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <vector>

#include "penreg/shrinkage.hpp"

namespace penreg::testing {

// Minimize (d/2)(b - z/d)^2 + P(|b|) by scanning [-|z|/d - 1, |z|/d + 1].
inline double univariate_grid_min(double z, double d, const PenaltySpec& spec,
                                  double step = 1e-4) {
    const double rad = std::abs(z) / d + 1.0;
    const long lo = static_cast<long>(std::floor(-rad / step));
    const long hi = static_cast<long>(std::ceil(rad / step));
    double best_b = 0.0;
    double best_f = std::numeric_limits<double>::infinity();
    for (long k = lo; k <= hi; ++k) {
        const double b = k * step;
        const double t = b - z / d;
        const double f = 0.5 * d * t * t + penalty_value(b, spec);
        if (f < best_f) {
            best_f = f;
            best_b = b;
        }
    }
    return best_b;
}

// Penalized least-squares objective on the per-observation scale.
inline double penalized_objective(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                                  const Eigen::VectorXd& beta, const PenaltySpec& spec,
                                  double lambda1, double lambda2) {
    PenaltySpec eff = spec;
    eff.lambda1 = lambda1;
    eff.lambda2 = lambda2;
    double obj = (y - x * beta).squaredNorm() / (2.0 * x.rows());
    for (int j = 0; j < beta.size(); ++j) {
        if (spec.family == PenaltyFamily::AdaLasso) {
            if (!std::isfinite(spec.weights(j))) continue;  // excluded coordinate, beta_j = 0
            eff.lambda1 = lambda1 * spec.weights(j);
        }
        obj += penalty_value(beta(j), eff);
    }
    return obj;
}

struct GridSearchResult {
    Eigen::VectorXd beta;
    double objective = 0.0;
};

// Exhaustive grid search over an absolute lattice (multiples of `step`, so
// exact zeros are grid points) covering a box around `center`. If the argmin
// lands on the box boundary the box doubles and recenters, so containment of
// the true minimizer does not rely on the starting hint being right.
inline GridSearchResult boxed_grid_search(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                                          const PenaltySpec& spec, double lambda1, double lambda2,
                                          Eigen::VectorXd center, double half_width,
                                          double step = 1e-3) {
    const int p = static_cast<int>(x.cols());
    const int n = static_cast<int>(x.rows());
    const Eigen::MatrixXd gram = x.transpose() * x / n;
    const Eigen::VectorXd xty = x.transpose() * y / n;
    const double y2 = y.squaredNorm() / (2.0 * n);

    PenaltySpec eff = spec;
    eff.lambda2 = lambda2;

    for (int attempt = 0; attempt < 10; ++attempt) {
        std::vector<long> lo(p), hi(p);
        for (int j = 0; j < p; ++j) {
            lo[j] = static_cast<long>(std::floor((center(j) - half_width) / step));
            hi[j] = static_cast<long>(std::ceil((center(j) + half_width) / step));
        }
        std::vector<long> idx(lo);
        Eigen::VectorXd b(p);
        Eigen::VectorXd best_b = Eigen::VectorXd::Zero(p);
        double best_f = std::numeric_limits<double>::infinity();
        bool done = false;
        while (!done) {
            for (int j = 0; j < p; ++j) b(j) = idx[j] * step;
            double f = y2 - b.dot(xty) + 0.5 * b.dot(gram * b);
            for (int j = 0; j < p; ++j) {
                eff.lambda1 = spec.family == PenaltyFamily::AdaLasso
                                  ? lambda1 * spec.weights(j)
                                  : lambda1;
                f += penalty_value(b(j), eff);
            }
            if (f < best_f) {
                best_f = f;
                best_b = b;
            }
            int j = 0;
            for (; j < p; ++j) {
                if (++idx[j] <= hi[j]) break;
                idx[j] = lo[j];
            }
            done = j == p;
        }
        bool on_boundary = false;
        for (int j = 0; j < p; ++j) {
            const long k = static_cast<long>(std::llround(best_b(j) / step));
            if (k <= lo[j] || k >= hi[j]) on_boundary = true;
        }
        if (!on_boundary) return {best_b, best_f};
        center = best_b;
        half_width *= 2.0;
    }
    throw std::runtime_error("grid search failed to bracket the minimizer");
}

// Garrote objective ||y - Z u||^2 + 2 lambda sum w_j u_j and its exhaustive
// minimization over u in [0, u_max]^2 at the given step.
inline double garrote_objective(const Eigen::MatrixXd& z, const Eigen::VectorXd& y,
                                const Eigen::VectorXd& weights, double lambda,
                                const Eigen::VectorXd& u) {
    return (y - z * u).squaredNorm() + 2.0 * lambda * weights.dot(u);
}

inline GridSearchResult garrote_grid_search_2d(const Eigen::MatrixXd& z, const Eigen::VectorXd& y,
                                               const Eigen::VectorXd& weights, double lambda,
                                               double u_max = 3.0, double step = 1e-3) {
    const Eigen::MatrixXd ztz = z.transpose() * z;
    const Eigen::VectorXd zty = z.transpose() * y;
    const double y2 = y.squaredNorm();
    const long m = static_cast<long>(std::llround(u_max / step));
    Eigen::VectorXd u(2), best_u = Eigen::VectorXd::Zero(2);
    double best_f = std::numeric_limits<double>::infinity();
    for (long a = 0; a <= m; ++a) {
        u(0) = a * step;
        for (long b = 0; b <= m; ++b) {
            u(1) = b * step;
            const double f = y2 - 2.0 * u.dot(zty) + u.dot(ztz * u) + 2.0 * lambda * weights.dot(u);
            if (f < best_f) {
                best_f = f;
                best_u = u;
            }
        }
    }
    return {best_u, best_f};
}

// Eq.-style GCV from explicit dense matrices: A = X (X'X + l I)^-1 X'.
inline double gcv_dense(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, double lambda) {
    const int n = static_cast<int>(x.rows());
    const int p = static_cast<int>(x.cols());
    Eigen::MatrixXd inner = x.transpose() * x + lambda * Eigen::MatrixXd::Identity(p, p);
    const Eigen::MatrixXd a = x * inner.inverse() * x.transpose();
    const Eigen::MatrixXd ia = Eigen::MatrixXd::Identity(n, n) - a;
    const double rss = (ia * y).squaredNorm();
    const double trace = ia.trace();
    return rss / (trace * trace);
}

}  // namespace penreg::testing
