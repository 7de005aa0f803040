#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "penreg/model.hpp"

namespace penreg {

enum class PenaltyFamily { Lasso, Enet, AdaLasso, Scad, Mcp };

// Penalized objectives are written on the per-observation scale
//   ||y - X b||^2 / (2n) + sum_j P(|b_j|),
// so lambda grids stay comparable across n. Relative to objectives written
// with an unscaled residual sum of squares and a factor-2 lambda, the
// conversion is lambda_unscaled = n * lambda1.
struct PenaltySpec {
    PenaltyFamily family = PenaltyFamily::Lasso;
    double lambda1 = 0.0;
    double lambda2 = 0.0;           // enet only
    bool couple_lambda2 = false;    // enet: slave lambda2 to lambda1 along a path
    double gamma = 0.0;             // scad (> 2) or mcp (> 1)
    Eigen::VectorXd weights;        // adalasso only; +inf excludes a coordinate
};

inline void validate(const PenaltySpec& spec) {
    if (spec.lambda1 < 0.0 || spec.lambda2 < 0.0)
        throw std::invalid_argument("penalty parameters must be nonnegative");
    if (spec.family == PenaltyFamily::Scad && !(spec.gamma > 2.0))
        throw InvalidGamma("scad requires gamma > 2");
    if (spec.family == PenaltyFamily::Mcp && !(spec.gamma > 1.0))
        throw InvalidGamma("mcp requires gamma > 1");
}

inline double soft_threshold(double z, double t) {
    if (z > t) return z - t;
    if (z < -t) return z + t;
    return 0.0;
}

namespace detail {

// P(|b|) for one coordinate given scalar parameters (adalasso weights are
// folded into l1 by the caller).
inline double penalty_value_scalar(double b, PenaltyFamily family, double l1, double l2,
                                   double gamma) {
    const double t = std::abs(b);
    switch (family) {
        case PenaltyFamily::Lasso:
        case PenaltyFamily::AdaLasso:
            return l1 * t;
        case PenaltyFamily::Enet:
            return l1 * t + 0.5 * l2 * t * t;
        case PenaltyFamily::Scad: {
            if (t <= l1) return l1 * t;
            if (t <= gamma * l1) return (gamma * l1 * t - 0.5 * (t * t + l1 * l1)) / (gamma - 1.0);
            return 0.5 * l1 * l1 * (gamma + 1.0);
        }
        case PenaltyFamily::Mcp: {
            if (t <= gamma * l1) return l1 * t - 0.5 * t * t / gamma;
            return 0.5 * gamma * l1 * l1;
        }
    }
    return 0.0;
}

// Global minimizer of f(b) = (d/2) b^2 - a b + P(b) over b >= 0 for the
// nonconvex families, a >= 0. Each penalty piece contributes its stationary
// point clamped to the piece's interval; the breakpoints and 0 complete the
// candidate set, so the enumeration is exact even when a piece is concave
// (d below the concavity modulus). Ties prefer the smaller magnitude, which
// keeps excluded coordinates at exactly 0.
inline double nonconvex_nonneg_min(double a, double d, PenaltyFamily family, double l1,
                                   double gamma) {
    const double l = l1;
    double cand[6];
    int k = 0;
    cand[k++] = 0.0;
    if (family == PenaltyFamily::Scad) {
        cand[k++] = std::clamp((a - l) / d, 0.0, l);
        const double denom = d - 1.0 / (gamma - 1.0);
        if (denom != 0.0)
            cand[k++] = std::clamp((a - gamma * l / (gamma - 1.0)) / denom, l, gamma * l);
        cand[k++] = l;
        cand[k++] = gamma * l;
        cand[k++] = std::max(a / d, gamma * l);
    } else {  // Mcp
        const double denom = d - 1.0 / gamma;
        if (denom != 0.0) cand[k++] = std::clamp((a - l) / denom, 0.0, gamma * l);
        cand[k++] = gamma * l;
        cand[k++] = std::max(a / d, gamma * l);
    }
    std::sort(cand, cand + k);
    double best = cand[0];
    double best_f = 0.5 * d * best * best - a * best + penalty_value_scalar(best, family, l, 0.0, gamma);
    for (int i = 1; i < k; ++i) {
        const double b = cand[i];
        const double f = 0.5 * d * b * b - a * b + penalty_value_scalar(b, family, l, 0.0, gamma);
        if (f < best_f) {
            best = b;
            best_f = f;
        }
    }
    return best;
}

// Scalar kernel of the coordinate update: argmin_b (d/2)(b - z/d)^2 + P(|b|).
inline double univar_min_scalar(double z, double d, PenaltyFamily family, double l1, double l2,
                                double gamma) {
    switch (family) {
        case PenaltyFamily::Lasso:
        case PenaltyFamily::AdaLasso:
            return soft_threshold(z, l1) / d;
        case PenaltyFamily::Enet:
            return soft_threshold(z, l1) / (d + l2);
        case PenaltyFamily::Scad:
        case PenaltyFamily::Mcp: {
            const double b = nonconvex_nonneg_min(std::abs(z), d, family, l1, gamma);
            return z < 0.0 ? -b : b;
        }
    }
    return 0.0;
}

}  // namespace detail

inline double penalty_value(double b, const PenaltySpec& spec) {
    return detail::penalty_value_scalar(b, spec.family, spec.lambda1, spec.lambda2, spec.gamma);
}

inline double univariate_penalized_min(double z, double d, const PenaltySpec& spec) {
    validate(spec);
    if (!(d > 0.0)) throw std::invalid_argument("d must be positive");
    return detail::univar_min_scalar(z, d, spec.family, spec.lambda1, spec.lambda2, spec.gamma);
}

// Smallest lambda with an all-zero solution: max_j |x_j'y| / n, divided by
// the coordinate weight for the adaptive lasso. Returns 0 when y is
// orthogonal to every usable column; the path fitter substitutes a floor.
inline double lambda_max(const StandardizedDesign& s, const PenaltySpec& spec) {
    const Eigen::VectorXd xty = s.x.transpose() * s.y / s.n();
    if (spec.family == PenaltyFamily::AdaLasso) {
        if (spec.weights.size() != s.p())
            throw std::invalid_argument("adalasso weights length mismatch");
        double m = 0.0;
        for (int j = 0; j < s.p(); ++j) {
            const double w = spec.weights(j);
            if (std::isfinite(w) && w > 0.0) m = std::max(m, std::abs(xty(j)) / w);
        }
        return m;
    }
    return xty.cwiseAbs().maxCoeff();
}

struct PathOptions {
    double lambda_min_ratio = 1e-3;
    int max_sweeps = 100000;     // per lambda; the path records the flag, never aborts
    double tol = 1e-7;           // max coefficient change declaring convergence
    bool check_descent = false;  // verify the objective never increases across sweeps
};

struct RegularizationPath {
    std::vector<double> lambdas;  // strictly descending
    std::vector<Eigen::VectorXd> coefs;
    std::vector<int> dfs;
    std::vector<bool> converged;
    std::vector<int> sweeps;  // per-lambda sweep counts
    int total_sweeps = 0;
};

inline std::vector<double> make_lambda_grid(double lambda_top, int grid_size,
                                            double min_ratio = 1e-3) {
    if (grid_size < 2) throw std::invalid_argument("grid_size must be >= 2");
    if (lambda_top <= 0.0) lambda_top = 1e-8;  // degenerate path floor
    std::vector<double> grid(grid_size);
    grid[0] = lambda_top;
    for (int k = 1; k < grid_size; ++k)
        grid[k] = lambda_top * std::pow(min_ratio, static_cast<double>(k) / (grid_size - 1));
    return grid;
}

// Pathwise cyclic coordinate descent over a descending lambda grid with warm
// starts. Works on any (x, y) pair (cross-validation fits pass training
// subsets, where column norms are near but not exactly sqrt(n)). A lambda
// point is converged when a full sweep moves no coordinate by more than
// opt.tol; between full sweeps only the active set is iterated.
inline RegularizationPath fit_path_grid(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                                        const PenaltySpec& spec,
                                        const std::vector<double>& lambdas,
                                        const PathOptions& opt = {}) {
    validate(spec);
    const int n = static_cast<int>(x.rows());
    const int p = static_cast<int>(x.cols());
    if (y.size() != n) throw std::invalid_argument("y length mismatch");
    const bool weighted = spec.family == PenaltyFamily::AdaLasso;
    if (weighted && spec.weights.size() != p)
        throw std::invalid_argument("adalasso weights length mismatch");

    Eigen::VectorXd d(p);
    std::vector<bool> excluded(p, false);
    for (int j = 0; j < p; ++j) {
        d(j) = x.col(j).squaredNorm() / n;
        excluded[j] = d(j) == 0.0 || (weighted && !std::isfinite(spec.weights(j)));
    }

    RegularizationPath path;
    path.lambdas = lambdas;
    path.coefs.reserve(lambdas.size());

    Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
    Eigen::VectorXd r = y;

    for (double lambda : lambdas) {
        const double l2 = spec.couple_lambda2 ? lambda : spec.lambda2;

        auto update_coord = [&](int j) -> double {
            const double zj = x.col(j).dot(r) / n + d(j) * beta(j);
            const double l1 = weighted ? lambda * spec.weights(j) : lambda;
            const double bnew = detail::univar_min_scalar(zj, d(j), spec.family, l1, l2, spec.gamma);
            const double change = bnew - beta(j);
            if (change != 0.0) {
                r -= x.col(j) * change;
                beta(j) = bnew;
            }
            return std::abs(change);
        };

        auto objective = [&]() {
            double obj = r.squaredNorm() / (2.0 * n);
            for (int j = 0; j < p; ++j) {
                const double l1 = weighted && !excluded[j] ? lambda * spec.weights(j) : lambda;
                obj += detail::penalty_value_scalar(beta(j), spec.family, l1, l2, spec.gamma);
            }
            return obj;
        };

        int sweeps = 0;
        bool converged = false;
        double prev_obj = opt.check_descent ? objective() : 0.0;
        while (sweeps < opt.max_sweeps) {
            // one full sweep; if it barely moves we are done
            ++sweeps;
            double change = 0.0;
            for (int j = 0; j < p; ++j) {
                if (!excluded[j]) change = std::max(change, update_coord(j));
            }
            if (opt.check_descent) {
                const double obj = objective();
                if (obj > prev_obj + 1e-9 * (1.0 + std::abs(prev_obj)))
                    throw Error("coordinate sweep increased the penalized objective");
                prev_obj = obj;
            }
            if (change < opt.tol) {
                converged = true;
                break;
            }
            // then iterate only the current support until it stabilizes
            std::vector<int> active;
            active.reserve(p);
            for (int j = 0; j < p; ++j)
                if (!excluded[j] && beta(j) != 0.0) active.push_back(j);
            while (sweeps < opt.max_sweeps && !active.empty()) {
                ++sweeps;
                double achange = 0.0;
                for (int j : active) achange = std::max(achange, update_coord(j));
                if (opt.check_descent) {
                    const double obj = objective();
                    if (obj > prev_obj + 1e-9 * (1.0 + std::abs(prev_obj)))
                        throw Error("coordinate sweep increased the penalized objective");
                    prev_obj = obj;
                }
                if (achange < opt.tol) break;
            }
        }

        path.coefs.push_back(beta);
        int df = 0;
        for (int j = 0; j < p; ++j) df += (beta(j) != 0.0);
        path.dfs.push_back(df);
        path.converged.push_back(converged);
        path.sweeps.push_back(sweeps);
        path.total_sweeps += sweeps;
    }
    return path;
}

inline RegularizationPath fit_path(const StandardizedDesign& s, const PenaltySpec& spec,
                                   int grid_size = 100, const PathOptions& opt = {}) {
    const std::vector<double> grid =
        make_lambda_grid(lambda_max(s, spec), grid_size, opt.lambda_min_ratio);
    return fit_path_grid(s.x, s.y, spec, grid, opt);
}

// Max violation of the lasso stationarity conditions at beta on the
// per-observation scale: |x_j'r/n| <= lambda off-support, = lambda on it.
inline double lasso_kkt_residual(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                                 const Eigen::VectorXd& beta, double lambda) {
    const int n = static_cast<int>(x.rows());
    const Eigen::VectorXd g = x.transpose() * (y - x * beta) / n;
    double worst = 0.0;
    for (int j = 0; j < beta.size(); ++j) {
        const double v = beta(j) != 0.0
                             ? std::abs(g(j) - lambda * (beta(j) > 0.0 ? 1.0 : -1.0))
                             : std::max(0.0, std::abs(g(j)) - lambda);
        worst = std::max(worst, v);
    }
    return worst;
}

}  // namespace penreg
