#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include "penreg/rng.hpp"
#include "penreg/shrinkage.hpp"

namespace penreg {

struct CvResult {
    std::vector<double> lambdas;  // descending, shared by all folds
    std::vector<double> cv_mean;  // mean held-out squared prediction error
    std::vector<double> cv_se;    // sample std across folds / sqrt(folds)
    double lambda_min = 0.0;
    int min_index = 0;
};

// Seeded permutation split into folds of size n/folds, the first n%folds
// folds taking one extra row. Same seed, same assignment, bit for bit.
inline std::vector<int> cv_fold_assignment(int n, int folds, std::uint64_t seed) {
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    Rng rng(seed);
    shuffle(perm, rng);
    std::vector<int> fold_of(n);
    int pos = 0;
    for (int f = 0; f < folds; ++f) {
        const int size = n / folds + (f < n % folds ? 1 : 0);
        for (int k = 0; k < size; ++k) fold_of[perm[pos++]] = f;
    }
    return fold_of;
}

inline CvResult kfold_cv(const StandardizedDesign& s, const PenaltySpec& spec, int folds,
                         std::uint64_t seed, int grid_size = 100, const PathOptions& opt = {}) {
    const int n = s.n();
    if (folds < 2 || folds > n) throw std::invalid_argument("folds must be in [2, n]");
    // leave-one-out (folds == n) is allowed; otherwise every fold needs >= 2 rows
    if (folds != n && n / folds < 2) throw FoldTooSmall();

    const std::vector<double> grid =
        make_lambda_grid(lambda_max(s, spec), grid_size, opt.lambda_min_ratio);
    const std::vector<int> fold_of = cv_fold_assignment(n, folds, seed);

    Eigen::MatrixXd errors(folds, grid_size);
    for (int f = 0; f < folds; ++f) {
        int n_test = 0;
        for (int i = 0; i < n; ++i) n_test += (fold_of[i] == f);
        const int n_train = n - n_test;

        Eigen::MatrixXd x_train(n_train, s.p()), x_test(n_test, s.p());
        Eigen::VectorXd y_train(n_train), y_test(n_test);
        int it = 0, iv = 0;
        for (int i = 0; i < n; ++i) {
            if (fold_of[i] == f) {
                x_test.row(iv) = s.x.row(i);
                y_test(iv++) = s.y(i);
            } else {
                x_train.row(it) = s.x.row(i);
                y_train(it++) = s.y(i);
            }
        }

        const RegularizationPath path = fit_path_grid(x_train, y_train, spec, grid, opt);
        for (int k = 0; k < grid_size; ++k) {
            errors(f, k) = (y_test - x_test * path.coefs[k]).squaredNorm() / n_test;
        }
    }

    CvResult cv;
    cv.lambdas = grid;
    cv.cv_mean.resize(grid_size);
    cv.cv_se.resize(grid_size);
    for (int k = 0; k < grid_size; ++k) {
        const double mean = errors.col(k).mean();
        double ss = 0.0;
        for (int f = 0; f < folds; ++f) {
            const double dev = errors(f, k) - mean;
            ss += dev * dev;
        }
        cv.cv_mean[k] = mean;
        cv.cv_se[k] = std::sqrt(ss / (folds - 1)) / std::sqrt(static_cast<double>(folds));
        // ties break toward the larger lambda (sparser model), i.e. the
        // earlier grid index
        if (cv.cv_mean[k] < cv.cv_mean[cv.min_index]) cv.min_index = k;
    }
    cv.lambda_min = grid[cv.min_index];
    return cv;
}

// Gaussian-likelihood BIC with the support size as degrees of freedom.
inline double bic_score(const StandardizedDesign& s, const Eigen::VectorXd& beta_std) {
    const int n = s.n();
    const double rss = std::max((s.y - s.x * beta_std).squaredNorm(), 1e-12);
    int df = 0;
    for (int j = 0; j < beta_std.size(); ++j) df += (beta_std(j) != 0.0);
    return n * std::log(rss / n) + std::log(static_cast<double>(n)) * df;
}

inline double bic_score(const StandardizedDesign& s, const FitResult& fit) {
    return bic_score(s, fit.coef.beta);
}

// Per-lambda check that the objective restricted to the active set stays
// convex: min eigenvalue of X_A'X_A / n must exceed the penalty's concavity
// modulus, 1/(gamma-1) for SCAD and 1/gamma for MCP.
inline std::vector<bool> convexity_diagnostic(const RegularizationPath& path,
                                              const StandardizedDesign& s,
                                              const PenaltySpec& spec) {
    if (spec.family != PenaltyFamily::Scad && spec.family != PenaltyFamily::Mcp)
        throw std::invalid_argument("convexity diagnostic applies to scad/mcp only");
    validate(spec);
    const double kappa =
        spec.family == PenaltyFamily::Scad ? 1.0 / (spec.gamma - 1.0) : 1.0 / spec.gamma;

    std::vector<bool> flags;
    flags.reserve(path.coefs.size());
    for (const Eigen::VectorXd& beta : path.coefs) {
        std::vector<int> active;
        for (int j = 0; j < beta.size(); ++j)
            if (beta(j) != 0.0) active.push_back(j);
        if (active.empty()) {
            flags.push_back(true);
            continue;
        }
        Eigen::MatrixXd xa(s.n(), active.size());
        for (std::size_t k = 0; k < active.size(); ++k) xa.col(k) = s.x.col(active[k]);
        const Eigen::MatrixXd gram = xa.transpose() * xa / s.n();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram, Eigen::EigenvaluesOnly);
        flags.push_back(eig.eigenvalues().minCoeff() > kappa);
    }
    return flags;
}

struct GammaSelection {
    std::vector<double> gamma_ladder;
    std::vector<double> bic_values;     // BIC at each gamma's BIC-optimal path point
    std::vector<bool> convexity_flags;  // diagnostic at that point
    double gamma_star = 0.0;
    bool fallback = false;  // no gamma passed the diagnostic; largest used
};

inline std::vector<double> default_gamma_ladder(PenaltyFamily family) {
    if (family == PenaltyFamily::Scad) return {2.1, 2.7, 3.7, 5.0, 10.0, 20.0};
    return {1.5, 2.0, 3.0, 5.0, 10.0, 20.0};
}

// For each gamma on the ladder, fit a path, locate its BIC-optimal point,
// and record whether that point passes the convexity diagnostic. gamma_star
// is the BIC argmin among passing candidates, ties toward the smaller gamma;
// with no passing candidate the largest (closest to convex) rung is used.
inline GammaSelection select_gamma(const StandardizedDesign& s, PenaltyFamily family,
                                   int grid_size = 100, std::vector<double> ladder = {}) {
    if (family != PenaltyFamily::Scad && family != PenaltyFamily::Mcp)
        throw std::invalid_argument("select_gamma applies to scad/mcp only");
    GammaSelection sel;
    sel.gamma_ladder = ladder.empty() ? default_gamma_ladder(family) : std::move(ladder);

    for (double gamma : sel.gamma_ladder) {
        PenaltySpec spec;
        spec.family = family;
        spec.gamma = gamma;
        const RegularizationPath path = fit_path(s, spec, grid_size);
        int best = 0;
        double best_bic = bic_score(s, path.coefs[0]);
        for (std::size_t k = 1; k < path.coefs.size(); ++k) {
            const double b = bic_score(s, path.coefs[k]);
            if (b < best_bic) {
                best_bic = b;
                best = static_cast<int>(k);
            }
        }
        sel.bic_values.push_back(best_bic);
        sel.convexity_flags.push_back(convexity_diagnostic(path, s, spec)[best]);
    }

    int star = -1;
    for (std::size_t g = 0; g < sel.gamma_ladder.size(); ++g) {
        if (!sel.convexity_flags[g]) continue;
        if (star < 0 || sel.bic_values[g] < sel.bic_values[star]) star = static_cast<int>(g);
    }
    if (star < 0) {
        sel.fallback = true;
        star = static_cast<int>(sel.gamma_ladder.size()) - 1;
    }
    sel.gamma_star = sel.gamma_ladder[star];
    return sel;
}

// Fit a path, tune lambda by k-fold CV, and return the full-data solution at
// the selected grid point.
inline FitResult fit_cv(const StandardizedDesign& s, const PenaltySpec& spec, int folds,
                        std::uint64_t seed, int grid_size = 100, const PathOptions& opt = {}) {
    const CvResult cv = kfold_cv(s, spec, folds, seed, grid_size, opt);
    const RegularizationPath path = fit_path(s, spec, grid_size, opt);
    const int k = cv.min_index;

    FitResult fit;
    switch (spec.family) {
        case PenaltyFamily::Lasso: fit.method = Method::Lasso; break;
        case PenaltyFamily::Enet: fit.method = Method::Enet; break;
        case PenaltyFamily::AdaLasso: fit.method = Method::AdaLasso; break;
        case PenaltyFamily::Scad: fit.method = Method::Scad; break;
        case PenaltyFamily::Mcp: fit.method = Method::Mcp; break;
    }
    fit.coef = recover_original_scale(path.coefs[k], s);
    fit.tuning.lambda1 = cv.lambda_min;
    if (spec.family == PenaltyFamily::Enet)
        fit.tuning.lambda2 = spec.couple_lambda2 ? cv.lambda_min : spec.lambda2;
    if (spec.family == PenaltyFamily::Scad || spec.family == PenaltyFamily::Mcp)
        fit.tuning.gamma = spec.gamma;
    fit.iterations = path.sweeps[k];
    fit.converged = path.converged[k];
    return fit;
}

// SCAD/MCP tuning: gamma from BIC + convexity, then lambda by k-fold CV.
inline FitResult fit_nonconvex_cv(const StandardizedDesign& s, PenaltyFamily family, int folds,
                                  std::uint64_t seed, int grid_size = 100) {
    const GammaSelection sel = select_gamma(s, family, grid_size);
    PenaltySpec spec;
    spec.family = family;
    spec.gamma = sel.gamma_star;
    FitResult fit = fit_cv(s, spec, folds, seed, grid_size);
    if (sel.fallback) fit.warnings.push_back("no-convex-candidate");
    return fit;
}

}  // namespace penreg
