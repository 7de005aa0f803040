#pragma once

#include <cmath>
#include <cstdint>
#include <limits>

#include "penreg/tuning.hpp"

namespace penreg {

// Two-stage adaptive lasso: a CV-tuned lasso supplies the weights
// w_j = 1 / |beta_j|, then the weighted problem is CV-tuned again.
// Variables the first stage sets to zero get infinite weight and are
// excluded outright. An all-zero first stage yields a valid all-zero fit
// with a warning rather than an error.
inline FitResult fit_adaptive_lasso(const StandardizedDesign& s, int folds, std::uint64_t seed,
                                    int grid_size = 100) {
    PenaltySpec stage1;
    stage1.family = PenaltyFamily::Lasso;
    const FitResult lasso = fit_cv(s, stage1, folds, seed, grid_size);

    FitResult fit;
    fit.method = Method::AdaLasso;
    fit.tuning.lambda = lasso.tuning.lambda1;  // stage-1 value, kept for the record

    const Eigen::VectorXd& b1 = lasso.coef.beta;
    if ((b1.array() != 0.0).count() == 0) {
        fit.coef = recover_original_scale(Eigen::VectorXd::Zero(s.p()), s);
        fit.warnings.push_back("all-zero-first-stage");
        return fit;
    }

    PenaltySpec stage2;
    stage2.family = PenaltyFamily::AdaLasso;
    stage2.weights.resize(s.p());
    for (int j = 0; j < s.p(); ++j) {
        stage2.weights(j) =
            b1(j) != 0.0 ? 1.0 / std::abs(b1(j)) : std::numeric_limits<double>::infinity();
    }

    const FitResult second = fit_cv(s, stage2, folds, derive_seed(seed, 1000003), grid_size);
    fit.coef = second.coef;
    fit.tuning.lambda1 = second.tuning.lambda1;
    fit.iterations = second.iterations;
    fit.converged = second.converged;
    return fit;
}

}  // namespace penreg
