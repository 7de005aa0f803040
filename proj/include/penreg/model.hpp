#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "penreg/errors.hpp"

namespace penreg {

// Raw regression data in original units.
struct Dataset {
    Eigen::MatrixXd x;  // n x p
    Eigen::VectorXd y;  // length n
    int n() const { return static_cast<int>(x.rows()); }
    int p() const { return static_cast<int>(x.cols()); }
};

// Column-standardized design: sum_i x_ij = 0, sum_i x_ij^2 = n, y centered.
// col_scales uses the population convention s_j = sqrt(sum_i (x_ij - m_j)^2 / n)
// so the sum-of-squares identity holds exactly.
struct StandardizedDesign {
    Eigen::MatrixXd x;
    Eigen::VectorXd y;
    Eigen::VectorXd col_means;
    Eigen::VectorXd col_scales;
    double y_mean = 0.0;
    int n() const { return static_cast<int>(x.rows()); }
    int p() const { return static_cast<int>(x.cols()); }
};

// Coefficients on both scales. Zeros are exact: excluded variables carry
// 0.0, never a rounding remnant, so support sets are well defined.
struct CoefficientVector {
    Eigen::VectorXd beta;    // standardized scale
    Eigen::VectorXd slopes;  // original scale, beta_j / s_j
    double intercept = 0.0;  // original scale

    int support_size() const {
        int k = 0;
        for (int j = 0; j < beta.size(); ++j) k += (beta(j) != 0.0);
        return k;
    }
};

enum class Method { Ols, Ridge, NgAic, NgBic, NgRidgeBic, Lasso, Enet, AdaLasso, Scad, Mcp };

inline const char* method_tag(Method m) {
    switch (m) {
        case Method::Ols: return "ols";
        case Method::Ridge: return "ridge";
        case Method::NgAic: return "ng-aic";
        case Method::NgBic: return "ng-bic";
        case Method::NgRidgeBic: return "ngridge-bic";
        case Method::Lasso: return "lasso";
        case Method::Enet: return "enet";
        case Method::AdaLasso: return "adalasso";
        case Method::Scad: return "scad";
        case Method::Mcp: return "mcp";
    }
    return "?";
}

// "ng-cp" is an alias for "ng-aic": both criteria share the same lambda rule.
inline std::optional<Method> parse_method(std::string_view tag) {
    if (tag == "ols") return Method::Ols;
    if (tag == "ridge") return Method::Ridge;
    if (tag == "ng-aic" || tag == "ng-cp") return Method::NgAic;
    if (tag == "ng-bic") return Method::NgBic;
    if (tag == "ngridge-bic") return Method::NgRidgeBic;
    if (tag == "lasso") return Method::Lasso;
    if (tag == "enet") return Method::Enet;
    if (tag == "adalasso") return Method::AdaLasso;
    if (tag == "scad") return Method::Scad;
    if (tag == "mcp") return Method::Mcp;
    return std::nullopt;
}

// Tuning values actually chosen by a fit; fields are set only when the
// method uses them. lambda1 carries the selected path penalty; for the
// adaptive lasso, lambda holds the stage-1 value and lambda1 the final one.
struct Tuning {
    std::optional<double> lambda;
    std::optional<double> lambda1;
    std::optional<double> lambda2;
    std::optional<double> gamma;
    std::optional<double> lambda_r;
};

struct FitResult {
    CoefficientVector coef;
    Method method = Method::Ols;
    Tuning tuning;
    int iterations = 0;
    bool converged = true;
    std::vector<std::string> warnings;
};

inline StandardizedDesign standardize(const Dataset& d) {
    const int n = d.n();
    const int p = d.p();
    if (n < 2 || p < 1) throw std::invalid_argument("need n >= 2 and p >= 1");
    if (d.y.size() != n) throw std::invalid_argument("y length does not match x rows");
    if (!d.x.allFinite() || !d.y.allFinite()) throw NonFiniteError();

    StandardizedDesign s;
    s.col_means = d.x.colwise().mean();
    s.x = d.x.rowwise() - s.col_means.transpose();
    s.col_scales.resize(p);
    for (int j = 0; j < p; ++j) {
        const double ssq = s.x.col(j).squaredNorm();
        const double m = s.col_means(j);
        if (ssq / n <= 1e-20 * (1.0 + m * m)) throw ZeroVarianceColumn(j);
        s.col_scales(j) = std::sqrt(ssq / n);
        s.x.col(j) /= s.col_scales(j);
    }
    s.y_mean = d.y.mean();
    s.y = d.y.array() - s.y_mean;
    return s;
}

// Map standardized-scale coefficients back to original units. Zero stays
// exactly zero (0.0 / s_j == 0.0 for finite positive s_j).
inline CoefficientVector recover_original_scale(const Eigen::VectorXd& beta,
                                                const StandardizedDesign& s) {
    if (beta.size() != s.p()) throw std::invalid_argument("coefficient length mismatch");
    CoefficientVector c;
    c.beta = beta;
    c.slopes = beta.cwiseQuotient(s.col_scales);
    c.intercept = s.y_mean - c.slopes.dot(s.col_means);
    return c;
}

}  // namespace penreg
