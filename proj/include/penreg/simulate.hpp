#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "penreg/model.hpp"
#include "penreg/rng.hpp"

namespace penreg {

// Generative model: y_i = beta0 + beta' x_i + eps_i, eps ~ N(0, sigma^2),
// rows x_i i.i.d. N(0, Sigma) with Sigma_ij = rho^|i-j|.
struct ScenarioSpec {
    int n = 0;
    int p = 0;
    double beta0 = 0.0;
    Eigen::VectorXd beta;
    double rho = 0.0;
    double sigma = 1.0;
    int replications = 1000;
    std::uint64_t base_seed = 0;
};

inline void validate(const ScenarioSpec& spec) {
    if (spec.n < 2 || spec.p < 1) throw std::invalid_argument("scenario needs n >= 2, p >= 1");
    if (!(std::abs(spec.rho) < 1.0)) throw std::invalid_argument("|rho| must be < 1");
    if (spec.sigma < 0.0) throw std::invalid_argument("sigma must be nonnegative");
    if (spec.replications < 1) throw std::invalid_argument("replications must be >= 1");
    if (spec.beta.size() != spec.p) throw std::invalid_argument("beta length must equal p");
}

// Stationary AR(1) recursion across columns: x_1 = z_1,
// x_j = rho x_{j-1} + sqrt(1 - rho^2) z_j, which realizes
// E[x_i x_j] = rho^|i-j| exactly with unit marginal variances.
inline Eigen::MatrixXd gen_ar1_predictors(int n, int p, double rho, Rng& rng) {
    if (!(std::abs(rho) < 1.0)) throw std::invalid_argument("|rho| must be < 1");
    Eigen::MatrixXd x(n, p);
    const double scale = std::sqrt(1.0 - rho * rho);
    for (int i = 0; i < n; ++i) {
        double prev = rng.gaussian();
        x(i, 0) = prev;
        for (int j = 1; j < p; ++j) {
            prev = rho * prev + scale * rng.gaussian();
            x(i, j) = prev;
        }
    }
    return x;
}

// Deterministic given (spec, replication_index): the stream seed is a pure
// function of (base_seed, index). sigma = 0 is floored at 1e-12 so the
// noiseless limit stays generable.
inline Dataset gen_dataset(const ScenarioSpec& spec, int replication_index) {
    validate(spec);
    Rng rng(derive_seed(spec.base_seed, static_cast<std::uint64_t>(replication_index)));
    Dataset d;
    d.x = gen_ar1_predictors(spec.n, spec.p, spec.rho, rng);
    const double sigma = std::max(spec.sigma, 1e-12);
    d.y.resize(spec.n);
    for (int i = 0; i < spec.n; ++i) {
        d.y(i) = spec.beta0 + d.x.row(i).dot(spec.beta) + sigma * rng.gaussian();
    }
    return d;
}

enum class SweepKind { None, Rho, NearlySparseZ, Dimension };

inline const char* sweep_label(SweepKind k) {
    switch (k) {
        case SweepKind::None: return "rho";
        case SweepKind::Rho: return "rho";
        case SweepKind::NearlySparseZ: return "z";
        case SweepKind::Dimension: return "p";
    }
    return "?";
}

// One experiment family: a base configuration plus a swept axis.
// beta_template: for a z sweep, NaN entries take the swept value; for a
// dimension sweep it is the leading coefficient block, zero-padded to p.
struct ScenarioFamily {
    std::string name;
    SweepKind sweep = SweepKind::None;
    std::vector<double> sweep_values;
    int n = 0;
    double beta0 = 0.0;
    double rho = 0.0;
    double sigma = 1.0;
    int replications = 1000;
    std::vector<double> beta_template;
};

inline ScenarioSpec make_spec(const ScenarioFamily& fam, double sweep_value) {
    ScenarioSpec spec;
    spec.n = fam.n;
    spec.beta0 = fam.beta0;
    spec.rho = fam.sweep == SweepKind::Rho ? sweep_value : fam.rho;
    spec.sigma = fam.sigma;
    spec.replications = fam.replications;
    if (fam.sweep == SweepKind::Dimension) {
        spec.p = static_cast<int>(sweep_value);
        if (spec.p < static_cast<int>(fam.beta_template.size()))
            throw std::invalid_argument("dimension sweep value below beta template length");
        spec.beta = Eigen::VectorXd::Zero(spec.p);
        for (std::size_t j = 0; j < fam.beta_template.size(); ++j)
            spec.beta(static_cast<int>(j)) = fam.beta_template[j];
    } else {
        spec.p = static_cast<int>(fam.beta_template.size());
        spec.beta.resize(spec.p);
        for (int j = 0; j < spec.p; ++j) {
            const double b = fam.beta_template[static_cast<std::size_t>(j)];
            spec.beta(j) = std::isnan(b) ? (fam.sweep == SweepKind::NearlySparseZ ? sweep_value : 0.0)
                                         : b;
        }
    }
    validate(spec);
    return spec;
}

namespace detail {

inline std::vector<double> rho_sweep_grid() {
    std::vector<double> g;
    for (int k = 0; k <= 9; ++k) g.push_back(k / 10.0);
    g.push_back(0.95);
    g.push_back(0.99);
    return g;
}

inline std::vector<double> z_sweep_grid() {
    std::vector<double> g;
    for (int k = 0; k <= 15; ++k) g.push_back(k / 10.0);
    return g;
}

}  // namespace detail

// The four experiment families. case1/case2/case3 sweep the correlation for
// (n=40, sigma=1), (n=40, sigma=3), (n=100, sigma=1) with
// beta = (3, 1.5, 0, 0, 2, 0, 0, 0) and intercept 4. nearsparse replaces the
// zeros with a swept z at rho = 0.5. dimsweep grows p at n = 1000 with ten
// unit coefficients, and timing is the single-point wall-clock scenario.
inline std::vector<ScenarioFamily> builtin_scenarios() {
    const std::vector<double> sparse_beta = {3.0, 1.5, 0.0, 0.0, 2.0, 0.0, 0.0, 0.0};
    const double nan = std::nan("");
    const std::vector<double> nearly_sparse = {3.0, 1.5, nan, nan, 2.0, nan, nan, nan};

    std::vector<ScenarioFamily> fams;

    ScenarioFamily case1{"case1",  SweepKind::Rho, detail::rho_sweep_grid(), 40, 4.0, 0.5, 1.0,
                         1000,     sparse_beta};
    fams.push_back(case1);

    ScenarioFamily case2 = case1;
    case2.name = "case2";
    case2.sigma = 3.0;
    fams.push_back(case2);

    ScenarioFamily case3 = case1;
    case3.name = "case3";
    case3.n = 100;
    fams.push_back(case3);

    ScenarioFamily nearsparse{"nearsparse", SweepKind::NearlySparseZ, detail::z_sweep_grid(),
                              40,           4.0,
                              0.5,          1.0,
                              1000,         nearly_sparse};
    fams.push_back(nearsparse);

    ScenarioFamily dimsweep{"dimsweep",
                            SweepKind::Dimension,
                            {100.0, 150.0, 200.0, 250.0, 300.0},
                            1000,
                            4.0,
                            0.5,
                            1.0,
                            1000,
                            std::vector<double>(10, 1.0)};
    fams.push_back(dimsweep);

    ScenarioFamily timing{"timing",
                          SweepKind::None,
                          {0.5},
                          1000,
                          4.0,
                          0.5,
                          1.0,
                          1000,
                          [] {
                              std::vector<double> b(100, 0.0);
                              for (int j = 0; j < 10; ++j) b[static_cast<std::size_t>(j)] = 1.0;
                              return b;
                          }()};
    fams.push_back(timing);

    return fams;
}

}  // namespace penreg
