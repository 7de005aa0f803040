#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <vector>

#include "penreg/model.hpp"
#include "penreg/simulate.hpp"

namespace penreg {

// Per-replication scores. mse and me are on original-scale slopes (the
// intercept is a generative nuisance and excluded); mse_std is the same
// squared error on the standardized scale, kept as an auxiliary column.
// ic1 counts true variables missed, ic2 null variables selected; both use
// exact-zero supports.
struct MetricsRecord {
    Method method = Method::Ols;
    int replication = 0;
    double mse = 0.0;
    double me = 0.0;
    double mse_std = 0.0;
    int ic1 = 0;
    int ic2 = 0;
    double elapsed = 0.0;  // seconds
};

inline MetricsRecord compute_metrics(const FitResult& fit, const ScenarioSpec& truth,
                                     const Dataset& d, double elapsed, int replication) {
    if (fit.coef.slopes.size() != truth.beta.size() || d.p() != truth.p)
        throw std::invalid_argument("fit/truth dimension mismatch");

    MetricsRecord rec;
    rec.method = fit.method;
    rec.replication = replication;
    rec.elapsed = elapsed;

    const Eigen::VectorXd err = fit.coef.slopes - truth.beta;
    rec.mse = err.squaredNorm();
    rec.me = (d.x * err).squaredNorm();  // (b-B)' X'X (b-B) via the realized design

    // standardized-scale auxiliary: true coefficient j maps to beta_j * s_j
    const Eigen::VectorXd means = d.x.colwise().mean();
    double mse_std = 0.0;
    for (int j = 0; j < d.p(); ++j) {
        const double s_j = std::sqrt((d.x.col(j).array() - means(j)).square().sum() / d.n());
        const double dev = fit.coef.beta(j) - truth.beta(j) * s_j;
        mse_std += dev * dev;
    }
    rec.mse_std = mse_std;

    for (int j = 0; j < truth.p; ++j) {
        const bool true_nonzero = truth.beta(j) != 0.0;
        const bool fit_nonzero = fit.coef.slopes(j) != 0.0;
        rec.ic1 += (true_nonzero && !fit_nonzero);
        rec.ic2 += (!true_nonzero && fit_nonzero);
    }
    return rec;
}

// Monte Carlo means and standard errors for one (method, sweep value) cell.
struct AggregateRecord {
    Method method = Method::Ols;
    double sweep_value = 0.0;
    int replications = 0;
    bool se_defined = true;  // false for a single record (se reported as 0)
    double mse_mean = 0.0, mse_se = 0.0;
    double me_mean = 0.0, me_se = 0.0;
    double ic1_mean = 0.0, ic1_se = 0.0;
    double ic2_mean = 0.0, ic2_se = 0.0;
    double mse_std_mean = 0.0, mse_std_se = 0.0;
    double elapsed_mean = 0.0, elapsed_se = 0.0;
};

// Order-independent: records are summed in replication-index order.
inline AggregateRecord aggregate(std::vector<MetricsRecord> records) {
    if (records.empty()) throw EmptyGroup();
    std::sort(records.begin(), records.end(),
              [](const MetricsRecord& a, const MetricsRecord& b) {
                  return a.replication < b.replication;
              });

    AggregateRecord agg;
    agg.method = records.front().method;
    agg.replications = static_cast<int>(records.size());
    agg.se_defined = records.size() > 1;

    auto mean_se = [&](auto&& get, double& mean, double& se) {
        double sum = 0.0;
        for (const auto& r : records) sum += get(r);
        mean = sum / records.size();
        if (records.size() < 2) {
            se = 0.0;
            return;
        }
        double ss = 0.0;
        for (const auto& r : records) {
            const double dev = get(r) - mean;
            ss += dev * dev;
        }
        se = std::sqrt(ss / (records.size() - 1)) / std::sqrt(static_cast<double>(records.size()));
    };

    mean_se([](const MetricsRecord& r) { return r.mse; }, agg.mse_mean, agg.mse_se);
    mean_se([](const MetricsRecord& r) { return r.me; }, agg.me_mean, agg.me_se);
    mean_se([](const MetricsRecord& r) { return double(r.ic1); }, agg.ic1_mean, agg.ic1_se);
    mean_se([](const MetricsRecord& r) { return double(r.ic2); }, agg.ic2_mean, agg.ic2_se);
    mean_se([](const MetricsRecord& r) { return r.mse_std; }, agg.mse_std_mean, agg.mse_std_se);
    mean_se([](const MetricsRecord& r) { return r.elapsed; }, agg.elapsed_mean, agg.elapsed_se);
    return agg;
}

}  // namespace penreg
