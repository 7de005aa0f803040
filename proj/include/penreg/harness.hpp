#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"

#include "penreg/adaptive.hpp"
#include "penreg/csv.hpp"
#include "penreg/garrote.hpp"
#include "penreg/metrics.hpp"
#include "penreg/simulate.hpp"
#include "penreg/tuning.hpp"

namespace penreg {

// Usage and input problems; the CLI maps these to exit code 2, while
// penreg::Error (numerical failures) maps to 3.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline const std::vector<Method>& all_methods() {
    static const std::vector<Method> methods = {
        Method::Ols,   Method::Ridge, Method::NgAic,    Method::NgBic, Method::NgRidgeBic,
        Method::Lasso, Method::Enet,  Method::AdaLasso, Method::Scad,  Method::Mcp};
    return methods;
}

struct MethodOptions {
    int folds = 10;
    int grid_size = 100;
    std::uint64_t cv_seed = 0;
};

// Central dispatch used by the CLI and the benchmark engine. Every method
// performs its own tuning (GCV sweep, criterion rule, or CV), so a timed
// call covers the complete procedure.
inline FitResult fit_method(Method m, const StandardizedDesign& s, const MethodOptions& opt) {
    switch (m) {
        case Method::Ols:
            return fit_ols(s);
        case Method::Ridge: {
            const RidgeSelection sel = select_ridge_lambda(s, default_ridge_grid(s.n(), s.p()));
            return fit_ridge(s, sel.lambda_star);
        }
        case Method::NgAic:
            return fit_garrote(s, GarroteCriterion::CpAic);
        case Method::NgBic:
            return fit_garrote(s, GarroteCriterion::Bic);
        case Method::NgRidgeBic:
            return fit_ridge_garrote(s, GarroteCriterion::Bic);
        case Method::Lasso: {
            PenaltySpec spec;
            spec.family = PenaltyFamily::Lasso;
            return fit_cv(s, spec, opt.folds, opt.cv_seed, opt.grid_size);
        }
        case Method::Enet: {
            PenaltySpec spec;
            spec.family = PenaltyFamily::Enet;
            spec.couple_lambda2 = true;  // lambda2 = lambda1 along the path
            return fit_cv(s, spec, opt.folds, opt.cv_seed, opt.grid_size);
        }
        case Method::AdaLasso:
            return fit_adaptive_lasso(s, opt.folds, opt.cv_seed, opt.grid_size);
        case Method::Scad:
            return fit_nonconvex_cv(s, PenaltyFamily::Scad, opt.folds, opt.cv_seed, opt.grid_size);
        case Method::Mcp:
            return fit_nonconvex_cv(s, PenaltyFamily::Mcp, opt.folds, opt.cv_seed, opt.grid_size);
    }
    throw std::invalid_argument("unknown method");
}

struct FailureRecord {
    Method method = Method::Ols;
    double sweep_value = 0.0;
    int replication = 0;
    std::string message;
};

struct FamilyResult {
    ScenarioFamily family;
    std::vector<Method> methods;
    // aggregates ordered (method in config order) x (sweep ascending)
    std::vector<AggregateRecord> aggregates;
    std::vector<FailureRecord> failures;
};

// Replication-level parallelism over a bounded worker pool. Each job owns a
// (sweep index, replication) pair; methods run sequentially inside so their
// wall-clock readings stay comparable. Results land in preallocated slots
// and are reduced in fixed order, so numerical outputs do not depend on the
// worker count.
inline FamilyResult run_family(const ScenarioFamily& fam, const std::vector<Method>& methods,
                               int replications, std::uint64_t base_seed, int workers,
                               const MethodOptions& base_opt = {}) {
    if (methods.empty()) throw UsageError("method list is empty");
    if (replications < 1) throw UsageError("replications must be >= 1");
    if (workers < 1) throw UsageError("workers must be >= 1");

    const int n_sweeps = static_cast<int>(fam.sweep_values.size());
    const int n_methods = static_cast<int>(methods.size());

    struct Outcome {
        std::optional<MetricsRecord> record;
        std::string error;
    };
    std::vector<Outcome> slots(static_cast<std::size_t>(n_sweeps) * replications * n_methods);
    auto slot_at = [&](int si, int rep, int mi) -> Outcome& {
        return slots[(static_cast<std::size_t>(si) * replications + rep) * n_methods + mi];
    };

    const int n_jobs = n_sweeps * replications;
    std::atomic<int> next_job{0};
    auto worker_loop = [&] {
        for (;;) {
            const int job = next_job.fetch_add(1);
            if (job >= n_jobs) return;
            const int si = job / replications;
            const int rep = job % replications;

            ScenarioSpec spec = make_spec(fam, fam.sweep_values[static_cast<std::size_t>(si)]);
            spec.base_seed = base_seed;
            spec.replications = replications;

            Dataset d;
            StandardizedDesign s;
            std::string gen_error;
            try {
                d = gen_dataset(spec, rep);
                s = standardize(d);
            } catch (const std::exception& e) {
                gen_error = e.what();
            }

            MethodOptions opt = base_opt;
            opt.cv_seed = splitmix64(derive_seed(base_seed, static_cast<std::uint64_t>(rep)) ^
                                     0xC0FFEE1234ABCDEFull);
            for (int mi = 0; mi < n_methods; ++mi) {
                Outcome& out = slot_at(si, rep, mi);
                if (!gen_error.empty()) {
                    out.error = gen_error;
                    continue;
                }
                try {
                    const auto t0 = std::chrono::steady_clock::now();
                    const FitResult fit = fit_method(methods[static_cast<std::size_t>(mi)], s, opt);
                    const auto t1 = std::chrono::steady_clock::now();
                    const double elapsed = std::chrono::duration<double>(t1 - t0).count();
                    out.record = compute_metrics(fit, spec, d, elapsed, rep);
                } catch (const std::exception& e) {
                    out.error = e.what();
                }
            }
        }
    };

    if (workers == 1 || n_jobs == 1) {
        worker_loop();
    } else {
        std::vector<std::thread> pool;
        const int count = std::min(workers, n_jobs);
        pool.reserve(static_cast<std::size_t>(count));
        for (int w = 0; w < count; ++w) pool.emplace_back(worker_loop);
        for (auto& t : pool) t.join();
    }

    FamilyResult result;
    result.family = fam;
    result.methods = methods;
    for (int mi = 0; mi < n_methods; ++mi) {
        for (int si = 0; si < n_sweeps; ++si) {
            std::vector<MetricsRecord> records;
            records.reserve(static_cast<std::size_t>(replications));
            for (int rep = 0; rep < replications; ++rep) {
                const Outcome& out = slot_at(si, rep, mi);
                if (out.record) {
                    records.push_back(*out.record);
                } else {
                    result.failures.push_back({methods[static_cast<std::size_t>(mi)],
                                               fam.sweep_values[static_cast<std::size_t>(si)], rep,
                                               out.error});
                }
            }
            if (!records.empty()) {
                AggregateRecord agg = aggregate(std::move(records));
                agg.sweep_value = fam.sweep_values[static_cast<std::size_t>(si)];
                result.aggregates.push_back(agg);
            }
        }
    }
    return result;
}

inline std::string hardware_string() {
    std::string model = "unknown-cpu";
    std::ifstream in("/proc/cpuinfo");
    std::string line;
    while (std::getline(in, line)) {
        if (line.rfind("model name", 0) == 0) {
            const auto pos = line.find(':');
            if (pos != std::string::npos) {
                model = line.substr(pos + 1);
                while (!model.empty() && model.front() == ' ') model.erase(model.begin());
            }
            break;
        }
    }
    return model + " x" + std::to_string(std::thread::hardware_concurrency());
}

namespace detail {

inline const std::vector<std::string>& bench_metrics() {
    static const std::vector<std::string> metrics = {"mse", "me", "ic1", "ic2", "mse_std"};
    return metrics;
}

inline std::pair<double, double> metric_of(const AggregateRecord& a, const std::string& metric) {
    if (metric == "mse") return {a.mse_mean, a.mse_se};
    if (metric == "me") return {a.me_mean, a.me_se};
    if (metric == "ic1") return {a.ic1_mean, a.ic1_se};
    if (metric == "ic2") return {a.ic2_mean, a.ic2_se};
    if (metric == "mse_std") return {a.mse_std_mean, a.mse_std_se};
    if (metric == "elapsed") return {a.elapsed_mean, a.elapsed_se};
    throw std::invalid_argument("unknown metric " + metric);
}

}  // namespace detail

// One CSV per metric: <outdir>/<family>_<metric>.csv with the bench header.
// Timing never appears here, so reruns with the same (config, seed) are
// byte-identical.
inline void write_bench_csvs(const FamilyResult& fr, const std::string& outdir) {
    const std::string sweep = sweep_label(fr.family.sweep);
    for (const std::string& metric : detail::bench_metrics()) {
        std::ofstream out(outdir + "/" + fr.family.name + "_" + metric + ".csv");
        out << "method,sweep_name,sweep_value,metric,mean,stderr,replications\n";
        for (const AggregateRecord& a : fr.aggregates) {
            const auto [mean, se] = detail::metric_of(a, metric);
            out << method_tag(a.method) << ',' << sweep << ',' << fmt_double(a.sweep_value) << ','
                << metric << ',' << fmt_double(mean) << ',' << fmt_double(se) << ','
                << a.replications << '\n';
        }
    }

    std::ofstream err(outdir + "/" + fr.family.name + "_errors.csv");
    err << "method,sweep_name,sweep_value,replication,error\n";
    for (const FailureRecord& f : fr.failures) {
        err << method_tag(f.method) << ',' << sweep << ',' << fmt_double(f.sweep_value) << ','
            << f.replication << ',' << f.message << '\n';
    }
}

// Companion gnuplot script, one plot per metric. mse/me use a log y axis,
// matching how the study is usually displayed; the count metrics stay
// linear so zero rows remain visible.
inline void write_gnuplot_script(const FamilyResult& fr, const std::string& outdir) {
    const std::string sweep = sweep_label(fr.family.sweep);
    std::ofstream gp(outdir + "/" + fr.family.name + ".gp");
    gp << "# gnuplot script generated by penreg bench\n";
    gp << "set datafile separator \",\"\n";
    gp << "set datafile missing \"NaN\"\n";
    gp << "set terminal pngcairo size 900,600\n";
    gp << "set key outside\n";
    gp << "set xlabel \"" << sweep << "\"\n";
    gp << "methods = \"";
    for (std::size_t i = 0; i < fr.methods.size(); ++i)
        gp << (i ? " " : "") << method_tag(fr.methods[i]);
    gp << "\"\n";
    for (const std::string& metric : detail::bench_metrics()) {
        const bool logy = metric == "mse" || metric == "me" || metric == "mse_std";
        gp << "set output \"" << fr.family.name << "_" << metric << ".png\"\n";
        gp << (logy ? "set logscale y\n" : "unset logscale y\n");
        gp << "set ylabel \"" << metric << "\"\n";
        gp << "set title \"" << fr.family.name << ": " << metric << "\"\n";
        gp << "plot for [m in methods] \"" << fr.family.name << "_" << metric
           << ".csv\" skip 1 using 3:(strcol(1) eq m ? $5 : NaN) with linespoints title m\n";
    }
}

inline void write_run_meta(const FamilyResult& fr, int replications, std::uint64_t base_seed,
                           int workers, const MethodOptions& opt, const std::string& outdir) {
    nlohmann::json meta;
    meta["family"] = fr.family.name;
    meta["sweep"] = sweep_label(fr.family.sweep);
    meta["sweep_values"] = fr.family.sweep_values;
    meta["replications"] = replications;
    meta["base_seed"] = base_seed;
    meta["workers"] = workers;
    meta["cv_folds"] = opt.folds;
    meta["path_grid_size"] = opt.grid_size;
    meta["generator"] = kGeneratorId;
    meta["hardware"] = hardware_string();
    std::vector<std::string> tags;
    for (Method m : fr.methods) tags.emplace_back(method_tag(m));
    meta["methods"] = tags;
    std::ofstream out(outdir + "/" + fr.family.name + "_meta.json");
    out << meta.dump(2) << '\n';
}

// Scenario config JSON: n, p, beta0, beta (array; null entries are the z
// placeholders), sigma, rho or one sweep among rho_grid/z_grid/p_grid,
// optional replications and name.
inline ScenarioFamily family_from_json(const nlohmann::json& j) {
    ScenarioFamily fam;
    try {
        fam.name = j.value("name", std::string("custom"));
        fam.n = j.at("n").get<int>();
        fam.beta0 = j.at("beta0").get<double>();
        fam.sigma = j.at("sigma").get<double>();
        fam.replications = j.value("replications", 1000);

        const int sweeps_given =
            int(j.contains("rho_grid")) + int(j.contains("z_grid")) + int(j.contains("p_grid"));
        if (sweeps_given > 1) throw UsageError("config: at most one of rho_grid/z_grid/p_grid");

        int nulls = 0;
        for (const auto& b : j.at("beta")) {
            if (b.is_null()) {
                fam.beta_template.push_back(std::nan(""));
                ++nulls;
            } else {
                fam.beta_template.push_back(b.get<double>());
            }
        }

        if (j.contains("rho_grid")) {
            fam.sweep = SweepKind::Rho;
            fam.sweep_values = j.at("rho_grid").get<std::vector<double>>();
        } else if (j.contains("z_grid")) {
            fam.sweep = SweepKind::NearlySparseZ;
            fam.sweep_values = j.at("z_grid").get<std::vector<double>>();
            fam.rho = j.at("rho").get<double>();
        } else if (j.contains("p_grid")) {
            fam.sweep = SweepKind::Dimension;
            fam.sweep_values = j.at("p_grid").get<std::vector<double>>();
            fam.rho = j.at("rho").get<double>();
        } else {
            fam.sweep = SweepKind::None;
            fam.rho = j.at("rho").get<double>();
            fam.sweep_values = {fam.rho};
        }
        if (nulls > 0 && fam.sweep != SweepKind::NearlySparseZ)
            throw UsageError("config: null beta entries require z_grid");
        if (fam.sweep_values.empty()) throw UsageError("config: sweep grid is empty");

        if (fam.sweep != SweepKind::Dimension) {
            const int p = j.at("p").get<int>();
            if (p != static_cast<int>(fam.beta_template.size()))
                throw UsageError("config: beta length does not match p");
        }
    } catch (const nlohmann::json::exception& e) {
        throw UsageError(std::string("config: ") + e.what());
    }
    return fam;
}

inline ScenarioFamily load_family(const std::string& scenario, const std::string& config_path) {
    if (!scenario.empty() && !config_path.empty())
        throw UsageError("give either a builtin scenario or a config file, not both");
    if (!config_path.empty()) {
        std::ifstream in(config_path);
        if (!in) throw UsageError("cannot open config " + config_path);
        nlohmann::json j;
        try {
            in >> j;
        } catch (const nlohmann::json::exception& e) {
            throw UsageError(std::string("config: ") + e.what());
        }
        return family_from_json(j);
    }
    if (scenario.empty()) throw UsageError("a scenario name or --config is required");
    for (const ScenarioFamily& fam : builtin_scenarios()) {
        if (fam.name == scenario) return fam;
    }
    throw UsageError("unknown scenario '" + scenario + "'");
}

struct BenchArgs {
    std::string scenario;
    std::string config_path;
    std::vector<std::string> method_tags;  // empty: all
    int replications = -1;                 // -1: family default
    std::uint64_t seed = 0;
    int workers = 1;
    std::string outdir = ".";
    int folds = 10;
    int grid_size = 100;
};

inline std::vector<Method> resolve_methods(const std::vector<std::string>& tags) {
    if (tags.empty()) return all_methods();
    std::vector<Method> methods;
    for (const std::string& tag : tags) {
        const auto m = parse_method(tag);
        if (!m) throw UsageError("unknown method '" + tag + "'");
        methods.push_back(*m);
    }
    return methods;
}

inline int cmd_bench(const BenchArgs& args, std::ostream& out, std::ostream& err) {
    const ScenarioFamily fam = load_family(args.scenario, args.config_path);
    const std::vector<Method> methods = resolve_methods(args.method_tags);
    const int reps = args.replications > 0 ? args.replications : fam.replications;
    MethodOptions opt;
    opt.folds = args.folds;
    opt.grid_size = args.grid_size;

    std::filesystem::create_directories(args.outdir);
    const FamilyResult fr = run_family(fam, methods, reps, args.seed, args.workers, opt);
    write_bench_csvs(fr, args.outdir);
    write_gnuplot_script(fr, args.outdir);
    write_run_meta(fr, reps, args.seed, args.workers, opt, args.outdir);

    out << "wrote " << fam.name << " aggregates (" << reps << " replications, "
        << methods.size() << " methods) to " << args.outdir << "\n";
    if (!fr.failures.empty()) {
        err << fr.failures.size() << " replication fits failed; see " << fam.name
            << "_errors.csv\n";
        return 4;
    }
    return 0;
}

// Timing study: per-method wall-clock mean and stderr over replications,
// complete procedures including tuning.
inline int cmd_time(const BenchArgs& args, std::ostream& out, std::ostream& err) {
    BenchArgs targs = args;
    if (targs.scenario.empty() && targs.config_path.empty()) targs.scenario = "timing";
    const ScenarioFamily fam = load_family(targs.scenario, targs.config_path);
    const std::vector<Method> methods = resolve_methods(targs.method_tags);
    const int reps = targs.replications > 0 ? targs.replications : fam.replications;
    MethodOptions opt;
    opt.folds = targs.folds;
    opt.grid_size = targs.grid_size;

    std::filesystem::create_directories(targs.outdir);
    const FamilyResult fr = run_family(fam, methods, reps, targs.seed, targs.workers, opt);

    const std::string hw = hardware_string();
    std::ofstream csv(targs.outdir + "/" + fam.name + "_time.csv");
    csv << "method,mean_seconds,stderr_seconds,replications,stderr_defined,hardware\n";
    out << "method,mean_seconds,stderr_seconds,replications\n";
    for (const AggregateRecord& a : fr.aggregates) {
        csv << method_tag(a.method) << ',' << fmt_double(a.elapsed_mean) << ','
            << fmt_double(a.elapsed_se) << ',' << a.replications << ',' << (a.se_defined ? 1 : 0)
            << ',' << hw << '\n';
        out << method_tag(a.method) << ',' << fmt_double(a.elapsed_mean) << ','
            << fmt_double(a.elapsed_se) << ',' << a.replications << '\n';
    }
    if (!fr.failures.empty()) {
        err << fr.failures.size() << " replication fits failed\n";
        return 4;
    }
    return 0;
}

inline int cmd_scenarios(std::ostream& out) {
    for (const ScenarioFamily& fam : builtin_scenarios()) {
        out << fam.name << ": sweep " << sweep_label(fam.sweep) << " over "
            << fam.sweep_values.size() << " values, n=" << fam.n;
        if (fam.sweep != SweepKind::Dimension)
            out << ", p=" << fam.beta_template.size();
        out << ", sigma=" << fmt_double(fam.sigma)
            << ", default replications=" << fam.replications << "\n";
    }
    return 0;
}

struct FitArgs {
    std::string method;
    std::string input;
    std::string response;
    std::optional<double> lambda;  // ridge only: skip GCV and use this value
    int folds = 10;
    int grid_size = 100;
    std::uint64_t seed = 0;
};

inline int cmd_fit(const FitArgs& args, std::ostream& out, std::ostream& err) {
    try {
        const auto method = parse_method(args.method);
        if (!method) throw UsageError("unknown method '" + args.method + "'");
        if (args.lambda && *method != Method::Ridge)
            throw UsageError("--lambda applies to ridge only");

        CsvTable table;
        try {
            table = read_csv(args.input);
        } catch (const std::exception& e) {
            throw UsageError(e.what());
        }
        int response_col = -1;
        for (std::size_t j = 0; j < table.header.size(); ++j) {
            if (table.header[j] == args.response) response_col = static_cast<int>(j);
        }
        if (response_col < 0) throw UsageError("response column '" + args.response + "' not found");
        const int n = static_cast<int>(table.rows.size());
        const int p = static_cast<int>(table.header.size()) - 1;
        if (n < 2 || p < 1) throw UsageError("need at least 2 rows and 1 predictor");

        Dataset d;
        d.x.resize(n, p);
        d.y.resize(n);
        std::vector<std::string> names;
        for (std::size_t j = 0; j < table.header.size(); ++j)
            if (static_cast<int>(j) != response_col) names.push_back(table.header[j]);
        try {
            for (int i = 0; i < n; ++i) {
                int k = 0;
                for (std::size_t j = 0; j < table.header.size(); ++j) {
                    const double v = parse_double(table.rows[static_cast<std::size_t>(i)][j]);
                    if (static_cast<int>(j) == response_col)
                        d.y(i) = v;
                    else
                        d.x(i, k++) = v;
                }
            }
        } catch (const std::exception& e) {
            throw UsageError(e.what());
        }

        const StandardizedDesign s = standardize(d);
        MethodOptions opt;
        opt.folds = args.folds;
        opt.grid_size = args.grid_size;
        opt.cv_seed = args.seed;
        const FitResult fit =
            args.lambda ? fit_ridge(s, *args.lambda) : fit_method(*method, s, opt);

        nlohmann::json rec;
        rec["method"] = method_tag(fit.method);
        rec["intercept"] = fit.coef.intercept;
        nlohmann::json coefs = nlohmann::json::object();
        nlohmann::json support = nlohmann::json::array();
        for (int j = 0; j < p; ++j) {
            coefs[names[static_cast<std::size_t>(j)]] = fit.coef.slopes(j);
            if (fit.coef.slopes(j) != 0.0) support.push_back(names[static_cast<std::size_t>(j)]);
        }
        rec["coefficients"] = coefs;
        rec["support"] = support;
        nlohmann::json tuning = nlohmann::json::object();
        if (fit.tuning.lambda) tuning["lambda"] = *fit.tuning.lambda;
        if (fit.tuning.lambda1) tuning["lambda1"] = *fit.tuning.lambda1;
        if (fit.tuning.lambda2) tuning["lambda2"] = *fit.tuning.lambda2;
        if (fit.tuning.gamma) tuning["gamma"] = *fit.tuning.gamma;
        if (fit.tuning.lambda_r) tuning["lambda_r"] = *fit.tuning.lambda_r;
        rec["tuning"] = tuning;
        rec["iterations"] = fit.iterations;
        rec["converged"] = fit.converged;
        rec["warnings"] = fit.warnings;
        out << rec.dump(2) << '\n';
        return 0;
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const Error& e) {
        err << "solver error: " << e.what() << '\n';
        return 3;
    }
}

}  // namespace penreg
