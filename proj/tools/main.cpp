#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "penreg/penreg.hpp"

namespace {

void add_run_flags(CLI::App* cmd, penreg::BenchArgs& args) {
    cmd->add_option("--scenario", args.scenario, "builtin scenario name (see 'scenarios')");
    cmd->add_option("--config", args.config_path, "scenario config JSON file");
    cmd->add_option("--method", args.method_tags, "methods to run (default: all)")
        ->delimiter(',');
    cmd->add_option("--replications", args.replications, "replication count override");
    cmd->add_option("--seed", args.seed, "base seed");
    cmd->add_option("--workers", args.workers, "worker thread count")->check(CLI::PositiveNumber);
    cmd->add_option("--outdir", args.outdir, "output directory");
    cmd->add_option("--folds", args.folds, "cross-validation folds");
    cmd->add_option("--grid-size", args.grid_size, "lambda path grid size");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"penalized least-squares estimators and their Monte Carlo benchmark"};
    app.require_subcommand(1);

    penreg::FitArgs fit_args;
    double fixed_lambda = -1.0;
    CLI::App* fit = app.add_subcommand("fit", "fit one method on a CSV file");
    fit->add_option("--method", fit_args.method, "method tag")->required();
    fit->add_option("--input", fit_args.input, "input CSV (first row header)")->required();
    fit->add_option("--response", fit_args.response, "response column name")->required();
    CLI::Option* lam = fit->add_option("--lambda", fixed_lambda, "fixed ridge lambda (skips GCV)");
    fit->add_option("--folds", fit_args.folds, "cross-validation folds");
    fit->add_option("--grid-size", fit_args.grid_size, "lambda path grid size");
    fit->add_option("--seed", fit_args.seed, "cross-validation seed");

    penreg::BenchArgs bench_args;
    CLI::App* bench = app.add_subcommand("bench", "run a Monte Carlo benchmark scenario");
    add_run_flags(bench, bench_args);

    penreg::BenchArgs time_args;
    CLI::App* time = app.add_subcommand("time", "run the wall-clock comparison");
    add_run_flags(time, time_args);

    CLI::App* scenarios = app.add_subcommand("scenarios", "list builtin scenario families");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (fit->parsed()) {
            if (lam->count() > 0) fit_args.lambda = fixed_lambda;
            return penreg::cmd_fit(fit_args, std::cout, std::cerr);
        }
        if (bench->parsed()) return penreg::cmd_bench(bench_args, std::cout, std::cerr);
        if (time->parsed()) return penreg::cmd_time(time_args, std::cout, std::cerr);
        if (scenarios->parsed()) return penreg::cmd_scenarios(std::cout);
    } catch (const penreg::UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const penreg::Error& e) {
        std::cerr << "solver error: " << e.what() << '\n';
        return 3;
    }
    return 2;
}
