#include "memvol/cli.hpp"
#include "memvol/config.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
    CLI::App app{"memvol: short-memory stochastic processes, effective volatility and option pricing"};
    app.require_subcommand(1);

    std::string config_path;
    memvol::CliOptions opts;
    std::size_t paths = 0;
    double t_eval = 0.0;

    auto add_config = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "run configuration (key = value)")->required()->check(CLI::ExistingFile);
    };

    auto* simulate = app.add_subcommand("simulate", "write sample paths as path_id,t,value");
    add_config(simulate);
    simulate->add_option("--paths", paths, "number of paths (default numerics.n_paths)");
    simulate->add_option("--kind", opts.kind, "base | short-memory | full-memory")
        ->check(CLI::IsMember({"base", "short-memory", "full-memory"}));
    simulate->add_option("--out", opts.out, "output CSV");

    auto* moments = app.add_subcommand("moments", "analytic vs Monte Carlo moments");
    add_config(moments);
    moments->add_option("--t", t_eval, "evaluation time (a grid point; default process.T)");
    moments->add_option("--paths", paths, "number of paths (default numerics.n_paths)");

    auto* effvol = app.add_subcommand("effvol", "tabulate the effective volatility as t,B");
    add_config(effvol);
    effvol->add_option("--method", opts.method, "exact | asymptotic | gaussian")
        ->check(CLI::IsMember({"exact", "asymptotic", "gaussian"}));
    effvol->add_option("--out", opts.out, "output CSV");

    auto* price = app.add_subcommand("price", "price the configured vanilla option");
    add_config(price);
    price->add_option("--engine", opts.engine, "mc | pde")->check(CLI::IsMember({"mc", "pde"}));
    price->add_option("--method", opts.method, "effective volatility method")
        ->check(CLI::IsMember({"exact", "asymptotic", "gaussian"}));
    price->add_option("--paths", paths, "antithetic path pairs (default numerics.n_paths)");
    price->add_option("--out", opts.out, "output JSON");
    price->add_option("--surface", opts.surface, "PDE value surface CSV (t,S,V)");

    auto* verify = app.add_subcommand("verify", "run the invariant suite on a configuration");
    add_config(verify);

    CLI11_PARSE(app, argc, argv);

    const std::string name = app.get_subcommands().front()->get_name();
    const auto* sub = app.get_subcommands().front();
    auto given = [&](const char* flag) {
        const auto* opt = sub->get_option_no_throw(flag);
        return opt != nullptr && opt->count() > 0;
    };
    if (given("--paths")) opts.paths = paths;
    if (given("--t")) opts.t = t_eval;

    try {
        const auto cfg = memvol::parse_config(config_path);
        return memvol::run_subcommand(name, cfg, opts, std::cout);
    } catch (const std::exception& e) {
        std::cerr << memvol::error_json(e) << "\n";
        return 2;
    }
}
