#include "memvol/cli.hpp"

#include "memvol/effvol.hpp"
#include "memvol/parallel.hpp"
#include "memvol/pricing.hpp"
#include "memvol/process.hpp"
#include "memvol/stats.hpp"

#include <json.hpp>

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace memvol {

namespace {

using json = nlohmann::json;

std::string out_path(const CliOptions& opts, const RunConfig& cfg, const char* command) {
    const std::string& path = !opts.out.empty() ? opts.out : cfg.out;
    if (path.empty())
        throw Error(ErrorCode::InvalidArgument, std::string(command) + " needs --out or io.out");
    return path;
}

EffVolMethod method_of(const CliOptions& opts, const RunConfig& cfg) {
    return opts.method.empty() ? cfg.effvol_method : parse_effvol_method(opts.method);
}

EffVolCurve pricing_effvol(const RunConfig& cfg, EffVolMethod method) {
    const auto grid = cfg.pricing_grid();
    return tabulate_effvol(cfg.b, cfg.kernel, cfg.t0, grid.interior_times(), method, cfg.quadrature());
}

AssetModel asset_model(const RunConfig& cfg, EffVolCurve curve) {
    AssetModel model;
    model.s0 = cfg.s0;
    model.A = cfg.A;
    model.effvol = std::move(curve);
    model.r = cfg.r;
    model.t0 = cfg.t0;
    return model;
}

int cmd_simulate(const RunConfig& cfg, const CliOptions& opts) {
    const auto path = out_path(opts, cfg, "simulate");
    const auto kind = parse_path_kind(opts.kind);
    const std::size_t n_paths = opts.paths.value_or(cfg.n_paths);
    const auto spec = cfg.process();
    const auto grid = cfg.process_grid();

    std::vector<std::vector<double>> paths(n_paths);
    switch (kind) {
    case PathKind::Base:
        parallel_for(n_paths, [&](std::size_t p) {
            paths[p] = simulate_base_path(spec, grid, path_seed(cfg.seed, p)).values;
        });
        break;
    case PathKind::ShortMemory: {
        const ShortMemoryConstruction construction(spec, grid);
        parallel_for(n_paths, [&](std::size_t p) {
            paths[p] = construction.path(wiener_increments(grid, path_seed(cfg.seed, p)));
        });
        break;
    }
    case PathKind::FullMemory: {
        const FullMemoryConstruction construction(spec, grid);
        parallel_for(n_paths, [&](std::size_t p) {
            const auto s = path_seed(cfg.seed, p);
            paths[p] = construction.solve(wiener_increments(grid, s), cfg.picard(), s).path.values;
        });
        break;
    }
    case PathKind::Sde:
        throw Error(ErrorCode::InvalidArgument, "simulate supports base, short-memory, full-memory");
    }

    std::string text = "# config_digest=" + cfg.digest + " kind=" + to_string(kind) + "\npath_id,t,value\n";
    const auto times = grid.times();
    for (std::size_t p = 0; p < n_paths; ++p)
        for (std::size_t i = 0; i < times.size(); ++i)
            text += std::to_string(p) + "," + format_double(times[i]) + "," + format_double(paths[p][i]) + "\n";
    write_atomic(path, text);
    return 0;
}

int cmd_moments(const RunConfig& cfg, const CliOptions& opts, std::ostream& out) {
    const auto spec = cfg.process();
    const auto grid = cfg.process_grid();
    const double t = opts.t.value_or(cfg.horizon);
    const std::size_t index = grid.index_of(t);
    if (index == 0) throw Error(ErrorCode::DegenerateWindow, "moments need t > t0");
    const std::size_t n_paths = opts.paths.value_or(cfg.n_paths);

    const auto base = base_moments(spec, t);
    const double mem_var = short_memory_variance(spec, t, cfg.quadrature());
    const auto short_mc = mc_statistics(terminal_values(spec, grid, PathKind::ShortMemory, cfg.seed, n_paths, index));
    const auto full_mc = mc_statistics(
        terminal_values(spec, grid, PathKind::FullMemory, cfg.seed, n_paths, index, cfg.picard()));

    auto line = [&](const char* label, double analytic, double mc, double se) {
        out << std::left << std::setw(28) << label << " analytic " << std::setw(14) << format_double(analytic)
            << " mc " << std::setw(14) << format_double(mc) << " se " << format_double(se) << "\n";
    };
    out << "# config_digest=" << cfg.digest << " t=" << format_double(t) << " paths=" << n_paths << "\n";
    line("short-memory mean", base.mean, short_mc.mean, short_mc.mean_se);
    line("short-memory variance", mem_var, short_mc.variance, short_mc.variance_se);
    line("full-memory mean", base.mean, full_mc.mean, full_mc.mean_se);
    out << std::left << std::setw(28) << "full-memory variance" << " analytic " << std::setw(14) << "n/a"
        << " mc " << std::setw(14) << format_double(full_mc.variance) << " se "
        << format_double(full_mc.variance_se) << "\n";
    out << std::left << std::setw(28) << "base variance (no memory)" << " analytic "
        << format_double(base.variance) << "\n";
    return 0;
}

int cmd_effvol(const RunConfig& cfg, const CliOptions& opts) {
    const auto path = out_path(opts, cfg, "effvol");
    const auto method = method_of(opts, cfg);
    const auto grid = cfg.process_grid();
    const auto curve = tabulate_effvol(cfg.b, cfg.kernel, cfg.t0, grid.interior_times(), method, cfg.quadrature());

    std::string text = "# config_digest=" + cfg.digest + " method=" + to_string(method) + "\nt,B\n";
    for (std::size_t i = 0; i < curve.times.size(); ++i)
        text += format_double(curve.times[i]) + "," + format_double(curve.values[i]) + "\n";
    write_atomic(path, text);
    return 0;
}

int cmd_price(const RunConfig& cfg, const CliOptions& opts) {
    const auto path = out_path(opts, cfg, "price");
    const auto method = method_of(opts, cfg);
    const auto model = asset_model(cfg, pricing_effvol(cfg, method));

    json doc;
    doc["engine"] = opts.engine;
    doc["config_digest"] = cfg.digest;
    doc["effvol_method"] = to_string(method);
    if (opts.engine == "mc") {
        const auto res = mc_price(model, cfg.option, opts.paths.value_or(cfg.n_paths), cfg.seed);
        doc["price"] = res.price;
        doc["std_error"] = res.std_error;
        doc["n_paths"] = res.n_paths;
    } else if (opts.engine == "pde") {
        PdeGrid pg;
        pg.n_space = cfg.pde_space;
        pg.n_time = cfg.pde_time;
        pg.drift = cfg.drift;
        const auto res = pde_price(model, cfg.option, pg);
        doc["price"] = res.price;
        doc["error_estimate"] = res.error_estimate;
        doc["drift_coefficient"] = to_string(cfg.drift);
        const std::string& surface = !opts.surface.empty() ? opts.surface : cfg.surface;
        if (!surface.empty()) {
            std::string text = "# config_digest=" + cfg.digest + "\nt,S,V\n";
            const std::size_t width = res.spots.size();
            for (std::size_t row = 0; row < res.times.size(); ++row)
                for (std::size_t m = 0; m < width; ++m)
                    text += format_double(res.times[row]) + "," + format_double(res.spots[m]) + "," +
                            format_double(res.values[row * width + m]) + "\n";
            write_atomic(surface, text);
        }
    } else {
        throw Error(ErrorCode::InvalidArgument, "engine must be mc or pde");
    }
    write_atomic(path, doc.dump(2) + "\n");
    return 0;
}

// ---------------------------------------------------------------------------

struct Check {
    std::string name;
    bool pass;
    std::string detail;
};

std::string detail(std::initializer_list<std::pair<const char*, double>> items) {
    std::string out;
    for (const auto& [k, v] : items) {
        if (!out.empty()) out += " ";
        out += std::string(k) + "=" + format_double(v);
    }
    return out;
}

std::vector<Check> verify_suite(const RunConfig& cfg) {
    std::vector<Check> checks;
    const auto spec = cfg.process();
    const auto grid = cfg.process_grid();
    const auto quad = cfg.quadrature();
    const std::size_t n_paths = std::min<std::size_t>(cfg.n_paths, 10000);

    // No memory: all constructions coincide path by path.
    {
        ProcessSpec flat = spec;
        flat.kernel = MemoryKernel(spec.kernel.family(), 0.0);
        const ShortMemoryConstruction sm(flat, grid);
        const FullMemoryConstruction fm(flat, grid);
        bool same = true;
        for (std::size_t p = 0; p < 8 && same; ++p) {
            const auto s = path_seed(cfg.seed, p);
            const auto base = simulate_base_path(flat, grid, s);
            same = sm.path(base.dW) == base.values &&
                   fm.solve(base.dW, cfg.picard(), s).path.values == base.values;
        }
        checks.push_back({"tau0-path-collapse", same, "8 seeds"});

        double worst = 0.0;
        for (double t : {grid.time(1), grid.T()}) {
            const EffVolRequest req{cfg.b, flat.kernel, cfg.t0, t};
            const double bt = eval_coeff(cfg.b, t);
            for (auto m : {EffVolMethod::Exact, EffVolMethod::Asymptotic})
                worst = std::max(worst, std::fabs(effective_vol(req, m, quad) - bt));
            if (flat.kernel.family() == MemoryKernel::Family::Gaussian)
                worst = std::max(worst, std::fabs(effective_vol_gaussian(req, quad) - bt));
        }
        checks.push_back({"tau0-effvol-collapse", worst <= 1e-12, detail({{"max_abs_diff", worst}})});
    }

    // Effective volatility orderings on a handful of grid times.
    {
        double worst_order = -1.0;
        double worst_closed = 0.0;
        const std::size_t n = grid.n_steps();
        for (std::size_t i : {std::size_t{1}, n / 2 > 0 ? n / 2 : 1, n}) {
            const EffVolRequest req{cfg.b, cfg.kernel, cfg.t0, grid.time(i)};
            const double exact = effective_vol_exact(req, quad);
            const double asym = effective_vol_asymptotic(req, quad);
            worst_order = std::max(worst_order, exact - asym);
            if (cfg.kernel.family() == MemoryKernel::Family::Gaussian)
                worst_closed = std::max(worst_closed, std::fabs(effective_vol_gaussian(req, quad) - exact));
        }
        checks.push_back({"effvol-exact-below-asymptotic", worst_order <= 1e-9,
                          detail({{"max_exact_minus_asymptotic", worst_order}})});
        if (cfg.kernel.family() == MemoryKernel::Family::Gaussian)
            checks.push_back({"effvol-gaussian-matches-exact", worst_closed <= 1e-7,
                              detail({{"max_abs_diff", worst_closed}})});
    }

    // Monte Carlo moments of the first-order construction.
    {
        const std::size_t n = grid.n_steps();
        const auto stats = mc_statistics(terminal_values(spec, grid, PathKind::ShortMemory, cfg.seed, n_paths, n));
        const double mean = base_moments(spec, grid.T()).mean;
        const double var = short_memory_variance(spec, grid.T(), quad);
        checks.push_back({"short-memory-mean", std::fabs(stats.mean - mean) <= 4.0 * stats.mean_se,
                          detail({{"mc", stats.mean}, {"analytic", mean}, {"se", stats.mean_se}})});
        checks.push_back({"short-memory-variance", std::fabs(stats.variance - var) <= 4.0 * stats.variance_se,
                          detail({{"mc", stats.variance}, {"analytic", var}, {"se", stats.variance_se}})});
    }

    // PDE: parity and, without memory, the closed form.
    {
        const auto model = asset_model(cfg, pricing_effvol(cfg, cfg.effvol_method));
        PdeGrid pg;
        pg.n_space = cfg.pde_space;
        pg.n_time = cfg.pde_time;
        OptionSpec call = cfg.option;
        call.kind = OptionKind::Call;
        OptionSpec put = cfg.option;
        put.kind = OptionKind::Put;
        const auto c = pde_price(model, call, pg);
        const auto p = pde_price(model, put, pg);
        const double T = cfg.option.maturity - cfg.t0;
        const double parity = c.price - p.price - (cfg.s0 - cfg.option.strike * std::exp(-cfg.r * T));
        const double bound = 2.0 * std::max(c.error_estimate, p.error_estimate) + 1e-10;
        checks.push_back({"pde-put-call-parity", std::fabs(parity) <= bound,
                          detail({{"parity_gap", parity}, {"bound", bound}})});

        if (cfg.kernel.degenerate()) {
            const double bs = bs_closed_form(cfg.option.kind, cfg.s0, cfg.option.strike, cfg.r, model.effvol,
                                             cfg.t0, cfg.option.maturity);
            const double pde = cfg.option.kind == OptionKind::Call ? c.price : p.price;
            const double rel = std::fabs(pde - bs) / std::max(std::fabs(bs), 1e-12);
            checks.push_back({"pde-matches-closed-form", rel <= 5e-4,
                              detail({{"pde", pde}, {"closed_form", bs}, {"rel_err", rel}})});
        }
    }
    return checks;
}

int cmd_verify(const RunConfig& cfg, std::ostream& out) {
    const auto checks = verify_suite(cfg);
    int failures = 0;
    out << "# config_digest=" << cfg.digest << "\n";
    for (const auto& c : checks) {
        out << (c.pass ? "PASS " : "FAIL ") << c.name << "  " << c.detail << "\n";
        if (!c.pass) ++failures;
    }
    out << failures << " failure(s) in " << checks.size() << " checks\n";
    return failures == 0 ? 0 : 1;
}

} // namespace

std::string format_double(double x) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, ptr);
}

void write_atomic(const std::string& path, const std::string& contents) {
    const std::filesystem::path target(path);
    std::filesystem::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw Error(ErrorCode::IoError, "cannot write " + tmp.string());
        f << contents;
        if (!f.flush()) throw Error(ErrorCode::IoError, "failed writing " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, target, ec);
    if (ec) throw Error(ErrorCode::IoError, "cannot rename onto " + path + ": " + ec.message());
}

std::string error_json(const std::exception& e) {
    json doc;
    if (const auto* ce = dynamic_cast<const ConfigError*>(&e)) {
        doc["error"] = std::string(to_string(ce->code()));
        doc["problems"] = ce->problems();
    } else if (const auto* me = dynamic_cast<const Error*>(&e)) {
        doc["error"] = std::string(to_string(me->code()));
    } else {
        doc["error"] = "InternalError";
    }
    doc["message"] = e.what();
    return doc.dump();
}

int run_subcommand(const std::string& name, const RunConfig& cfg, const CliOptions& opts,
                   std::ostream& out) {
    if (name == "simulate") return cmd_simulate(cfg, opts);
    if (name == "moments") return cmd_moments(cfg, opts, out);
    if (name == "effvol") return cmd_effvol(cfg, opts);
    if (name == "price") return cmd_price(cfg, opts);
    if (name == "verify") return cmd_verify(cfg, out);
    throw Error(ErrorCode::InvalidArgument, "unknown subcommand '" + name + "'");
}

} // namespace memvol
