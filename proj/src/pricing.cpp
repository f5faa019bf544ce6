#include "memvol/pricing.hpp"

#include "memvol/errors.hpp"
#include "memvol/parallel.hpp"
#include "memvol/rng.hpp"
#include "memvol/special.hpp"
#include "memvol/stats.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace memvol {

namespace {

constexpr double kPdeRelTarget = 5e-4;

void check_effvol_matches(const EffVolCurve& curve, const TimeGrid& grid) {
    if (curve.times.size() != grid.n_steps())
        throw Error(ErrorCode::GridMismatch, "time grid is not the effective volatility grid");
    for (std::size_t i = 0; i < curve.times.size(); ++i) {
        const double t = grid.time(i + 1);
        if (std::fabs(curve.times[i] - t) > 1e-9 * grid.dt())
            throw Error(ErrorCode::GridMismatch, "time grid is not the effective volatility grid");
    }
}

// Thomas algorithm; sub/sup have n entries with sub[0], sup[n-1] unused.
void solve_tridiagonal(const std::vector<double>& sub, const std::vector<double>& diag,
                       const std::vector<double>& sup, std::vector<double>& rhs) {
    const std::size_t n = diag.size();
    std::vector<double> c(n);
    double denom = diag[0];
    c[0] = sup[0] / denom;
    rhs[0] /= denom;
    for (std::size_t i = 1; i < n; ++i) {
        denom = diag[i] - sub[i] * c[i - 1];
        c[i] = sup[i] / denom;
        rhs[i] = (rhs[i] - sub[i] * rhs[i - 1]) / denom;
    }
    for (std::size_t i = n - 1; i-- > 0;) rhs[i] -= c[i] * rhs[i + 1];
}

struct Boundary {
    double low;
    double high;
};

Boundary boundary_values(const OptionSpec& opt, double r, double s_max, double theta) {
    const double dk = opt.strike * std::exp(-r * theta);
    if (opt.kind == OptionKind::Call) return {0.0, s_max - dk};
    return {dk, 0.0};
}

struct Solved {
    std::vector<double> times;
    std::vector<double> values;
};

// Backward induction on a uniform S grid with M intervals and N steps.
Solved solve_pde(const AssetModel& model, const OptionSpec& opt, double s_max, std::size_t M,
                 std::size_t N, DriftCoefficient drift_kind) {
    const double T = opt.maturity - model.t0;
    const double h = s_max / static_cast<double>(M);
    const double dtheta = T / static_cast<double>(N);
    const double r = model.r;
    const double mu = drift_kind == DriftCoefficient::Rate ? r : 1.0;

    std::vector<double> v(M + 1);
    for (std::size_t m = 0; m <= M; ++m) v[m] = payoff(opt.kind, opt.strike, m * h);

    Solved out;
    out.times.resize(N + 1);
    out.values.resize((N + 1) * (M + 1));
    auto store = [&](std::size_t level) {
        // level counts steps back from maturity; row 0 holds t0.
        const std::size_t row = N - level;
        out.times[row] = opt.maturity - static_cast<double>(level) * dtheta;
        std::copy(v.begin(), v.end(), out.values.begin() + static_cast<std::ptrdiff_t>(row * (M + 1)));
    };
    store(0);
    out.times[N] = opt.maturity;

    const std::size_t n_int = M - 1;
    std::vector<double> lo(n_int), di(n_int), up(n_int), rhs(n_int);

    // One θ-scheme step from theta_a to theta_b; weight 1 = implicit, ½ = CN.
    auto advance = [&](double theta_a, double theta_b, double implicit_weight) {
        const double step = theta_b - theta_a;
        const double t_mid = opt.maturity - 0.5 * (theta_a + theta_b);
        const double sigma = model.effvol.value_at(t_mid);
        const double half_var = 0.5 * sigma * sigma;
        const double wi = implicit_weight;
        const double we = 1.0 - implicit_weight;
        const Boundary b_new = boundary_values(opt, r, s_max, theta_b);

        for (std::size_t k = 0; k < n_int; ++k) {
            const double m = static_cast<double>(k + 1);
            const double alpha = half_var * m * m;
            const double beta = mu * m;
            double l, d, u;
            if (alpha >= 0.5 * std::fabs(beta)) {
                l = alpha - 0.5 * beta;
                d = -2.0 * alpha - r;
                u = alpha + 0.5 * beta;
            } else if (beta >= 0.0) {  // upwind when convection dominates
                l = alpha;
                d = -2.0 * alpha - beta - r;
                u = alpha + beta;
            } else {
                l = alpha - beta;
                d = -2.0 * alpha + beta - r;
                u = alpha;
            }
            const double v_l = v[k];
            const double v_c = v[k + 1];
            const double v_u = v[k + 2];
            rhs[k] = v_c + we * step * (l * v_l + d * v_c + u * v_u);
            lo[k] = -wi * step * l;
            di[k] = 1.0 - wi * step * d;
            up[k] = -wi * step * u;
            if (k == 0) rhs[k] += wi * step * l * b_new.low;
            if (k + 1 == n_int) rhs[k] += wi * step * u * b_new.high;
        }
        solve_tridiagonal(lo, di, up, rhs);
        v[0] = b_new.low;
        v[M] = b_new.high;
        std::copy(rhs.begin(), rhs.end(), v.begin() + 1);
    };

    // Rannacher start: two implicit quarter steps, then a CN half step.
    advance(0.0, 0.25 * dtheta, 1.0);
    advance(0.25 * dtheta, 0.5 * dtheta, 1.0);
    advance(0.5 * dtheta, dtheta, 0.5);
    store(1);
    for (std::size_t n = 1; n < N; ++n) {
        advance(n * dtheta, (n + 1) * dtheta, 0.5);
        store(n + 1);
    }
    return out;
}

double interpolate_row(const std::vector<double>& values, std::size_t row, std::size_t M, double h,
                       double s) {
    const double x = s / h;
    auto m = static_cast<std::size_t>(std::floor(x));
    if (m >= M) m = M - 1;
    const double w = x - static_cast<double>(m);
    const double* r = values.data() + row * (M + 1);
    return r[m] + w * (r[m + 1] - r[m]);
}

} // namespace

void AssetModel::validate() const {
    if (!(s0 > 0.0)) throw Error(ErrorCode::InvalidArgument, "s0 must be > 0");
    if (effvol.times.empty() || effvol.times.size() != effvol.values.size())
        throw Error(ErrorCode::InvalidArgument, "effective volatility curve is empty or ragged");
    for (double v : effvol.values)
        if (!(v > 0.0)) throw Error(ErrorCode::NonPositiveVolatility, "effective volatility must be > 0");
}

TimeGrid AssetModel::time_grid() const {
    if (effvol.times.empty()) throw Error(ErrorCode::GridMismatch, "empty effective volatility grid");
    TimeGrid grid(t0, effvol.times.back(), effvol.times.size());
    check_effvol_matches(effvol, grid);
    return grid;
}

std::string to_string(OptionKind kind) { return kind == OptionKind::Call ? "call" : "put"; }

OptionKind parse_option_kind(const std::string& name) {
    if (name == "call") return OptionKind::Call;
    if (name == "put") return OptionKind::Put;
    throw Error(ErrorCode::InvalidArgument, "option kind must be call or put");
}

double payoff(OptionKind kind, double strike, double spot) {
    return kind == OptionKind::Call ? std::max(spot - strike, 0.0) : std::max(strike - spot, 0.0);
}

SamplePath simulate_asset_path(const AssetModel& model, const TimeGrid& grid, std::uint64_t seed,
                               Measure measure) {
    model.validate();
    if (grid.t0() != model.t0) throw Error(ErrorCode::GridMismatch, "time grid must start at t0");
    check_effvol_matches(model.effvol, grid);

    auto dW = wiener_increments(grid, seed);
    const double dt = grid.dt();
    std::vector<double> values(grid.n_steps() + 1);
    values[0] = model.s0;
    for (std::size_t i = 0; i < grid.n_steps(); ++i) {
        const double vol = model.effvol.values[i];
        const double half_var = 0.5 * vol * vol;
        const double mu = measure == Measure::Physical ? eval_coeff(model.A, grid.time(i)) + half_var : model.r;
        values[i + 1] = values[i] * std::exp((mu - half_var) * dt + vol * dW[i]);
    }
    return {grid, std::move(dW), std::move(values), seed, PathKind::Sde};
}

McPrice mc_expectation(const AssetModel& model, double maturity, std::size_t n_paths,
                       std::uint64_t seed, const std::function<double(double)>& g) {
    model.validate();
    if (n_paths < 100) throw Error(ErrorCode::TooFewPaths, "Monte Carlo pricing needs >= 100 paths");
    const TimeGrid full = model.time_grid();
    const std::size_t n_steps = full.index_of(maturity);
    if (n_steps == 0) throw Error(ErrorCode::InvalidArgument, "maturity must exceed t0");
    const TimeGrid grid(model.t0, full.time(n_steps), n_steps);

    const double dt = grid.dt();
    double log_drift = 0.0;
    for (std::size_t i = 0; i < n_steps; ++i) {
        const double vol = model.effvol.values[i];
        log_drift += (model.r - 0.5 * vol * vol) * dt;
    }

    std::vector<double> pair_mean(n_paths);
    parallel_for(n_paths, [&](std::size_t p) {
        const auto dW = wiener_increments(grid, path_seed(seed, p));
        double z = 0.0;
        for (std::size_t i = 0; i < n_steps; ++i) z += model.effvol.values[i] * dW[i];
        const double up = g(model.s0 * std::exp(log_drift + z));
        const double down = g(model.s0 * std::exp(log_drift - z));
        pair_mean[p] = 0.5 * (up + down);
    });
    const auto stats = mc_statistics(pair_mean);
    const double discount = std::exp(-model.r * (grid.T() - model.t0));
    return {discount * stats.mean, discount * stats.mean_se, n_paths};
}

McPrice mc_price(const AssetModel& model, const OptionSpec& opt, std::size_t n_paths,
                 std::uint64_t seed) {
    return mc_expectation(model, opt.maturity, n_paths, seed,
                          [&](double s) { return payoff(opt.kind, opt.strike, s); });
}

double bs_closed_form(OptionKind kind, double s0, double strike, double r, double vol, double T) {
    if (!(vol >= 0.0)) throw Error(ErrorCode::InvalidArgument, "volatility must be >= 0");
    if (!(T > 0.0)) throw Error(ErrorCode::InvalidArgument, "time to expiry must be > 0");
    const double discount = std::exp(-r * T);
    const double forward = s0 / discount;
    const double sd = vol * std::sqrt(T);
    if (sd == 0.0) return discount * payoff(kind, strike, forward);
    const double d1 = (std::log(forward / strike) + 0.5 * sd * sd) / sd;
    const double d2 = d1 - sd;
    if (kind == OptionKind::Call) return discount * (forward * normal_cdf(d1) - strike * normal_cdf(d2));
    return discount * (strike * normal_cdf(-d2) - forward * normal_cdf(-d1));
}

double effvol_total_variance(const EffVolCurve& curve, double t0, double T) {
    double total = 0.0;
    double prev = t0;
    for (std::size_t i = 0; i < curve.times.size() && prev < T; ++i) {
        const double hi = std::min(curve.times[i], T);
        total += curve.values[i] * curve.values[i] * (hi - prev);
        prev = hi;
    }
    if (prev < T) total += curve.values.back() * curve.values.back() * (T - prev);
    return total;
}

double bs_closed_form(OptionKind kind, double s0, double strike, double r, const EffVolCurve& curve,
                      double t0, double T) {
    const double horizon = T - t0;
    const double rms = std::sqrt(effvol_total_variance(curve, t0, T) / horizon);
    return bs_closed_form(kind, s0, strike, r, rms, horizon);
}

std::string to_string(DriftCoefficient c) { return c == DriftCoefficient::Rate ? "r" : "one"; }

DriftCoefficient parse_drift_coefficient(const std::string& name) {
    if (name == "r") return DriftCoefficient::Rate;
    if (name == "one") return DriftCoefficient::One;
    throw Error(ErrorCode::InvalidArgument, "drift coefficient must be r or one");
}

PdeResult pde_price(const AssetModel& model, const OptionSpec& opt, const PdeGrid& grid) {
    model.validate();
    if (!(opt.strike > 0.0)) throw Error(ErrorCode::InvalidArgument, "strike must be > 0");
    if (!(opt.maturity > model.t0)) throw Error(ErrorCode::InvalidArgument, "maturity must exceed t0");
    if (opt.maturity > model.effvol.t_end() + 1e-12)
        throw Error(ErrorCode::OutOfDomain, "maturity lies beyond the effective volatility curve");
    if (grid.n_space < 50 || grid.n_time < 50)
        throw Error(ErrorCode::InvalidArgument, "PDE grid needs n_space >= 50 and n_time >= 50");

    const double T = opt.maturity - model.t0;
    double s_max = grid.s_max;
    if (s_max == 0.0) s_max = std::max(4.0 * opt.strike, 4.0 * model.s0 * std::exp(model.r * T));
    if (s_max < 4.0 * opt.strike) throw Error(ErrorCode::InvalidArgument, "s_max must be >= 4 * strike");
    if (model.s0 >= s_max) throw Error(ErrorCode::InvalidArgument, "s0 must lie below s_max");

    // Snap the strike onto a node (for both resolutions when M is even).
    const std::size_t M = grid.n_space;
    auto nodes = static_cast<std::size_t>(std::floor(static_cast<double>(M) * opt.strike / s_max));
    if (M % 2 == 0 && nodes % 2 == 1) --nodes;
    if (nodes >= 1) s_max = static_cast<double>(M) * opt.strike / static_cast<double>(nodes);

    const Solved fine = solve_pde(model, opt, s_max, M, grid.n_time, grid.drift);
    const double h = s_max / static_cast<double>(M);

    PdeResult result;
    result.s_max = s_max;
    result.price = interpolate_row(fine.values, 0, M, h, model.s0);
    result.times = fine.times;
    result.spots.resize(M + 1);
    for (std::size_t m = 0; m <= M; ++m) result.spots[m] = static_cast<double>(m) * h;
    result.values = fine.values;

    if (grid.estimate_error) {
        const std::size_t Mc = std::max<std::size_t>(M / 2, 2);
        const std::size_t Nc = std::max<std::size_t>(grid.n_time / 2, 1);
        const Solved coarse = solve_pde(model, opt, s_max, Mc, Nc, grid.drift);
        const double coarse_price = interpolate_row(coarse.values, 0, Mc, s_max / Mc, model.s0);
        result.error_estimate = std::fabs(result.price - coarse_price) / 3.0;
        const double scale = std::max(std::fabs(result.price), 1e-4 * opt.strike);
        if (result.error_estimate > 10.0 * kPdeRelTarget * scale) {
            std::ostringstream msg;
            msg << "PDE refinement error estimate " << result.error_estimate << " exceeds 10x the "
                << kPdeRelTarget << " relative target";
            throw Error(ErrorCode::GridTooCoarse, msg.str());
        }
    }
    return result;
}

SdeDiagnostic sde_increment_diagnostic(const ProcessSpec& spec, const TimeGrid& grid,
                                       std::size_t n_paths, std::uint64_t seed,
                                       const QuadratureOptions& opts) {
    if (n_paths < 1000) throw Error(ErrorCode::TooFewPaths, "diagnostic needs >= 1000 seeds");
    spec.validate();
    const auto times = grid.interior_times();
    const EffVolCurve curve = tabulate_effvol(spec.b, spec.kernel, spec.t0, times, EffVolMethod::Exact, opts);
    const ShortMemoryConstruction construction(spec, grid);
    const std::size_t n = grid.n_steps();

    std::vector<double> drift_step(n);
    for (std::size_t i = 0; i < n; ++i) drift_step[i] = eval_coeff(spec.a, grid.time(i)) * grid.dt();

    std::vector<double> sde(n_paths), direct(n_paths);
    parallel_for(n_paths, [&](std::size_t p) {
        const auto dW = wiener_increments(grid, path_seed(seed, p));
        double h = 0.0;
        for (std::size_t i = 0; i < n; ++i) h += drift_step[i] + curve.values[i] * dW[i];
        sde[p] = h;
        direct[p] = construction.value(dW, n);
    });

    const auto s = mc_statistics(sde);
    const auto d = mc_statistics(direct);
    SdeDiagnostic out;
    out.n_paths = n_paths;
    out.sde_variance = s.variance;
    out.sde_variance_se = s.variance_se;
    out.direct_variance = short_memory_variance(spec, grid.T(), opts);
    out.direct_mc_variance = d.variance;
    out.direct_mc_variance_se = d.variance_se;
    out.ratio = out.sde_variance / out.direct_variance;
    return out;
}

} // namespace memvol
