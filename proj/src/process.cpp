#include "memvol/process.hpp"

#include "memvol/errors.hpp"
#include "memvol/parallel.hpp"
#include "memvol/rng.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace memvol {

void ProcessSpec::validate() const { b.require_positive(); }

TimeGrid::TimeGrid(double t0, double T, std::size_t n_steps) : t0_(t0), T_(T), n_(n_steps) {
    if (n_steps < 1) throw Error(ErrorCode::InvalidArgument, "time grid needs n_steps >= 1");
    if (!(T > t0)) throw Error(ErrorCode::InvalidArgument, "time grid needs T > t0");
    dt_ = (T - t0) / static_cast<double>(n_steps);
}

std::vector<double> TimeGrid::times() const {
    std::vector<double> out(n_ + 1);
    for (std::size_t i = 0; i <= n_; ++i) out[i] = time(i);
    return out;
}

std::vector<double> TimeGrid::interior_times() const {
    std::vector<double> out(n_);
    for (std::size_t i = 1; i <= n_; ++i) out[i - 1] = time(i);
    return out;
}

std::size_t TimeGrid::index_of(double t) const {
    const double x = (t - t0_) / dt_;
    const double r = std::round(x);
    if (r < 0.0 || r > static_cast<double>(n_) || std::fabs(x - r) > 1e-9) {
        std::ostringstream msg;
        msg << "t = " << t << " is not a point of the time grid";
        throw Error(ErrorCode::GridMismatch, msg.str());
    }
    return static_cast<std::size_t>(r);
}

std::string to_string(PathKind kind) {
    switch (kind) {
    case PathKind::Base: return "base";
    case PathKind::ShortMemory: return "short-memory";
    case PathKind::FullMemory: return "full-memory";
    case PathKind::Sde: return "sde";
    }
    return "base";
}

PathKind parse_path_kind(const std::string& name) {
    if (name == "base") return PathKind::Base;
    if (name == "short-memory") return PathKind::ShortMemory;
    if (name == "full-memory") return PathKind::FullMemory;
    if (name == "sde") return PathKind::Sde;
    throw Error(ErrorCode::InvalidArgument, "unknown path kind '" + name + "'");
}

std::vector<double> wiener_increments(const TimeGrid& grid, std::uint64_t seed) {
    std::vector<double> dW(grid.n_steps());
    NormalStream(seed).fill(dW, std::sqrt(grid.dt()));
    return dW;
}

// ---------------------------------------------------------------------------

void ImpulseModel::validate() const {
    const std::size_t n = times.size();
    if (means.size() != n || vols.size() != n || dts.size() != n)
        throw Error(ErrorCode::InvalidArgument, "impulse model arrays differ in length");
    for (std::size_t k = 0; k < n; ++k) {
        if (!(vols[k] > 0.0))
            throw Error(ErrorCode::NonPositiveVolatility, "impulse b_k must be > 0");
        if (!(dts[k] > 0.0)) throw Error(ErrorCode::InvalidArgument, "impulse dt_k must be > 0");
        if (k > 0 && !(times[k] > times[k - 1]))
            throw Error(ErrorCode::NonMonotoneTime, "impulse times must strictly increase");
    }
}

double simulate_impulse_sum(const ImpulseModel& m, double t, std::uint64_t seed) {
    m.validate();
    if (m.times.empty() || t < m.times.front())
        throw Error(ErrorCode::InvalidArgument, "t precedes the first impulse");
    const NormalStream stream(seed);
    double total = 0.0;
    for (std::size_t k = 0; k < m.times.size() && m.times[k] <= t; ++k)
        total += m.means[k] * m.dts[k] + m.vols[k] * std::sqrt(m.dts[k]) * stream.normal(k);
    return total;
}

// ---------------------------------------------------------------------------

Moments base_moments(const ProcessSpec& spec, double t) {
    if (t < spec.t0) throw Error(ErrorCode::ReversedInterval, "base_moments: t < t0");
    return {integrate_coeff(spec.a, spec.t0, t, false), integrate_coeff(spec.b, spec.t0, t, true)};
}

double memory_weight(const ProcessSpec& spec, double s, double t) {
    const double w = t - spec.t0;
    if (!(w >= 1e-12)) throw Error(ErrorCode::DegenerateWindow, "memory_weight: t - t0 too small");
    if (s < spec.t0 || s > t) throw Error(ErrorCode::InvalidArgument, "memory_weight: need t0 <= s <= t");
    return 1.0 + kernel_integral(spec.kernel, s, t) / w;
}

double short_memory_variance(const ProcessSpec& spec, double t, const QuadratureOptions& opts) {
    const double w = t - spec.t0;
    if (!(w >= 1e-12)) throw Error(ErrorCode::DegenerateWindow, "short_memory_variance: t - t0 too small");
    if (spec.kernel.degenerate()) return integrate_coeff(spec.b, spec.t0, t, true);
    auto integrand = [&](double s) {
        const double bs = eval_coeff(spec.b, s);
        const double ws = memory_weight(spec, std::min(s, t), t);
        return bs * bs * ws * ws;
    };
    const auto breaks = spec.b.breakpoints(spec.t0, t);
    return adaptive_simpson(integrand, spec.t0, t, breaks, opts);
}

// ---------------------------------------------------------------------------

namespace {

void sample_coefficients(const ProcessSpec& spec, const TimeGrid& grid, std::vector<double>& drift_step,
                         std::vector<double>& vol) {
    const std::size_t n = grid.n_steps();
    drift_step.resize(n);
    vol.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double s = grid.time(j);
        drift_step[j] = eval_coeff(spec.a, s) * grid.dt();
        vol[j] = eval_coeff(spec.b, s);
    }
    // The end point must also be inside the domains.
    eval_coeff(spec.a, grid.T());
    eval_coeff(spec.b, grid.T());
}

void check_start(const ProcessSpec& spec, const TimeGrid& grid) {
    if (grid.t0() != spec.t0)
        throw Error(ErrorCode::GridMismatch, "time grid must start at the process t0");
}

void check_increments(const TimeGrid& grid, std::span<const double> dW) {
    if (dW.size() != grid.n_steps())
        throw Error(ErrorCode::GridMismatch, "increment count differs from grid steps");
}

} // namespace

SamplePath base_path_from_increments(const ProcessSpec& spec, const TimeGrid& grid,
                                     std::vector<double> dW, std::uint64_t seed) {
    check_start(spec, grid);
    check_increments(grid, dW);
    std::vector<double> drift_step, vol;
    sample_coefficients(spec, grid, drift_step, vol);
    std::vector<double> values(grid.n_steps() + 1, 0.0);
    for (std::size_t j = 0; j < grid.n_steps(); ++j)
        values[j + 1] = values[j] + (drift_step[j] + vol[j] * dW[j]);
    return {grid, std::move(dW), std::move(values), seed, PathKind::Base};
}

SamplePath simulate_base_path(const ProcessSpec& spec, const TimeGrid& grid, std::uint64_t seed) {
    return base_path_from_increments(spec, grid, wiener_increments(grid, seed), seed);
}

ShortMemoryConstruction::ShortMemoryConstruction(const ProcessSpec& spec, const TimeGrid& grid)
    : grid_(grid) {
    check_start(spec, grid);
    sample_coefficients(spec, grid, drift_step_, vol_);
    const std::size_t n = grid.n_steps();
    weights_.resize(n * (n + 1) / 2);
    for (std::size_t i = 1; i <= n; ++i) {
        const double t = grid.time(i);
        double* row = weights_.data() + row_offset(i);
        for (std::size_t j = 0; j < i; ++j) row[j] = memory_weight(spec, grid.time(j), t);
    }
}

double ShortMemoryConstruction::value(std::span<const double> dW, std::size_t i) const {
    check_increments(grid_, dW);
    if (i > grid_.n_steps()) throw Error(ErrorCode::GridMismatch, "grid index out of range");
    if (i == 0) return 0.0;
    const double* row = weights_.data() + row_offset(i);
    double v = 0.0;
    for (std::size_t j = 0; j < i; ++j) v = v + (drift_step_[j] + (vol_[j] * row[j]) * dW[j]);
    return v;
}

std::vector<double> ShortMemoryConstruction::path(std::span<const double> dW) const {
    std::vector<double> out(grid_.n_steps() + 1);
    for (std::size_t i = 0; i <= grid_.n_steps(); ++i) out[i] = value(dW, i);
    return out;
}

double simulate_short_memory(const ProcessSpec& spec, const TimeGrid& grid, std::uint64_t seed,
                             double t_eval) {
    check_start(spec, grid);
    const std::size_t i = grid.index_of(t_eval);
    if (i == 0) throw Error(ErrorCode::DegenerateWindow, "t_eval must exceed t0");
    std::vector<double> drift_step, vol;
    sample_coefficients(spec, grid, drift_step, vol);
    const auto dW = wiener_increments(grid, seed);
    const double t = grid.time(i);
    double v = 0.0;
    for (std::size_t j = 0; j < i; ++j)
        v = v + (drift_step[j] + (vol[j] * memory_weight(spec, grid.time(j), t)) * dW[j]);
    return v;
}

SamplePath simulate_short_memory_path(const ProcessSpec& spec, const TimeGrid& grid,
                                      std::uint64_t seed) {
    ShortMemoryConstruction construction(spec, grid);
    auto dW = wiener_increments(grid, seed);
    auto values = construction.path(dW);
    return {grid, std::move(dW), std::move(values), seed, PathKind::ShortMemory};
}

// ---------------------------------------------------------------------------

FullMemoryConstruction::FullMemoryConstruction(const ProcessSpec& spec, const TimeGrid& grid)
    : grid_(grid) {
    check_start(spec, grid);
    sample_coefficients(spec, grid, drift_step_, vol_);
    const std::size_t n = grid.n_steps();
    lag_weight_.resize(n + 1);
    for (std::size_t k = 0; k <= n; ++k)
        lag_weight_[k] = kernel_value(spec.kernel, static_cast<double>(k) * grid.dt());
}

void FullMemoryConstruction::base(std::span<const double> dW, std::vector<double>& values,
                                  std::vector<double>& drift) const {
    check_increments(grid_, dW);
    const std::size_t n = grid_.n_steps();
    values.assign(n + 1, 0.0);
    drift.assign(n + 1, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        values[j + 1] = values[j] + (drift_step_[j] + vol_[j] * dW[j]);
        drift[j + 1] = drift[j] + drift_step_[j];
    }
}

std::vector<double> FullMemoryConstruction::step(std::span<const double> base,
                                                 std::span<const double> drift,
                                                 std::span<const double> current) const {
    const std::size_t n = grid_.n_steps();
    std::vector<double> deviation(n + 1);
    for (std::size_t j = 0; j <= n; ++j) deviation[j] = current[j] - drift[j];

    std::vector<double> out(base.begin(), base.end());
    const double dt = grid_.dt();
    for (std::size_t i = 1; i <= n; ++i) {
        double sum = 0.0;
        for (std::size_t j = 0; j < i; ++j) sum += lag_weight_[i - j] * deviation[j];
        out[i] = base[i] + sum * dt / (grid_.time(i) - grid_.t0());
    }
    return out;
}

std::vector<double> FullMemoryConstruction::first_order(std::span<const double> dW) const {
    std::vector<double> values, drift;
    base(dW, values, drift);
    return step(values, drift, values);
}

FullMemoryResult FullMemoryConstruction::solve(std::vector<double> dW, const PicardOptions& opts,
                                               std::uint64_t seed) const {
    if (opts.max_iter < 1) throw Error(ErrorCode::InvalidArgument, "Picard max_iter must be >= 1");
    if (!(opts.tol > 0.0)) throw Error(ErrorCode::InvalidArgument, "Picard tol must be > 0");

    std::vector<double> values, drift;
    base(dW, values, drift);
    std::vector<double> current = values;
    double change = 0.0;
    for (int k = 1; k <= opts.max_iter; ++k) {
        auto next = step(values, drift, current);
        change = 0.0;
        for (std::size_t i = 0; i < next.size(); ++i)
            change = std::max(change, std::fabs(next[i] - current[i]));
        current = std::move(next);
        if (change <= opts.tol)
            return {{grid_, std::move(dW), std::move(current), seed, PathKind::FullMemory}, k, change};
    }
    std::ostringstream msg;
    msg << "Picard iteration did not converge in " << opts.max_iter << " iterations (last change "
        << change << ")";
    throw Error(ErrorCode::NoConvergence, msg.str());
}

FullMemoryResult simulate_full_memory(const ProcessSpec& spec, const TimeGrid& grid,
                                      std::uint64_t seed, const PicardOptions& opts) {
    return FullMemoryConstruction(spec, grid).solve(wiener_increments(grid, seed), opts, seed);
}

// ---------------------------------------------------------------------------

std::uint64_t path_seed(std::uint64_t seed, std::size_t p) { return derive_seed(seed, "path", p); }

std::vector<double> terminal_values(const ProcessSpec& spec, const TimeGrid& grid, PathKind kind,
                                    std::uint64_t seed, std::size_t n_paths, std::size_t index,
                                    const PicardOptions& picard) {
    if (index > grid.n_steps()) throw Error(ErrorCode::GridMismatch, "grid index out of range");
    std::vector<double> out(n_paths);
    switch (kind) {
    case PathKind::Base: {
        check_start(spec, grid);
        parallel_for(n_paths, [&](std::size_t p) {
            out[p] = simulate_base_path(spec, grid, path_seed(seed, p)).values[index];
        });
        break;
    }
    case PathKind::ShortMemory: {
        const ShortMemoryConstruction construction(spec, grid);
        parallel_for(n_paths, [&](std::size_t p) {
            out[p] = construction.value(wiener_increments(grid, path_seed(seed, p)), index);
        });
        break;
    }
    case PathKind::FullMemory: {
        const FullMemoryConstruction construction(spec, grid);
        parallel_for(n_paths, [&](std::size_t p) {
            const auto s = path_seed(seed, p);
            out[p] = construction.solve(wiener_increments(grid, s), picard, s).path.values[index];
        });
        break;
    }
    case PathKind::Sde:
        throw Error(ErrorCode::InvalidArgument, "terminal_values: use the pricing module for SDE paths");
    }
    return out;
}

} // namespace memvol
