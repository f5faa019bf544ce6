#pragma once

#include "memvol/coeffs.hpp"
#include "memvol/kernel.hpp"
#include "memvol/quadrature.hpp"
#include "memvol/stats.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace memvol {

/// Drift a(t), impulse volatility b(t) > 0, memory kernel and start time t0.
struct ProcessSpec {
    CoefficientCurve a;
    CoefficientCurve b;
    MemoryKernel kernel;
    double t0 = 0.0;

    /// Throws NonPositiveVolatility if b is not strictly positive.
    void validate() const;
};

/// Uniform grid t_i = t0 + i·Δ, i = 0..n_steps, with t_n == T exactly.
class TimeGrid {
public:
    TimeGrid(double t0, double T, std::size_t n_steps);

    double t0() const noexcept { return t0_; }
    double T() const noexcept { return T_; }
    std::size_t n_steps() const noexcept { return n_; }
    double dt() const noexcept { return dt_; }
    double time(std::size_t i) const noexcept { return i == n_ ? T_ : t0_ + static_cast<double>(i) * dt_; }
    std::vector<double> times() const;
    /// t_1..t_n, the grid an EffVolCurve is tabulated on.
    std::vector<double> interior_times() const;

    /// Index of the grid point equal to t (within 1e-9·Δ); throws GridMismatch.
    std::size_t index_of(double t) const;

    bool operator==(const TimeGrid&) const = default;

private:
    double t0_;
    double T_;
    std::size_t n_;
    double dt_;
};

enum class PathKind { Base, ShortMemory, FullMemory, Sde };

std::string to_string(PathKind kind);
PathKind parse_path_kind(const std::string& name);

struct SamplePath {
    TimeGrid grid;
    std::vector<double> dW;      // n_steps increments, each N(0, Δ)
    std::vector<double> values;  // n_steps + 1 values, values[0] = 0 for process paths
    std::uint64_t seed = 0;
    PathKind kind = PathKind::Base;
};

/// dW_j = √Δ · z_j with z_j from NormalStream(seed), j = 0..n-1.
std::vector<double> wiener_increments(const TimeGrid& grid, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Discrete impulse system

/// Impulses at times t_k with Δη_k ~ N(a_k Δt_k, b_k² Δt_k), all b_k > 0.
struct ImpulseModel {
    std::vector<double> times;
    std::vector<double> means;  // a_k
    std::vector<double> vols;   // b_k
    std::vector<double> dts;    // Δt_k

    void validate() const;
};

/// ξ(t) = Σ_{t_k ≤ t} Δη(t_k); draw k uses index k of NormalStream(seed).
double simulate_impulse_sum(const ImpulseModel& m, double t, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Moments

struct Moments {
    double mean = 0.0;
    double variance = 0.0;
};

/// (∫a, ∫b²) over [t0, t], in closed form.
Moments base_moments(const ProcessSpec& spec, double t);

/// 1 + F(s, t)/(t - t0), the factor multiplying b(s) dW(s) in the
/// first-order memory construction.
double memory_weight(const ProcessSpec& spec, double s, double t);

/// Var ξ(t) of the first-order construction. The stochastic part
/// ∫ b(s) w(s,t) dW(s) has a deterministic integrand for fixed t, so by the
/// Itô isometry its variance is ∫_{t0}^{t} b(s)² w(s,t)² ds.
double short_memory_variance(const ProcessSpec& spec, double t, const QuadratureOptions& opts = {});

// ---------------------------------------------------------------------------
// Path constructions (left-point sums throughout)

SamplePath base_path_from_increments(const ProcessSpec& spec, const TimeGrid& grid,
                                     std::vector<double> dW, std::uint64_t seed = 0);
SamplePath simulate_base_path(const ProcessSpec& spec, const TimeGrid& grid, std::uint64_t seed);

/// First-order memory process on a fixed grid. Because the weight depends
/// on the evaluation time, value(dW, i) is a separate sum for every i:
/// Σ_{j<i} [a(s_j)Δ + b(s_j) w(s_j, t_i) dW_j]. Weights for all (i, j) are
/// precomputed once and shared across paths.
class ShortMemoryConstruction {
public:
    ShortMemoryConstruction(const ProcessSpec& spec, const TimeGrid& grid);

    const TimeGrid& grid() const noexcept { return grid_; }
    double value(std::span<const double> dW, std::size_t i) const;
    std::vector<double> path(std::span<const double> dW) const;
    double weight(std::size_t i, std::size_t j) const { return weights_[row_offset(i) + j]; }

private:
    static std::size_t row_offset(std::size_t i) { return i * (i - 1) / 2; }

    TimeGrid grid_;
    std::vector<double> drift_step_;  // a(s_j) Δ
    std::vector<double> vol_;         // b(s_j)
    std::vector<double> weights_;     // row i holds j = 0..i-1 (row 0 empty)
};

/// Value of the first-order construction at grid time t_eval, using the same
/// increments as simulate_base_path(spec, grid, seed). Throws GridMismatch
/// if t_eval is not a grid time.
double simulate_short_memory(const ProcessSpec& spec, const TimeGrid& grid, std::uint64_t seed,
                             double t_eval);

SamplePath simulate_short_memory_path(const ProcessSpec& spec, const TimeGrid& grid,
                                      std::uint64_t seed);

struct PicardOptions {
    int max_iter = 50;
    double tol = 1e-10;
};

struct FullMemoryResult {
    SamplePath path;
    int iterations = 0;
    double last_change = 0.0;
};

/// Fixed-point solver for the full memory recursion on a uniform grid:
///
///   ξ⁽ᵏ⁺¹⁾(t_i) = base(t_i) + 1/(t_i - t0) Σ_{j<i} f(t_i - s_j)(ξ⁽ᵏ⁾(s_j) - m_j) Δ,
///
/// starting from ξ⁽⁰⁾ = base, where m_j is the grid drift Σ_{l<j} a(s_l)Δ.
/// The first iterate is the discretized first-order (second-order-memory
/// free) path.
class FullMemoryConstruction {
public:
    FullMemoryConstruction(const ProcessSpec& spec, const TimeGrid& grid);

    const TimeGrid& grid() const noexcept { return grid_; }

    /// Base path values and grid drift for one set of increments.
    void base(std::span<const double> dW, std::vector<double>& values, std::vector<double>& drift) const;

    /// Iterates until the max-norm change is ≤ tol; throws NoConvergence
    /// after max_iter iterations otherwise.
    FullMemoryResult solve(std::vector<double> dW, const PicardOptions& opts, std::uint64_t seed = 0) const;

    /// Exactly one Picard step from the base path.
    std::vector<double> first_order(std::span<const double> dW) const;

private:
    std::vector<double> step(std::span<const double> base, std::span<const double> drift,
                             std::span<const double> current) const;

    TimeGrid grid_;
    std::vector<double> drift_step_;
    std::vector<double> vol_;
    std::vector<double> lag_weight_;  // f(kΔ), k = 0..n
};

FullMemoryResult simulate_full_memory(const ProcessSpec& spec, const TimeGrid& grid,
                                      std::uint64_t seed, const PicardOptions& opts = {});

// ---------------------------------------------------------------------------
// Batches

/// Seed of path p in a batch rooted at `seed`: derive_seed(seed, "path", p).
std::uint64_t path_seed(std::uint64_t seed, std::size_t p);

/// Value at grid index `index` for n_paths independent paths of the given
/// kind (Base, ShortMemory or FullMemory), evaluated in parallel and
/// returned in path order.
std::vector<double> terminal_values(const ProcessSpec& spec, const TimeGrid& grid, PathKind kind,
                                    std::uint64_t seed, std::size_t n_paths, std::size_t index,
                                    const PicardOptions& picard = {});

} // namespace memvol
