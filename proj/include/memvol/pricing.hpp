#pragma once

#include "memvol/coeffs.hpp"
#include "memvol/effvol.hpp"
#include "memvol/process.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace memvol {

/// Log-price S(t) = S(t0)·exp(h(t)) with log-drift A(t) and effective
/// volatility B̃ tabulated on t_1..t_n of a uniform grid starting at t0.
struct AssetModel {
    double s0 = 100.0;
    CoefficientCurve A = CoefficientCurve::constant(0.0);
    EffVolCurve effvol;
    double r = 0.0;
    double t0 = 0.0;

    void validate() const;
    /// Uniform grid whose interior times are the effvol grid; throws
    /// GridMismatch if the effvol grid is not uniform from t0.
    TimeGrid time_grid() const;
};

enum class OptionKind { Call, Put };
std::string to_string(OptionKind kind);
OptionKind parse_option_kind(const std::string& name);

struct OptionSpec {
    OptionKind kind = OptionKind::Call;
    double strike = 100.0;
    double maturity = 1.0;
};

double payoff(OptionKind kind, double strike, double spot);

enum class Measure { Physical, RiskNeutral };

/// Exact log-normal stepping over one grid step, with B̃ᵢ = effvol.values[i]
/// (the curve value at t_{i+1}):
///   S_{i+1} = S_i exp((μᵢ - B̃ᵢ²/2)Δ + B̃ᵢ dWᵢ),
/// μᵢ = A(t_i) + B̃ᵢ²/2 under the physical measure, r under the
/// risk-neutral one. values[0] = s0.
SamplePath simulate_asset_path(const AssetModel& model, const TimeGrid& grid, std::uint64_t seed,
                               Measure measure);

struct McPrice {
    double price = 0.0;
    double std_error = 0.0;
    std::size_t n_paths = 0;  // antithetic pairs
};

/// Discounted risk-neutral expectation of g(S_T) with antithetic pairs
/// (dW, -dW). Each path p uses seed path_seed(seed, p); the standard error
/// comes from the pair averages.
McPrice mc_expectation(const AssetModel& model, double maturity, std::size_t n_paths,
                       std::uint64_t seed, const std::function<double(double)>& g);

/// Vanilla price by Monte Carlo. Throws TooFewPaths below 100 pairs.
McPrice mc_price(const AssetModel& model, const OptionSpec& opt, std::size_t n_paths,
                 std::uint64_t seed);

/// Black-Scholes price with constant volatility over time to expiry T.
/// vol = 0 gives the discounted intrinsic value on the forward.
double bs_closed_form(OptionKind kind, double s0, double strike, double r, double vol, double T);

/// ∫_{t0}^{T} B̃² dt under the same step convention as simulate_asset_path.
double effvol_total_variance(const EffVolCurve& curve, double t0, double T);

/// Closed form with the root-mean-square volatility of the curve.
double bs_closed_form(OptionKind kind, double s0, double strike, double r, const EffVolCurve& curve,
                      double t0, double T);

enum class DriftCoefficient { Rate, One };
std::string to_string(DriftCoefficient c);
DriftCoefficient parse_drift_coefficient(const std::string& name);

struct PdeGrid {
    double s_max = 0.0;  // 0 selects max(4K, 4·s0·e^{r(T-t0)})
    std::size_t n_space = 400;
    std::size_t n_time = 400;
    DriftCoefficient drift = DriftCoefficient::Rate;
    /// Also solve on the half-resolution grid to estimate the error.
    bool estimate_error = true;
};

struct PdeResult {
    double price = 0.0;
    double error_estimate = 0.0;  // |P(h) - P(2h)| / 3, 0 when not estimated
    double s_max = 0.0;
    std::vector<double> times;    // calendar times, t0 first
    std::vector<double> spots;    // S_m = m·ΔS
    std::vector<double> values;   // row-major [time][spot]
};

/// Crank–Nicolson solve of
///   ∂V/∂t + ½B̃²(t)S²∂²V/∂S² + c·S∂V/∂S - rV = 0,  c = r (or 1),
/// backward from the payoff at maturity. The first step is two implicit
/// quarter steps followed by a Crank–Nicolson half step. s_max is raised
/// slightly so the strike falls on a node of both this grid and the
/// half-resolution one. Throws GridTooCoarse when the refinement error
/// estimate exceeds ten times the 5e-4 relative target.
PdeResult pde_price(const AssetModel& model, const OptionSpec& opt, const PdeGrid& grid);

struct SdeDiagnostic {
    std::size_t n_paths = 0;
    double sde_variance = 0.0;        // MC terminal variance of the Euler-stepped SDE
    double sde_variance_se = 0.0;
    double direct_variance = 0.0;     // short_memory_variance(T)
    double direct_mc_variance = 0.0;  // MC variance of the first-order construction, same seeds
    double direct_mc_variance_se = 0.0;
    double ratio = 0.0;               // sde_variance / direct_variance
};

/// Steps h_{i+1} = h_i + a(t_i)Δ + B̃ᵢ dWᵢ with B̃ from effective_vol_exact
/// and reports its terminal variance next to the first-order construction's.
/// Diagnostic only; nothing is asserted.
SdeDiagnostic sde_increment_diagnostic(const ProcessSpec& spec, const TimeGrid& grid,
                                       std::size_t n_paths, std::uint64_t seed,
                                       const QuadratureOptions& opts = {});

} // namespace memvol
