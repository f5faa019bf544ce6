#pragma once

#include "memvol/coeffs.hpp"
#include "memvol/kernel.hpp"
#include "memvol/quadrature.hpp"

#include <span>
#include <string>
#include <vector>

namespace memvol {

/// Minimum observation window t - t0 accepted by the B̃ evaluators.
inline constexpr double kMinWindow = 1e-12;

struct EffVolRequest {
    CoefficientCurve b;
    MemoryKernel kernel;
    double t0 = 0.0;
    double t = 1.0;
};

enum class EffVolMethod { Exact, Asymptotic, GaussianClosed };

std::string to_string(EffVolMethod method);
EffVolMethod parse_effvol_method(const std::string& name);

/// Effective volatility of the memory-augmented log process,
///
///   B̃(t) = b(t) + 1/W ∫_{t0}^{t} b(s) [f(t-s,τ) - F(s,t)/W] ds,  W = t - t0,
///
/// with F(s,t) = ∫_s^t f(t-x,τ) dx obtained by a nested adaptive quadrature
/// of the kernel, so it works for any kernel family.
double effective_vol_exact(const EffVolRequest& req, const QuadratureOptions& opts = {});

/// Small-τ form: drops the F(s,t)/W term of the bracket.
double effective_vol_asymptotic(const EffVolRequest& req, const QuadratureOptions& opts = {});

/// Gaussian-kernel form with the inner integral in closed form:
/// bracket exp(-(t-s)²/τ²) - τ√π/(2W)·erf((t-s)/τ). Requires a Gaussian kernel.
double effective_vol_gaussian(const EffVolRequest& req, const QuadratureOptions& opts = {});

double effective_vol(const EffVolRequest& req, EffVolMethod method,
                     const QuadratureOptions& opts = {});

/// B̃ tabulated on a caller-supplied grid in (t0, T].
struct EffVolCurve {
    std::vector<double> times;
    std::vector<double> values;
    EffVolMethod method = EffVolMethod::Exact;

    double t_begin() const { return times.front(); }
    double t_end() const { return times.back(); }

    /// Linear interpolation; flat beyond either end of the grid.
    double value_at(double t) const;

    /// Uniform upward scaling of every value, used by sensitivity checks.
    EffVolCurve scaled(double factor) const;
};

/// Evaluates the chosen method at every grid time. A point failure is
/// rethrown with the same code and the offending grid index in the message.
EffVolCurve tabulate_effvol(const CoefficientCurve& b, const MemoryKernel& kernel, double t0,
                            std::span<const double> grid, EffVolMethod method,
                            const QuadratureOptions& opts = {});

/// Constant-B̃ curve on a grid, for closed-form comparisons.
EffVolCurve flat_effvol(std::span<const double> grid, double value);

} // namespace memvol
