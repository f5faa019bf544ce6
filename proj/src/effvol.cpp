#include "memvol/effvol.hpp"

#include "memvol/errors.hpp"
#include "memvol/parallel.hpp"
#include "memvol/special.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace memvol {

namespace {

double window_of(const EffVolRequest& req) {
    const double w = req.t - req.t0;
    if (!(w >= kMinWindow)) {
        std::ostringstream msg;
        msg << "observation window t - t0 = " << w << " is below " << kMinWindow;
        throw Error(ErrorCode::DegenerateWindow, msg.str());
    }
    return w;
}

// Outer ∫_{t0}^{t} g(s) ds split at the knots of b.
double integrate_over_window(const EffVolRequest& req, const std::function<double(double)>& g,
                             const QuadratureOptions& opts) {
    const auto breaks = req.b.breakpoints(req.t0, req.t);
    return adaptive_simpson(g, req.t0, req.t, breaks, opts);
}

} // namespace

std::string to_string(EffVolMethod method) {
    switch (method) {
    case EffVolMethod::Exact: return "exact";
    case EffVolMethod::Asymptotic: return "asymptotic";
    case EffVolMethod::GaussianClosed: return "gaussian";
    }
    return "exact";
}

EffVolMethod parse_effvol_method(const std::string& name) {
    if (name == "exact") return EffVolMethod::Exact;
    if (name == "asymptotic") return EffVolMethod::Asymptotic;
    if (name == "gaussian" || name == "gaussian-closed") return EffVolMethod::GaussianClosed;
    throw Error(ErrorCode::InvalidArgument, "unknown effvol method '" + name + "'");
}

double effective_vol_exact(const EffVolRequest& req, const QuadratureOptions& opts) {
    const double w = window_of(req);
    const double bt = eval_coeff(req.b, req.t);
    if (req.kernel.degenerate()) return bt;

    QuadratureOptions inner = opts;
    inner.abs_tol = opts.abs_tol * 1e-3;
    const auto& kernel = req.kernel;
    const double t = req.t;
    auto inner_integral = [&](double s) {
        return adaptive_simpson([&](double x) { return kernel_value(kernel, t - x); }, s, t,
                                inner);
    };
    auto integrand = [&](double s) {
        const double lag = std::max(0.0, t - s);
        return eval_coeff(req.b, s) * (kernel_value(kernel, lag) - inner_integral(s) / w);
    };
    return bt + integrate_over_window(req, integrand, opts) / w;
}

double effective_vol_asymptotic(const EffVolRequest& req, const QuadratureOptions& opts) {
    const double w = window_of(req);
    const double bt = eval_coeff(req.b, req.t);
    if (req.kernel.degenerate()) return bt;

    auto integrand = [&](double s) {
        return eval_coeff(req.b, s) * kernel_value(req.kernel, std::max(0.0, req.t - s));
    };
    return bt + integrate_over_window(req, integrand, opts) / w;
}

double effective_vol_gaussian(const EffVolRequest& req, const QuadratureOptions& opts) {
    if (req.kernel.family() != MemoryKernel::Family::Gaussian)
        throw Error(ErrorCode::WrongKernelFamily, "closed-form effective volatility needs a gaussian kernel");
    const double w = window_of(req);
    const double bt = eval_coeff(req.b, req.t);
    if (req.kernel.degenerate()) return bt;

    const double tau = req.kernel.tau();
    const double erf_scale = tau * kSqrtPi / (2.0 * w);
    auto integrand = [&](double s) {
        const double z = std::max(0.0, req.t - s) / tau;
        return eval_coeff(req.b, s) * (std::exp(-z * z) - erf_scale * erf(z));
    };
    return bt + integrate_over_window(req, integrand, opts) / w;
}

double effective_vol(const EffVolRequest& req, EffVolMethod method, const QuadratureOptions& opts) {
    switch (method) {
    case EffVolMethod::Exact: return effective_vol_exact(req, opts);
    case EffVolMethod::Asymptotic: return effective_vol_asymptotic(req, opts);
    case EffVolMethod::GaussianClosed: return effective_vol_gaussian(req, opts);
    }
    return effective_vol_exact(req, opts);
}

double EffVolCurve::value_at(double t) const {
    if (times.empty()) throw Error(ErrorCode::InvalidArgument, "empty effective volatility curve");
    if (t <= times.front()) return values.front();
    if (t >= times.back()) return values.back();
    const auto it = std::upper_bound(times.begin(), times.end(), t);
    const auto i = static_cast<std::size_t>(std::distance(times.begin(), it)) - 1;
    const double w = (t - times[i]) / (times[i + 1] - times[i]);
    return values[i] + w * (values[i + 1] - values[i]);
}

EffVolCurve EffVolCurve::scaled(double factor) const {
    EffVolCurve out = *this;
    for (auto& v : out.values) v *= factor;
    return out;
}

EffVolCurve tabulate_effvol(const CoefficientCurve& b, const MemoryKernel& kernel, double t0,
                            std::span<const double> grid, EffVolMethod method,
                            const QuadratureOptions& opts) {
    if (grid.empty()) throw Error(ErrorCode::InvalidArgument, "effvol grid is empty");
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!(grid[i] > t0))
            throw Error(ErrorCode::InvalidArgument,
                        "effvol grid index " + std::to_string(i) + ": time must exceed t0");
        if (i > 0 && !(grid[i] > grid[i - 1]))
            throw Error(ErrorCode::NonMonotoneTime,
                        "effvol grid index " + std::to_string(i) + ": times must strictly increase");
    }

    EffVolCurve curve;
    curve.method = method;
    curve.times.assign(grid.begin(), grid.end());
    curve.values.resize(grid.size());
    parallel_for(grid.size(), [&](std::size_t i) {
        try {
            curve.values[i] = effective_vol({b, kernel, t0, grid[i]}, method, opts);
        } catch (const Error& e) {
            throw Error(e.code(), "effvol grid index " + std::to_string(i) + ": " + e.what());
        }
    });
    return curve;
}

EffVolCurve flat_effvol(std::span<const double> grid, double value) {
    EffVolCurve curve;
    curve.method = EffVolMethod::Exact;
    curve.times.assign(grid.begin(), grid.end());
    curve.values.assign(grid.size(), value);
    return curve;
}

} // namespace memvol
