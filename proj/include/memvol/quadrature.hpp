#pragma once

#include <functional>
#include <span>

namespace memvol {

struct QuadratureOptions {
    double abs_tol = 1e-9;
    int max_depth = 40;
};

/// Adaptive Simpson on [a, b]. Each bisection halves the tolerance and
/// accepts when |S_left + S_right - S| <= 15·tol (with the Richardson
/// correction added). Recursion stops at `max_depth` regardless.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        const QuadratureOptions& opts = {});

/// Same, split at interior `breaks` (sorted, inside (a, b)) so kinks of the
/// integrand sit on panel edges. The tolerance is shared evenly.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        std::span<const double> breaks, const QuadratureOptions& opts = {});

} // namespace memvol
