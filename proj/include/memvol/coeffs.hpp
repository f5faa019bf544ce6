#pragma once

#include <filesystem>
#include <limits>
#include <string>
#include <vector>

namespace memvol {

struct Knot {
    double time;
    double value;
};

enum class CurveRole { Drift, Volatility };

/// Deterministic coefficient a(t), A(t) or b(t): either a constant or a
/// piecewise-linear table. Immutable once built; evaluation outside the
/// domain throws OutOfDomain rather than extrapolating.
class CoefficientCurve {
public:
    enum class Kind { Constant, PiecewiseLinear };

    /// Constant curve on [t_min, t_max]; unbounded by default.
    static CoefficientCurve constant(double value,
                                     double t_min = -std::numeric_limits<double>::infinity(),
                                     double t_max = std::numeric_limits<double>::infinity());
    /// Needs at least two knots with strictly increasing times.
    static CoefficientCurve piecewise(std::vector<Knot> knots);

    Kind kind() const noexcept { return kind_; }
    double t_min() const noexcept { return t_min_; }
    double t_max() const noexcept { return t_max_; }
    const std::vector<Knot>& knots() const noexcept { return knots_; }
    double constant_value() const noexcept { return value_; }

    bool contains(double t) const noexcept { return t >= t_min_ && t <= t_max_; }

    /// Knot times strictly inside (s, t); used to split quadratures at kinks.
    std::vector<double> breakpoints(double s, double t) const;

    /// Throws NonPositiveVolatility unless the curve is > 0 everywhere on its
    /// domain (checked at knots, which suffices for piecewise-linear).
    void require_positive() const;

private:
    Kind kind_ = Kind::Constant;
    double value_ = 0.0;
    double t_min_ = 0.0;
    double t_max_ = 0.0;
    std::vector<Knot> knots_;
};

double eval_coeff(const CoefficientCurve& curve, double t);

/// Closed-form integral of g over [s, t] where g = curve or g = curve².
double integrate_coeff(const CoefficientCurve& curve, double s, double t, bool squared);

/// Reads a `t,value` CSV into a piecewise-linear curve.
CoefficientCurve load_curve_csv(const std::filesystem::path& path,
                                CurveRole role = CurveRole::Drift);

/// Parses the config syntax `const:<x>` or `csv:<path>`. Relative csv paths
/// resolve against `base_dir`.
CoefficientCurve parse_curve_spec(const std::string& spec, CurveRole role,
                                  const std::filesystem::path& base_dir = {});

} // namespace memvol
