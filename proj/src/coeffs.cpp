#include "memvol/coeffs.hpp"

#include "memvol/errors.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

namespace memvol {

namespace {

void check_domain(const CoefficientCurve& curve, double t) {
    if (!curve.contains(t)) {
        std::ostringstream msg;
        msg << "t = " << t << " outside curve domain [" << curve.t_min() << ", " << curve.t_max()
            << "]";
        throw Error(ErrorCode::OutOfDomain, msg.str());
    }
}

// Index of the segment [k_i, k_{i+1}] containing t.
std::size_t segment_of(const std::vector<Knot>& knots, double t) {
    auto it = std::upper_bound(knots.begin(), knots.end(), t,
                               [](double x, const Knot& k) { return x < k.time; });
    auto idx = static_cast<std::size_t>(std::distance(knots.begin(), it));
    if (idx == 0) return 0;
    return std::min(idx - 1, knots.size() - 2);
}

// ∫ (c0 + c1 (x - x0))^p dx over [u, v] inside one segment, p in {1, 2}.
double segment_integral(const Knot& lo, const Knot& hi, double u, double v, bool squared) {
    const double slope = (hi.value - lo.value) / (hi.time - lo.time);
    const double gu = lo.value + slope * (u - lo.time);
    const double gv = lo.value + slope * (v - lo.time);
    const double h = v - u;
    if (!squared) return 0.5 * h * (gu + gv);
    // Exact for quadratics: Simpson on the linear interpolant squared.
    return h * (gu * gu + gu * gv + gv * gv) / 3.0;
}

double parse_double(std::string_view text, std::size_t line, const std::string& source) {
    while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
    while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r'))
        text.remove_suffix(1);
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) {
        std::ostringstream msg;
        msg << source << ":" << line << ": malformed number '" << text << "'";
        throw Error(ErrorCode::ParseError, msg.str());
    }
    return value;
}

} // namespace

CoefficientCurve CoefficientCurve::constant(double value, double t_min, double t_max) {
    if (!(t_min <= t_max)) throw Error(ErrorCode::InvalidArgument, "constant curve: empty domain");
    CoefficientCurve c;
    c.kind_ = Kind::Constant;
    c.value_ = value;
    c.t_min_ = t_min;
    c.t_max_ = t_max;
    return c;
}

CoefficientCurve CoefficientCurve::piecewise(std::vector<Knot> knots) {
    if (knots.size() < 2)
        throw Error(ErrorCode::InvalidArgument, "piecewise curve needs at least two knots");
    for (std::size_t i = 1; i < knots.size(); ++i) {
        if (!(knots[i].time > knots[i - 1].time)) {
            std::ostringstream msg;
            msg << "knot times must be strictly increasing (row " << i + 1 << ")";
            throw Error(ErrorCode::NonMonotoneTime, msg.str());
        }
    }
    CoefficientCurve c;
    c.kind_ = Kind::PiecewiseLinear;
    c.t_min_ = knots.front().time;
    c.t_max_ = knots.back().time;
    c.knots_ = std::move(knots);
    return c;
}

std::vector<double> CoefficientCurve::breakpoints(double s, double t) const {
    std::vector<double> out;
    for (const auto& k : knots_)
        if (k.time > s && k.time < t) out.push_back(k.time);
    return out;
}

void CoefficientCurve::require_positive() const {
    if (kind_ == Kind::Constant) {
        if (!(value_ > 0.0))
            throw Error(ErrorCode::NonPositiveVolatility, "volatility curve must be > 0");
        return;
    }
    for (const auto& k : knots_) {
        if (!(k.value > 0.0)) {
            std::ostringstream msg;
            msg << "volatility curve must be > 0; got " << k.value << " at t = " << k.time;
            throw Error(ErrorCode::NonPositiveVolatility, msg.str());
        }
    }
}

double eval_coeff(const CoefficientCurve& curve, double t) {
    check_domain(curve, t);
    if (curve.kind() == CoefficientCurve::Kind::Constant) return curve.constant_value();
    const auto& knots = curve.knots();
    const std::size_t i = segment_of(knots, t);
    const Knot& lo = knots[i];
    const Knot& hi = knots[i + 1];
    if (t == lo.time) return lo.value;
    if (t == hi.time) return hi.value;
    const double w = (t - lo.time) / (hi.time - lo.time);
    return lo.value + w * (hi.value - lo.value);
}

double integrate_coeff(const CoefficientCurve& curve, double s, double t, bool squared) {
    if (s > t) throw Error(ErrorCode::ReversedInterval, "integrate_coeff: s > t");
    check_domain(curve, s);
    check_domain(curve, t);
    if (s == t) return 0.0;
    if (curve.kind() == CoefficientCurve::Kind::Constant) {
        const double v = curve.constant_value();
        return (squared ? v * v : v) * (t - s);
    }
    const auto& knots = curve.knots();
    double total = 0.0;
    for (std::size_t i = segment_of(knots, s); i + 1 < knots.size(); ++i) {
        const double u = std::max(s, knots[i].time);
        const double v = std::min(t, knots[i + 1].time);
        if (v > u) total += segment_integral(knots[i], knots[i + 1], u, v, squared);
        if (knots[i + 1].time >= t) break;
    }
    return total;
}

CoefficientCurve load_curve_csv(const std::filesystem::path& path, CurveRole role) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::IoError, "cannot open curve file " + path.string());
    const std::string source = path.string();

    std::string line;
    std::size_t lineno = 0;
    std::vector<Knot> knots;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line.front() == '#') continue;
        if (!header_seen) {
            header_seen = true;
            std::string compact;
            for (char c : line)
                if (c != ' ' && c != '\t') compact.push_back(c);
            if (compact != "t,value")
                throw Error(ErrorCode::ParseError,
                            source + ":" + std::to_string(lineno) + ": expected header 't,value'");
            continue;
        }
        const auto comma = line.find(',');
        if (comma == std::string::npos || line.find(',', comma + 1) != std::string::npos)
            throw Error(ErrorCode::ParseError,
                        source + ":" + std::to_string(lineno) + ": expected two columns");
        const std::string_view view(line);
        knots.push_back({parse_double(view.substr(0, comma), lineno, source),
                         parse_double(view.substr(comma + 1), lineno, source)});
    }
    if (!header_seen) throw Error(ErrorCode::ParseError, source + ": empty curve file");
    if (knots.size() < 2)
        throw Error(ErrorCode::ParseError,
                    source + ": need at least two rows (use const:<x> for a constant)");

    auto curve = CoefficientCurve::piecewise(std::move(knots));
    if (role == CurveRole::Volatility) curve.require_positive();
    return curve;
}

CoefficientCurve parse_curve_spec(const std::string& spec, CurveRole role,
                                  const std::filesystem::path& base_dir) {
    if (spec.rfind("const:", 0) == 0) {
        const double v = parse_double(std::string_view(spec).substr(6), 0, "const");
        auto curve = CoefficientCurve::constant(v);
        if (role == CurveRole::Volatility) curve.require_positive();
        return curve;
    }
    if (spec.rfind("csv:", 0) == 0) {
        std::filesystem::path p = spec.substr(4);
        if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
        return load_curve_csv(p, role);
    }
    throw Error(ErrorCode::ParseError, "curve spec must be const:<x> or csv:<path>, got '" + spec + "'");
}

} // namespace memvol
