#include "memvol/quadrature.hpp"

#include "memvol/errors.hpp"

#include <cmath>
#include <vector>

namespace memvol {

namespace {

struct Panel {
    double a, m, b;
    double fa, fm, fb;
    double whole;
};

double simpson(double a, double b, double fa, double fm, double fb) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double refine(const std::function<double(double)>& f, const Panel& p, double tol, int depth) {
    const double lm = 0.5 * (p.a + p.m);
    const double rm = 0.5 * (p.m + p.b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = simpson(p.a, p.m, p.fa, flm, p.fm);
    const double right = simpson(p.m, p.b, p.fm, frm, p.fb);
    const double delta = left + right - p.whole;
    if (depth <= 0 || std::fabs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
    return refine(f, {p.a, lm, p.m, p.fa, flm, p.fm, left}, 0.5 * tol, depth - 1) +
           refine(f, {p.m, rm, p.b, p.fm, frm, p.fb, right}, 0.5 * tol, depth - 1);
}

double integrate_panel(const std::function<double(double)>& f, double a, double b, double tol,
                       int max_depth) {
    if (a == b) return 0.0;
    // Start from four panels so narrow features near an interior point are
    // not missed by a single 3-point probe.
    constexpr int kInitial = 4;
    const double h = (b - a) / kInitial;
    double total = 0.0;
    double fa = f(a);
    for (int i = 0; i < kInitial; ++i) {
        const double pa = a + i * h;
        const double pb = (i + 1 == kInitial) ? b : a + (i + 1) * h;
        const double pm = 0.5 * (pa + pb);
        const double fm = f(pm);
        const double fb = f(pb);
        total += refine(f, {pa, pm, pb, fa, fm, fb, simpson(pa, pb, fa, fm, fb)}, tol / kInitial,
                        max_depth);
        fa = fb;
    }
    return total;
}

} // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        const QuadratureOptions& opts) {
    if (!(opts.abs_tol > 0.0)) throw Error(ErrorCode::InvalidArgument, "quadrature tolerance must be > 0");
    if (a > b) return -integrate_panel(f, b, a, opts.abs_tol, opts.max_depth);
    return integrate_panel(f, a, b, opts.abs_tol, opts.max_depth);
}

double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        std::span<const double> breaks, const QuadratureOptions& opts) {
    if (breaks.empty()) return adaptive_simpson(f, a, b, opts);
    std::vector<double> edges;
    edges.reserve(breaks.size() + 2);
    edges.push_back(a);
    for (double x : breaks)
        if (x > edges.back() && x < b) edges.push_back(x);
    edges.push_back(b);
    const double tol = opts.abs_tol / static_cast<double>(edges.size() - 1);
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < edges.size(); ++i)
        total += integrate_panel(f, edges[i], edges[i + 1], tol, opts.max_depth);
    return total;
}

} // namespace memvol
