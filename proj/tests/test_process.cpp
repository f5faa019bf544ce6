#include "memvol/process.hpp"
#include "memvol/rng.hpp"
#include "memvol/stats.hpp"

#include "oracles.hpp"
#include "test_util.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

using namespace memvol;

namespace {

ProcessSpec constant_spec(double a, double b, MemoryKernel k = {}) {
    return {CoefficientCurve::constant(a), CoefficientCurve::constant(b), k, 0.0};
}

bool within(double value, double target, double se, double k = 4.0) { return std::fabs(value - target) <= k * se; }

} // namespace

TEST_CASE("time grid") {
    const TimeGrid g(0.0, 1.0, 10);
    CHECK(g.dt() == doctest::Approx(0.1));
    CHECK(g.time(10) == 1.0);
    CHECK(g.index_of(0.3) == 3);
    CHECK(code_of([&] { g.index_of(0.35); }) == ErrorCode::GridMismatch);
    CHECK(code_of([&] { g.index_of(1.5); }) == ErrorCode::GridMismatch);
    CHECK_THROWS(TimeGrid(0.0, 1.0, 0));
}

TEST_CASE("mc_statistics") {
    const std::vector<double> ones = {1, 1, 1};
    CHECK(mc_statistics(ones).mean == 1.0);
    CHECK(mc_statistics(ones).variance == 0.0);
    const std::vector<double> two = {0, 2};
    CHECK(mc_statistics(two).mean == 1.0);
    CHECK(mc_statistics(two).variance == 2.0);
    const std::vector<double> one = {3};
    CHECK(code_of([&] { mc_statistics(one); }) == ErrorCode::TooFewSamples);

    const NormalStream stream(99);
    std::vector<double> z(1000000);
    stream.fill(z);
    const auto s = mc_statistics(z);
    CHECK(std::fabs(s.mean) <= 4e-3);
    CHECK(std::fabs(s.variance - 1.0) <= 0.01);
    CHECK(s.variance_se == doctest::Approx(std::sqrt(2.0 / 1e6)).epsilon(0.02));
}

TEST_CASE("normal stream is a pure function of its key") {
    const NormalStream a(5, 1), b(5, 1), c(5, 2), d(6, 1);
    CHECK(a.normal(17) == b.normal(17));
    CHECK(a.normal(17) != c.normal(17));
    CHECK(a.normal(17) != d.normal(17));
    CHECK(derive_seed(1, "path", 0) != derive_seed(1, "path", 1));
    CHECK(derive_seed(1, "path", 0) != derive_seed(1, "pde", 0));
}

TEST_CASE("impulse sum") {
    ImpulseModel m;
    for (int k = 0; k < 40; ++k) {
        m.times.push_back(0.025 * k);
        m.means.push_back(0.5 * std::sin(k));
        m.vols.push_back(0.1 + 0.01 * k);
        m.dts.push_back(0.025);
    }
    double mean = 0.0, var = 0.0;
    for (int k = 0; k < 40; ++k) {
        mean += m.means[k] * m.dts[k];
        var += m.vols[k] * m.vols[k] * m.dts[k];
    }

    ImpulseModel quiet = m;
    std::fill(quiet.vols.begin(), quiet.vols.end(), 1e-12);
    CHECK(std::fabs(simulate_impulse_sum(quiet, 1.0, 3) - mean) <= 1e-6);

    std::vector<double> xs(100000);
    for (std::size_t i = 0; i < xs.size(); ++i) xs[i] = simulate_impulse_sum(m, 1.0, path_seed(17, i));
    const auto s = mc_statistics(xs);
    CHECK(within(s.mean, mean, s.mean_se));
    CHECK(within(s.variance, var, s.variance_se));

    ImpulseModel bad = m;
    bad.vols[3] = 0.0;
    CHECK(code_of([&] { simulate_impulse_sum(bad, 1.0, 1); }) == ErrorCode::NonPositiveVolatility);
}

TEST_CASE("base moments") {
    const auto m = base_moments(constant_spec(0.05, 0.2), 1.0);
    CHECK(m.mean == doctest::Approx(0.05));
    CHECK(m.variance == doctest::Approx(0.04));
    const auto z = base_moments(constant_spec(0.05, 0.2), 0.0);
    CHECK(z.mean == 0.0);
    CHECK(z.variance == 0.0);
    ProcessSpec tri = constant_spec(0.0, 0.2);
    tri.a = CoefficientCurve::piecewise({{0, 0}, {1, 0.1}});
    CHECK(base_moments(tri, 1.0).mean == doctest::Approx(0.05));
    CHECK(code_of([&] { base_moments(tri, 1.5); }) == ErrorCode::OutOfDomain);
}

TEST_CASE("base path") {
    const TimeGrid grid(0.0, 1.0, 200);
    const auto quiet = simulate_base_path(constant_spec(0.05, 1e-12), grid, 1);
    CHECK(quiet.values.front() == 0.0);
    CHECK(quiet.values.size() == 201);
    CHECK(std::fabs(quiet.values.back() - 0.05) <= 1e-6);

    const auto spec = constant_spec(0.05, 0.2);
    const auto p1 = simulate_base_path(spec, grid, 77);
    const auto p2 = simulate_base_path(spec, grid, 77);
    CHECK(p1.values == p2.values);
    CHECK(p1.dW == p2.dW);

    const auto xs = terminal_values(spec, grid, PathKind::Base, 5, 10000, 200);
    const auto s = mc_statistics(xs);
    CHECK(within(s.mean, 0.05, s.mean_se));
    CHECK(within(s.variance, 0.04, s.variance_se));

    ProcessSpec short_domain = spec;
    short_domain.b = CoefficientCurve::piecewise({{0, 0.2}, {0.5, 0.2}});
    CHECK(code_of([&] { simulate_base_path(short_domain, grid, 1); }) == ErrorCode::OutOfDomain);
}

TEST_CASE("memory weight") {
    CHECK(memory_weight(constant_spec(0, 0.2, MemoryKernel::gaussian(0.0)), 0.3, 1.0) == 1.0);
    CHECK(memory_weight(constant_spec(0, 0.2, MemoryKernel::gaussian(0.5)), 1.0, 1.0) == 1.0);
    CHECK(memory_weight(constant_spec(0, 0.2, MemoryKernel::gaussian(0.5)), 0.0, 1.0) ==
          doctest::Approx(1.44104069538121084).epsilon(1e-14));
    CHECK(code_of([] { memory_weight(constant_spec(0, 0.2, MemoryKernel::gaussian(0.5)), 0.0, 0.0); }) ==
          ErrorCode::DegenerateWindow);
}

TEST_CASE("short-memory variance") {
    CHECK(short_memory_variance(constant_spec(0, 0.2, MemoryKernel::gaussian(0.0)), 1.0) == doctest::Approx(0.04));
    const auto spec = constant_spec(0, 0.2, MemoryKernel::gaussian(0.1));
    const double v = short_memory_variance(spec, 1.0);
    CHECK(v > 0.04);
    // 40-digit quadrature of 0.04·(1 + τ√π/2·erf((1-s)/τ))².
    CHECK(std::fabs(v - 0.046978908386234734) <= 1e-9);

    ProcessSpec pw = spec;
    pw.kernel = MemoryKernel::exponential(0.2);
    pw.b = CoefficientCurve::piecewise({{0, 0.1}, {0.6, 0.4}, {2, 0.2}});
    const double t = 1.7;
    const double ref = oracle::gk_peaked(
        [&](double s) {
            const double b = eval_coeff(pw.b, s);
            const double w = 1.0 + oracle::gk([&](double x) { return std::exp(-(t - x) / 0.2); }, s, t) / t;
            return b * b * w * w;
        },
        0.0, t, 0.2);
    CHECK(std::fabs(short_memory_variance(pw, t) - ref) <= 1e-8);
}

TEST_CASE("short-memory construction") {
    const TimeGrid grid(0.0, 1.0, 100);
    const auto flat = constant_spec(0.05, 0.2, MemoryKernel::gaussian(0.0));
    const auto base = simulate_base_path(flat, grid, 9);
    for (double t : {0.01, 0.5, 1.0}) CHECK(simulate_short_memory(flat, grid, 9, t) == base.values[grid.index_of(t)]);
    CHECK(simulate_short_memory_path(flat, grid, 9).values == base.values);
    CHECK(code_of([&] { simulate_short_memory(flat, grid, 9, 0.505); }) == ErrorCode::GridMismatch);

    const auto spec = constant_spec(0.05, 0.2, MemoryKernel::gaussian(0.1));
    const ShortMemoryConstruction c(spec, grid);
    const auto path = simulate_short_memory_path(spec, grid, 9);
    CHECK(path.values[100] == simulate_short_memory(spec, grid, 9, 1.0));
    CHECK(path.values[37] == c.value(path.dW, 37));
    CHECK(path.dW == base.dW);
}

TEST_CASE("short-memory moments by Monte Carlo") {
    const TimeGrid grid(0.0, 1.0, 500);
    const auto pw_b = CoefficientCurve::piecewise({{0, 0.15}, {0.5, 0.3}, {1, 0.25}});
    for (auto fam : {MemoryKernel::Family::Gaussian, MemoryKernel::Family::Exponential}) {
        for (bool piecewise : {false, true}) {
            ProcessSpec spec = constant_spec(0.05, 0.2, MemoryKernel(fam, 0.1));
            if (piecewise) spec.b = pw_b;
            const auto xs = terminal_values(spec, grid, PathKind::ShortMemory, 1234, 10000, 500);
            const auto s = mc_statistics(xs);
            CHECK(within(s.mean, base_moments(spec, 1.0).mean, s.mean_se));
            CHECK(within(s.variance, short_memory_variance(spec, 1.0), s.variance_se));
        }
    }
}

TEST_CASE("relative memory excess fades with the window") {
    double prev = std::numeric_limits<double>::infinity();
    for (double window : {1.0, 10.0, 100.0}) {
        const auto spec = constant_spec(0.0, 0.2, MemoryKernel::gaussian(0.1));
        const TimeGrid grid(0.0, window, static_cast<std::size_t>(200 * window));
        const auto s = mc_statistics(terminal_values(spec, grid, PathKind::ShortMemory, 8, 4000, grid.n_steps()));
        const double base_var = base_moments(spec, window).variance;
        const double excess = (s.variance - base_var) / base_var;
        CHECK(excess < prev);
        prev = excess;
    }
}

TEST_CASE("grid refinement barely moves the variance estimate") {
    const auto spec = constant_spec(0.0, 0.2, MemoryKernel::gaussian(0.1));
    const TimeGrid fine(0.0, 1.0, 400), coarse(0.0, 1.0, 200);
    const ShortMemoryConstruction cf(spec, fine), cc(spec, coarse);
    std::vector<double> vf(10000), vc(10000);
    for (std::size_t p = 0; p < vf.size(); ++p) {
        const auto dW = wiener_increments(fine, path_seed(3, p));
        std::vector<double> dWc(200);
        for (std::size_t j = 0; j < 200; ++j) dWc[j] = dW[2 * j] + dW[2 * j + 1];
        vf[p] = cf.value(dW, 400);
        vc[p] = cc.value(dWc, 200);
    }
    const auto sf = mc_statistics(vf), sc = mc_statistics(vc);
    CHECK(std::fabs(sf.variance - sc.variance) < sf.variance_se);
}

TEST_CASE("full memory: first iterate is the discretized first-order path") {
    const TimeGrid grid(0.0, 1.0, 120);
    ProcessSpec spec = constant_spec(0.03, 0.2, MemoryKernel::gaussian(0.1));
    spec.b = CoefficientCurve::piecewise({{0, 0.2}, {1, 0.3}});
    const FullMemoryConstruction c(spec, grid);
    const auto dW = wiener_increments(grid, 21);
    const auto first = c.first_order(dW);

    // Direct double sum, written independently of the library loop.
    const double dt = grid.dt();
    std::vector<double> stoch(121, 0.0), drift(121, 0.0);
    for (std::size_t j = 0; j < 120; ++j) {
        stoch[j + 1] = stoch[j] + eval_coeff(spec.b, j * dt) * dW[j];
        drift[j + 1] = drift[j] + eval_coeff(spec.a, j * dt) * dt;
    }
    for (std::size_t i = 1; i <= 120; ++i) {
        double mem = 0.0;
        for (std::size_t j = 0; j < i; ++j) mem += std::exp(-std::pow((i - j) * dt / 0.1, 2)) * stoch[j] * dt;
        CHECK(std::fabs(first[i] - (drift[i] + stoch[i] + mem / (i * dt))) <= 1e-13);
    }
}

TEST_CASE("full memory: collapse, convergence and errors") {
    const TimeGrid grid(0.0, 1.0, 200);
    const auto flat = constant_spec(0.05, 0.2, MemoryKernel::gaussian(0.0));
    const auto res = simulate_full_memory(flat, grid, 4);
    CHECK(res.iterations == 1);
    CHECK(res.path.values == simulate_base_path(flat, grid, 4).values);

    const auto spec = constant_spec(0.05, 0.2, MemoryKernel::gaussian(0.1));
    const auto full = simulate_full_memory(spec, grid, 4);
    CHECK(full.iterations > 1);
    CHECK(full.last_change <= 1e-10);
    CHECK(full.path.kind == PathKind::FullMemory);

    CHECK(code_of([&] { simulate_full_memory(constant_spec(0, 0.2, MemoryKernel::gaussian(2.0)), grid, 4, {1, 1e-10}); }) ==
          ErrorCode::NoConvergence);

    const auto xs = terminal_values(spec, grid, PathKind::FullMemory, 12, 10000, 200);
    const auto s = mc_statistics(xs);
    CHECK(within(s.mean, 0.05, s.mean_se));
}

TEST_CASE("second-order memory shrinks with tau") {
    const TimeGrid grid(0.0, 1.0, 400);
    double prev = std::numeric_limits<double>::infinity();
    for (double tau : {0.2, 0.1, 0.05}) {
        const FullMemoryConstruction c(constant_spec(0, 0.2, MemoryKernel::gaussian(tau)), grid);
        std::vector<double> gaps;
        for (std::size_t p = 0; p < 30; ++p) {
            const auto dW = wiener_increments(grid, path_seed(2, p));
            const auto first = c.first_order(dW);
            const auto full = c.solve(dW, {}).path.values;
            double gap = 0.0;
            for (std::size_t i = 0; i < full.size(); ++i) gap = std::max(gap, std::fabs(full[i] - first[i]));
            gaps.push_back(gap);
        }
        std::nth_element(gaps.begin(), gaps.begin() + 15, gaps.end());
        CHECK(gaps[15] < prev);
        prev = gaps[15];
    }
}

TEST_CASE("batch results do not depend on the worker count") {
    const TimeGrid grid(0.0, 1.0, 50);
    const auto spec = constant_spec(0.05, 0.2, MemoryKernel::gaussian(0.1));
    setenv("MEMVOL_THREADS", "1", 1);
    const auto one = terminal_values(spec, grid, PathKind::FullMemory, 3, 64, 50);
    setenv("MEMVOL_THREADS", "5", 1);
    const auto five = terminal_values(spec, grid, PathKind::FullMemory, 3, 64, 50);
    unsetenv("MEMVOL_THREADS");
    CHECK(one == five);
}
