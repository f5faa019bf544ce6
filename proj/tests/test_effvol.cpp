#include "memvol/effvol.hpp"
#include "memvol/special.hpp"

#include "oracles.hpp"
#include "test_util.hpp"

#include <chrono>
#include <cmath>
#include <random>

using namespace memvol;

namespace {

EffVolRequest constant_request(double b, MemoryKernel k, double window) {
    return {CoefficientCurve::constant(b), k, 0.0, window};
}

// Brute-force bracket with both integrals by Gauss–Kronrod.
double nested_oracle(const EffVolRequest& req) {
    const double w = req.t - req.t0;
    const double tau = req.kernel.tau();
    auto f = [&](double u) { return kernel_value(req.kernel, std::max(0.0, u)); };
    auto outer = [&](double s) {
        const double inner = oracle::gk_peaked([&](double x) { return f(req.t - x); }, s, req.t, tau);
        return eval_coeff(req.b, s) * (f(req.t - s) - inner / w);
    };
    return eval_coeff(req.b, req.t) + oracle::gk_peaked(outer, req.t0, req.t, tau) / w;
}

} // namespace

TEST_CASE("tau = 0 returns b(t) for every method") {
    const auto b = CoefficientCurve::piecewise({{0, 0.1}, {0.4, 0.3}, {2, 0.25}});
    for (double t : {0.1, 0.4, 1.3, 2.0}) {
        const EffVolRequest req{b, MemoryKernel::gaussian(0.0), 0.0, t};
        CHECK(effective_vol_exact(req) == eval_coeff(b, t));
        CHECK(effective_vol_asymptotic(req) == eval_coeff(b, t));
        CHECK(effective_vol_gaussian(req) == eval_coeff(b, t));
    }
}

TEST_CASE("asymptotic form matches its closed form") {
    const double tau = 0.1;
    // 0.2·(1 + τ√π/2·erf(W/τ)/W), frozen from a 40-digit evaluation.
    CHECK(std::fabs(effective_vol_asymptotic(constant_request(0.2, MemoryKernel::gaussian(tau), 1.0)) -
                    0.21772453850905517) <= 1e-9);
    CHECK(std::fabs(effective_vol_asymptotic(constant_request(0.2, MemoryKernel::gaussian(tau), 100.0)) -
                    0.20017724538509056) <= 1e-9);
    for (double w : {0.05, 0.3, 2.0, 7.0}) {
        const double closed = 0.2 * (1.0 + 0.5 * tau * kSqrtPi * memvol::erf(w / tau) / w);
        CHECK(std::fabs(effective_vol_asymptotic(constant_request(0.2, MemoryKernel::gaussian(tau), w)) - closed) <=
              1e-10);
    }
}

TEST_CASE("exact form against frozen and brute-force oracles") {
    const auto req = constant_request(0.2, MemoryKernel::gaussian(0.1), 1.0);
    const double exact = effective_vol_exact(req);
    // 40-digit evaluation: 0.20100000000000001127
    CHECK(std::fabs(exact - 0.201) <= 1e-9);
    CHECK(exact > 0.2);
    CHECK(exact <= effective_vol_asymptotic(req));

    const auto expo = constant_request(1.0, MemoryKernel::exponential(0.05), 1.0);
    const double e = effective_vol_exact(expo);
    CHECK(std::fabs(e - nested_oracle(expo)) <= 1e-7);
    CHECK(std::fabs(e - 1.0024999998917894) <= 1e-8);

    const auto pw = EffVolRequest{CoefficientCurve::piecewise({{0, 0.15}, {0.5, 0.35}, {1.5, 0.2}}),
                                  MemoryKernel::gaussian(0.3), 0.0, 1.4};
    CHECK(std::fabs(effective_vol_exact(pw) - nested_oracle(pw)) <= 1e-7);
}

TEST_CASE("gaussian closed form equals the nested-quadrature exact form") {
    std::mt19937_64 gen(11);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 10; ++i) {
        const double tau = 0.01 + 0.49 * u(gen);
        const double w = 0.5 + 9.5 * u(gen);
        const auto b = i % 2 ? CoefficientCurve::constant(0.1 + 0.3 * u(gen))
                             : CoefficientCurve::piecewise({{0, 0.1 + u(gen)}, {0.5 * w, 0.1 + u(gen)}, {w, 0.1 + u(gen)}});
        const EffVolRequest req{b, MemoryKernel::gaussian(tau), 0.0, w};
        CHECK(std::fabs(effective_vol_gaussian(req) - effective_vol_exact(req)) <= 1e-7);
    }
    const auto req = constant_request(0.2, MemoryKernel::gaussian(0.1), 1.0);
    CHECK(std::fabs(effective_vol_gaussian(req) - effective_vol_exact(req)) <= 1e-7);
}

TEST_CASE("long window relaxes to b") {
    const auto req = constant_request(0.2, MemoryKernel::gaussian(0.1), 1e4);
    CHECK(std::fabs(effective_vol_gaussian(req) - 0.2) / 0.2 <= 1e-4);
}

TEST_CASE("ordering and monotonicity") {
    for (auto fam : {MemoryKernel::Family::Gaussian, MemoryKernel::Family::Exponential}) {
        double prev = 0.0;
        for (double tau : {0.0, 0.01, 0.02, 0.05, 0.1, 0.2, 0.4, 0.8}) {
            const auto req = constant_request(0.2, MemoryKernel(fam, tau), 1.0);
            const double asym = effective_vol_asymptotic(req);
            CHECK(asym >= prev);
            prev = asym;
            CHECK(effective_vol_exact(req) <= asym + 1e-12);
        }
    }
}

TEST_CASE("exact-asymptotic gap shrinks as tau halves") {
    double prev = std::numeric_limits<double>::infinity();
    for (double tau : {0.2, 0.1, 0.05}) {
        double gap = 0.0;
        for (int i = 1; i <= 10; ++i) {
            const auto req = constant_request(0.2, MemoryKernel::gaussian(tau), 0.1 * i);
            gap = std::max(gap, std::fabs(effective_vol_exact(req) - effective_vol_asymptotic(req)));
        }
        CHECK(gap <= prev);
        prev = gap;
    }
}

TEST_CASE("errors") {
    CHECK(code_of([] { effective_vol_exact(constant_request(0.2, MemoryKernel::gaussian(0.1), 0.0)); }) ==
          ErrorCode::DegenerateWindow);
    CHECK(code_of([] { effective_vol_gaussian(constant_request(0.2, MemoryKernel::exponential(0.1), 1.0)); }) ==
          ErrorCode::WrongKernelFamily);
}

TEST_CASE("tabulate_effvol") {
    const auto b = CoefficientCurve::piecewise({{0, 0.2}, {1, 0.3}});
    const std::vector<double> grid = {0.25, 0.5, 1.0};
    const auto flat = tabulate_effvol(b, MemoryKernel::gaussian(0.0), 0.0, grid, EffVolMethod::Exact);
    for (std::size_t i = 0; i < grid.size(); ++i) CHECK(flat.values[i] == eval_coeff(b, grid[i]));

    const auto k = MemoryKernel::gaussian(0.1);
    const auto coarse = tabulate_effvol(b, k, 0.0, grid, EffVolMethod::Exact);
    const std::vector<double> fine = {0.125, 0.25, 0.375, 0.5, 0.75, 1.0};
    const auto refined = tabulate_effvol(b, k, 0.0, fine, EffVolMethod::Exact);
    CHECK(refined.values[1] == coarse.values[0]);
    CHECK(refined.values[3] == coarse.values[1]);
    CHECK(refined.values[5] == coarse.values[2]);

    const auto closed = tabulate_effvol(b, k, 0.0, fine, EffVolMethod::GaussianClosed);
    for (std::size_t i = 0; i < fine.size(); ++i) CHECK(std::fabs(closed.values[i] - refined.values[i]) <= 1e-7);

    const std::vector<double> bad = {0.5, 1.5};
    CHECK(code_of([&] { tabulate_effvol(b, k, 0.0, bad, EffVolMethod::Exact); }) == ErrorCode::OutOfDomain);
    const std::vector<double> unsorted = {0.5, 0.4};
    CHECK(code_of([&] { tabulate_effvol(b, k, 0.0, unsorted, EffVolMethod::Exact); }) == ErrorCode::NonMonotoneTime);

    CHECK(closed.value_at(0.0) == closed.values.front());
    CHECK(closed.value_at(0.3125) == doctest::Approx(0.5 * (closed.values[1] + closed.values[2])));
}
