#include "memvol/errors.hpp"
#include "memvol/kernel.hpp"
#include "memvol/quadrature.hpp"
#include "memvol/special.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace memvol;

TEST_CASE("kernel_value") {
    CHECK(kernel_value(MemoryKernel::gaussian(0.5), 0.0) == 1.0);
    CHECK(kernel_value(MemoryKernel::gaussian(0.5), 0.5) == doctest::Approx(0.36787944117144233));
    CHECK(kernel_value(MemoryKernel::gaussian(0.0), 1.0) == 0.0);
    CHECK(kernel_value(MemoryKernel::gaussian(0.0), 0.0) == 1.0);
    CHECK_THROWS_AS(kernel_value(MemoryKernel::exponential(1.0), -0.1), Error);
    CHECK_THROWS(MemoryKernel::gaussian(-1.0));
}

TEST_CASE("kernel limit conditions") {
    for (auto fam : {MemoryKernel::Family::Gaussian, MemoryKernel::Family::Exponential}) {
        for (double tau : {0.01, 0.1, 1.0, 10.0}) {
            const MemoryKernel k(fam, tau);
            CHECK(kernel_value(k, 0.0) == 1.0);
            CHECK(kernel_value(k, 1e3 * tau) <= 1e-6);
            double prev = 1.0;
            for (int i = 1; i <= 100; ++i) {
                const double v = kernel_value(k, i * tau / 10.0);
                CHECK(v >= 0.0);
                CHECK(v <= prev);
                prev = v;
            }
        }
        CHECK(kernel_value(MemoryKernel(fam, 1e-9), 1.0) <= 1e-6);
    }
}

TEST_CASE("kernel_integral examples") {
    const auto g = MemoryKernel::gaussian(0.5);
    CHECK(kernel_integral(g, 0.7, 0.7) == 0.0);
    CHECK(kernel_integral(MemoryKernel::exponential(0.3), 0.7, 0.7) == 0.0);
    // Frozen from a 40-digit evaluation of ∫₀¹ exp(-(1-x)²/0.25) dx.
    CHECK(kernel_integral(g, 0.0, 1.0) == doctest::Approx(0.44104069538121084).epsilon(1e-14));
    CHECK(kernel_integral(MemoryKernel::gaussian(0.0), 0.0, 3.0) == 0.0);
    CHECK_THROWS_AS(kernel_integral(g, 1.0, 0.0), Error);
}

TEST_CASE("kernel_integral agrees with quadrature on random inputs") {
    std::mt19937_64 gen(2024);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const auto fam = i % 2 ? MemoryKernel::Family::Exponential : MemoryKernel::Family::Gaussian;
        const double tau = 0.005 + 2.0 * u(gen);
        const double s = 10.0 * u(gen);
        const double t = s + 5.0 * u(gen);
        const MemoryKernel k(fam, tau);
        const double ref = oracle::gk_peaked([&](double x) { return kernel_value(k, t - x); }, s, t, tau);
        worst = std::max(worst, std::fabs(kernel_integral(k, s, t) - ref));
    }
    CHECK(worst <= 1e-8);
}

TEST_CASE("kernel_integral is monotone in lag and tau and bounded by the lag") {
    for (auto fam : {MemoryKernel::Family::Gaussian, MemoryKernel::Family::Exponential}) {
        double prev_tau = 0.0;
        for (double tau = 0.01; tau < 3.0; tau *= 1.3) {
            const double v = kernel_integral(MemoryKernel(fam, tau), 0.0, 1.0);
            CHECK(v >= prev_tau);
            CHECK(v <= 1.0);
            prev_tau = v;
        }
        const MemoryKernel k(fam, 0.2);
        double prev = 0.0;
        for (double lag = 1e-6; lag < 5.0; lag *= 1.5) {
            const double v = kernel_integral(k, 1.0, 1.0 + lag);
            CHECK(v >= prev);
            CHECK(v <= lag);
            prev = v;
        }
    }
}

TEST_CASE("adaptive Simpson basics") {
    CHECK(adaptive_simpson([](double x) { return x * x; }, 0.0, 1.0) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
    CHECK(adaptive_simpson([](double x) { return std::sin(x); }, 0.0, M_PI) == doctest::Approx(2.0).epsilon(1e-10));
    const double kink_breaks[] = {0.3};
    CHECK(adaptive_simpson([](double x) { return std::fabs(x - 0.3); }, 0.0, 1.0, kink_breaks) ==
          doctest::Approx(0.045 + 0.245).epsilon(1e-13));
    CHECK(adaptive_simpson([](double) { return 1.0; }, 2.0, 2.0) == 0.0);
}
