#include "memvol/special.hpp"

#include "oracles.hpp"

#include <boost/math/special_functions/erf.hpp>
#include <doctest.h>

#include <cmath>

using namespace memvol;

TEST_CASE("erf fixed points") {
    CHECK(memvol::erf(0.0) == 0.0);
    CHECK(memvol::erf(1.0) == doctest::Approx(0.8427007929497149).epsilon(1e-15));
    for (double x : {6.0, 6.5, 10.0, 1e3}) {
        CHECK(std::fabs(memvol::erf(x) - 1.0) <= 1e-12);
        CHECK(std::fabs(memvol::erf(-x) + 1.0) <= 1e-12);
    }
}

TEST_CASE("erf matches the series oracle on [-6, 6]") {
    double worst = 0.0;
    for (int i = 0; i <= 1000; ++i) {
        const double x = -6.0 + 12.0 * i / 1000.0;
        worst = std::max(worst, std::fabs(memvol::erf(x) - oracle::erf_series(x)));
    }
    CHECK(worst <= 1e-12);
}

TEST_CASE("erf is odd and increasing") {
    double prev = -1.0;
    for (int i = 0; i <= 4000; ++i) {
        const double x = -5.5 + 11.0 * i / 4000.0;
        CHECK(memvol::erf(-x) == -memvol::erf(x));
        const double v = memvol::erf(x);
        CHECK(std::fabs(v) < 1.0);
        if (i > 0) CHECK(v > prev);
        prev = v;
    }
}

TEST_CASE("erfc keeps relative accuracy in the tail") {
    for (double x : {0.1, 0.5, 1.0, 2.5, 4.0, 5.5, 10.0, 20.0, 26.0}) {
        const double ref = boost::math::erfc(x);
        CHECK(std::fabs(memvol::erfc(x) - ref) <= 1e-14 * ref);
        CHECK(std::fabs(memvol::erfc(-x) - boost::math::erfc(-x)) <= 1e-15);
    }
    CHECK(memvol::erfc(30.0) == 0.0);
}

TEST_CASE("normal quantile inverts the CDF") {
    for (double p : {1e-300, 1e-12, 1e-6, 0.001, 0.02425, 0.1, 0.3, 0.5, 0.7, 0.975, 0.999999}) {
        const double z = normal_quantile(p);
        const double ref = -std::sqrt(2.0) * boost::math::erfc_inv(2.0 * p);
        CHECK(std::fabs(z - ref) <= 1e-14 * std::max(1.0, std::fabs(ref)));
        if (p > 1e-200) CHECK(normal_cdf(z) == doctest::Approx(p).epsilon(1e-13));
    }
    CHECK(normal_quantile(0.5) == 0.0);
    CHECK_THROWS(normal_quantile(0.0));
    CHECK_THROWS(normal_quantile(1.0));
}
