#include "memvol/kernel.hpp"

#include "memvol/errors.hpp"
#include "memvol/special.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace memvol {

MemoryKernel::MemoryKernel(Family family, double tau) : family_(family), tau_(tau) {
    if (!(tau >= 0.0) || !std::isfinite(tau))
        throw Error(ErrorCode::InvalidArgument, "memory depth tau must be finite and >= 0");
}

const char* to_string(MemoryKernel::Family family) {
    return family == MemoryKernel::Family::Gaussian ? "gaussian" : "exponential";
}

double kernel_value(const MemoryKernel& k, double u) {
    if (u < 0.0) throw Error(ErrorCode::NegativeLag, "kernel lag must be >= 0");
    if (u == 0.0) return 1.0;
    if (k.degenerate()) return 0.0;
    const double z = u / k.tau();
    switch (k.family()) {
    case MemoryKernel::Family::Gaussian: return std::exp(-z * z);
    case MemoryKernel::Family::Exponential: return std::exp(-z);
    }
    return 0.0;
}

double kernel_integral(const MemoryKernel& k, double s, double t) {
    if (s > t) throw Error(ErrorCode::ReversedInterval, "kernel_integral: s > t");
    if (s == t || k.degenerate()) return 0.0;
    const double tau = k.tau();
    const double z = (t - s) / tau;
    switch (k.family()) {
    case MemoryKernel::Family::Gaussian:
        return std::min(t - s, 0.5 * tau * kSqrtPi * erf(z));
    case MemoryKernel::Family::Exponential:
        return std::min(t - s, -tau * std::expm1(-z));
    }
    return 0.0;
}

} // namespace memvol
