#pragma once

namespace memvol {

/// Memory weight f(u, τ) on lag u = t - s ≥ 0. Both families satisfy
/// f(0) = 1, decay to 0 at large lag and vanish as τ → 0⁺; both are in
/// [0, 1] and nonincreasing in u. τ = 0 is the degenerate kernel: 1 at
/// u = 0, 0 elsewhere.
class MemoryKernel {
public:
    enum class Family { Gaussian, Exponential };

    MemoryKernel() = default;
    MemoryKernel(Family family, double tau);

    static MemoryKernel gaussian(double tau) { return {Family::Gaussian, tau}; }
    static MemoryKernel exponential(double tau) { return {Family::Exponential, tau}; }

    Family family() const noexcept { return family_; }
    double tau() const noexcept { return tau_; }
    bool degenerate() const noexcept { return tau_ == 0.0; }

private:
    Family family_ = Family::Gaussian;
    double tau_ = 0.0;
};

const char* to_string(MemoryKernel::Family family);

/// gaussian: exp(-u²/τ²); exponential: exp(-u/τ). Throws NegativeLag for u < 0.
double kernel_value(const MemoryKernel& k, double u);

/// F(s, t) = ∫ₛᵗ f(t - x, τ) dx in closed form:
/// gaussian (τ√π/2)·erf((t-s)/τ), exponential τ(1 - exp(-(t-s)/τ)).
double kernel_integral(const MemoryKernel& k, double s, double t);

} // namespace memvol
