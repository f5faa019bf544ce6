#pragma once

#include <cstdint>
#include <span>
#include <string_view>

namespace memvol {

/// Counter-based normal stream: every draw is a pure function of
/// (seed, stream, index), so any schedule reproduces the same numbers.
/// Uniforms come from a SplitMix64-style finalizer over the mixed key and
/// are mapped through the inverse normal CDF.
class NormalStream {
public:
    explicit NormalStream(std::uint64_t seed, std::uint64_t stream = 0) noexcept;

    /// Uniform in the open interval (0, 1) with 53 random bits.
    double uniform(std::uint64_t index) const noexcept;
    double normal(std::uint64_t index) const;

    /// out[j] = scale · normal(j).
    void fill(std::span<double> out, double scale = 1.0) const;

private:
    std::uint64_t key_;
};

std::uint64_t mix64(std::uint64_t x) noexcept;

/// Sub-seed for `tag` (a subsystem name) and `index`. Derivation:
/// mix64(mix64(seed ^ fnv1a(tag)) + index · 0x9E3779B97F4A7C15).
std::uint64_t derive_seed(std::uint64_t seed, std::string_view tag, std::uint64_t index) noexcept;

/// 64-bit FNV-1a.
std::uint64_t fnv1a(std::string_view bytes) noexcept;

} // namespace memvol
