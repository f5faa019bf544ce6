#include "memvol/rng.hpp"

#include "memvol/special.hpp"

namespace memvol {

namespace {
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
}

std::uint64_t mix64(std::uint64_t x) noexcept {
    x += kGolden;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

std::uint64_t fnv1a(std::string_view bytes) noexcept {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    return h;
}

std::uint64_t derive_seed(std::uint64_t seed, std::string_view tag, std::uint64_t index) noexcept {
    return mix64(mix64(seed ^ fnv1a(tag)) + index * kGolden);
}

NormalStream::NormalStream(std::uint64_t seed, std::uint64_t stream) noexcept
    : key_(mix64(mix64(seed) ^ (stream * 0xD1B54A32D192ED03ULL))) {}

double NormalStream::uniform(std::uint64_t index) const noexcept {
    const std::uint64_t bits = mix64(key_ ^ mix64(index * kGolden));
    return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

double NormalStream::normal(std::uint64_t index) const { return normal_quantile(uniform(index)); }

void NormalStream::fill(std::span<double> out, double scale) const {
    for (std::size_t j = 0; j < out.size(); ++j) out[j] = scale * normal(j);
}

} // namespace memvol
