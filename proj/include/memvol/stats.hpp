#pragma once

#include <span>

namespace memvol {

struct McStatistics {
    std::size_t n = 0;
    double mean = 0.0;
    double variance = 0.0;      // unbiased, n - 1 divisor
    double mean_se = 0.0;       // sqrt(variance / n)
    double variance_se = 0.0;   // sqrt((m4 - (n-3)/(n-1)·s⁴) / n)
};

/// Two-pass estimator battery reduced in index order. Throws TooFewSamples
/// for fewer than two values.
McStatistics mc_statistics(std::span<const double> values);

} // namespace memvol
