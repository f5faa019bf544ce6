#include "memvol/stats.hpp"

#include "memvol/errors.hpp"

#include <algorithm>
#include <cmath>

namespace memvol {

McStatistics mc_statistics(std::span<const double> values) {
    if (values.size() < 2) throw Error(ErrorCode::TooFewSamples, "need at least two samples");
    const auto n = static_cast<double>(values.size());

    double sum = 0.0;
    for (double v : values) sum += v;
    const double mean = sum / n;

    double m2 = 0.0;
    double m4 = 0.0;
    for (double v : values) {
        const double d = v - mean;
        const double d2 = d * d;
        m2 += d2;
        m4 += d2 * d2;
    }
    const double variance = m2 / (n - 1.0);
    m4 /= n;

    McStatistics s;
    s.n = values.size();
    s.mean = mean;
    s.variance = variance;
    s.mean_se = std::sqrt(variance / n);
    const double var_of_var = (m4 - (n - 3.0) / (n - 1.0) * variance * variance) / n;
    s.variance_se = std::sqrt(std::max(0.0, var_of_var));
    return s;
}

} // namespace memvol
