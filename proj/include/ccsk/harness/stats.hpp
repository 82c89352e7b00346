#ifndef CCSK_HARNESS_STATS_HPP
#define CCSK_HARNESS_STATS_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>

namespace ccsk::harness {

inline constexpr double kZ95 = 1.959963984540054;

struct Interval {
    double lo;
    double hi;
    [[nodiscard]] double half_width() const { return (hi - lo) / 2.0; }
};

// Wilson score interval for a binomial proportion.
inline Interval wilson_interval(std::uint64_t errors, std::uint64_t n, double z = kZ95)
{
    if (n == 0) return {0.0, 1.0};
    const double nn = static_cast<double>(n);
    const double p = static_cast<double>(errors) / nn;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / nn;
    const double centre = (p + z2 / (2.0 * nn)) / denom;
    const double half = z * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn)) / denom;
    return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

// Value for the CSV confidence column: Wilson half-width, or the one-sided
// 95% upper bound 3/n when no errors were observed.
inline double ser_ci95(std::uint64_t errors, std::uint64_t n)
{
    if (n == 0) return 1.0;
    if (errors == 0) return 3.0 / static_cast<double>(n);
    return wilson_interval(errors, n).half_width();
}

// True when the two Wilson intervals do not overlap and a < b.
inline bool separated_below(std::uint64_t err_a, std::uint64_t n_a, std::uint64_t err_b, std::uint64_t n_b)
{
    return wilson_interval(err_a, n_a).hi < wilson_interval(err_b, n_b).lo;
}

} // namespace ccsk::harness

#endif
