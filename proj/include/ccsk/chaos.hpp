#ifndef CCSK_CHAOS_HPP
#define CCSK_CHAOS_HPP

// Logistic (r = 3.7) and Chebyshev cubic chaotic maps, segment generation and
// fixed-constant standardization.
//
// The cubic map is x' = 4x^3 - 3x on (-1,1). The variant with "+3x" is not
// chaotic on that interval (every non-zero state diverges); it is available as
// printed_cubic_orbit() for demonstration only.

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ccsk/error.hpp"
#include "ccsk/rng.hpp"

namespace ccsk::chaos {

enum class MapKind { Logistic, Cubic };

inline constexpr double kLogisticRate = 3.7;
inline constexpr std::size_t kDefaultBurnIn = 100;

inline const char* to_string(MapKind k) { return k == MapKind::Logistic ? "logistic" : "cubic"; }

struct Interval {
    double lo;
    double hi;
    [[nodiscard]] constexpr bool contains(double v) const { return v > lo && v < hi; }
};

constexpr Interval valid_interval(MapKind k)
{
    return k == MapKind::Logistic ? Interval{0.0, 1.0} : Interval{-1.0, 1.0};
}

// Unchecked iteration rules, in each map's natural coordinates.
constexpr double logistic_rule(double x) { return kLogisticRate * x * (1.0 - x); }
constexpr double cubic_rule(double x) { return 4.0 * x * x * x - 3.0 * x; }

inline double map_step(MapKind kind, double state)
{
    const Interval iv = valid_interval(kind);
    if (!iv.contains(state) || !std::isfinite(state)) {
        throw DomainError(std::string(to_string(kind)) + " map: state " + std::to_string(state) +
                          " outside (" + std::to_string(iv.lo) + ", " + std::to_string(iv.hi) + ")");
    }
    if (kind == MapKind::Logistic) return logistic_rule(state);
    // Near the critical points x = +-0.5 the result can round to exactly -+1,
    // which is a fixed point. Keep the orbit in the open interval.
    const double next = cubic_rule(state);
    constexpr double edge = 1.0 - std::numeric_limits<double>::epsilon() / 2;
    if (next >= 1.0) return edge;
    if (next <= -1.0) return -edge;
    return next;
}

// Printed "+3x" recursion; leaves (-1,1) and diverges for any non-zero start.
inline std::vector<double> printed_cubic_orbit(double x0, std::size_t steps)
{
    std::vector<double> out;
    out.reserve(steps);
    double x = x0;
    for (std::size_t i = 0; i < steps; ++i) {
        x = 4.0 * x * x * x + 3.0 * x;
        out.push_back(x);
    }
    return out;
}

struct StandardizationConstants {
    double mean;
    double std;
};

// Cubic: invariant density 1/(pi sqrt(1-x^2)) has mean 0 and variance 1/2.
inline constexpr StandardizationConstants kCubicConstants{0.0, 0.70710678118654752440};
// Logistic r = 3.7: long-run moments from invariant_moments(Logistic, 1e8, seed 1).
inline constexpr StandardizationConstants kLogisticConstants{0.66783554223807473, 0.2033104454549288};

constexpr StandardizationConstants default_constants(MapKind k)
{
    return k == MapKind::Logistic ? kLogisticConstants : kCubicConstants;
}

struct Segment {
    MapKind kind{MapKind::Logistic};
    std::vector<double> samples;
    bool standardized{false};

    [[nodiscard]] std::size_t size() const { return samples.size(); }
};

namespace detail {

// True when x lies within tol of a point of period 1, 2 or 3.
inline bool near_short_cycle(MapKind kind, double x, double tol)
{
    double y = x;
    for (int p = 1; p <= 3; ++p) {
        y = kind == MapKind::Logistic ? logistic_rule(y) : cubic_rule(y);
        if (std::abs(y - x) < tol) return true;
    }
    return false;
}

} // namespace detail

// Initial state drawn uniformly from the valid interval, away from its edges
// and from short periodic orbits.
inline double draw_initial_state(MapKind kind, Rng& rng)
{
    constexpr double tol = 1e-6;
    const Interval iv = valid_interval(kind);
    for (;;) {
        const double x = iv.lo + (iv.hi - iv.lo) * uniform01(rng);
        if (x - iv.lo < tol || iv.hi - x < tol) continue;
        if (detail::near_short_cycle(kind, x, tol)) continue;
        return x;
    }
}

// Iterates from an explicit starting state; the first returned sample is
// map_step(initial) after burn_in discarded steps.
inline Segment iterate_from(MapKind kind, double initial, std::size_t length, std::size_t burn_in)
{
    require(length >= 1, "segment length must be >= 1");
    Segment seg{kind, {}, false};
    seg.samples.reserve(length);
    double x = initial;
    for (std::size_t i = 0; i < burn_in; ++i) x = map_step(kind, x);
    for (std::size_t i = 0; i < length; ++i) {
        x = map_step(kind, x);
        seg.samples.push_back(x);
    }
    return seg;
}

inline Segment generate_segment(MapKind kind, std::size_t length, Seed seed,
                                std::size_t burn_in = kDefaultBurnIn)
{
    require(length >= 1, "segment length must be >= 1");
    Rng rng = make_rng(seed);
    return iterate_from(kind, draw_initial_state(kind, rng), length, burn_in);
}

inline Segment standardize_segment(Segment seg, StandardizationConstants c)
{
    if (seg.standardized) throw StateError("segment is already standardized");
    require(c.std > 0.0, "standardization std must be positive");
    for (double& v : seg.samples) v = (v - c.mean) / c.std;
    seg.standardized = true;
    return seg;
}

inline Segment destandardize_segment(Segment seg, StandardizationConstants c)
{
    if (!seg.standardized) throw StateError("segment is not standardized");
    for (double& v : seg.samples) v = v * c.std + c.mean;
    seg.standardized = false;
    return seg;
}

struct Moments {
    double mean;
    double std;
};

// Long-run sample mean / std over n iterates after 1000 burn-in steps.
inline Moments invariant_moments(MapKind kind, std::size_t n, Seed seed)
{
    require(n >= 2, "invariant_moments needs n >= 2");
    Rng rng = make_rng(seed);
    double x = draw_initial_state(kind, rng);
    for (int i = 0; i < 1000; ++i) x = map_step(kind, x);
    // Welford accumulation.
    double mean = 0.0, m2 = 0.0;
    for (std::size_t i = 1; i <= n; ++i) {
        x = map_step(kind, x);
        const double delta = x - mean;
        mean += delta / static_cast<double>(i);
        m2 += delta * (x - mean);
    }
    return {mean, std::sqrt(m2 / static_cast<double>(n))};
}

} // namespace ccsk::chaos

#endif
