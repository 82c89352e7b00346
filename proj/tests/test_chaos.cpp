#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "ccsk/chaos.hpp"

using namespace ccsk;
using namespace ccsk::chaos;

TEST(MapStep, LogisticHandValues)
{
    EXPECT_NEAR(map_step(MapKind::Logistic, 0.5), 0.925, 1e-15);
    EXPECT_NEAR(map_step(MapKind::Logistic, 0.2), 3.7 * 0.2 * 0.8, 1e-15);
}

TEST(MapStep, CubicChebyshevIdentity)
{
    EXPECT_NEAR(map_step(MapKind::Cubic, std::cos(std::numbers::pi / 9)), 0.5, 1e-12);
    EXPECT_EQ(map_step(MapKind::Cubic, 0.0), 0.0);
}

TEST(MapStep, OutOfIntervalThrows)
{
    EXPECT_THROW(map_step(MapKind::Logistic, 0.0), DomainError);
    EXPECT_THROW(map_step(MapKind::Logistic, 1.2), DomainError);
    EXPECT_THROW(map_step(MapKind::Cubic, -1.0), DomainError);
    EXPECT_THROW(map_step(MapKind::Cubic, std::nan("")), DomainError);
}

TEST(MapStep, CubicStaysOpenAtCriticalPoints)
{
    const double y = map_step(MapKind::Cubic, 0.5);
    EXPECT_GT(y, -1.0);
    EXPECT_NO_THROW(map_step(MapKind::Cubic, y));
}

TEST(PrintedCubic, Diverges)
{
    const auto orbit = printed_cubic_orbit(0.1, 30);
    EXPECT_GT(std::abs(orbit.back()), 1.0);
}

TEST(Generate, LogisticHandIteration)
{
    const auto seg = iterate_from(MapKind::Logistic, 0.5, 3, 0);
    // The first sample is one step from the initial state.
    ASSERT_EQ(seg.size(), 3u);
    EXPECT_NEAR(seg.samples[0], 0.925, 1e-15);
    EXPECT_NEAR(seg.samples[1], 0.2566875, 1e-15);
    EXPECT_NEAR(seg.samples[2], 3.7 * 0.2566875 * (1 - 0.2566875), 1e-15);
}

TEST(Generate, Deterministic)
{
    const auto a = generate_segment(MapKind::Cubic, 500, 99);
    const auto b = generate_segment(MapKind::Cubic, 500, 99);
    EXPECT_EQ(a.samples, b.samples);
    EXPECT_NE(a.samples, generate_segment(MapKind::Cubic, 500, 100).samples);
}

TEST(Generate, ClosureBothMaps)
{
    for (auto kind : {MapKind::Logistic, MapKind::Cubic}) {
        const auto seg = generate_segment(kind, 1000000, 5);
        const auto iv = valid_interval(kind);
        for (double v : seg.samples) ASSERT_TRUE(iv.contains(v)) << v;
    }
}

TEST(Generate, ZeroLengthRejected) { EXPECT_THROW(generate_segment(MapKind::Cubic, 0, 1), ParameterError); }

TEST(Conjugacy, CubicTriplesAngle)
{
    Rng rng = make_rng(17);
    for (int trial = 0; trial < 10; ++trial) {
        const double theta = std::numbers::pi * uniform01(rng);
        double x = std::cos(theta);
        for (int n = 1; n <= 20; ++n) {
            x = cubic_rule(x);
            EXPECT_NEAR(x, std::cos(std::pow(3.0, n) * theta), 1e-5) << "n=" << n;
        }
    }
}

TEST(Sensitivity, LogisticOrbitsDiverge)
{
    // Lyapunov exponent ~0.35 per step: 1e-10 grows past 0.1 after ~60 steps
    // on average, so the median over random attractor points is checked.
    std::vector<int> steps;
    double lyap = 0.0;
    for (Seed s = 0; s < 41; ++s) {
        double a = generate_segment(MapKind::Logistic, 1, s).samples[0];
        double b = a + 1e-10;
        int n = 0;
        while (std::abs(a - b) <= 0.1 && n < 1000) {
            a = map_step(MapKind::Logistic, a);
            b = map_step(MapKind::Logistic, b);
            ++n;
        }
        steps.push_back(n);
    }
    std::nth_element(steps.begin(), steps.begin() + 20, steps.end());
    EXPECT_LE(steps[20], 60);
    double x = 0.3;
    for (int i = 0; i < 100000; ++i) {
        x = map_step(MapKind::Logistic, x);
        lyap += std::log(std::abs(kLogisticRate * (1.0 - 2.0 * x)));
    }
    EXPECT_GT(lyap / 100000, 0.3);
}

TEST(Standardize, AffineAndInvertible)
{
    Segment s{MapKind::Cubic, {0.5, -0.25}, false};
    const auto z = standardize_segment(s, kCubicConstants);
    EXPECT_NEAR(z.samples[0], 0.5 * std::sqrt(2.0), 1e-12);
    EXPECT_THROW(standardize_segment(z, kCubicConstants), StateError);
    const auto g = generate_segment(MapKind::Logistic, 1000, 3);
    const auto back = destandardize_segment(standardize_segment(g, kLogisticConstants), kLogisticConstants);
    for (std::size_t i = 0; i < g.size(); ++i) EXPECT_NEAR(back.samples[i], g.samples[i], 1e-12);
}

TEST(Standardize, LongLogisticSegmentMoments)
{
    const auto z = standardize_segment(generate_segment(MapKind::Logistic, 1000000, 8), kLogisticConstants);
    double mean = 0, sq = 0;
    for (double v : z.samples) mean += v;
    mean /= static_cast<double>(z.size());
    for (double v : z.samples) sq += (v - mean) * (v - mean);
    EXPECT_NEAR(mean, 0.0, 0.01);
    EXPECT_NEAR(sq / static_cast<double>(z.size()), 1.0, 0.02);
}

TEST(Moments, CubicInvariantDensity)
{
    const auto m = invariant_moments(MapKind::Cubic, 10000000, 2);
    EXPECT_NEAR(m.mean, 0.0, 0.001);
    EXPECT_NEAR(m.std, std::sqrt(0.5), 0.002);
}

TEST(Moments, LogisticErgodicAndMatchesConstants)
{
    const auto a = invariant_moments(MapKind::Logistic, 10000000, 11);
    const auto b = invariant_moments(MapKind::Logistic, 10000000, 12);
    EXPECT_NEAR(a.mean, b.mean, 0.005);
    EXPECT_GT(a.std, 0.0);
    EXPECT_NEAR(a.mean, kLogisticConstants.mean, 0.005);
    EXPECT_NEAR(a.std, kLogisticConstants.std, 0.005);
}
