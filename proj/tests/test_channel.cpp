#include <gtest/gtest.h>

#include <cmath>

#include "ccsk/channel.hpp"

using namespace ccsk;
using namespace ccsk::channel;

TEST(Noise, Examples)
{
    const auto a = noise_params(10.0, modem::ModemConfig{4, 32, 128});
    EXPECT_DOUBLE_EQ(a.Eb, 64.0);
    EXPECT_NEAR(a.N0, 6.4, 1e-12);
    EXPECT_NEAR(a.sigma, std::sqrt(3.2), 1e-12);
    const auto b = noise_params(0.0, modem::ModemConfig{2, 32, 512});
    EXPECT_DOUBLE_EQ(b.Eb, 512.0);
    EXPECT_DOUBLE_EQ(b.N0, 512.0);
    EXPECT_DOUBLE_EQ(b.sigma, 16.0);
    EXPECT_LT(noise_params(300.0, modem::ModemConfig{}).sigma, 1e-12);
}

TEST(Noise, RawAmplitudeNeedsMeasuredEnergy)
{
    modem::ModemConfig raw{4, 32, 128};
    raw.standardize = false;
    EXPECT_THROW(noise_params(10.0, raw), ParameterError);
    EXPECT_NEAR(noise_params_for_energy(10.0, 128.0, 2).sigma, std::sqrt(3.2), 1e-12);
}

TEST(Gains, RayleighMomentAndDegenerate)
{
    Rng rng = make_rng(1);
    double acc = 0;
    const int n = 1000000;
    for (int i = 0; i < n; ++i) {
        const double a = draw_rayleigh(0.5, rng);
        acc += a * a;
    }
    EXPECT_NEAR(acc / n, 0.5, 0.01);
    EXPECT_EQ(draw_rayleigh(0.0, rng), 0.0);
    EXPECT_EQ(draw_path_gains(ChannelConfig::rayleigh2(), 4), draw_path_gains(ChannelConfig::rayleigh2(), 4));
}

TEST(Gains, TwoPathConservesPower)
{
    Rng rng = make_rng(2);
    double acc = 0;
    const int n = 500000;
    for (int i = 0; i < n; ++i)
        for (double g : draw_path_gains(ChannelConfig::rayleigh2(), rng)) acc += g * g;
    EXPECT_NEAR(acc / n, 1.0, 0.02);
}

TEST(Apply, IdentityAndTwoPath)
{
    const std::vector<double> s{0.3, -1.2, 2.0, 0.7};
    EXPECT_EQ(apply_channel(s, ChannelConfig::awgn(), {1, 1, 0}, 5), s);
    ChannelConfig two{ChannelKind::AWGN, {{1.0, 0}, {1.0, 1}}};
    const std::vector<double> imp{1, 0, 0};
    const std::vector<double> g{1, 1};
    EXPECT_EQ(apply_paths(imp, two, g), (std::vector<double>{1, 1, 0}));
}

TEST(Apply, NoiseVarianceAndSnrAccounting)
{
    const modem::ModemConfig cfg{4, 32, 128};
    const auto np = noise_params(10.0, cfg);
    const std::vector<double> zero(1000000, 0.0);
    const auto r = apply_channel(zero, ChannelConfig::awgn(), np, 3);
    double v = 0;
    for (double x : r) v += x * x;
    v /= static_cast<double>(r.size());
    EXPECT_NEAR(v / (np.sigma * np.sigma), 1.0, 0.02);
    // Eb/N0 recovered from the measured noise power: Eb / (2 v) with Eb = beta / log2 M.
    EXPECT_NEAR(10.0 * std::log10(64.0 / (2.0 * v)), 10.0, 0.09);
    EXPECT_EQ(apply_channel(zero, ChannelConfig::awgn(), np, 3), r);
}

TEST(Misalignment, Windows)
{
    const std::vector<double> stream{1, 2, 3, 4, 5, 6, 7, 8};
    const auto a = apply_misalignment(stream, 4, 0);
    ASSERT_EQ(a.size(), 2u);
    EXPECT_EQ(a[1][0], 5);
    const auto b = apply_misalignment(stream, 4, 2);
    ASSERT_EQ(b.size(), 1u);
    EXPECT_EQ(std::vector<double>(b[0].begin(), b[0].end()), (std::vector<double>{3, 4, 5, 6}));
    EXPECT_THROW(apply_misalignment(stream, 3, 0), ParameterError);
}
