#include <gtest/gtest.h>

#include <cmath>

#include "ccsk/security.hpp"

using namespace ccsk;
using namespace ccsk::security;

namespace {

// Independent binary entropy in nats, converted to bits.
double entropy_bits(double p)
{
    if (p <= 0.0 || p >= 1.0) return 0.0;
    return -(p * std::log(p) + (1 - p) * std::log1p(-p)) / std::log(2.0);
}

} // namespace

TEST(Leakage, ClosedFormValues)
{
    EXPECT_DOUBLE_EQ(leakage_rate(0.0), 1.0);
    EXPECT_DOUBLE_EQ(leakage_rate(1.0), 1.0);
    EXPECT_NEAR(leakage_rate(0.5), 0.0, 1e-15);
    EXPECT_NEAR(leakage_rate(0.11), 0.50008, 1e-4);
    EXPECT_THROW(leakage_rate(-0.01), ParameterError);
    EXPECT_THROW(leakage_rate(1.5), ParameterError);
    EXPECT_EQ(leakage(0.2).pe, 0.2);
}

TEST(Leakage, SymmetryAndEntropyCrossCheck)
{
    for (int i = 0; i <= 100; ++i) {
        const double p = i / 100.0;
        EXPECT_NEAR(leakage_rate(p), leakage_rate(1.0 - p), 1e-12);
        EXPECT_NEAR(leakage_rate(p), 1.0 - entropy_bits(p), 1e-12);
        EXPECT_GE(leakage_rate(p), 0.0);
        EXPECT_LE(leakage_rate(p), 1.0);
    }
}

namespace {

struct Small {
    harness::ExperimentSpec eval;
    nn::NetConfig net;
    nn::TrainingConfig tr;
};

Small small_setup()
{
    Small s;
    s.eval.detector = harness::DetectorKind::Neural;
    s.eval.modem = {2, 8, 16};
    s.eval.ebn0_grid = {8.0};
    s.eval.symbols_per_point = 10000;
    s.eval.master_seed = 21;
    s.net.hidden = 8;
    s.net.heads = 2;
    s.net.attention_dim = 16;
    s.net.window_length = 8;
    s.tr.dataset_size = 8000;
    s.tr.max_epochs = 20;
    s.tr.batch_size = 64;
    s.tr.train_snr_range_db = {6.0, 10.0};
    return s;
}

} // namespace

TEST(Eavesdropper, GenieArmMatchesLegitimate)
{
    auto s = small_setup();
    EavesdropperConfig cfg;
    cfg.label_source = LabelSource::Genie;
    const auto r = simulate_eavesdropper(cfg, s.eval, s.net, s.tr, 5);
    ASSERT_EQ(r.points.size(), 1u);
    const auto& p = r.points[0];
    EXPECT_DOUBLE_EQ(r.eve_label_accuracy, 1.0);
    const auto a = harness::wilson_interval(p.legit.symbol_errors, p.legit.symbols);
    const auto b = harness::wilson_interval(p.eve.symbol_errors, p.eve.symbols);
    EXPECT_TRUE(a.lo <= b.hi && b.lo <= a.hi) << p.legit.symbol_errors << " vs " << p.eve.symbol_errors;
}

TEST(Eavesdropper, RandomLabelsCarryNoSignal)
{
    auto s = small_setup();
    EavesdropperConfig cfg;
    cfg.bootstrap = Bootstrap::RandomLabels;
    const auto r = simulate_eavesdropper(cfg, s.eval, s.net, s.tr, 6);
    EXPECT_NEAR(r.eve_label_accuracy, 0.5, 0.03);
    // An untrained function of the window can still correlate weakly with the class.
    EXPECT_NEAR(r.eve_window_accuracy, 0.5, 0.05);
    EXPECT_NEAR(r.points[0].eve_ber, 0.5, 0.05);
    EXPECT_LT(r.points[0].legit_ber, r.points[0].eve_ber);
}

TEST(Eavesdropper, RejectsZeroRounds)
{
    auto s = small_setup();
    EavesdropperConfig cfg;
    cfg.rounds = 0;
    EXPECT_THROW(simulate_eavesdropper(cfg, s.eval, s.net, s.tr, 1), ParameterError);
}
