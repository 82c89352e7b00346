#ifndef CCSK_SECURITY_HPP
#define CCSK_SECURITY_HPP

// Information leakage L(X;R_e) = 1 + Pe log2 Pe + (1-Pe) log2(1-Pe) and the
// eavesdropper experiment: the legitimate receiver trains on ground-truth
// window labels; the eavesdropper has the same network architecture and frame
// timing but must label its captured windows with its own decisions.
//
// An eavesdropper who knows both maps and the standardization constants can
// run the residual detector directly; this experiment models one without that
// knowledge.

#include <cmath>
#include <string>
#include <vector>

#include "ccsk/error.hpp"
#include "ccsk/harness/experiment.hpp"
#include "ccsk/nn/dataset.hpp"
#include "ccsk/nn/train.hpp"
#include "ccsk/receiver.hpp"

namespace ccsk::security {

inline double leakage_rate(double pe)
{
    require(pe >= 0.0 && pe <= 1.0, "error probability must lie in [0,1]");
    auto plogp = [](double p) { return p > 0.0 ? p * std::log2(p) : 0.0; };
    return std::clamp(1.0 + plogp(pe) + plogp(1.0 - pe), 0.0, 1.0);
}

struct LeakageResult {
    double pe;
    double leakage;
};

inline LeakageResult leakage(double pe) { return {pe, leakage_rate(pe)}; }

enum class LabelSource { SelfEstimated, Genie };

// How the eavesdropper picks the window it labels "Cubic" in each capture.
enum class Bootstrap {
    UntrainedNetwork,  // decisions of its own randomly initialised network
    RandomLabels,      // uniformly random window
    Residual,          // map-residual detector (knows both maps)
};

inline Bootstrap parse_bootstrap(const std::string& s)
{
    if (s == "untrained") return Bootstrap::UntrainedNetwork;
    if (s == "random") return Bootstrap::RandomLabels;
    if (s == "residual") return Bootstrap::Residual;
    throw ParameterError("unknown bootstrap '" + s + "' (expected untrained|random|residual)");
}

struct EavesdropperConfig {
    LabelSource label_source{LabelSource::SelfEstimated};
    Bootstrap bootstrap{Bootstrap::UntrainedNetwork};
    std::size_t rounds{1};  // self-labelling / retraining iterations
};

struct SecurityPoint {
    double ebn0_db{0.0};
    harness::PointCounts legit;
    harness::PointCounts eve;
    double legit_ber{0.0};
    double eve_ber{0.0};
    double legit_leakage{0.0};
    double eve_leakage{0.0};
};

struct SecurityResult {
    std::vector<SecurityPoint> points;
    std::vector<nn::EpochStats> legit_history;
    std::vector<nn::EpochStats> eve_history;  // last round
    double eve_label_accuracy{0.0};   // self-labels that match the truth
    double eve_window_accuracy{0.0};  // eve classifier on genie-labelled windows
    double legit_window_accuracy{0.0};
};

namespace detail {

struct Capture {
    std::vector<double> samples;  // beta
    std::uint32_t true_window;    // 0-based
};

inline std::vector<Capture> capture_frames(std::size_t count, const modem::ModemConfig& cfg,
                                           const channel::ChannelConfig& ch, const nn::TrainingConfig& tr, Seed seed)
{
    const modem::SymbolMapTable table(cfg.M);
    std::vector<Capture> out;
    out.reserve(count);
    const auto [lo, hi] = tr.train_snr_range_db;
    for (std::size_t i = 0; i < count; ++i) {
        const Seed fs = derive_seed(seed, {i});
        Rng rng = make_rng(derive_seed(fs, {9}));
        const double snr = lo + (hi - lo) * uniform01(rng);
        auto rf = harness::simulate_frame(cfg, table, ch, channel::noise_params(snr, cfg), fs);
        out.push_back({std::move(rf.samples), table.position(rf.symbol) - 1});
    }
    return out;
}

// One positive (chosen window) and one negative (another random window) per capture.
inline nn::Dataset label_captures(const std::vector<Capture>& caps, const std::vector<std::uint32_t>& chosen,
                                  const modem::ModemConfig& cfg, Seed seed)
{
    nn::Dataset ds;
    ds.window_length = cfg.window();
    Rng rng = make_rng(seed);
    const std::size_t w = cfg.window();
    for (std::size_t i = 0; i < caps.size(); ++i) {
        const std::span<const double> s(caps[i].samples);
        const std::size_t pos = chosen[i];
        std::size_t neg = rng() % (cfg.M - 1);
        if (neg >= pos) ++neg;
        ds.push(s.subspan(pos * w, w), 1, 0.0);
        ds.push(s.subspan(neg * w, w), 0, 0.0);
    }
    return ds;
}

inline std::vector<std::uint32_t> decide_windows(const std::vector<Capture>& caps, const rx::Detector& det,
                                                 const modem::ModemConfig& cfg)
{
    std::vector<double> buf;
    buf.reserve(caps.size() * cfg.beta);
    for (const auto& c : caps) buf.insert(buf.end(), c.samples.begin(), c.samples.end());
    const auto scores = det.score_windows(buf, caps.size() * cfg.M, cfg.window());
    std::vector<std::uint32_t> out;
    out.reserve(caps.size());
    for (std::size_t i = 0; i < caps.size(); ++i)
        out.push_back(static_cast<std::uint32_t>(
            rx::decide_symbol(std::span<const double>(scores).subspan(i * cfg.M, cfg.M))));
    return out;
}

} // namespace detail

// `eval` supplies modem, channel, Eb/N0 grid, symbols per point and master
// seed for the held-out evaluation; tr.dataset_size sets both training sets.
inline SecurityResult simulate_eavesdropper(const EavesdropperConfig& cfg, const harness::ExperimentSpec& eval,
                                            const nn::NetConfig& net_cfg, const nn::TrainingConfig& tr, Seed seed)
{
    harness::validate(eval);
    require(cfg.rounds >= 1, "eavesdropper needs at least one round");
    require(net_cfg.window_length == eval.modem.window(), "network window length must equal beta/M");
    const auto ch = channel::ChannelConfig::of(eval.channel);
    const auto& mc = eval.modem;
    SecurityResult result;

    // Legitimate receiver: genie labels.
    nn::TrainingConfig legit_tr = tr;
    legit_tr.seed = derive_seed(seed, {1});
    const auto legit_data = nn::generate_dataset(tr.dataset_size, mc, ch, legit_tr, derive_seed(seed, {2}));
    auto legit = nn::train(legit_data, net_cfg, legit_tr);
    result.legit_history = legit.history;

    // Eavesdropper: her own captures, self-estimated labels.
    const std::size_t n_caps = tr.dataset_size / 2;
    const auto caps = detail::capture_frames(n_caps, mc, ch, tr, derive_seed(seed, {3}));
    std::vector<std::uint32_t> truth(n_caps);
    for (std::size_t i = 0; i < n_caps; ++i) truth[i] = caps[i].true_window;

    nn::TrainingConfig eve_tr = tr;
    eve_tr.seed = derive_seed(seed, {4});
    std::vector<std::uint32_t> chosen;
    if (cfg.label_source == LabelSource::Genie) {
        chosen = truth;
    } else {
        switch (cfg.bootstrap) {
        case Bootstrap::UntrainedNetwork:
            chosen = detail::decide_windows(
                caps, rx::Detector::neural(nn::init_params(net_cfg, derive_seed(seed, {5}))), mc);
            break;
        case Bootstrap::Residual:
            chosen = detail::decide_windows(caps, rx::Detector::residual(), mc);
            break;
        case Bootstrap::RandomLabels: {
            Rng rng = make_rng(derive_seed(seed, {6}));
            for (std::size_t i = 0; i < n_caps; ++i) chosen.push_back(static_cast<std::uint32_t>(rng() % mc.M));
            break;
        }
        }
    }

    nn::TrainResult eve;
    const std::size_t rounds = cfg.label_source == LabelSource::Genie ? 1 : cfg.rounds;
    for (std::size_t r = 0; r < rounds; ++r) {
        if (r > 0) chosen = detail::decide_windows(caps, rx::Detector::neural(eve.params), mc);
        std::size_t match = 0;
        for (std::size_t i = 0; i < n_caps; ++i) match += chosen[i] == truth[i] ? 1 : 0;
        result.eve_label_accuracy = static_cast<double>(match) / static_cast<double>(n_caps);
        const auto eve_data = detail::label_captures(caps, chosen, mc, derive_seed(seed, {7, r}));
        eve_tr.seed = derive_seed(seed, {4, r});
        eve = nn::train(eve_data, net_cfg, eve_tr);
    }
    result.eve_history = eve.history;

    // Held-out genie-labelled windows for the classifier accuracies.
    nn::TrainingConfig probe_tr = tr;
    const auto probe = nn::generate_dataset(2000, mc, ch, probe_tr, derive_seed(seed, {8}));
    result.legit_window_accuracy = nn::evaluate(legit.params, probe).accuracy;
    result.eve_window_accuracy = nn::evaluate(eve.params, probe).accuracy;

    // Evaluation on fresh transmissions; the two receivers see independent channels.
    const auto legit_det = rx::Detector::neural(std::move(legit.params));
    const auto eve_det = rx::Detector::neural(std::move(eve.params));
    harness::ExperimentSpec legit_spec = eval;
    harness::ExperimentSpec eve_spec = eval;
    eve_spec.master_seed = derive_seed(eval.master_seed, {0xe7e});
    // Without the mapping key the eavesdropper inverts the identity table.
    eve_spec.rx_table = modem::SymbolMapTable(mc.M);
    const std::size_t bits = mc.bits_per_symbol();
    for (std::size_t p = 0; p < eval.ebn0_grid.size(); ++p) {
        SecurityPoint sp;
        sp.ebn0_db = eval.ebn0_grid[p];
        sp.legit = harness::simulate_point(legit_spec, legit_det, p, sp.ebn0_db, {0})[0];
        sp.eve = harness::simulate_point(eve_spec, eve_det, p, sp.ebn0_db, {0})[0];
        auto ber = [bits](const harness::PointCounts& c) {
            return static_cast<double>(c.bit_errors) / static_cast<double>(c.symbols * bits);
        };
        sp.legit_ber = ber(sp.legit);
        sp.eve_ber = ber(sp.eve);
        sp.legit_leakage = leakage_rate(sp.legit_ber);
        sp.eve_leakage = leakage_rate(sp.eve_ber);
        result.points.push_back(sp);
    }
    return result;
}

} // namespace ccsk::security

#endif
