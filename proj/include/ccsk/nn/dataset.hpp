#ifndef CCSK_NN_DATASET_HPP
#define CCSK_NN_DATASET_HPP

#include <span>
#include <vector>

#include "ccsk/channel.hpp"
#include "ccsk/modem.hpp"
#include "ccsk/nn/config.hpp"
#include "ccsk/rng.hpp"

namespace ccsk::nn {

// Labelled receiver windows: label 1 = window carries the Cubic segment.
struct Dataset {
    std::size_t window_length{0};
    std::vector<double> windows;  // row-major, size() x window_length
    std::vector<int> labels;
    std::vector<double> snr_db;   // Eb/N0 each example was generated at

    [[nodiscard]] std::size_t size() const { return labels.size(); }
    [[nodiscard]] std::span<const double> window(std::size_t i) const
    {
        return std::span<const double>(windows).subspan(i * window_length, window_length);
    }
    void push(std::span<const double> w, int label, double snr)
    {
        windows.insert(windows.end(), w.begin(), w.end());
        labels.push_back(label);
        snr_db.push_back(snr);
    }
};

// Even examples carry the Cubic window of a random frame, odd examples one of
// its Logistic-only windows. Every frame passes through the channel at an
// Eb/N0 drawn uniformly from tr.train_snr_range_db.
inline Dataset generate_dataset(std::size_t n, const modem::ModemConfig& modem_cfg, const channel::ChannelConfig& ch,
                                const TrainingConfig& tr, Seed seed)
{
    modem::validate(modem_cfg);
    require(n % 2 == 0, "dataset size must be even");
    const modem::SymbolMapTable table(modem_cfg.M);
    const std::size_t w = modem_cfg.window();
    const auto [lo, hi] = tr.train_snr_range_db;

    Dataset ds;
    ds.window_length = w;
    ds.windows.reserve(n * w);
    ds.labels.reserve(n);
    ds.snr_db.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const Seed es = derive_seed(seed, {i});
        Rng rng = make_rng(derive_seed(es, {0}));
        const auto symbol = static_cast<modem::Symbol>(rng() % modem_cfg.M);
        const double snr = lo + (hi - lo) * uniform01(rng);
        const int label = i % 2 == 0 ? 1 : 0;
        const auto frame = modem::make_frame(symbol, modem_cfg, table, derive_seed(es, {1}));
        const auto rx = channel::apply_channel(frame.samples, ch, channel::noise_params(snr, modem_cfg),
                                               derive_seed(es, {2}));
        std::size_t win = frame.c - 1;
        if (label == 0) {
            const std::size_t other = rng() % (modem_cfg.M - 1);
            win = other >= win ? other + 1 : other;
        }
        ds.push(std::span<const double>(rx).subspan(win * w, w), label, snr);
    }
    return ds;
}

} // namespace ccsk::nn

#endif
