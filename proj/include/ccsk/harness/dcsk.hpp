#ifndef CCSK_HARNESS_DCSK_HPP
#define CCSK_HARNESS_DCSK_HPP

// Binary DCSK reference system: a frame is a standardized Logistic reference
// of L samples followed by the reference multiplied by +-1. The receiver
// correlates the two halves and takes the sign. Eb = 2L for unit-power samples.

#include <cmath>
#include <string>
#include <vector>

#include "ccsk/channel.hpp"
#include "ccsk/chaos.hpp"
#include "ccsk/harness/experiment.hpp"

namespace ccsk::harness {

struct DcskConfig {
    std::size_t spreading_factor{64};  // L
};

inline void validate(const DcskConfig& c) { require(c.spreading_factor >= 2, "DCSK spreading factor must be >= 2"); }

struct DcskBit {
    modem::Bit bit;
    std::vector<double> frame;  // 2L samples
};

inline DcskBit dcsk_modulate(modem::Bit bit, std::size_t L, Seed seed)
{
    auto ref = chaos::standardize_segment(chaos::generate_segment(chaos::MapKind::Logistic, L, seed),
                                          chaos::kLogisticConstants);
    DcskBit out{bit, ref.samples};
    const double sign = bit ? 1.0 : -1.0;
    for (double v : ref.samples) out.frame.push_back(sign * v);
    return out;
}

inline modem::Bit dcsk_demodulate(std::span<const double> r)
{
    const std::size_t L = r.size() / 2;
    double z = 0.0;
    for (std::size_t j = 0; j < L; ++j) z += r[j] * r[j + L];
    return z > 0.0 ? 1 : 0;
}

inline std::vector<ResultRow> dcsk_baseline(const ExperimentSpec& spec, const DcskConfig& dcsk)
{
    validate(dcsk);
    require(!spec.ebn0_grid.empty(), "Eb/N0 grid is empty");
    require(spec.symbols_per_point >= 100, "symbols per point must be >= 100");
    const std::size_t L = dcsk.spreading_factor;
    const auto ch = channel::ChannelConfig::of(spec.channel);
    std::vector<ResultRow> rows;
    for (std::size_t p = 0; p < spec.ebn0_grid.size(); ++p) {
        const auto noise = channel::noise_params_for_energy(spec.ebn0_grid[p], 2.0 * static_cast<double>(L), 1);
        const Seed point_seed = derive_seed(spec.master_seed, {p});
        const std::size_t n = spec.symbols_per_point;
        const std::size_t jobs = (n + kFramesPerJob - 1) / kFramesPerJob;
        std::vector<std::uint64_t> errors(jobs, 0);
        parallel_for(jobs, worker_count(spec.threads), [&](std::size_t job) {
            const std::size_t first = job * kFramesPerJob;
            const std::size_t last = std::min(n, first + kFramesPerJob);
            for (std::size_t i = first; i < last; ++i) {
                const Seed fs = derive_seed(point_seed, {i});
                Rng rng = make_rng(derive_seed(fs, {0}));
                const auto bit = static_cast<modem::Bit>(rng() & 1u);
                const auto tx = dcsk_modulate(bit, L, derive_seed(fs, {1}));
                const auto rx = channel::apply_channel(tx.frame, ch, noise, derive_seed(fs, {2}));
                if (dcsk_demodulate(rx) != bit) ++errors[job];
            }
        });
        PointCounts c;
        c.symbols = n;
        for (auto e : errors) c.symbol_errors += e;
        c.bit_errors = c.symbol_errors;
        ResultRow r;
        r.detector = "dcsk-correlator";
        r.channel = channel::to_string(spec.channel);
        r.M = 2;
        r.k = L;
        r.beta = 2 * L;
        r.d = 0;
        r.ebn0_db = spec.ebn0_grid[p];
        r.symbols = c.symbols;
        r.symbol_errors = c.symbol_errors;
        r.bit_errors = c.bit_errors;
        r.seed = spec.master_seed;
        finalize(r, 1);
        rows.push_back(r);
    }
    return rows;
}

} // namespace ccsk::harness

#endif
