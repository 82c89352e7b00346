#ifndef CCSK_HARNESS_EXPERIMENT_HPP
#define CCSK_HARNESS_EXPERIMENT_HPP

// Monte Carlo SER/BER sweeps. Frame i of grid point p is a pure function of
// derive_seed(master_seed, {p, i}); frames are simulated in fixed-size jobs and
// the per-job error counts are summed, so results do not depend on the
// worker count or scheduling order.

#include <algorithm>
#include <bit>
#include <cmath>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "ccsk/channel.hpp"
#include "ccsk/error.hpp"
#include "ccsk/harness/parallel.hpp"
#include "ccsk/harness/results.hpp"
#include "ccsk/modem.hpp"
#include "ccsk/nn/checkpoint.hpp"
#include "ccsk/receiver.hpp"
#include "ccsk/rng.hpp"

namespace ccsk::harness {

enum class DetectorKind { Neural, Residual };

inline DetectorKind parse_detector_kind(const std::string& s)
{
    if (s == "nn" || s == "neural") return DetectorKind::Neural;
    if (s == "residual") return DetectorKind::Residual;
    throw ParameterError("unknown detector '" + s + "' (expected nn|residual)");
}

struct ExperimentSpec {
    DetectorKind detector{DetectorKind::Residual};
    channel::ChannelKind channel{channel::ChannelKind::AWGN};
    modem::ModemConfig modem{};
    std::vector<double> ebn0_grid{};
    std::size_t symbols_per_point{10000};
    std::size_t d{0};
    Seed master_seed{1};
    std::string model_path{};  // empty: models/<channel>_k<k>.ccsk
    std::string out_path{};
    std::size_t threads{0};    // 0: $CCSK_THREADS or hardware concurrency
    std::optional<modem::SymbolMapTable> table{};
    // Table the receiver inverts; defaults to `table`. Differs for a receiver
    // that does not hold the mapping key.
    std::optional<modem::SymbolMapTable> rx_table{};
};

inline std::string default_model_path(channel::ChannelKind ch, std::size_t k)
{
    return std::string("models/") + channel::to_string(ch) + "_k" + std::to_string(k) + ".ccsk";
}

inline std::string model_path_for(const ExperimentSpec& s)
{
    return s.model_path.empty() ? default_model_path(s.channel, s.modem.k) : s.model_path;
}

inline modem::SymbolMapTable table_for(const ExperimentSpec& s)
{
    return s.table ? *s.table : modem::SymbolMapTable(s.modem.M);
}

inline modem::SymbolMapTable rx_table_for(const ExperimentSpec& s)
{
    return s.rx_table ? *s.rx_table : table_for(s);
}

inline void validate(const ExperimentSpec& s)
{
    modem::validate(s.modem);
    require(!s.ebn0_grid.empty(), "Eb/N0 grid is empty");
    for (std::size_t i = 1; i < s.ebn0_grid.size(); ++i)
        require(s.ebn0_grid[i] > s.ebn0_grid[i - 1], "Eb/N0 grid must be strictly increasing");
    require(s.symbols_per_point >= 100, "symbols per point must be >= 100");
    require(s.d < s.modem.k, "misalignment d must be smaller than k");
    if (s.table) require(s.table->M() == s.modem.M, "mapping table size does not match M");
    if (s.rx_table) require(s.rx_table->M() == s.modem.M, "receiver mapping table size does not match M");
}

// Builds the detector named by the spec; a neural detector loads its checkpoint here.
inline rx::Detector make_detector(const ExperimentSpec& s)
{
    if (s.detector == DetectorKind::Residual) return rx::Detector::residual();
    const std::string path = model_path_for(s);
    if (!std::filesystem::exists(path)) throw IoError("checkpoint not found: " + path);
    auto params = nn::load_params(path);
    require(params.config.window_length == s.modem.window(),
            "checkpoint window length " + std::to_string(params.config.window_length) +
                " does not match beta/M = " + std::to_string(s.modem.window()));
    return rx::Detector::neural(std::move(params));
}

struct PointCounts {
    std::uint64_t symbols{0};
    std::uint64_t symbol_errors{0};
    std::uint64_t bit_errors{0};

    PointCounts& operator+=(const PointCounts& o)
    {
        symbols += o.symbols;
        symbol_errors += o.symbol_errors;
        bit_errors += o.bit_errors;
        return *this;
    }
    bool operator==(const PointCounts&) const = default;
};

inline constexpr std::size_t kFramesPerJob = 128;

struct ReceivedFrame {
    modem::Symbol symbol;
    std::vector<double> samples;
};

// The transmitted symbol and received samples of one frame.
inline ReceivedFrame simulate_frame(const modem::ModemConfig& cfg, const modem::SymbolMapTable& table,
                                    const channel::ChannelConfig& ch, const channel::NoiseParams& noise,
                                    Seed frame_seed)
{
    Rng rng = make_rng(derive_seed(frame_seed, {0}));
    const auto symbol = static_cast<modem::Symbol>(rng() % cfg.M);
    const auto frame = modem::make_frame(symbol, cfg, table, derive_seed(frame_seed, {1}));
    return {symbol, channel::apply_channel(frame.samples, ch, noise, derive_seed(frame_seed, {2}))};
}

// Error counts at one Eb/N0 for each misalignment in d_list, all evaluated on
// the same transmitted frames.
inline std::vector<PointCounts> simulate_point(const ExperimentSpec& spec, const rx::Detector& det,
                                               std::size_t point_index, double ebn0_db,
                                               const std::vector<std::size_t>& d_list)
{
    const auto& cfg = spec.modem;
    const auto table = table_for(spec);
    const auto rx_table = rx_table_for(spec);
    const auto ch = channel::ChannelConfig::of(spec.channel);
    const auto noise = channel::noise_params(ebn0_db, cfg);
    const Seed point_seed = derive_seed(spec.master_seed, {point_index});
    const bool need_tail = std::any_of(d_list.begin(), d_list.end(), [](std::size_t d) { return d > 0; });
    const std::size_t n = spec.symbols_per_point;
    const std::size_t jobs = (n + kFramesPerJob - 1) / kFramesPerJob;
    const std::size_t w = cfg.window();

    std::vector<std::vector<PointCounts>> slots(jobs, std::vector<PointCounts>(d_list.size()));
    parallel_for(jobs, worker_count(spec.threads), [&](std::size_t job) {
        const std::size_t first = job * kFramesPerJob;
        const std::size_t count = std::min(kFramesPerJob, n - first);
        const std::size_t generated = count + (need_tail ? 1 : 0);
        std::vector<modem::Symbol> symbols;
        std::vector<double> stream;
        stream.reserve(generated * cfg.beta);
        for (std::size_t i = 0; i < generated; ++i) {
            auto rf = simulate_frame(cfg, table, ch, noise, derive_seed(point_seed, {first + i}));
            symbols.push_back(rf.symbol);
            stream.insert(stream.end(), rf.samples.begin(), rf.samples.end());
        }
        std::vector<double> buffer;
        buffer.reserve(count * cfg.beta);
        for (std::size_t di = 0; di < d_list.size(); ++di) {
            const auto views = channel::apply_misalignment(stream, cfg.beta, d_list[di]);
            buffer.clear();
            for (std::size_t i = 0; i < count; ++i) buffer.insert(buffer.end(), views[i].begin(), views[i].end());
            PointCounts pc;
            pc.symbols = count;
            std::vector<double> scores;
            bool batch_ok = true;
            try {
                scores = det.score_windows(buffer, count * cfg.M, w);
            } catch (const NumericError&) {
                batch_ok = false;
            }
            for (std::size_t i = 0; i < count; ++i) {
                modem::Symbol decided = 0;
                bool ok = batch_ok;
                if (ok) {
                    try {
                        decided = rx::decide_frame(std::span<const double>(scores).subspan(i * cfg.M, cfg.M), rx_table)
                                      .symbol;
                    } catch (const NumericError&) {
                        ok = false;
                    }
                }
                if (!ok || decided != symbols[i]) {
                    ++pc.symbol_errors;
                    pc.bit_errors += ok ? static_cast<std::uint64_t>(std::popcount(
                                              modem::symbol_to_gray(decided) ^ modem::symbol_to_gray(symbols[i])))
                                        : cfg.bits_per_symbol();
                }
            }
            slots[job][di] = pc;
        }
    });

    std::vector<PointCounts> total(d_list.size());
    for (const auto& s : slots)
        for (std::size_t di = 0; di < d_list.size(); ++di) total[di] += s[di];
    return total;
}

inline ResultRow make_row(const ExperimentSpec& spec, const std::string& detector, std::size_t d, double ebn0,
                          const PointCounts& c)
{
    ResultRow r;
    r.detector = detector;
    r.channel = channel::to_string(spec.channel);
    r.M = spec.modem.M;
    r.k = spec.modem.k;
    r.beta = spec.modem.beta;
    r.d = d;
    r.ebn0_db = ebn0;
    r.symbols = c.symbols;
    r.symbol_errors = c.symbol_errors;
    r.bit_errors = c.bit_errors;
    r.seed = spec.master_seed;
    finalize(r, spec.modem.bits_per_symbol());
    return r;
}

inline std::vector<ResultRow> run_ser_sweep(const ExperimentSpec& spec, const rx::Detector& det)
{
    validate(spec);
    std::vector<ResultRow> rows;
    for (std::size_t p = 0; p < spec.ebn0_grid.size(); ++p) {
        const auto c = simulate_point(spec, det, p, spec.ebn0_grid[p], {spec.d});
        rows.push_back(make_row(spec, det.name(), spec.d, spec.ebn0_grid[p], c[0]));
    }
    return rows;
}

inline std::vector<ResultRow> run_ser_sweep(const ExperimentSpec& spec)
{
    validate(spec);
    return run_ser_sweep(spec, make_detector(spec));
}

// One SER curve per d (rows grouped by d, grid order within a curve).
inline std::vector<ResultRow> run_misalignment_sweep(const ExperimentSpec& spec, const rx::Detector& det,
                                                     const std::vector<std::size_t>& d_grid)
{
    validate(spec);
    require(!d_grid.empty(), "misalignment grid is empty");
    for (auto d : d_grid) require(d < spec.modem.k, "misalignment d must be smaller than k");
    std::vector<std::vector<ResultRow>> curves(d_grid.size());
    for (std::size_t p = 0; p < spec.ebn0_grid.size(); ++p) {
        const auto counts = simulate_point(spec, det, p, spec.ebn0_grid[p], d_grid);
        for (std::size_t di = 0; di < d_grid.size(); ++di)
            curves[di].push_back(make_row(spec, det.name(), d_grid[di], spec.ebn0_grid[p], counts[di]));
    }
    std::vector<ResultRow> rows;
    for (auto& c : curves) rows.insert(rows.end(), c.begin(), c.end());
    return rows;
}

inline std::vector<ResultRow> run_misalignment_sweep(const ExperimentSpec& spec, const std::vector<std::size_t>& d_grid)
{
    validate(spec);
    return run_misalignment_sweep(spec, make_detector(spec), d_grid);
}

} // namespace ccsk::harness

#endif
