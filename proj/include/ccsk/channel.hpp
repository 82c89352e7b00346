#ifndef CCSK_CHANNEL_HPP
#define CCSK_CHANNEL_HPP

// Multipath Rayleigh / AWGN channel with integer sample delays:
//   r(q) = sum_g alpha_g s(q - tau_g) + n(q),  n ~ N(0, N0/2).
// Delayed copies are zero-padded inside the frame. Gains are static within a
// frame and redrawn for every frame.

#include <cmath>
#include <limits>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "ccsk/error.hpp"
#include "ccsk/modem.hpp"
#include "ccsk/rng.hpp"

namespace ccsk::channel {

enum class ChannelKind { AWGN, Rayleigh2 };

inline const char* to_string(ChannelKind k) { return k == ChannelKind::AWGN ? "awgn" : "rayleigh2"; }

inline ChannelKind parse_channel_kind(const std::string& s)
{
    if (s == "awgn") return ChannelKind::AWGN;
    if (s == "rayleigh2" || s == "rayleigh") return ChannelKind::Rayleigh2;
    throw ParameterError("unknown channel kind '" + s + "' (expected awgn|rayleigh2)");
}

struct Path {
    double avg_power_gain;  // E[alpha^2]
    std::size_t delay;      // samples
};

struct ChannelConfig {
    ChannelKind kind{ChannelKind::AWGN};
    std::vector<Path> paths{{1.0, 0}};

    static ChannelConfig awgn() { return {ChannelKind::AWGN, {{1.0, 0}}}; }
    static ChannelConfig rayleigh2() { return {ChannelKind::Rayleigh2, {{0.5, 0}, {0.5, 2}}}; }
    static ChannelConfig of(ChannelKind k) { return k == ChannelKind::AWGN ? awgn() : rayleigh2(); }
};

struct NoiseParams {
    double Eb;
    double N0;
    double sigma;
};

// Noise level for unit-average-power frames: Eb = beta / log2(M).
inline NoiseParams noise_params(double ebn0_db, const modem::ModemConfig& cfg)
{
    modem::validate(cfg);
    if (!cfg.standardize)
        throw ParameterError("noise_params assumes standardized frames; use noise_params_for_energy with a measured "
                             "frame energy");
    const double eb = static_cast<double>(cfg.beta) / static_cast<double>(cfg.bits_per_symbol());
    const double n0 = eb / std::pow(10.0, ebn0_db / 10.0);
    return {eb, n0, std::sqrt(n0 / 2.0)};
}

// Alternate path for raw-amplitude frames: caller supplies the average energy per frame.
inline NoiseParams noise_params_for_energy(double ebn0_db, double frame_energy, std::size_t bits_per_symbol)
{
    require(frame_energy > 0.0 && bits_per_symbol >= 1, "frame energy and bits per symbol must be positive");
    const double eb = frame_energy / static_cast<double>(bits_per_symbol);
    const double n0 = eb / std::pow(10.0, ebn0_db / 10.0);
    return {eb, n0, std::sqrt(n0 / 2.0)};
}

// Rayleigh amplitude with E[alpha^2] = avg_power: scale sqrt(avg_power / 2).
inline double draw_rayleigh(double avg_power, Rng& rng)
{
    if (avg_power <= 0.0) return 0.0;
    std::normal_distribution<double> g(0.0, std::sqrt(avg_power / 2.0));
    const double a = g(rng), b = g(rng);
    return std::sqrt(a * a + b * b);
}

inline std::vector<double> draw_path_gains(const ChannelConfig& cfg, Rng& rng)
{
    std::vector<double> gains;
    gains.reserve(cfg.paths.size());
    for (const auto& p : cfg.paths)
        gains.push_back(cfg.kind == ChannelKind::AWGN ? std::sqrt(p.avg_power_gain) : draw_rayleigh(p.avg_power_gain, rng));
    return gains;
}

inline std::vector<double> draw_path_gains(const ChannelConfig& cfg, Seed seed)
{
    Rng rng = make_rng(seed);
    return draw_path_gains(cfg, rng);
}

// Deterministic multipath sum with explicit gains (no noise).
inline std::vector<double> apply_paths(std::span<const double> s, const ChannelConfig& cfg, std::span<const double> gains)
{
    require(gains.size() == cfg.paths.size(), "one gain per path required");
    std::vector<double> r(s.size(), 0.0);
    for (std::size_t g = 0; g < cfg.paths.size(); ++g) {
        const std::size_t tau = cfg.paths[g].delay;
        require(tau < s.size() || s.empty(), "path delay must be smaller than the frame length");
        for (std::size_t q = tau; q < s.size(); ++q) r[q] += gains[g] * s[q - tau];
    }
    return r;
}

inline void add_awgn(std::span<double> r, double sigma, Rng& rng)
{
    if (!(sigma > 0.0)) return;
    std::normal_distribution<double> n(0.0, sigma);
    for (double& v : r) v += n(rng);
}

// Draws this frame's gains, then the noise, from one seeded stream.
inline std::vector<double> apply_channel(std::span<const double> s, const ChannelConfig& cfg, const NoiseParams& noise,
                                         Seed seed)
{
    Rng rng = make_rng(seed);
    const auto gains = draw_path_gains(cfg, rng);
    auto r = apply_paths(s, cfg, gains);
    add_awgn(r, noise.sigma, rng);
    return r;
}

// Receiver frame windows over a stream of consecutive received frames, offset
// by d samples: window i covers stream[i*beta + d, (i+1)*beta + d). For d > 0
// the final frame has no successor and is dropped.
inline std::vector<std::span<const double>> apply_misalignment(std::span<const double> stream, std::size_t beta,
                                                               std::size_t d)
{
    require(beta > 0 && stream.size() % beta == 0, "stream length must be a multiple of beta");
    require(d < beta, "misalignment must be smaller than the frame length");
    const std::size_t frames = stream.size() / beta;
    const std::size_t usable = d == 0 ? frames : (frames == 0 ? 0 : frames - 1);
    std::vector<std::span<const double>> out;
    out.reserve(usable);
    for (std::size_t i = 0; i < usable; ++i) out.push_back(stream.subspan(i * beta + d, beta));
    return out;
}

} // namespace ccsk::channel

#endif
