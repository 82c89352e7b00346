#ifndef CCSK_RECEIVER_HPP
#define CCSK_RECEIVER_HPP

// Window scoring and symbol decisions. A received frame is split into M
// equal windows; each window is scored independently for "carries the Cubic
// segment" and the symbol is the argmax window mapped back through the table.

#include <algorithm>
#include <cmath>
#include <memory>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "ccsk/chaos.hpp"
#include "ccsk/error.hpp"
#include "ccsk/modem.hpp"
#include "ccsk/nn/network.hpp"

namespace ccsk::rx {

using ProbabilityVector = std::vector<double>;

inline std::vector<std::span<const double>> split_windows(std::span<const double> r, std::size_t M)
{
    require(M >= 1 && r.size() % M == 0, "frame length " + std::to_string(r.size()) + " is not divisible by M = " +
                                             std::to_string(M));
    const std::size_t w = r.size() / M;
    std::vector<std::span<const double>> out;
    out.reserve(M);
    for (std::size_t j = 0; j < M; ++j) out.push_back(r.subspan(j * w, w));
    return out;
}

struct ResidualDetector {
    chaos::StandardizationConstants cubic{chaos::kCubicConstants};
    chaos::StandardizationConstants logistic{chaos::kLogisticConstants};
    bool standardized{true};
};

namespace detail {

// Mean squared one-step prediction error of `kind` over the window, in the
// map's natural coordinates. Inputs are clamped into the valid interval first.
inline double map_residual(std::span<const double> window, chaos::MapKind kind,
                           const chaos::StandardizationConstants& c, bool standardized)
{
    const auto iv = chaos::valid_interval(kind);
    auto natural = [&](double v) { return standardized ? v * c.std + c.mean : v; };
    double acc = 0.0;
    double u = natural(window[0]);
    for (std::size_t q = 0; q + 1 < window.size(); ++q) {
        const double next = natural(window[q + 1]);
        const double x = std::clamp(u, iv.lo, iv.hi);
        const double pred = kind == chaos::MapKind::Logistic ? chaos::logistic_rule(x) : chaos::cubic_rule(x);
        acc += (next - pred) * (next - pred);
        u = next;
    }
    return acc / static_cast<double>(window.size());
}

} // namespace detail

// Rl / (Rl + Rc): 1 when the window follows the Cubic recursion exactly, 0 for Logistic.
inline double residual_score(std::span<const double> window, const ResidualDetector& det = {})
{
    require(window.size() >= 2, "residual score needs a window of at least 2 samples");
    const double rc = detail::map_residual(window, chaos::MapKind::Cubic, det.cubic, det.standardized);
    const double rl = detail::map_residual(window, chaos::MapKind::Logistic, det.logistic, det.standardized);
    if (rl + rc == 0.0) return 0.5;
    return rl / (rl + rc);
}

struct NeuralDetector {
    std::shared_ptr<const nn::NetParams> params;
};

inline double nn_score(std::span<const double> window, const nn::NetParams& params)
{
    require(window.size() == params.config.window_length,
            "window length " + std::to_string(window.size()) + " does not match the network input length " +
                std::to_string(params.config.window_length));
    return nn::forward(window, params)[1];
}

// Immutable after construction; safe for concurrent scoring.
class Detector {
public:
    Detector(ResidualDetector r) : impl_(r) {}
    Detector(NeuralDetector n) : impl_(std::move(n))
    {
        require(std::get<NeuralDetector>(impl_).params != nullptr, "neural detector needs parameters");
    }

    static Detector residual() { return Detector(ResidualDetector{}); }
    static Detector neural(nn::NetParams p)
    {
        return Detector(NeuralDetector{std::make_shared<const nn::NetParams>(std::move(p))});
    }

    [[nodiscard]] bool is_neural() const { return std::holds_alternative<NeuralDetector>(impl_); }
    [[nodiscard]] std::string name() const { return is_neural() ? "nn" : "residual"; }
    [[nodiscard]] const nn::NetParams* network() const
    {
        return is_neural() ? std::get<NeuralDetector>(impl_).params.get() : nullptr;
    }

    // Scores `count` row-major windows of length `len`.
    [[nodiscard]] std::vector<double> score_windows(std::span<const double> windows, std::size_t count,
                                                    std::size_t len) const
    {
        require(windows.size() == count * len, "window buffer size mismatch");
        if (const auto* n = std::get_if<NeuralDetector>(&impl_)) {
            require(len == n->params->config.window_length,
                    "window length " + std::to_string(len) + " does not match the network input length " +
                        std::to_string(n->params->config.window_length));
            return nn::cubic_probabilities(windows, count, *n->params);
        }
        const auto& r = std::get<ResidualDetector>(impl_);
        std::vector<double> out(count);
        for (std::size_t i = 0; i < count; ++i) out[i] = residual_score(windows.subspan(i * len, len), r);
        return out;
    }

    [[nodiscard]] ProbabilityVector score_frame(std::span<const double> frame, std::size_t M) const
    {
        require(frame.size() % M == 0, "frame length is not divisible by M");
        return score_windows(frame, M, frame.size() / M);
    }

private:
    std::variant<ResidualDetector, NeuralDetector> impl_;
};

// 0-based index of the largest entry; ties go to the lowest index.
inline std::size_t decide_symbol(std::span<const double> p)
{
    require(!p.empty(), "empty probability vector");
    std::size_t best = 0;
    for (std::size_t j = 0; j < p.size(); ++j) {
        if (std::isnan(p[j])) throw NumericError("detector produced NaN for window " + std::to_string(j + 1));
        if (p[j] > p[best]) best = j;
    }
    return best;
}

struct FrameDecision {
    modem::Symbol symbol{0};
    std::size_t window{0};  // 0-based argmax window
    bool ok{true};          // false when the detector failed on this frame
};

struct Demodulated {
    std::vector<FrameDecision> decisions;
    std::vector<modem::Bit> bits;  // failed frames contribute all-zero words
};

inline FrameDecision decide_frame(std::span<const double> p, const modem::SymbolMapTable& table)
{
    const std::size_t j = decide_symbol(p);
    return {table.symbol_at(static_cast<std::uint32_t>(j + 1)), j, true};
}

// Per frame: split, score, argmax, invert the position table, Gray-decode.
// A detector error marks that frame failed and processing continues.
inline Demodulated demodulate(std::span<const std::span<const double>> frames, const Detector& det,
                              const modem::ModemConfig& cfg, const modem::SymbolMapTable& table)
{
    modem::validate(cfg);
    require(table.M() == cfg.M, "mapping table size does not match M");
    const std::size_t n = cfg.bits_per_symbol();
    Demodulated out;
    out.decisions.reserve(frames.size());
    for (const auto& f : frames) {
        FrameDecision d{0, 0, false};
        try {
            require(f.size() == cfg.beta, "received frame length does not equal beta");
            d = decide_frame(det.score_frame(f, cfg.M), table);
        } catch (const std::exception&) {
            d.ok = false;
        }
        out.decisions.push_back(d);
        const auto bits = d.ok ? modem::gray_decode(d.symbol, cfg.M) : std::vector<modem::Bit>(n, 0);
        out.bits.insert(out.bits.end(), bits.begin(), bits.end());
    }
    return out;
}

inline Demodulated demodulate(const std::vector<std::vector<double>>& frames, const Detector& det,
                              const modem::ModemConfig& cfg, const modem::SymbolMapTable& table)
{
    std::vector<std::span<const double>> views(frames.begin(), frames.end());
    return demodulate(views, det, cfg, table);
}

} // namespace ccsk::rx

#endif
