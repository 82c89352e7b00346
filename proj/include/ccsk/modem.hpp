#ifndef CCSK_MODEM_HPP
#define CCSK_MODEM_HPP

// Gray-coded M-ary symbol mapping and combined-sequence frame construction.
//
// A frame of beta samples is split into M windows of beta/M samples. The
// k-sample Cubic (information) segment is written into window c at
// info_offset; every other sample comes from one Logistic (cover) segment of
// length beta - k, consumed in order.

#include <algorithm>
#include <bit>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "ccsk/chaos.hpp"
#include "ccsk/error.hpp"
#include "ccsk/rng.hpp"

namespace ccsk::modem {

using Bit = std::uint8_t;
using Symbol = std::uint32_t;

struct ModemConfig {
    std::size_t M{4};
    std::size_t k{32};
    std::size_t beta{128};
    // Start of the information segment inside its window. 0 = block placement.
    std::size_t info_offset{0};
    bool standardize{true};

    [[nodiscard]] std::size_t window() const { return beta / M; }
    [[nodiscard]] std::size_t bits_per_symbol() const
    {
        return static_cast<std::size_t>(std::countr_zero(M));
    }
    [[nodiscard]] std::size_t info_start(std::size_t c) const { return (c - 1) * window() + info_offset; }
};

inline bool is_power_of_two(std::size_t v) { return v != 0 && (v & (v - 1)) == 0; }

inline void validate(const ModemConfig& cfg)
{
    require(cfg.M >= 2 && is_power_of_two(cfg.M), "M must be a power of two >= 2 (got " + std::to_string(cfg.M) + ")");
    require(cfg.M <= (std::size_t{1} << 16), "M too large");
    require(cfg.k >= 2, "k must be >= 2");
    require(cfg.beta % cfg.M == 0, "beta must be divisible by M");
    require(cfg.beta % cfg.k == 0, "beta must be divisible by k");
    require(cfg.info_offset + cfg.k <= cfg.window(),
            "information segment does not fit its window (k + info_offset > beta/M)");
}

// ---------------------------------------------------------------------------
// Gray mapping. A bit word b_{n-1}..b_0 (MSB first) is the binary-reflected
// Gray codeword of its symbol, so encode(00,01,11,10) = 0,1,2,3.

inline Symbol gray_to_symbol(std::uint32_t codeword)
{
    std::uint32_t s = codeword;
    for (std::uint32_t shift = 1; shift < 32; shift <<= 1) s ^= s >> shift;
    return s;
}

inline std::uint32_t symbol_to_gray(Symbol s) { return s ^ (s >> 1); }

inline std::uint32_t pack_bits(std::span<const Bit> bits)
{
    std::uint32_t w = 0;
    for (Bit b : bits) {
        require(b <= 1, "bit values must be 0 or 1");
        w = (w << 1) | b;
    }
    return w;
}

inline std::vector<Bit> unpack_bits(std::uint32_t word, std::size_t width)
{
    std::vector<Bit> out(width);
    for (std::size_t i = 0; i < width; ++i) out[width - 1 - i] = static_cast<Bit>((word >> i) & 1u);
    return out;
}

inline Symbol gray_encode(std::span<const Bit> bits, std::size_t M)
{
    require(is_power_of_two(M) && M >= 2, "M must be a power of two >= 2");
    const auto width = static_cast<std::size_t>(std::countr_zero(M));
    require(bits.size() == width, "bit word width " + std::to_string(bits.size()) + " does not match log2(M) = " +
                                      std::to_string(width));
    return gray_to_symbol(pack_bits(bits));
}

inline std::vector<Bit> gray_decode(Symbol s, std::size_t M)
{
    require(is_power_of_two(M) && M >= 2, "M must be a power of two >= 2");
    require(s < M, "symbol out of range");
    return unpack_bits(symbol_to_gray(s), static_cast<std::size_t>(std::countr_zero(M)));
}

// ---------------------------------------------------------------------------

// Symbol -> window position table shared by transmitter and receiver.
class SymbolMapTable {
public:
    // Identity order: symbol s occupies window s + 1.
    explicit SymbolMapTable(std::size_t M) : symbol_to_c_(M), c_to_symbol_(M)
    {
        require(M >= 2 && is_power_of_two(M), "M must be a power of two >= 2");
        std::iota(symbol_to_c_.begin(), symbol_to_c_.end(), 1u);
        std::iota(c_to_symbol_.begin(), c_to_symbol_.end(), 0u);
    }

    // positions[s] = c (1-based); must be a permutation of 1..M.
    static SymbolMapTable from_positions(std::vector<std::uint32_t> positions)
    {
        SymbolMapTable t(positions.size());
        std::vector<bool> seen(positions.size(), false);
        for (std::size_t s = 0; s < positions.size(); ++s) {
            const auto c = positions[s];
            require(c >= 1 && c <= positions.size() && !seen[c - 1], "position table is not a bijection onto 1..M");
            seen[c - 1] = true;
            t.c_to_symbol_[c - 1] = static_cast<Symbol>(s);
        }
        t.symbol_to_c_ = std::move(positions);
        return t;
    }

    // Seeded random permutation, usable as a shared secret.
    static SymbolMapTable permuted(std::size_t M, Seed seed)
    {
        std::vector<std::uint32_t> pos(M);
        std::iota(pos.begin(), pos.end(), 1u);
        Rng rng = make_rng(seed);
        for (std::size_t i = M - 1; i > 0; --i) std::swap(pos[i], pos[rng() % (i + 1)]);
        return from_positions(std::move(pos));
    }

    [[nodiscard]] std::size_t M() const { return symbol_to_c_.size(); }

    [[nodiscard]] std::uint32_t position(Symbol s) const
    {
        require(s < M(), "symbol " + std::to_string(s) + " >= M");
        return symbol_to_c_[s];
    }

    [[nodiscard]] Symbol symbol_at(std::uint32_t c) const
    {
        require(c >= 1 && c <= M(), "position out of range");
        return c_to_symbol_[c - 1];
    }

private:
    std::vector<std::uint32_t> symbol_to_c_;
    std::vector<Symbol> c_to_symbol_;
};

inline std::uint32_t symbol_to_position(Symbol s, const SymbolMapTable& table) { return table.position(s); }

struct Frame {
    std::vector<double> samples;
    Symbol symbol{0};
    std::uint32_t c{1};
    chaos::Segment info_segment;
    chaos::Segment cover_segment;
};

inline Frame combine_sequence(chaos::Segment info, chaos::Segment cover, std::uint32_t c, const ModemConfig& cfg)
{
    validate(cfg);
    require(info.size() == cfg.k, "information segment length must equal k");
    require(cover.size() == cfg.beta - cfg.k, "cover segment length must equal beta - k");
    require(c >= 1 && c <= cfg.M, "position c out of range 1..M");

    Frame f;
    f.c = c;
    f.samples.resize(cfg.beta);
    const std::size_t start = cfg.info_start(c);
    std::size_t cover_pos = 0;
    for (std::size_t q = 0; q < cfg.beta; ++q) {
        if (q >= start && q < start + cfg.k)
            f.samples[q] = info.samples[q - start];
        else
            f.samples[q] = cover.samples[cover_pos++];
    }
    f.info_segment = std::move(info);
    f.cover_segment = std::move(cover);
    return f;
}

// Frame for one symbol; segment seeds derive from frame_seed only.
inline Frame make_frame(Symbol s, const ModemConfig& cfg, const SymbolMapTable& table, Seed frame_seed)
{
    auto info = chaos::generate_segment(chaos::MapKind::Cubic, cfg.k, derive_seed(frame_seed, {1}));
    auto cover = chaos::generate_segment(chaos::MapKind::Logistic, cfg.beta - cfg.k, derive_seed(frame_seed, {2}));
    if (cfg.standardize) {
        info = chaos::standardize_segment(std::move(info), chaos::kCubicConstants);
        cover = chaos::standardize_segment(std::move(cover), chaos::kLogisticConstants);
    }
    Frame f = combine_sequence(std::move(info), std::move(cover), table.position(s), cfg);
    f.symbol = s;
    return f;
}

inline std::vector<Symbol> bits_to_symbols(std::span<const Bit> bits, std::size_t M)
{
    require(is_power_of_two(M) && M >= 2, "M must be a power of two >= 2");
    const auto n = static_cast<std::size_t>(std::countr_zero(M));
    require(bits.size() % n == 0, "bit count " + std::to_string(bits.size()) + " is not a multiple of log2(M) = " +
                                      std::to_string(n));
    std::vector<Symbol> out;
    out.reserve(bits.size() / n);
    for (std::size_t i = 0; i < bits.size(); i += n) out.push_back(gray_encode(bits.subspan(i, n), M));
    return out;
}

inline std::vector<Bit> symbols_to_bits(std::span<const Symbol> symbols, std::size_t M)
{
    std::vector<Bit> out;
    for (Symbol s : symbols) {
        auto b = gray_decode(s, M);
        out.insert(out.end(), b.begin(), b.end());
    }
    return out;
}

// Frame i uses segments seeded from derive_seed(seed, {i}).
inline std::vector<Frame> modulate(std::span<const Bit> bits, const ModemConfig& cfg, const SymbolMapTable& table,
                                   Seed seed)
{
    validate(cfg);
    require(table.M() == cfg.M, "mapping table size does not match M");
    const auto symbols = bits_to_symbols(bits, cfg.M);
    std::vector<Frame> frames;
    frames.reserve(symbols.size());
    for (std::size_t i = 0; i < symbols.size(); ++i)
        frames.push_back(make_frame(symbols[i], cfg, table, derive_seed(seed, {i})));
    return frames;
}

} // namespace ccsk::modem

#endif
