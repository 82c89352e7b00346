#ifndef CCSK_RNG_HPP
#define CCSK_RNG_HPP

#include <cstdint>
#include <initializer_list>
#include <random>

namespace ccsk {

using Seed = std::uint64_t;
using Rng = std::mt19937_64;

// splitmix64 finalizer; the basis of every derived seed in the project.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept
{
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Order-sensitive hash of a seed path, e.g. derive_seed(master, {point, frame}).
constexpr Seed derive_seed(Seed master, std::initializer_list<std::uint64_t> path) noexcept
{
    std::uint64_t h = mix64(master);
    for (auto p : path) h = mix64(h ^ mix64(p + 0x632be59bd9b4e019ULL));
    return h;
}

inline Rng make_rng(Seed s) { return Rng{s}; }

// Uniform double in [0,1) with 53 random bits; portable across standard libraries.
inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

} // namespace ccsk

#endif
