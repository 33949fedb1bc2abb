#pragma once

#include <cstdint>
#include <random>

namespace relest {

/// splitmix64 step; used to derive independent substream seeds from a root
/// seed so graph/state/label/noise draws can be replayed in isolation.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Deterministic seed for substream `stream` of `root`.
inline std::uint64_t derive_seed(std::uint64_t root, std::uint64_t stream) {
    std::uint64_t s = root ^ (0x9e3779b97f4a7c15ULL * (stream + 1));
    splitmix64(s);
    return splitmix64(s);
}

using Rng = std::mt19937_64;

inline Rng make_rng(std::uint64_t root, std::uint64_t stream) {
    return Rng(derive_seed(root, stream));
}

}  // namespace relest
