#pragma once

#include <cstdint>
#include <random>

namespace quant {

/// splitmix64 finalizer (Steele, Lea & Flood). Bijective 64-bit mix.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

/// Seed for the index-th child stream of a master seed.
///
/// Pure function of (master, index), so streams can be created in any order
/// and in parallel: stream i is the splitmix64 output for state
/// master + (i+1)*golden-gamma.
constexpr std::uint64_t derive_stream(std::uint64_t master, std::uint64_t index) noexcept {
    return mix64(master + (index + 1) * 0x9E3779B97F4A7C15ull);
}

inline std::mt19937_64 make_engine(std::uint64_t master, std::uint64_t index) {
    return std::mt19937_64{derive_stream(master, index)};
}

} // namespace quant
