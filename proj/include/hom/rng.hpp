#pragma once

// Reproducible random streams.
//
// Every simulated quantity draws from a std::mt19937_64 engine seeded with
// substream_seed(seed, stream). The engine is fully specified by the C++
// standard, and the distributions come from Boost.Random, whose algorithms
// do not vary between standard libraries. Changing either breaks
// bit-for-bit reproducibility of stored scans.

#include <cstdint>
#include <random>

namespace hom {

using Engine = std::mt19937_64;

/// SplitMix64 output function applied to x.
std::uint64_t splitmix64(std::uint64_t x);

/// Decorrelated seed for substream `stream` of `seed`.
std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t stream);

Engine make_engine(std::uint64_t seed, std::uint64_t stream);

/// Poisson variate; returns 0 for mean == 0.
std::uint64_t sample_poisson(Engine& engine, double mean);

}  // namespace hom
