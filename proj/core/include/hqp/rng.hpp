#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <utility>

namespace hqp {

// Random streams.
//
// Every consumer draws from std::mt19937_64. A stream is identified by a
// (seed, stream index) pair; its engine seed is splitmix64(seed ^ mix(stream)),
// so trial t of a sweep always sees the same numbers regardless of how trials
// are scheduled across threads. Uniforms, Bernoulli draws and shuffles are
// implemented here rather than through <random> distributions, whose output
// is not specified bit-for-bit by the standard.
using Rng = std::mt19937_64;

std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Engine seed for stream `stream` of master seed `seed`.
std::uint64_t derive_stream_seed(std::uint64_t seed, std::uint64_t stream) noexcept;

Rng make_stream(std::uint64_t seed, std::uint64_t stream);

/// Uniform double in [0,1) with 53 random bits.
double uniform01(Rng& rng);

bool bernoulli(Rng& rng, double p);

/// Unbiased integer in [0, bound), bound > 0.
std::uint64_t uniform_below(Rng& rng, std::uint64_t bound);

/// Fisher-Yates shuffle.
template <class T>
void shuffle(std::span<T> items, Rng& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(uniform_below(rng, i));
    std::swap(items[i - 1], items[j]);
  }
}

}  // namespace hqp
