#pragma once

#include <array>
#include <cstdint>
#include <initializer_list>
#include <optional>

namespace rssiloc {

/// SplitMix64 output function (Steele, Lea & Flood). Used both to seed
/// xoshiro256** and to derive substream seeds from a master seed.
constexpr std::uint64_t splitmix64_mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

class SplitMix64 {
  public:
    constexpr explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
    constexpr std::uint64_t operator()() { return splitmix64_mix(state_ += 0x9e3779b97f4a7c15ull); }

  private:
    std::uint64_t state_;
};

/// Derives an independent substream seed from a master seed and a key tuple.
/// Each key component is absorbed as h <- mix(h ^ (k + golden * (i + 1))).
std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> key);

/// xoshiro256** (Blackman & Vigna) with portable uniform and Gaussian draws.
///
/// The generator is a plain value: copying it forks the stream, and two copies
/// advanced by the same call sequence stay identical. Gaussian draws use the
/// Box-Muller transform and cache the second variate, so draws are exactly
/// reproducible across platforms given a conforming libm.
class Rng {
  public:
    explicit Rng(std::uint64_t seed);

    std::uint64_t next_u64();
    /// Uniform in [0, 1) with 53 random bits.
    double uniform();
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    double gaussian();
    double gaussian(double mean, double stddev) { return mean + stddev * gaussian(); }

    friend bool operator==(const Rng&, const Rng&) = default;

  private:
    std::array<std::uint64_t, 4> s_{};
    std::optional<double> spare_;
};

}  // namespace rssiloc
