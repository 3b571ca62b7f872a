#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "rssiloc/rng.hpp"

namespace rssiloc {

using SourceId = std::uint32_t;
using Channel = std::int32_t;

/// Strengths are unitless with S(1 m) = 1.
inline constexpr double kStrengthFloor = 1e-12;
inline constexpr std::size_t kDefaultPacketCount = 100;

/// How the noise level is turned into a standard deviation.
///  - Relative: std = level * true strength at the receiving sensor.
///  - Absolute: std = level * S(1 m) = level, independent of range.
enum class NoiseMode { Relative, Absolute };

std::string_view to_string(NoiseMode mode);
NoiseMode noise_mode_from_string(std::string_view text);

struct NoiseSpec {
    double level = 0.0;  ///< fraction in [0, 1]; 0.10 means "10%"
    NoiseMode mode = NoiseMode::Relative;

    /// Throws Error{InvalidConfig} when level is outside [0, 1].
    void validate() const;
    double stddev(double true_strength) const;
};

struct PacketBatch {
    SourceId source = 0;
    Channel channel = 0;
    std::vector<double> samples;
};

struct AveragedStrength {
    double strength = 0.0;
    bool clamped = false;  ///< mean was <= 0 and was raised to kStrengthFloor
};

/// Inverse-square law S = 1/d^2. Throws Error{NonPositiveDistance} when d <= 0.
double rssi_from_distance(double d);

/// d = sqrt(1/S). Throws Error{NonPositiveStrength} when S <= 0.
double distance_from_rssi(double strength);

/// One packet: true strength plus N(0, noise.stddev(true_strength)).
double emit_noisy_sample(double true_strength, const NoiseSpec& noise, Rng& rng);

/// Arithmetic mean of the samples, floored at kStrengthFloor.
/// Throws Error{EmptyBatch} on an empty batch.
AveragedStrength average_samples(std::span<const double> samples);
inline AveragedStrength average_batch(const PacketBatch& batch) { return average_samples(batch.samples); }

}  // namespace rssiloc
