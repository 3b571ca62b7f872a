#include "rssiloc/signal.hpp"

#include <cmath>
#include <fmt/format.h>

#include "rssiloc/error.hpp"

namespace rssiloc {

std::string_view to_string(NoiseMode mode) {
    return mode == NoiseMode::Relative ? "relative" : "absolute";
}

NoiseMode noise_mode_from_string(std::string_view text) {
    if (text == "relative") {
        return NoiseMode::Relative;
    }
    if (text == "absolute") {
        return NoiseMode::Absolute;
    }
    throw Error(ErrorCode::InvalidConfig, fmt::format("unknown noise mode '{}'", text));
}

void NoiseSpec::validate() const {
    if (!(level >= 0.0 && level <= 1.0)) {
        throw Error(ErrorCode::InvalidConfig, fmt::format("noise level must be in [0, 1], got {:g}", level));
    }
}

double NoiseSpec::stddev(double true_strength) const {
    return mode == NoiseMode::Relative ? level * true_strength : level;
}

double rssi_from_distance(double d) {
    if (!(d > 0.0)) {
        throw Error(ErrorCode::NonPositiveDistance, fmt::format("distance must be positive, got {:g}", d));
    }
    return 1.0 / (d * d);
}

double distance_from_rssi(double strength) {
    if (!(strength > 0.0)) {
        throw Error(ErrorCode::NonPositiveStrength, fmt::format("strength must be positive, got {:g}", strength));
    }
    return std::sqrt(1.0 / strength);
}

double emit_noisy_sample(double true_strength, const NoiseSpec& noise, Rng& rng) {
    // Always consume one deviate so that streams line up across noise levels.
    const double g = rng.gaussian();
    return true_strength + noise.stddev(true_strength) * g;
}

AveragedStrength average_samples(std::span<const double> samples) {
    if (samples.empty()) {
        throw Error(ErrorCode::EmptyBatch, "cannot average an empty packet batch");
    }
    // Accumulate deviations from the first sample: identical samples average exactly.
    const double pivot = samples.front();
    double deviation = 0.0;
    for (double s : samples) {
        deviation += s - pivot;
    }
    const double mean = pivot + deviation / static_cast<double>(samples.size());
    if (mean < kStrengthFloor) {
        return {kStrengthFloor, true};
    }
    return {mean, false};
}

}  // namespace rssiloc
