#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rssiloc/results.hpp"
#include "rssiloc/world.hpp"

namespace rssiloc {

inline constexpr int kScenarioSchemaVersion = 1;

enum class Experiment { NoiseSweep, DistanceSweep, Swarm };
enum class SweepVariable { None, NoiseLevel, Distance };

std::string_view to_string(Experiment e);
Experiment experiment_from_string(std::string_view text);
std::string_view to_string(SweepVariable v);
SweepVariable sweep_variable_from_string(std::string_view text);

/// Isosceles beacon triangle: base centered on the world origin along x, apex
/// on +y. The apex is the origin beacon A, the base-left vertex is B and the
/// base-right vertex is C, which makes the beacon frame's z point up.
struct IsoscelesTriangle {
    double side = 4.0;  ///< length of the two equal legs
    double base = 4.0;  ///< base length; equal to side for an equilateral triangle

    double height() const;
    Vec3 apex() const { return {0.0, height(), 0.0}; }
    Vec3 base_left() const { return {-0.5 * base, 0.0, 0.0}; }
    Vec3 base_right() const { return {0.5 * base, 0.0, 0.0}; }
    /// Point on the symmetry axis at `distance` from both base vertices, on the
    /// apex side of the base.
    Vec3 axis_point(double distance) const;
};

struct BeaconPlacement {
    SourceId id = 0;
    BeaconRole role = BeaconRole::A;
    Vec3 position;
};

struct RobotPlacement {
    SourceId id = 0;
    Vec3 position;
    double heading = 0.0;
};

struct ScenarioSpec {
    int schema_version = kScenarioSchemaVersion;
    std::string name;
    Experiment experiment = Experiment::NoiseSweep;
    /// Exactly one of `triangle` and `beacons` describes the beacon layout.
    std::optional<IsoscelesTriangle> triangle;
    std::vector<BeaconPlacement> beacons;
    std::vector<RobotPlacement> robots;
    std::size_t repetitions = 10;
    MotionMode motion = MotionMode::Teleport;
    SweepVariable sweep = SweepVariable::None;
    std::vector<double> sweep_values;
    WorldConfig world;

    /// Throws Error{InvalidScenario} (or Error{InvalidConfig} for world fields).
    void validate() const;
};

/// Default scenarios: beacons on a 4 m equilateral triangle, 10%
/// relative noise, five-sensor robots, 10 repetitions.
ScenarioSpec default_scenario(Experiment experiment);

/// JSON (de)serialization. Missing optional fields take the defaults of
/// default_scenario(experiment). Throws Error{InvalidConfig} on malformed input.
ScenarioSpec parse_scenario(std::string_view json_text);
std::string dump_scenario(const ScenarioSpec& spec);

/// Beacons (ids, roles, positions, channels) and initial robots of a scenario.
WorldState initial_world(const ScenarioSpec& spec);

ResultTable run_noise_sweep(const ScenarioSpec& spec);
ResultTable run_distance_sweep(const ScenarioSpec& spec);
/// Runs the scenario with its interference setting plus a gamma = 0 control;
/// the sweep_value column carries gamma.
ResultTable run_swarm_scenario(const ScenarioSpec& spec);
ResultTable run_experiment(const ScenarioSpec& spec);

struct CalibrationAnchor {
    double level = 0.0;
    double error_m = 0.0;
};

/// Mean errors quoted for the 10% and 20% noise levels.
inline const std::vector<CalibrationAnchor> kNoiseAnchors{{0.10, 0.6}, {0.20, 1.4}};

struct CalibrationCandidate {
    NoiseMode mode = NoiseMode::Relative;
    std::vector<double> mean_errors;  ///< one per anchor
    std::vector<std::size_t> failures;
    double score = 0.0;               ///< sum of squared log-ratios to the anchors
};

struct CalibrationResult {
    std::vector<CalibrationAnchor> anchors;
    std::vector<CalibrationCandidate> candidates;
    NoiseMode chosen = NoiseMode::Relative;
};

/// Runs the noise-sweep scenario at the anchor levels under each noise
/// interpretation and picks the one closest to the anchors.
CalibrationResult calibrate(const ScenarioSpec& noise_spec);
std::string dump_calibration(const CalibrationResult& result, const ScenarioSpec& spec);

}  // namespace rssiloc
