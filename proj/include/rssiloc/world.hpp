#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "rssiloc/error.hpp"
#include "rssiloc/frame.hpp"
#include "rssiloc/rng.hpp"
#include "rssiloc/sensor_layout.hpp"
#include "rssiloc/signal.hpp"
#include "rssiloc/vec3.hpp"

namespace rssiloc {

/// Axis-aligned arena. x and y extents must be positive; z may be flat.
struct Bounds {
    Vec3 min;
    Vec3 max;

    bool contains(const Vec3& p) const {
        return p.x >= min.x && p.x <= max.x && p.y >= min.y && p.y <= max.y && p.z >= min.z && p.z <= max.z;
    }
};

struct WorldConfig {
    Bounds arena{{-10.0, -10.0, 0.0}, {10.0, 10.0, 0.0}};
    double robot_radius = 0.2;
    std::size_t packet_count = kDefaultPacketCount;
    NoiseSpec noise;
    std::vector<Channel> channels{1, 2, 3};  ///< one per beacon, in beacon order
    double interference = 0.0;               ///< leakage fraction gamma in [0, 1]
    bool enhanced = false;
    std::uint64_t master_seed = 0;

    /// Throws Error{InvalidConfig} on any violated field invariant.
    void validate() const;
    SensorLayout layout() const { return standard_layout(robot_radius, enhanced); }
};

struct Beacon {
    SourceId id = 0;
    BeaconRole role = BeaconRole::A;
    Vec3 position;
    Channel channel = 0;
};

/// Heading is the yaw of the body +x axis from the world +x axis, radians.
struct Pose {
    Vec3 position;
    double heading = 0.0;
};

struct Robot {
    SourceId id = 0;
    Pose pose;
};

struct WorldState {
    std::vector<Beacon> beacons;
    std::vector<Robot> robots;
    std::uint64_t step = 0;

    /// Throws Error{InvalidScenario} unless there is one beacon per role on
    /// distinct channels, beacons are non-collinear, ids are unique and every
    /// position lies inside the arena.
    void validate(const WorldConfig& config) const;
    const Robot& robot(SourceId id) const;
};

/// World position of a body-frame offset for a robot at `pose`.
inline Vec3 body_to_world(const Pose& pose, const Vec3& offset) { return pose.position + rotate_z(offset, pose.heading); }

/// Every sensor's batch for one beacon, gathered on that beacon's channel.
struct BeaconBatches {
    SourceId beacon = 0;
    BeaconRole role = BeaconRole::A;
    Channel channel = 0;
    std::map<SensorId, PacketBatch> batches;
};

/// Identifies the per-(robot, channel, repetition) noise substream and the
/// per-(robot, repetition) motion substream.
std::uint64_t sample_stream_seed(std::uint64_t master, SourceId robot, Channel channel, std::uint64_t repetition);
std::uint64_t motion_stream_seed(std::uint64_t master, SourceId robot, std::uint64_t repetition);

/// Packet batches for every beacon as seen by `robot_id` at its current pose.
/// With interference > 0 each sample also receives N(0, gamma * sum of the other
/// transmitters' strengths at that sensor). Throws Error{UnknownRobot}.
std::vector<BeaconBatches> sample_batches(const WorldState& state, SourceId robot_id, const WorldConfig& config,
                                          std::uint64_t repetition);

struct LocalizationRecord {
    SourceId robot = 0;
    std::uint64_t step = 0;
    Vec3 truth;                      ///< true position in the beacon frame
    std::optional<Vec3> estimate;    ///< empty when the step failed
    double error = 0.0;              ///< |truth - estimate|, NaN on failure
    bool z_clamped = false;
    bool strength_clamped = false;
    bool ill_conditioned = false;
    std::optional<ErrorCode> failure;

    bool ok() const { return !failure.has_value(); }
    friend bool operator==(const LocalizationRecord&, const LocalizationRecord&);
};

/// Position of `p` in the exact beacon frame of `state`.
Vec3 true_global_position(const WorldState& state, const Vec3& p);

/// Samples, solves each beacon, localizes and scores one robot. Solver and
/// frame failures become a failed record; only Error{UnknownRobot} escapes.
LocalizationRecord localization_step(const WorldState& state, SourceId robot_id, const WorldConfig& config,
                                     std::uint64_t repetition);

/// Teleports the robot to a uniform point in the arena with a uniform heading.
WorldState random_move(const WorldState& state, SourceId robot_id, const WorldConfig& config, Rng& rng);

/// Keeps the robot's position and draws a new uniform heading.
WorldState random_turn(const WorldState& state, SourceId robot_id, Rng& rng);

enum class MotionMode { Teleport, Rotate, Static };

std::string_view to_string(MotionMode mode);
MotionMode motion_mode_from_string(std::string_view text);

struct TrialPlan {
    WorldState initial;
    std::size_t repetitions = 10;
    MotionMode motion = MotionMode::Teleport;
};

/// World state at the start of each repetition: every robot moves after it
/// has been localized, drawing from its own motion substream.
std::vector<WorldState> plan_states(const TrialPlan& plan, const WorldConfig& config);

/// Runs every (robot, repetition) localization step. Steps execute in parallel
/// with OpenMP; records come back ordered by (robot order, repetition).
/// Throws Error{InvalidScenario} or Error{InvalidConfig} on invalid input.
std::vector<LocalizationRecord> run_trial(const WorldConfig& config, const TrialPlan& plan);

/// Single-threaded reference for run_trial, kept for equivalence tests and benchmarks.
std::vector<LocalizationRecord> run_trial_serial(const WorldConfig& config, const TrialPlan& plan);

}  // namespace rssiloc
