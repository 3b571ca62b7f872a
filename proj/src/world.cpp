#include "rssiloc/world.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <numbers>
#include <set>

#include "rssiloc/solver.hpp"

namespace rssiloc {
namespace {

constexpr std::uint64_t kSampleStreamTag = 0x53414d50;  // "SAMP"
constexpr std::uint64_t kMotionStreamTag = 0x4d4f5645;  // "MOVE"

std::size_t robot_index(const WorldState& state, SourceId id) {
    for (std::size_t i = 0; i < state.robots.size(); ++i) {
        if (state.robots[i].id == id) {
            return i;
        }
    }
    throw Error(ErrorCode::UnknownRobot, fmt::format("no robot with id {}", id));
}

BeaconTriple world_triple(const WorldState& state) {
    BeaconTriple triple;
    for (const auto& b : state.beacons) {
        switch (b.role) {
            case BeaconRole::A: triple.a = b.position; break;
            case BeaconRole::B: triple.b = b.position; break;
            case BeaconRole::C: triple.c = b.position; break;
        }
    }
    return triple;
}

bool same_double(double a, double b) { return a == b || (std::isnan(a) && std::isnan(b)); }

}  // namespace

bool operator==(const LocalizationRecord& l, const LocalizationRecord& r) {
    return l.robot == r.robot && l.step == r.step && l.truth == r.truth && l.estimate == r.estimate &&
           same_double(l.error, r.error) && l.z_clamped == r.z_clamped && l.strength_clamped == r.strength_clamped &&
           l.ill_conditioned == r.ill_conditioned && l.failure == r.failure;
}

void WorldConfig::validate() const {
    auto fail = [](const std::string& msg) { throw Error(ErrorCode::InvalidConfig, msg); };
    if (!is_finite(arena.min) || !is_finite(arena.max) || !(arena.max.x > arena.min.x) ||
        !(arena.max.y > arena.min.y) || !(arena.max.z >= arena.min.z)) {
        fail("arena bounds are degenerate");
    }
    if (!(robot_radius > 0.0) || !std::isfinite(robot_radius)) {
        fail(fmt::format("robot radius must be positive, got {:g}", robot_radius));
    }
    if (packet_count < 1) {
        fail("packet count must be at least 1");
    }
    noise.validate();
    if (!(interference >= 0.0 && interference <= 1.0)) {
        fail(fmt::format("interference must be in [0, 1], got {:g}", interference));
    }
    if (std::set<Channel>(channels.begin(), channels.end()).size() != channels.size()) {
        fail("channels must be distinct");
    }
}

void WorldState::validate(const WorldConfig& config) const {
    auto fail = [](const std::string& msg) { throw Error(ErrorCode::InvalidScenario, msg); };
    if (beacons.size() != 3) {
        fail(fmt::format("need exactly three beacons, got {}", beacons.size()));
    }
    std::set<BeaconRole> roles;
    std::set<Channel> channels;
    std::set<SourceId> ids;
    for (const auto& b : beacons) {
        roles.insert(b.role);
        channels.insert(b.channel);
        ids.insert(b.id);
        if (!is_finite(b.position) || !config.arena.contains(b.position)) {
            fail(fmt::format("beacon {} lies outside the arena", b.id));
        }
    }
    if (roles.size() != 3) {
        fail("beacon roles must be exactly A, B and C");
    }
    if (channels.size() != 3) {
        fail("each beacon needs its own channel");
    }
    for (const auto& r : robots) {
        ids.insert(r.id);
        if (!is_finite(r.pose.position) || !std::isfinite(r.pose.heading) || !config.arena.contains(r.pose.position)) {
            fail(fmt::format("robot {} lies outside the arena", r.id));
        }
    }
    if (ids.size() != beacons.size() + robots.size()) {
        fail("beacon and robot ids must be unique");
    }
    const BeaconTriple triple = world_triple(*this);
    if (distance(triple.a, triple.b) <= kMinBeaconSeparation || distance(triple.a, triple.c) <= kMinBeaconSeparation ||
        distance(triple.b, triple.c) <= kMinBeaconSeparation || !(beacon_angle_sine(triple) > kCollinearSine)) {
        fail("beacons are coincident or collinear");
    }
}

const Robot& WorldState::robot(SourceId id) const { return robots[robot_index(*this, id)]; }

std::uint64_t sample_stream_seed(std::uint64_t master, SourceId robot, Channel channel, std::uint64_t repetition) {
    return derive_seed(master, {kSampleStreamTag, robot, static_cast<std::uint64_t>(static_cast<std::int64_t>(channel)),
                                repetition});
}

std::uint64_t motion_stream_seed(std::uint64_t master, SourceId robot, std::uint64_t repetition) {
    return derive_seed(master, {kMotionStreamTag, robot, repetition});
}

std::vector<BeaconBatches> sample_batches(const WorldState& state, SourceId robot_id, const WorldConfig& config,
                                          std::uint64_t repetition) {
    const Robot& robot = state.robot(robot_id);
    const SensorLayout layout = config.layout();

    std::vector<BeaconBatches> out;
    out.reserve(state.beacons.size());
    for (const Beacon& beacon : state.beacons) {
        Rng rng(sample_stream_seed(config.master_seed, robot_id, beacon.channel, repetition));
        BeaconBatches bb{beacon.id, beacon.role, beacon.channel, {}};
        for (const auto& [sensor, offset] : layout.offsets()) {
            const Vec3 at = body_to_world(robot.pose, offset);
            const double strength = rssi_from_distance(distance(at, beacon.position));

            double interferers = 0.0;
            if (config.interference > 0.0) {
                for (const Beacon& other : state.beacons) {
                    if (other.id != beacon.id) {
                        interferers += rssi_from_distance(distance(at, other.position));
                    }
                }
                for (const Robot& other : state.robots) {
                    if (other.id != robot_id) {
                        interferers += rssi_from_distance(distance(at, other.pose.position));
                    }
                }
            }
            const double leak_sigma = config.interference * interferers;

            PacketBatch batch{beacon.id, beacon.channel, {}};
            batch.samples.reserve(config.packet_count);
            for (std::size_t k = 0; k < config.packet_count; ++k) {
                double s = emit_noisy_sample(strength, config.noise, rng);
                if (config.interference > 0.0) {
                    s += leak_sigma * rng.gaussian();
                }
                batch.samples.push_back(s);
            }
            bb.batches.emplace(sensor, std::move(batch));
        }
        out.push_back(std::move(bb));
    }
    return out;
}

Vec3 true_global_position(const WorldState& state, const Vec3& p) {
    const GlobalFrame frame = build_frame(world_triple(state));
    return project(frame, p).coordinates;
}

LocalizationRecord localization_step(const WorldState& state, SourceId robot_id, const WorldConfig& config,
                                     std::uint64_t repetition) {
    const Robot& robot = state.robot(robot_id);
    LocalizationRecord rec;
    rec.robot = robot_id;
    rec.step = repetition;
    rec.error = std::numeric_limits<double>::quiet_NaN();
    try {
        rec.truth = true_global_position(state, robot.pose.position);
        const SensorLayout layout = config.layout();
        std::vector<BeaconObservation> observations;
        for (const BeaconBatches& bb : sample_batches(state, robot_id, config, repetition)) {
            const SourceEstimate est = estimate_from_batches(bb.batches, layout);
            rec.z_clamped = rec.z_clamped || est.z_clamped;
            rec.strength_clamped = rec.strength_clamped || est.strength_clamped;
            observations.push_back({bb.beacon, bb.role, est});
        }
        const GlobalPosition global = localize(observations);
        rec.estimate = global.coordinates;
        rec.ill_conditioned = global.ill_conditioned;
        rec.error = distance(rec.truth, global.coordinates);
    } catch (const Error& e) {
        if (e.code() == ErrorCode::UnknownRobot) {
            throw;
        }
        rec.failure = e.code();
        rec.estimate.reset();
    }
    return rec;
}

WorldState random_move(const WorldState& state, SourceId robot_id, const WorldConfig& config, Rng& rng) {
    WorldState next = state;
    Pose& pose = next.robots[robot_index(next, robot_id)].pose;
    const Bounds& b = config.arena;
    pose.position = {rng.uniform(b.min.x, b.max.x), rng.uniform(b.min.y, b.max.y), rng.uniform(b.min.z, b.max.z)};
    pose.heading = rng.uniform(0.0, 2.0 * std::numbers::pi);
    return next;
}

WorldState random_turn(const WorldState& state, SourceId robot_id, Rng& rng) {
    WorldState next = state;
    next.robots[robot_index(next, robot_id)].pose.heading = rng.uniform(0.0, 2.0 * std::numbers::pi);
    return next;
}

std::string_view to_string(MotionMode mode) {
    switch (mode) {
        case MotionMode::Teleport: return "teleport";
        case MotionMode::Rotate: return "rotate";
        case MotionMode::Static: return "static";
    }
    return "?";
}

MotionMode motion_mode_from_string(std::string_view text) {
    if (text == "teleport") return MotionMode::Teleport;
    if (text == "rotate") return MotionMode::Rotate;
    if (text == "static") return MotionMode::Static;
    throw Error(ErrorCode::InvalidConfig, fmt::format("unknown motion mode '{}'", text));
}

namespace {

WorldState advance(const WorldState& state, const WorldConfig& config, MotionMode motion, std::uint64_t repetition) {
    WorldState next = state;
    if (motion != MotionMode::Static) {
        for (const Robot& robot : state.robots) {
            Rng rng(motion_stream_seed(config.master_seed, robot.id, repetition));
            next = motion == MotionMode::Teleport ? random_move(next, robot.id, config, rng)
                                                  : random_turn(next, robot.id, rng);
        }
    }
    next.step = repetition + 1;
    return next;
}

void check_plan(const WorldConfig& config, const TrialPlan& plan) {
    config.validate();
    plan.initial.validate(config);
    if (plan.repetitions < 1) {
        throw Error(ErrorCode::InvalidScenario, "repetitions must be at least 1");
    }
    if (plan.initial.robots.empty()) {
        throw Error(ErrorCode::InvalidScenario, "scenario has no mobile robots");
    }
}

}  // namespace

std::vector<WorldState> plan_states(const TrialPlan& plan, const WorldConfig& config) {
    std::vector<WorldState> states;
    states.reserve(plan.repetitions);
    states.push_back(plan.initial);
    states.back().step = 0;
    for (std::size_t rep = 1; rep < plan.repetitions; ++rep) {
        states.push_back(advance(states.back(), config, plan.motion, rep - 1));
    }
    return states;
}

std::vector<LocalizationRecord> run_trial(const WorldConfig& config, const TrialPlan& plan) {
    check_plan(config, plan);
    const std::vector<WorldState> states = plan_states(plan, config);
    const std::size_t n_robots = plan.initial.robots.size();
    const std::size_t reps = plan.repetitions;
    const auto total = static_cast<std::int64_t>(n_robots * reps);

    std::vector<LocalizationRecord> records(n_robots * reps);
#pragma omp parallel for schedule(dynamic, 16)
    for (std::int64_t k = 0; k < total; ++k) {
        const std::size_t robot = static_cast<std::size_t>(k) / reps;
        const std::size_t rep = static_cast<std::size_t>(k) % reps;
        records[static_cast<std::size_t>(k)] =
            localization_step(states[rep], plan.initial.robots[robot].id, config, rep);
    }
    return records;
}

std::vector<LocalizationRecord> run_trial_serial(const WorldConfig& config, const TrialPlan& plan) {
    check_plan(config, plan);
    const std::size_t n_robots = plan.initial.robots.size();
    std::vector<LocalizationRecord> records;
    records.reserve(n_robots * plan.repetitions);

    WorldState state = plan.initial;
    state.step = 0;
    for (std::size_t rep = 0; rep < plan.repetitions; ++rep) {
        for (const Robot& robot : state.robots) {
            records.push_back(localization_step(state, robot.id, config, rep));
        }
        state = advance(state, config, plan.motion, rep);
    }
    // Steps ran repetition-major; hand them back robot-major like run_trial.
    std::vector<LocalizationRecord> ordered;
    ordered.reserve(records.size());
    for (std::size_t robot = 0; robot < n_robots; ++robot) {
        for (std::size_t rep = 0; rep < plan.repetitions; ++rep) {
            ordered.push_back(std::move(records[rep * n_robots + robot]));
        }
    }
    return ordered;
}

}  // namespace rssiloc
