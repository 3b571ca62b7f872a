#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <set>

#include "rssiloc/error.hpp"
#include "rssiloc/world.hpp"
#include "test_support.hpp"

namespace rssiloc {
namespace {

constexpr SourceId kRobot = 10;

WorldConfig quiet_config(double level = 0.0) {
    WorldConfig c;
    c.arena = {{-4, -3, 0}, {4, 5, 0}};
    c.noise = {level};
    c.enhanced = true;
    c.master_seed = 7;
    return c;
}

WorldState triangle_world(Vec3 robot = {0, 1, 0}, double heading = 0.0) {
    WorldState s;
    s.beacons = {{1, BeaconRole::A, {0, 2 * std::sqrt(3.0), 0}, 1},
                 {2, BeaconRole::B, {-2, 0, 0}, 2},
                 {3, BeaconRole::C, {2, 0, 0}, 3}};
    s.robots = {{kRobot, {robot, heading}}};
    return s;
}

double mean_error(const std::vector<LocalizationRecord>& recs) {
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& r : recs) {
        if (r.ok()) {
            sum += r.error;
            ++n;
        }
    }
    return sum / static_cast<double>(n);
}

ErrorCode code_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "no error thrown";
    return ErrorCode::IoFailure;
}

TEST(SampleBatches, NoiselessSamplesAreExact) {
    const WorldConfig config = quiet_config();
    const WorldState state = triangle_world({0.5, 1, 0}, 0.3);
    const auto all = sample_batches(state, kRobot, config, 0);
    ASSERT_EQ(all.size(), 3u);
    for (const BeaconBatches& bb : all) {
        const Beacon& beacon = *std::find_if(state.beacons.begin(), state.beacons.end(),
                                             [&](const Beacon& b) { return b.id == bb.beacon; });
        EXPECT_EQ(bb.batches.size(), 5u);
        for (const auto& [sensor, batch] : bb.batches) {
            const Vec3 at = body_to_world(state.robots[0].pose, config.layout().offset_or_throw(sensor));
            const double expected = rssi_from_distance(distance(at, beacon.position));
            ASSERT_EQ(batch.samples.size(), config.packet_count);
            for (double s : batch.samples) EXPECT_EQ(s, expected);
            EXPECT_EQ(batch.source, beacon.id);
            EXPECT_EQ(batch.channel, beacon.channel);
        }
    }
}

TEST(SampleBatches, ChannelsAreIsolated) {
    // Moving beacon B leaves every sample on A's channel untouched.
    const WorldConfig config = quiet_config(0.2);
    WorldState moved = triangle_world();
    moved.beacons[1].position = {-3, -1, 0};
    const auto before = sample_batches(triangle_world(), kRobot, config, 3);
    const auto after = sample_batches(moved, kRobot, config, 3);
    EXPECT_EQ(before[0].batches.at(SensorId::Front).samples, after[0].batches.at(SensorId::Front).samples);
    EXPECT_EQ(before[2].batches.at(SensorId::Back).samples, after[2].batches.at(SensorId::Back).samples);
    EXPECT_NE(before[1].batches.at(SensorId::Front).samples, after[1].batches.at(SensorId::Front).samples);
}

TEST(SampleBatches, StreamsDependOnRepetitionAndSeed) {
    WorldConfig config = quiet_config(0.1);
    const auto a = sample_batches(triangle_world(), kRobot, config, 0);
    const auto b = sample_batches(triangle_world(), kRobot, config, 1);
    EXPECT_NE(a[0].batches.at(SensorId::Center).samples, b[0].batches.at(SensorId::Center).samples);
    config.master_seed = 8;
    const auto c = sample_batches(triangle_world(), kRobot, config, 0);
    EXPECT_NE(a[0].batches.at(SensorId::Center).samples, c[0].batches.at(SensorId::Center).samples);
}

TEST(SampleBatches, UnknownRobot) {
    EXPECT_EQ(code_of([] { sample_batches(triangle_world(), 99, quiet_config(), 0); }), ErrorCode::UnknownRobot);
    EXPECT_EQ(code_of([] { localization_step(triangle_world(), 99, quiet_config(), 0); }), ErrorCode::UnknownRobot);
}

TEST(LocalizationStep, NoiselessStepIsAccurate) {
    Rng rng(301);
    const WorldConfig config = quiet_config();
    for (int i = 0; i < 100; ++i) {
        const Vec3 p{rng.uniform(-4, 4), rng.uniform(-3, 5), 0};
        const LocalizationRecord rec =
            localization_step(triangle_world(p, rng.uniform(0, 2 * std::numbers::pi)), kRobot, config, 0);
        ASSERT_TRUE(rec.ok());
        EXPECT_LT(rec.error, 1e-6) << p.x << "," << p.y;
    }
}

TEST(LocalizationStep, TruthIsInBeaconFrame) {
    const LocalizationRecord rec = localization_step(triangle_world({0, 1, 0}), kRobot, quiet_config(), 0);
    const Vec3 apex{0, 2 * std::sqrt(3.0), 0};
    // A is the origin, +x points from A to B.
    EXPECT_NEAR(rec.truth.x, distance(apex, {0, 1, 0}) * std::cos(std::numbers::pi / 6), 1e-12);
    EXPECT_NEAR(std::abs(rec.truth.y), distance(apex, {0, 1, 0}) * std::sin(std::numbers::pi / 6), 1e-12);
    EXPECT_NEAR(rec.truth.z, 0.0, 1e-12);
}

TEST(LocalizationStep, HeadingDoesNotChangeTheAnswer) {
    const WorldConfig config = quiet_config();
    const LocalizationRecord a = localization_step(triangle_world({1, 1, 0}, 0.0), kRobot, config, 0);
    const LocalizationRecord b =
        localization_step(triangle_world({1, 1, 0}, std::numbers::pi / 2), kRobot, config, 0);
    ASSERT_TRUE(a.ok() && b.ok());
    EXPECT_NEAR(a.estimate->x, b.estimate->x, 1e-6);
    EXPECT_NEAR(a.estimate->y, b.estimate->y, 1e-6);
    EXPECT_NEAR(a.estimate->z, b.estimate->z, 1e-6);
}

TEST(LocalizationStep, CollinearBeaconsGiveFailedRecord) {
    WorldState state = triangle_world();
    state.beacons[0].position = {0, 0, 0};
    const LocalizationRecord rec = localization_step(state, kRobot, quiet_config(), 0);
    EXPECT_FALSE(rec.ok());
    EXPECT_EQ(rec.failure, ErrorCode::CollinearBeacons);
    EXPECT_FALSE(rec.estimate.has_value());
    EXPECT_TRUE(std::isnan(rec.error));
}

TEST(LocalizationStep, Deterministic) {
    const WorldConfig config = quiet_config(0.3);
    EXPECT_EQ(localization_step(triangle_world(), kRobot, config, 4),
              localization_step(triangle_world(), kRobot, config, 4));
}

TEST(LocalizationStep, ErrorGrowsWithNoiseLevel) {
    const WorldState state = triangle_world({0, 1, 0});
    double low = 0.0;
    double high = 0.0;
    for (std::uint64_t rep = 0; rep < 300; ++rep) {
        low += localization_step(state, kRobot, quiet_config(0.1), rep).error;
        high += localization_step(state, kRobot, quiet_config(0.5), rep).error;
    }
    EXPECT_LT(low, high);
}

TEST(LocalizationStep, ErrorGrowsWithDistance) {
    // Both robots on the symmetry axis, 3 m and 6 m from the base vertices.
    const Vec3 near{0, std::sqrt(9.0 - 4.0), 0};
    const Vec3 far{0, std::sqrt(36.0 - 4.0), 0};
    WorldConfig config = quiet_config(0.1);
    config.arena.max.y = 6.5;
    std::vector<LocalizationRecord> a;
    std::vector<LocalizationRecord> b;
    for (std::uint64_t rep = 0; rep < 300; ++rep) {
        a.push_back(localization_step(triangle_world(near, 0.1 * static_cast<double>(rep)), kRobot, config, rep));
        b.push_back(localization_step(triangle_world(far, 0.1 * static_cast<double>(rep)), kRobot, config, rep));
    }
    EXPECT_LT(mean_error(a), mean_error(b));
}

TEST(Interference, SmallLeakageLessThanDoublesError) {
    WorldConfig config = quiet_config(0.1);
    WorldState state = triangle_world({0, 1, 0});
    state.robots.push_back({11, {{3.5, -2.5, 0}, 0.0}});
    state.robots.push_back({12, {{0, -0.5, 0}, 0.0}});
    const TrialPlan plan{state, 300, MotionMode::Static};
    const double control = mean_error(run_trial(config, plan));
    config.interference = 0.01;
    const double leaky = mean_error(run_trial(config, plan));
    EXPECT_LT(leaky, 2.0 * control);
    EXPECT_NE(leaky, control);
}

TEST(Interference, ZeroLeakageMatchesSingleRobot) {
    const WorldConfig config = quiet_config(0.1);
    WorldState crowded = triangle_world({0, 1, 0});
    crowded.robots.push_back({11, {{3.5, -2.5, 0}, 0.0}});
    EXPECT_EQ(localization_step(crowded, kRobot, config, 2), localization_step(triangle_world(), kRobot, config, 2));
}

TEST(RandomMove, StaysInArena) {
    const WorldConfig config = quiet_config();
    Rng rng(302);
    WorldState state = triangle_world();
    for (int i = 0; i < 10000; ++i) {
        state = random_move(state, kRobot, config, rng);
        ASSERT_TRUE(config.arena.contains(state.robots[0].pose.position));
        ASSERT_GE(state.robots[0].pose.heading, 0.0);
        ASSERT_LT(state.robots[0].pose.heading, 2 * std::numbers::pi);
    }
}

TEST(RandomMove, OnlyMovesTheChosenRobot) {
    const WorldConfig config = quiet_config();
    WorldState state = triangle_world();
    state.robots.push_back({11, {{1, 1, 0}, 0.5}});
    Rng rng(303);
    const WorldState next = random_move(state, 11, config, rng);
    EXPECT_EQ(next.robots[0].pose.position, state.robots[0].pose.position);
    EXPECT_EQ(next.robots[0].pose.heading, state.robots[0].pose.heading);
    for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(next.beacons[i].position, state.beacons[i].position);
    EXPECT_NE(next.robots[1].pose.position, state.robots[1].pose.position);
}

TEST(RandomMove, Reproducible) {
    const WorldConfig config = quiet_config();
    Rng a(304);
    Rng b(304);
    EXPECT_EQ(random_move(triangle_world(), kRobot, config, a).robots[0].pose.position,
              random_move(triangle_world(), kRobot, config, b).robots[0].pose.position);
}

TEST(RandomTurn, KeepsPosition) {
    Rng rng(305);
    const WorldState next = random_turn(triangle_world({1, 2, 0}), kRobot, rng);
    EXPECT_EQ(next.robots[0].pose.position, (Vec3{1, 2, 0}));
}

TEST(WorldState, Validation) {
    const WorldConfig config = quiet_config();
    EXPECT_NO_THROW(triangle_world().validate(config));

    WorldState bad = triangle_world();
    bad.beacons[2].channel = 1;
    EXPECT_EQ(code_of([&] { bad.validate(config); }), ErrorCode::InvalidScenario);

    bad = triangle_world();
    bad.beacons[2].role = BeaconRole::B;
    EXPECT_EQ(code_of([&] { bad.validate(config); }), ErrorCode::InvalidScenario);

    bad = triangle_world({9, 0, 0});
    EXPECT_EQ(code_of([&] { bad.validate(config); }), ErrorCode::InvalidScenario);

    bad = triangle_world();
    bad.robots[0].id = 2;
    EXPECT_EQ(code_of([&] { bad.validate(config); }), ErrorCode::InvalidScenario);

    bad = triangle_world();
    bad.beacons[0].position = {0, 0, 0};
    EXPECT_EQ(code_of([&] { bad.validate(config); }), ErrorCode::InvalidScenario);
}

TEST(WorldConfig, Validation) {
    EXPECT_NO_THROW(quiet_config().validate());
    WorldConfig c = quiet_config();
    c.interference = 1.5;
    EXPECT_EQ(code_of([&] { c.validate(); }), ErrorCode::InvalidConfig);
    c = quiet_config();
    c.packet_count = 0;
    EXPECT_EQ(code_of([&] { c.validate(); }), ErrorCode::InvalidConfig);
    c = quiet_config();
    c.robot_radius = -0.1;
    EXPECT_EQ(code_of([&] { c.validate(); }), ErrorCode::InvalidConfig);
    c = quiet_config();
    c.noise.level = 2.0;
    EXPECT_EQ(code_of([&] { c.validate(); }), ErrorCode::InvalidConfig);
}

TEST(RunTrial, RecordCountAndOrder) {
    WorldState state = triangle_world();
    state.robots.push_back({11, {{1, 1, 0}, 0.5}});
    const TrialPlan plan{state, 7, MotionMode::Teleport};
    const auto recs = run_trial(quiet_config(0.1), plan);
    ASSERT_EQ(recs.size(), 14u);
    for (std::size_t i = 0; i < recs.size(); ++i) {
        EXPECT_EQ(recs[i].robot, i < 7 ? kRobot : 11u);
        EXPECT_EQ(recs[i].step, i % 7);
    }
}

TEST(RunTrial, ParallelMatchesSerial) {
    for (MotionMode motion : {MotionMode::Teleport, MotionMode::Rotate, MotionMode::Static}) {
        WorldState state = triangle_world();
        state.robots.push_back({11, {{1, 1, 0}, 0.5}});
        state.robots.push_back({12, {{-1, 2, 0}, 1.5}});
        WorldConfig config = quiet_config(0.2);
        config.interference = 0.01;
        const TrialPlan plan{state, 60, motion};
        EXPECT_EQ(run_trial(config, plan), run_trial_serial(config, plan)) << to_string(motion);
    }
}

TEST(RunTrial, TeleportVisitsDistinctPositions) {
    const auto states = plan_states({triangle_world(), 20, MotionMode::Teleport}, quiet_config());
    std::set<double> xs;
    for (const auto& s : states) xs.insert(s.robots[0].pose.position.x);
    EXPECT_EQ(xs.size(), 20u);
}

TEST(RunTrial, RejectsBadPlans) {
    EXPECT_EQ(code_of([] { run_trial(quiet_config(), {triangle_world(), 0, MotionMode::Static}); }),
              ErrorCode::InvalidScenario);
    WorldState empty = triangle_world();
    empty.robots.clear();
    EXPECT_EQ(code_of([&] { run_trial(quiet_config(), {empty, 3, MotionMode::Static}); }),
              ErrorCode::InvalidScenario);
}

TEST(MotionMode, StringRoundTrip) {
    for (MotionMode m : {MotionMode::Teleport, MotionMode::Rotate, MotionMode::Static}) {
        EXPECT_EQ(motion_mode_from_string(to_string(m)), m);
    }
    EXPECT_EQ(code_of([] { motion_mode_from_string("walk"); }), ErrorCode::InvalidConfig);
}

}  // namespace
}  // namespace rssiloc
