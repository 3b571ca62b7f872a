// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits nonzero if any criterion fails.

#include <fmt/format.h>

#include <chrono>
#include <cmath>
#include <functional>
#include <map>
#include <numbers>
#include <string>
#include <vector>

#include "rssiloc/experiments.hpp"
#include "rssiloc/oracle.hpp"
#include "rssiloc/results.hpp"
#include "rssiloc/solver.hpp"
#include "test_support.hpp"

namespace {

using namespace rssiloc;

struct Outcome {
    bool pass = false;
    std::string detail;
};

// Mean error per (sweep value, robot) over successful rows; failures count as a
// failed criterion through `failures`.
struct GroupStats {
    std::map<std::pair<double, SourceId>, double> mean;
    std::size_t failures = 0;
};

GroupStats group_means(const ResultTable& table) {
    GroupStats out;
    std::map<std::pair<double, SourceId>, std::pair<double, std::size_t>> acc;
    for (const ResultRow& row : table) {
        if (std::isnan(row.error_m)) {
            ++out.failures;
            continue;
        }
        auto& a = acc[{row.sweep_value, row.robot_id}];
        a.first += row.error_m;
        ++a.second;
    }
    for (const auto& [key, a] : acc) out.mean[key] = a.first / static_cast<double>(a.second);
    return out;
}

WorldState random_world(Rng& rng) {
    WorldState s;
    BeaconTriple t;
    do {
        t = {{rng.uniform(-6, 6), rng.uniform(-6, 6), rng.uniform(0, 2)},
             {rng.uniform(-6, 6), rng.uniform(-6, 6), rng.uniform(0, 2)},
             {rng.uniform(-6, 6), rng.uniform(-6, 6), rng.uniform(0, 2)}};
    } while (beacon_angle_sine(t) < 0.05 || distance(t.a, t.b) < 0.5 || distance(t.a, t.c) < 0.5 ||
             distance(t.b, t.c) < 0.5);
    s.beacons = {{1, BeaconRole::A, t.a, 1}, {2, BeaconRole::B, t.b, 2}, {3, BeaconRole::C, t.c, 3}};
    Vec3 robot;
    do {
        robot = {rng.uniform(-8, 8), rng.uniform(-8, 8), 0};
    } while (distance(robot, t.a) < 1.0 || distance(robot, t.b) < 1.0 || distance(robot, t.c) < 1.0);
    s.robots = {{10, {robot, rng.uniform(0, 2 * std::numbers::pi)}}};
    return s;
}

Outcome noiseless_exactness() {
    Rng rng(1001);
    double worst = 0.0;
    std::size_t failures = 0;
    for (int i = 0; i < 100; ++i) {
        const WorldState state = random_world(rng);
        for (bool enhanced : {false, true}) {
            WorldConfig config;
            config.arena = {{-10, -10, 0}, {10, 10, 2}};
            config.noise = {0.0};
            config.enhanced = enhanced;
            const LocalizationRecord rec = localization_step(state, 10, config, 0);
            if (!rec.ok()) {
                ++failures;
                continue;
            }
            worst = std::max(worst, rec.error);
        }
    }
    return {failures == 0 && worst < 1e-6, fmt::format("max error {:.3e} m, {} failed steps", worst, failures)};
}

Outcome oracle_equivalence() {
    Rng rng(1002);
    double worst = 0.0;
    for (int i = 0; i < 200; ++i) {
        const double radius = rng.uniform(0.05, 0.5);
        const Vec3 source{rng.uniform(-5, 5), rng.uniform(-5, 5), rng.uniform(0, 5)};
        for (bool enhanced : {false, true}) {
            const SensorLayout layout = standard_layout(radius, enhanced);
            const DistanceReadings readings = testing::forward_distances(source, layout);
            const Vec3 closed = enhanced ? solve_enhanced(readings, layout).position : solve_basic(readings, layout).position;
            const Vec3 brute = oracle::least_squares_source(testing::as_ranges(readings, layout)).position;
            worst = std::max(worst, distance(closed, brute));
        }
    }
    return {worst < 1e-6, fmt::format("max |closed form - oracle| {:.3e} m", worst)};
}

Outcome frame_round_trip() {
    Rng rng(1003);
    double worst = 0.0;
    for (int i = 0; i < 500; ++i) {
        const Vec3 a{0, 0, 0};
        const Vec3 b{rng.uniform(0.5, 6), 0, 0};
        const Vec3 c{rng.uniform(-4, 6), rng.uniform(0.5, 6), 0};
        const Vec3 robot = testing::random_vec(rng, -8, 8);
        const testing::Rotation rot = testing::random_rotation(rng);
        auto body = [&](const Vec3& w) { return rot.apply(w - robot); };
        const GlobalFrame f = build_frame({body(a), body(b), body(c)});
        worst = std::max(worst, distance(project(f).coordinates, robot));
    }
    return {worst < 1e-9, fmt::format("max error {:.3e} m over 500 transforms", worst)};
}

Outcome noise_anchors() {
    ScenarioSpec spec = default_scenario(Experiment::NoiseSweep);
    spec.repetitions = 300;
    const CalibrationResult cal = calibrate(spec);
    spec.world.noise.mode = cal.chosen;
    const GroupStats stats = group_means(run_noise_sweep(spec));
    std::vector<double> means;
    for (const auto& [key, m] : stats.mean) means.push_back(m);
    bool increasing = means.size() == 5;
    for (std::size_t i = 1; i < means.size(); ++i) increasing = increasing && means[i] > means[i - 1];
    const bool ok = increasing && stats.failures == 0 && means[0] >= 0.3 && means[0] <= 1.2 && means[1] >= 0.7 &&
                    means[1] <= 2.8;
    return {ok, fmt::format("mode {}, means {:.3f} {:.3f} {:.3f} {:.3f} {:.3f} m, {} failed", to_string(cal.chosen),
                            means[0], means[1], means[2], means[3], means[4], stats.failures)};
}

Outcome distance_shape() {
    ScenarioSpec spec = default_scenario(Experiment::DistanceSweep);
    spec.repetitions = 100;
    const GroupStats stats = group_means(run_distance_sweep(spec));
    std::map<double, double> by_distance;
    for (const auto& [key, m] : stats.mean) by_distance[key.first] = m;
    const double nearest = by_distance.begin()->second;
    double worst = 0.0;
    for (const auto& [d, m] : by_distance) {
        if (d <= 6.0) worst = std::max(worst, m);
    }
    const bool ok = stats.failures == 0 && nearest < 0.4 && worst < 1.0 && by_distance.at(6.0) > by_distance.at(3.0);
    return {ok, fmt::format("nearest ({:g} m) {:.3f} m, max {:.3f} m, 3 m {:.3f} m, 6 m {:.3f} m, {} failed",
                            by_distance.begin()->first, nearest, worst, by_distance.at(3.0), by_distance.at(6.0),
                            stats.failures)};
}

Outcome swarm_robustness() {
    ScenarioSpec spec = default_scenario(Experiment::Swarm);
    spec.repetitions = 300;
    const double gamma = spec.world.interference;
    const GroupStats stats = group_means(run_swarm_scenario(spec));
    const WorldState world = initial_world(spec);

    bool ok = stats.failures == 0;
    SourceId closest = 0;
    double closest_range = std::numeric_limits<double>::infinity();
    std::string detail;
    for (const RobotPlacement& robot : spec.robots) {
        double range = 0.0;
        for (const Beacon& b : world.beacons) range += distance(robot.position, b.position) / 3.0;
        if (range < closest_range) {
            closest_range = range;
            closest = robot.id;
        }
        const double control = stats.mean.at({0.0, robot.id});
        const double leaky = stats.mean.at({gamma, robot.id});
        ok = ok && leaky <= 2.0 * control;
        detail += fmt::format("robot {} {:.3f}/{:.3f} m; ", robot.id, leaky, control);
    }
    for (const RobotPlacement& robot : spec.robots) {
        ok = ok && stats.mean.at({gamma, closest}) <= stats.mean.at({gamma, robot.id});
    }
    detail += fmt::format("closest robot {}", closest);
    return {ok, detail};
}

std::string full_suite_csv() {
    std::string out;
    for (Experiment e : {Experiment::NoiseSweep, Experiment::DistanceSweep, Experiment::Swarm}) {
        out += format_results(run_experiment(default_scenario(e)), OutputFormat::Csv);
    }
    return out;
}

Outcome determinism() {
    const std::string first = full_suite_csv();
    const std::string second = full_suite_csv();
    return {first == second, fmt::format("{} bytes per run", first.size())};
}

Outcome enhanced_vs_basic() {
    // Robots on a 3 m ring around the beacon triangle's centroid, random bearing and heading.
    const ScenarioSpec spec = default_scenario(Experiment::NoiseSweep);
    const WorldState base = initial_world(spec);
    Vec3 centroid;
    for (const Beacon& b : base.beacons) centroid = centroid + b.position * (1.0 / 3.0);

    Rng rng(1008);
    constexpr int kTrials = 500;
    double sum_basic = 0.0;
    double sum_enhanced = 0.0;
    std::size_t failures = 0;
    for (int i = 0; i < kTrials; ++i) {
        const double bearing = rng.uniform(0, 2 * std::numbers::pi);
        WorldState state = base;
        state.robots = {{10, {centroid + Vec3{3 * std::cos(bearing), 3 * std::sin(bearing), 0},
                              rng.uniform(0, 2 * std::numbers::pi)}}};
        WorldConfig config = spec.world;
        config.noise = {0.1, NoiseMode::Relative};
        config.enhanced = false;
        const LocalizationRecord basic = localization_step(state, 10, config, static_cast<std::uint64_t>(i));
        config.enhanced = true;
        const LocalizationRecord enhanced = localization_step(state, 10, config, static_cast<std::uint64_t>(i));
        if (!basic.ok() || !enhanced.ok()) {
            ++failures;
            continue;
        }
        sum_basic += basic.error;
        sum_enhanced += enhanced.error;
    }
    const double n = static_cast<double>(kTrials - failures);
    return {failures == 0 && sum_enhanced <= sum_basic,
            fmt::format("enhanced {:.3f} m, basic {:.3f} m over {} trials", sum_enhanced / n, sum_basic / n, kTrials)};
}

}  // namespace

int main() {
    struct Criterion {
        int id;
        const char* name;
        double budget_s;
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> criteria{
        {1, "noiseless exactness", 5.0, noiseless_exactness},
        {2, "solver-oracle equivalence", 30.0, oracle_equivalence},
        {3, "frame round-trip", 0.0, frame_round_trip},
        {4, "noise anchors after calibration", 0.0, noise_anchors},
        {5, "distance sweep shape", 120.0, distance_shape},
        {6, "swarm interference robustness", 0.0, swarm_robustness},
        {7, "determinism", 0.0, determinism},
        {8, "enhanced no worse than basic", 0.0, enhanced_vs_basic},
    };

    int failed = 0;
    for (const Criterion& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome outcome;
        try {
            outcome = c.run();
        } catch (const std::exception& e) {
            outcome = {false, fmt::format("exception: {}", e.what())};
        }
        const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (c.budget_s > 0.0 && seconds >= c.budget_s) {
            outcome.pass = false;
            outcome.detail += fmt::format("; over the {:g} s budget", c.budget_s);
        }
        failed += outcome.pass ? 0 : 1;
        fmt::print("{} criterion {}: {} ({}; {:.2f} s)\n", outcome.pass ? "PASS" : "FAIL", c.id, c.name, outcome.detail,
                   seconds);
    }
    return failed == 0 ? 0 : 1;
}
