// rssiloc: runs the localization experiments from a scenario file.
//
//   rssiloc noise-sweep    [--config F] [--seed N] [--trials N] [--enhanced on|off] [--out F] [--format csv|json]
//   rssiloc distance-sweep ...
//   rssiloc swarm          ...
//   rssiloc calibrate      ...   (noise-sweep scenario; writes calibration JSON)
//   rssiloc oracle-check   [--seed N] [--trials N]
//
// Exit codes: 0 success, 1 invalid configuration, 2 runtime failure.

#include <CLI11.hpp>
#include <cstdlib>
#include <fmt/format.h>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "rssiloc/experiments.hpp"
#include "rssiloc/oracle.hpp"
#include "rssiloc/results.hpp"
#include "rssiloc/solver.hpp"

namespace {

using namespace rssiloc;

constexpr int kExitOk = 0;
constexpr int kExitInvalidConfig = 1;
constexpr int kExitRuntime = 2;
constexpr const char* kSeedEnv = "RSSILOC_SEED";

struct Options {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> trials;
    std::string enhanced;
    std::string out_path;
    std::string format = "csv";
    bool dry_run = false;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::InvalidConfig, fmt::format("cannot read config '{}'", path));
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

std::uint64_t parse_seed(const std::string& text, const char* origin) {
    try {
        std::size_t used = 0;
        const unsigned long long v = std::stoull(text, &used, 10);
        if (used != text.size()) throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        throw Error(ErrorCode::InvalidConfig, fmt::format("{} is not an unsigned 64-bit seed: '{}'", origin, text));
    }
}

/// Config file < environment seed < command-line flags.
ScenarioSpec resolve(Experiment experiment, const Options& opt) {
    ScenarioSpec spec = opt.config_path.empty() ? default_scenario(experiment) : parse_scenario(read_file(opt.config_path));
    if (spec.experiment != experiment) {
        throw Error(ErrorCode::InvalidConfig, fmt::format("config describes a {} experiment, expected {}",
                                                          to_string(spec.experiment), to_string(experiment)));
    }
    if (const char* env = std::getenv(kSeedEnv); env != nullptr && *env != '\0') {
        spec.world.master_seed = parse_seed(env, kSeedEnv);
    }
    if (opt.seed) spec.world.master_seed = *opt.seed;
    if (opt.trials) spec.repetitions = *opt.trials;
    if (!opt.enhanced.empty()) spec.world.enhanced = opt.enhanced == "on";
    spec.validate();
    return spec;
}

void emit(const std::string& text, const std::string& path) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << text;
    if (!out) {
        throw Error(ErrorCode::IoFailure, fmt::format("cannot write '{}'", path));
    }
}

int run_experiment_command(Experiment experiment, const Options& opt) {
    const ScenarioSpec spec = resolve(experiment, opt);
    std::cout << dump_scenario(spec);
    if (opt.dry_run) {
        return kExitOk;
    }
    const OutputFormat format = output_format_from_string(opt.format);
    const ResultTable table = run_experiment(spec);
    if (!opt.out_path.empty()) {
        write_results(table, format, opt.out_path);
    }
    std::cout << "\n# summary\n" << format_summary(summarize(table));
    return kExitOk;
}

int run_calibrate(const Options& opt) {
    const ScenarioSpec spec = resolve(Experiment::NoiseSweep, opt);
    std::cout << dump_scenario(spec);
    if (opt.dry_run) {
        return kExitOk;
    }
    const CalibrationResult result = calibrate(spec);
    if (opt.out_path.empty()) {
        std::cout << "\n";
    }
    emit(dump_calibration(result, spec), opt.out_path);
    std::cout << fmt::format("\n# chosen noise interpretation: {}\n", to_string(result.chosen));
    return kExitOk;
}

// Noiseless checks of the closed-form solvers against the least-squares oracle
// and of the frame construction on the canonical example.
int run_oracle_check(const Options& opt) {
    std::uint64_t seed = 1;
    if (const char* env = std::getenv(kSeedEnv); env != nullptr && *env != '\0') seed = parse_seed(env, kSeedEnv);
    if (opt.seed) seed = *opt.seed;
    const std::size_t instances = opt.trials.value_or(200);
    constexpr double kTolerance = 1e-6;

    Rng rng(seed);
    double worst_basic = 0.0;
    double worst_enhanced = 0.0;
    for (std::size_t i = 0; i < instances; ++i) {
        const double radius = rng.uniform(0.05, 0.5);
        const Vec3 source{rng.uniform(-5.0, 5.0), rng.uniform(-5.0, 5.0), rng.uniform(0.0, 5.0)};
        for (bool enhanced : {false, true}) {
            const SensorLayout layout = standard_layout(radius, enhanced);
            DistanceReadings readings;
            std::vector<oracle::RangeMeasurement> ranges;
            for (const auto& [id, offset] : layout.offsets()) {
                readings[id] = distance(source, offset);
                ranges.push_back({offset, readings[id]});
            }
            const Vec3 closed = solve(readings, layout).position;
            const Vec3 brute = oracle::least_squares_source(ranges).position;
            double& worst = enhanced ? worst_enhanced : worst_basic;
            worst = std::max(worst, distance(closed, brute));
        }
    }

    const GlobalFrame frame = build_frame({{-2.0, -3.0, 0.0}, {-1.0, -3.0, 0.0}, {-2.0, -2.0, 0.0}});
    const Vec3 canonical = project(frame).coordinates;
    const double canonical_error = distance(canonical, {2.0, 3.0, 0.0});

    const bool ok = worst_basic < kTolerance && worst_enhanced < kTolerance && canonical_error < 1e-12;
    std::cout << fmt::format("instances: {}\nseed: {}\n", instances, seed);
    std::cout << fmt::format("max |basic - oracle| = {:.3e} m\n", worst_basic);
    std::cout << fmt::format("max |enhanced - oracle| = {:.3e} m\n", worst_enhanced);
    std::cout << fmt::format("canonical frame: ({:.12g}, {:.12g}, {:.12g}) error {:.3e}\n", canonical.x, canonical.y,
                             canonical.z, canonical_error);
    std::cout << (ok ? "oracle-check: PASS\n" : "oracle-check: FAIL\n");
    return ok ? kExitOk : kExitRuntime;
}

void add_common(CLI::App* cmd, Options& opt, bool results) {
    cmd->add_option("--config", opt.config_path, "scenario JSON file")->check(CLI::ExistingFile);
    cmd->add_option("--seed", opt.seed, "master seed (overrides config and $RSSILOC_SEED)");
    cmd->add_option("--trials", opt.trials, "repetitions per sweep point")->check(CLI::PositiveNumber);
    cmd->add_option("--enhanced", opt.enhanced, "five-sensor layout")->check(CLI::IsMember({"on", "off"}));
    cmd->add_option("--out", opt.out_path, results ? "result file" : "calibration JSON file (default stdout)");
    if (results) {
        cmd->add_option("--format", opt.format, "result format")->check(CLI::IsMember({"csv", "json"}));
    }
    cmd->add_flag("--dry-run", opt.dry_run, "print the resolved scenario and exit");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"RSSI beacon-frame localization experiments"};
    app.require_subcommand(1);

    Options opt;
    auto* noise = app.add_subcommand("noise-sweep", "mean error per noise level");
    auto* dist = app.add_subcommand("distance-sweep", "mean error per robot-beacon distance");
    auto* swarm = app.add_subcommand("swarm", "three robots with mutual interference");
    auto* calib = app.add_subcommand("calibrate", "pick the noise interpretation closest to the reference errors");
    auto* check = app.add_subcommand("oracle-check", "noiseless solver and frame checks");
    add_common(noise, opt, true);
    add_common(dist, opt, true);
    add_common(swarm, opt, true);
    add_common(calib, opt, false);
    check->add_option("--seed", opt.seed, "seed for the random instances");
    check->add_option("--trials", opt.trials, "number of random instances")->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitInvalidConfig;
    }

    try {
        if (noise->parsed()) return run_experiment_command(Experiment::NoiseSweep, opt);
        if (dist->parsed()) return run_experiment_command(Experiment::DistanceSweep, opt);
        if (swarm->parsed()) return run_experiment_command(Experiment::Swarm, opt);
        if (calib->parsed()) return run_calibrate(opt);
        if (check->parsed()) return run_oracle_check(opt);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        const bool config = e.code() == ErrorCode::InvalidConfig || e.code() == ErrorCode::InvalidScenario;
        return config ? kExitInvalidConfig : kExitRuntime;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitInvalidConfig;
}
