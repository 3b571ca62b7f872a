#include "rssiloc/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <json.hpp>
#include <limits>

namespace rssiloc {

using nlohmann::json;

std::string_view to_string(Experiment e) {
    switch (e) {
        case Experiment::NoiseSweep: return "noise-sweep";
        case Experiment::DistanceSweep: return "distance-sweep";
        case Experiment::Swarm: return "swarm";
    }
    return "?";
}

Experiment experiment_from_string(std::string_view text) {
    if (text == "noise-sweep") return Experiment::NoiseSweep;
    if (text == "distance-sweep") return Experiment::DistanceSweep;
    if (text == "swarm") return Experiment::Swarm;
    throw Error(ErrorCode::InvalidConfig, fmt::format("unknown experiment '{}'", text));
}

std::string_view to_string(SweepVariable v) {
    switch (v) {
        case SweepVariable::None: return "none";
        case SweepVariable::NoiseLevel: return "noise-level";
        case SweepVariable::Distance: return "distance";
    }
    return "?";
}

SweepVariable sweep_variable_from_string(std::string_view text) {
    if (text == "none") return SweepVariable::None;
    if (text == "noise-level") return SweepVariable::NoiseLevel;
    if (text == "distance") return SweepVariable::Distance;
    throw Error(ErrorCode::InvalidConfig, fmt::format("unknown sweep variable '{}'", text));
}

double IsoscelesTriangle::height() const { return std::sqrt(side * side - 0.25 * base * base); }

Vec3 IsoscelesTriangle::axis_point(double distance) const {
    const double half = 0.5 * base;
    return {0.0, std::sqrt(std::max(0.0, distance * distance - half * half)), 0.0};
}

// ---------------------------------------------------------------------------
// Defaults

ScenarioSpec default_scenario(Experiment experiment) {
    ScenarioSpec spec;
    spec.experiment = experiment;
    spec.name = std::string(to_string(experiment));
    spec.triangle = IsoscelesTriangle{4.0, 4.0};
    spec.repetitions = 10;
    spec.world.robot_radius = 0.2;
    spec.world.packet_count = kDefaultPacketCount;
    spec.world.noise = {0.1, NoiseMode::Relative};
    spec.world.channels = {1, 2, 3};
    spec.world.interference = 0.0;
    spec.world.enhanced = true;
    spec.world.master_seed = 1;
    // 8 m x 8 m arena roughly centered on the triangle's centroid.
    spec.world.arena = {{-4.0, -3.0, 0.0}, {4.0, 5.0, 0.0}};

    switch (experiment) {
        case Experiment::NoiseSweep:
            spec.robots = {{10, {0.0, 1.0, 0.0}, 0.0}};
            spec.motion = MotionMode::Teleport;
            spec.sweep = SweepVariable::NoiseLevel;
            spec.sweep_values = {0.1, 0.2, 0.3, 0.4, 0.5};
            break;
        case Experiment::DistanceSweep:
            spec.robots = {{10, {0.0, 0.0, 0.0}, 0.0}};
            spec.motion = MotionMode::Rotate;
            spec.sweep = SweepVariable::Distance;
            // Steps around 4 m skip the apex beacon itself.
            spec.sweep_values = {2.0, 2.5, 3.0, 3.5, 3.75, 4.25, 4.5, 5.0, 5.5, 6.0};
            spec.world.arena = {{-4.0, -3.0, 0.0}, {4.0, 6.5, 0.0}};
            break;
        case Experiment::Swarm:
            // Far from every beacon, below the base, at the centroid.
            spec.robots = {
                {11, {3.5, -2.5, 0.0}, 0.0},
                {12, {0.0, -1.5, 0.0}, 0.0},
                {13, {0.0, 1.15, 0.0}, 0.0},
            };
            spec.motion = MotionMode::Static;
            spec.sweep = SweepVariable::None;
            spec.world.interference = 0.01;
            break;
    }
    return spec;
}

// ---------------------------------------------------------------------------
// Validation

void ScenarioSpec::validate() const {
    auto fail = [](const std::string& msg) { throw Error(ErrorCode::InvalidScenario, msg); };
    if (schema_version != kScenarioSchemaVersion) {
        throw Error(ErrorCode::InvalidConfig, fmt::format("unsupported schema_version {}", schema_version));
    }
    if (name.empty() || name.find_first_of(",\"\n\r") != std::string::npos) {
        fail("scenario name must be non-empty and free of commas, quotes and newlines");
    }
    world.validate();
    if (world.channels.size() != 3) {
        fail("three beacon channels are required");
    }
    if (triangle.has_value() == !beacons.empty()) {
        fail("give either an isosceles triangle or explicit beacons, not both");
    }
    if (triangle) {
        if (!(triangle->side > 0.0) || !(triangle->base > 0.0) || !(triangle->base < 2.0 * triangle->side)) {
            fail("isosceles triangle needs side > 0 and 0 < base < 2 * side");
        }
    } else if (beacons.size() != 3) {
        fail("exactly three beacons are required");
    }
    if (repetitions < 1) {
        fail("repetitions must be at least 1");
    }
    if (robots.empty()) {
        fail("scenario has no robots");
    }
    if (sweep != SweepVariable::None) {
        if (sweep_values.empty()) {
            fail("sweep values must not be empty");
        }
        if (!std::is_sorted(sweep_values.begin(), sweep_values.end(), std::less_equal<>{})) {
            fail("sweep values must be strictly increasing");
        }
        for (double v : sweep_values) {
            if (!std::isfinite(v)) {
                fail("sweep values must be finite");
            }
        }
    }

    switch (experiment) {
        case Experiment::NoiseSweep:
            if (sweep != SweepVariable::NoiseLevel) {
                fail("noise-sweep needs sweep variable 'noise-level'");
            }
            if (sweep_values.front() < 0.0 || sweep_values.back() > 1.0) {
                fail("noise levels must lie in [0, 1]");
            }
            break;
        case Experiment::DistanceSweep: {
            if (sweep != SweepVariable::Distance) {
                fail("distance-sweep needs sweep variable 'distance'");
            }
            if (!triangle) {
                fail("distance-sweep needs the isosceles triangle generator");
            }
            if (robots.size() != 1) {
                fail("distance-sweep places exactly one robot");
            }
            for (double d : sweep_values) {
                if (d < 0.5 * triangle->base) {
                    fail(fmt::format("distance {:g} is shorter than half the base", d));
                }
                if (std::abs(d - triangle->side) < 1e-6) {
                    fail(fmt::format("distance {:g} puts the robot on the apex beacon", d));
                }
            }
            break;
        }
        case Experiment::Swarm:
            if (sweep != SweepVariable::None) {
                fail("swarm scenario takes no sweep");
            }
            if (!(world.interference > 0.0)) {
                fail("swarm scenario needs interference > 0");
            }
            break;
    }

    WorldState state = initial_world(*this);
    if (experiment == Experiment::DistanceSweep) {
        for (double d : sweep_values) {
            state.robots.front().pose.position = triangle->axis_point(d);
            state.validate(world);
        }
    } else {
        state.validate(world);
    }
}

WorldState initial_world(const ScenarioSpec& spec) {
    WorldState state;
    if (spec.triangle) {
        const auto& t = *spec.triangle;
        state.beacons = {
            {1, BeaconRole::A, t.apex(), 0},
            {2, BeaconRole::B, t.base_left(), 0},
            {3, BeaconRole::C, t.base_right(), 0},
        };
    } else {
        for (const auto& b : spec.beacons) {
            state.beacons.push_back({b.id, b.role, b.position, 0});
        }
    }
    for (std::size_t i = 0; i < state.beacons.size() && i < spec.world.channels.size(); ++i) {
        state.beacons[i].channel = spec.world.channels[i];
    }
    for (const auto& r : spec.robots) {
        state.robots.push_back({r.id, {r.position, r.heading}});
    }
    return state;
}

// ---------------------------------------------------------------------------
// JSON

namespace {

json vec_to_json(const Vec3& v) { return json::array({v.x, v.y, v.z}); }

Vec3 vec_from_json(const json& j) {
    if (!j.is_array() || j.size() != 3) {
        throw Error(ErrorCode::InvalidConfig, "positions are arrays of three numbers");
    }
    return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

template <typename T>
void read_opt(const json& obj, const char* key, T& out) {
    if (obj.contains(key)) {
        out = obj.at(key).get<T>();
    }
}

void check_keys(const json& obj, std::initializer_list<std::string_view> allowed, std::string_view where) {
    if (!obj.is_object()) {
        throw Error(ErrorCode::InvalidConfig, fmt::format("'{}' must be an object", where));
    }
    for (const auto& [key, value] : obj.items()) {
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
            throw Error(ErrorCode::InvalidConfig, fmt::format("unknown key '{}' in {}", key, where));
        }
    }
}

}  // namespace

ScenarioSpec parse_scenario(std::string_view json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::exception& e) {
        throw Error(ErrorCode::InvalidConfig, fmt::format("scenario is not valid JSON: {}", e.what()));
    }
    try {
        check_keys(doc,
                   {"schema_version", "name", "experiment", "beacons", "robots", "repetitions", "motion", "sweep",
                    "world"},
                   "scenario");
        if (!doc.contains("experiment")) {
            throw Error(ErrorCode::InvalidConfig, "scenario needs an 'experiment'");
        }
        ScenarioSpec spec = default_scenario(experiment_from_string(doc.at("experiment").get<std::string>()));
        spec.schema_version = doc.value("schema_version", 0);
        if (spec.schema_version != kScenarioSchemaVersion) {
            throw Error(ErrorCode::InvalidConfig,
                        fmt::format("unsupported or missing schema_version {}", spec.schema_version));
        }
        read_opt(doc, "name", spec.name);
        read_opt(doc, "repetitions", spec.repetitions);
        if (doc.contains("motion")) {
            spec.motion = motion_mode_from_string(doc.at("motion").get<std::string>());
        }

        if (doc.contains("beacons")) {
            const json& b = doc.at("beacons");
            check_keys(b, {"isosceles", "explicit"}, "beacons");
            if (b.contains("isosceles") == b.contains("explicit")) {
                throw Error(ErrorCode::InvalidConfig, "beacons need exactly one of 'isosceles' and 'explicit'");
            }
            if (b.contains("isosceles")) {
                const json& t = b.at("isosceles");
                check_keys(t, {"side", "base"}, "isosceles");
                IsoscelesTriangle tri;
                tri.side = t.at("side").get<double>();
                tri.base = t.value("base", tri.side);
                spec.triangle = tri;
                spec.beacons.clear();
            } else {
                spec.triangle.reset();
                spec.beacons.clear();
                for (const json& e : b.at("explicit")) {
                    check_keys(e, {"id", "role", "position"}, "beacon");
                    spec.beacons.push_back({e.at("id").get<SourceId>(),
                                            beacon_role_from_string(e.at("role").get<std::string>()),
                                            vec_from_json(e.at("position"))});
                }
            }
        }
        if (doc.contains("robots")) {
            spec.robots.clear();
            for (const json& e : doc.at("robots")) {
                check_keys(e, {"id", "position", "heading"}, "robot");
                spec.robots.push_back(
                    {e.at("id").get<SourceId>(), vec_from_json(e.at("position")), e.value("heading", 0.0)});
            }
        }
        if (doc.contains("sweep")) {
            const json& s = doc.at("sweep");
            check_keys(s, {"variable", "values"}, "sweep");
            spec.sweep = sweep_variable_from_string(s.at("variable").get<std::string>());
            spec.sweep_values = s.value("values", std::vector<double>{});
        }
        if (doc.contains("world")) {
            const json& w = doc.at("world");
            check_keys(w,
                       {"arena", "robot_radius", "packet_count", "noise_level", "noise_mode", "channels",
                        "interference", "enhanced", "seed"},
                       "world");
            WorldConfig& c = spec.world;
            if (w.contains("arena")) {
                check_keys(w.at("arena"), {"min", "max"}, "arena");
                c.arena = {vec_from_json(w.at("arena").at("min")), vec_from_json(w.at("arena").at("max"))};
            }
            read_opt(w, "robot_radius", c.robot_radius);
            read_opt(w, "packet_count", c.packet_count);
            read_opt(w, "noise_level", c.noise.level);
            if (w.contains("noise_mode")) {
                c.noise.mode = noise_mode_from_string(w.at("noise_mode").get<std::string>());
            }
            read_opt(w, "channels", c.channels);
            read_opt(w, "interference", c.interference);
            read_opt(w, "enhanced", c.enhanced);
            read_opt(w, "seed", c.master_seed);
        }
        return spec;
    } catch (const json::exception& e) {
        throw Error(ErrorCode::InvalidConfig, fmt::format("malformed scenario: {}", e.what()));
    }
}

std::string dump_scenario(const ScenarioSpec& spec) {
    json doc;
    doc["schema_version"] = spec.schema_version;
    doc["name"] = spec.name;
    doc["experiment"] = std::string(to_string(spec.experiment));
    if (spec.triangle) {
        doc["beacons"] = {{"isosceles", {{"side", spec.triangle->side}, {"base", spec.triangle->base}}}};
    } else {
        json list = json::array();
        for (const auto& b : spec.beacons) {
            list.push_back({{"id", b.id}, {"role", std::string(to_string(b.role))}, {"position", vec_to_json(b.position)}});
        }
        doc["beacons"] = {{"explicit", list}};
    }
    json robots = json::array();
    for (const auto& r : spec.robots) {
        robots.push_back({{"id", r.id}, {"position", vec_to_json(r.position)}, {"heading", r.heading}});
    }
    doc["robots"] = robots;
    doc["repetitions"] = spec.repetitions;
    doc["motion"] = std::string(to_string(spec.motion));
    doc["sweep"] = {{"variable", std::string(to_string(spec.sweep))}, {"values", spec.sweep_values}};
    const WorldConfig& c = spec.world;
    doc["world"] = {
        {"arena", {{"min", vec_to_json(c.arena.min)}, {"max", vec_to_json(c.arena.max)}}},
        {"robot_radius", c.robot_radius},
        {"packet_count", c.packet_count},
        {"noise_level", c.noise.level},
        {"noise_mode", std::string(to_string(c.noise.mode))},
        {"channels", c.channels},
        {"interference", c.interference},
        {"enhanced", c.enhanced},
        {"seed", c.master_seed},
    };
    return doc.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// Experiments

namespace {

void expect(const ScenarioSpec& spec, Experiment e) {
    spec.validate();
    if (spec.experiment != e) {
        throw Error(ErrorCode::InvalidScenario,
                    fmt::format("scenario is a {} experiment, not {}", to_string(spec.experiment), to_string(e)));
    }
}

void append(ResultTable& table, const std::vector<LocalizationRecord>& records, const ScenarioSpec& spec,
            double sweep_value) {
    for (const auto& rec : records) {
        table.push_back(to_row(rec, spec.name, sweep_value));
    }
}

}  // namespace

ResultTable run_noise_sweep(const ScenarioSpec& spec) {
    expect(spec, Experiment::NoiseSweep);
    const TrialPlan plan{initial_world(spec), spec.repetitions, spec.motion};
    ResultTable table;
    for (double level : spec.sweep_values) {
        WorldConfig config = spec.world;
        config.noise.level = level;
        append(table, run_trial(config, plan), spec, level);
    }
    sort_rows(table);
    return table;
}

ResultTable run_distance_sweep(const ScenarioSpec& spec) {
    expect(spec, Experiment::DistanceSweep);
    ResultTable table;
    for (double d : spec.sweep_values) {
        TrialPlan plan{initial_world(spec), spec.repetitions, spec.motion};
        plan.initial.robots.front().pose.position = spec.triangle->axis_point(d);
        append(table, run_trial(spec.world, plan), spec, d);
    }
    sort_rows(table);
    return table;
}

ResultTable run_swarm_scenario(const ScenarioSpec& spec) {
    expect(spec, Experiment::Swarm);
    const TrialPlan plan{initial_world(spec), spec.repetitions, spec.motion};
    ResultTable table;
    WorldConfig control = spec.world;
    control.interference = 0.0;
    append(table, run_trial(control, plan), spec, 0.0);
    append(table, run_trial(spec.world, plan), spec, spec.world.interference);
    sort_rows(table);
    return table;
}

ResultTable run_experiment(const ScenarioSpec& spec) {
    switch (spec.experiment) {
        case Experiment::NoiseSweep: return run_noise_sweep(spec);
        case Experiment::DistanceSweep: return run_distance_sweep(spec);
        case Experiment::Swarm: return run_swarm_scenario(spec);
    }
    throw Error(ErrorCode::InvalidScenario, "unknown experiment");
}

// ---------------------------------------------------------------------------
// Calibration

CalibrationResult calibrate(const ScenarioSpec& noise_spec) {
    expect(noise_spec, Experiment::NoiseSweep);
    CalibrationResult result;
    result.anchors = kNoiseAnchors;
    double best = std::numeric_limits<double>::infinity();
    for (NoiseMode mode : {NoiseMode::Relative, NoiseMode::Absolute}) {
        CalibrationCandidate cand;
        cand.mode = mode;
        for (const auto& anchor : result.anchors) {
            ScenarioSpec spec = noise_spec;
            spec.world.noise.mode = mode;
            spec.sweep_values = {anchor.level};
            const ResultTable table = run_noise_sweep(spec);
            const double mean = mean_error(table);
            cand.mean_errors.push_back(mean);
            cand.failures.push_back(static_cast<std::size_t>(
                std::count_if(table.begin(), table.end(), [](const ResultRow& r) { return std::isnan(r.error_m); })));
            const double log_ratio = std::log(mean / anchor.error_m);
            cand.score += std::isfinite(log_ratio) ? log_ratio * log_ratio : std::numeric_limits<double>::infinity();
        }
        if (cand.score < best) {
            best = cand.score;
            result.chosen = mode;
        }
        result.candidates.push_back(std::move(cand));
    }
    return result;
}

std::string dump_calibration(const CalibrationResult& result, const ScenarioSpec& spec) {
    json doc;
    doc["schema_version"] = kScenarioSchemaVersion;
    doc["scenario"] = spec.name;
    doc["repetitions"] = spec.repetitions;
    doc["seed"] = spec.world.master_seed;
    json anchors = json::array();
    for (const auto& a : result.anchors) {
        anchors.push_back({{"noise_level", a.level}, {"error_m", a.error_m}});
    }
    doc["anchors"] = anchors;
    json cands = json::array();
    for (const auto& c : result.candidates) {
        json errs = json::array();
        for (std::size_t i = 0; i < c.mean_errors.size(); ++i) {
            const double e = c.mean_errors[i];
            errs.push_back({{"noise_level", result.anchors[i].level},
                            {"mean_error_m", std::isfinite(e) ? json(e) : json(nullptr)},
                            {"failed", c.failures[i]}});
        }
        cands.push_back({{"noise_mode", std::string(to_string(c.mode))},
                         {"results", errs},
                         {"score", std::isfinite(c.score) ? json(c.score) : json(nullptr)}});
    }
    doc["candidates"] = cands;
    doc["chosen_noise_mode"] = std::string(to_string(result.chosen));
    return doc.dump(2) + "\n";
}

}  // namespace rssiloc
