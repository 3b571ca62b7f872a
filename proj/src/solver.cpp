#include "rssiloc/solver.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fmt/format.h>

#include "rssiloc/error.hpp"

namespace rssiloc {
namespace {

bool has_exact_sensor_set(const SensorLayout& layout, std::initializer_list<SensorId> ids) {
    if (layout.size() != ids.size()) {
        return false;
    }
    return std::all_of(ids.begin(), ids.end(), [&](SensorId id) { return layout.contains(id); });
}

double reading(const DistanceReadings& readings, SensorId id) {
    const auto it = readings.find(id);
    if (it == readings.end()) {
        throw Error(ErrorCode::IncompleteReadings, fmt::format("no distance for sensor '{}'", to_string(id)));
    }
    const double d = it->second;
    if (!std::isfinite(d) || d < 0.0) {
        throw Error(ErrorCode::IncompleteReadings,
                    fmt::format("distance for sensor '{}' must be finite and >= 0, got {:g}", to_string(id), d));
    }
    return d;
}

SourceEstimate with_height(double x, double y, double d0) {
    const double radicand = d0 * d0 - x * x - y * y;
    SourceEstimate est;
    est.z_clamped = radicand < 0.0;
    est.position = {x, y, est.z_clamped ? 0.0 : std::sqrt(radicand)};
    return est;
}

}  // namespace

SourceEstimate solve_basic(const DistanceReadings& readings, const SensorLayout& layout) {
    if (!has_exact_sensor_set(layout, {SensorId::Center, SensorId::Front, SensorId::Left, SensorId::Right})) {
        throw Error(ErrorCode::InvalidLayout, "basic solver needs exactly the center/front/left/right sensors");
    }
    const double r = layout.radius();
    const double d0 = reading(readings, SensorId::Center);
    const double df = reading(readings, SensorId::Front);
    const double dl = reading(readings, SensorId::Left);
    const double dr = reading(readings, SensorId::Right);

    const double x = (d0 * d0 + r * r - df * df) / (2.0 * r);
    const double y = (dr * dr - dl * dl) / (4.0 * r);
    return with_height(x, y, d0);
}

SourceEstimate solve_group(double d0, const GroupMember& first, const GroupMember& second, double radius) {
    const Vec3& p = first.offset;
    const Vec3& q = second.offset;
    const double det = p.x * q.y - p.y * q.x;
    if (std::abs(det) <= kDegeneracyThreshold * radius * radius) {
        throw Error(ErrorCode::SingularGroup, "group sensors are (anti)parallel");
    }
    const double r2 = radius * radius;
    const double b1 = 0.5 * (d0 * d0 + r2 - first.distance * first.distance);
    const double b2 = 0.5 * (d0 * d0 + r2 - second.distance * second.distance);
    // Cramer's rule on [p; q] (x, y)^T = (b1, b2)^T.
    const double x = (b1 * q.y - p.y * b2) / det;
    const double y = (p.x * b2 - b1 * q.x) / det;
    return with_height(x, y, d0);
}

SourceEstimate solve_enhanced(const DistanceReadings& readings, const SensorLayout& layout) {
    if (!has_exact_sensor_set(layout,
                              {SensorId::Center, SensorId::Front, SensorId::Left, SensorId::Right, SensorId::Back})) {
        throw Error(ErrorCode::InvalidLayout, "enhanced solver needs the five-sensor layout");
    }
    const double d0 = reading(readings, SensorId::Center);
    auto member = [&](SensorId id) { return GroupMember{layout.offset_or_throw(id), reading(readings, id)}; };

    constexpr std::array<std::pair<SensorId, SensorId>, 4> kGroups{{
        {SensorId::Front, SensorId::Left},
        {SensorId::Left, SensorId::Back},
        {SensorId::Back, SensorId::Right},
        {SensorId::Right, SensorId::Front},
    }};

    std::array<Vec3, kGroups.size()> positions;
    SourceEstimate out;
    Vec3 sum;
    for (std::size_t i = 0; i < kGroups.size(); ++i) {
        const SourceEstimate g = solve_group(d0, member(kGroups[i].first), member(kGroups[i].second), layout.radius());
        positions[i] = g.position;
        sum += g.position;
        out.z_clamped = out.z_clamped || g.z_clamped;
    }
    out.position = sum / static_cast<double>(kGroups.size());
    for (std::size_t i = 0; i < positions.size(); ++i) {
        for (std::size_t j = i + 1; j < positions.size(); ++j) {
            out.group_spread = std::max(out.group_spread, distance(positions[i], positions[j]));
        }
    }
    return out;
}

SourceEstimate solve(const DistanceReadings& readings, const SensorLayout& layout) {
    return layout.enhanced() ? solve_enhanced(readings, layout) : solve_basic(readings, layout);
}

SourceEstimate estimate_from_batches(const std::map<SensorId, PacketBatch>& batches, const SensorLayout& layout) {
    if (batches.empty()) {
        throw Error(ErrorCode::IncompleteReadings, "no packet batches");
    }
    const PacketBatch& reference = batches.begin()->second;
    DistanceReadings readings;
    bool strength_clamped = false;
    for (const auto& [id, batch] : batches) {
        if (batch.source != reference.source || batch.channel != reference.channel) {
            throw Error(ErrorCode::MixedSources,
                        fmt::format("batch for sensor '{}' is source {} channel {}, expected source {} channel {}",
                                    to_string(id), batch.source, batch.channel, reference.source, reference.channel));
        }
        const AveragedStrength avg = average_batch(batch);
        strength_clamped = strength_clamped || avg.clamped;
        readings[id] = distance_from_rssi(avg.strength);
    }
    SourceEstimate est = solve(readings, layout);
    est.strength_clamped = strength_clamped;
    return est;
}

}  // namespace rssiloc
