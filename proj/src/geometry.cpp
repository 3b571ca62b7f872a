#include <algorithm>
#include <cmath>
#include <fmt/format.h>

#include "rssiloc/error.hpp"
#include "rssiloc/sensor_layout.hpp"
#include "rssiloc/vec3.hpp"

namespace rssiloc {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::DegenerateVector: return "DegenerateVector";
        case ErrorCode::InvalidRadius: return "InvalidRadius";
        case ErrorCode::InvalidLayout: return "InvalidLayout";
        case ErrorCode::NonPositiveDistance: return "NonPositiveDistance";
        case ErrorCode::NonPositiveStrength: return "NonPositiveStrength";
        case ErrorCode::EmptyBatch: return "EmptyBatch";
        case ErrorCode::IncompleteReadings: return "IncompleteReadings";
        case ErrorCode::SingularGroup: return "SingularGroup";
        case ErrorCode::MixedSources: return "MixedSources";
        case ErrorCode::CollinearBeacons: return "CollinearBeacons";
        case ErrorCode::MissingRole: return "MissingRole";
        case ErrorCode::DuplicateBeacon: return "DuplicateBeacon";
        case ErrorCode::UnknownRobot: return "UnknownRobot";
        case ErrorCode::InvalidConfig: return "InvalidConfig";
        case ErrorCode::InvalidScenario: return "InvalidScenario";
        case ErrorCode::IoFailure: return "IoFailure";
    }
    return "Unknown";
}

std::string_view to_string(SensorId id) {
    switch (id) {
        case SensorId::Center: return "center";
        case SensorId::Front: return "front";
        case SensorId::Left: return "left";
        case SensorId::Right: return "right";
        case SensorId::Back: return "back";
    }
    return "unknown";
}

Vec3 normalize(const Vec3& v) {
    const double n = norm(v);
    if (!(n > kDegeneracyThreshold)) {
        throw Error(ErrorCode::DegenerateVector, fmt::format("cannot normalize vector of norm {:g}", n));
    }
    return v / n;
}

SensorLayout::SensorLayout(double radius, std::vector<Entry> offsets)
    : radius_(radius), offsets_(std::move(offsets)) {
    if (!(radius_ > 0.0) || !std::isfinite(radius_)) {
        throw Error(ErrorCode::InvalidRadius, fmt::format("radius must be positive, got {:g}", radius_));
    }
    bool has_center = false;
    for (std::size_t i = 0; i < offsets_.size(); ++i) {
        const auto& [id, p] = offsets_[i];
        for (std::size_t j = 0; j < i; ++j) {
            if (offsets_[j].first == id) {
                throw Error(ErrorCode::InvalidLayout, fmt::format("sensor '{}' listed twice", to_string(id)));
            }
        }
        if (!is_finite(p)) {
            throw Error(ErrorCode::InvalidLayout, "non-finite sensor offset");
        }
        if (id == SensorId::Center) {
            if (p != Vec3{}) {
                throw Error(ErrorCode::InvalidLayout, "center sensor must sit at the body origin");
            }
            has_center = true;
            continue;
        }
        if (p.z != 0.0 || std::abs(norm(p) - radius_) > 1e-12) {
            throw Error(ErrorCode::InvalidLayout,
                        fmt::format("sensor '{}' must lie on the rim (|p| = r, z = 0)", to_string(id)));
        }
    }
    if (!has_center) {
        throw Error(ErrorCode::InvalidLayout, "layout has no center transceiver");
    }
}

std::optional<Vec3> SensorLayout::offset(SensorId id) const noexcept {
    const auto it = std::find_if(offsets_.begin(), offsets_.end(), [id](const Entry& e) { return e.first == id; });
    if (it == offsets_.end()) {
        return std::nullopt;
    }
    return it->second;
}

Vec3 SensorLayout::offset_or_throw(SensorId id) const {
    if (auto p = offset(id)) {
        return *p;
    }
    throw Error(ErrorCode::InvalidLayout, fmt::format("layout has no '{}' sensor", to_string(id)));
}

SensorLayout standard_layout(double radius, bool enhanced) {
    if (!(radius > 0.0) || !std::isfinite(radius)) {
        throw Error(ErrorCode::InvalidRadius, fmt::format("radius must be positive, got {:g}", radius));
    }
    std::vector<SensorLayout::Entry> offsets{
        {SensorId::Center, {0.0, 0.0, 0.0}},
        {SensorId::Front, {radius, 0.0, 0.0}},
        {SensorId::Left, {0.0, radius, 0.0}},
        {SensorId::Right, {0.0, -radius, 0.0}},
    };
    if (enhanced) {
        offsets.push_back({SensorId::Back, {-radius, 0.0, 0.0}});
    }
    return SensorLayout(radius, std::move(offsets));
}

}  // namespace rssiloc
