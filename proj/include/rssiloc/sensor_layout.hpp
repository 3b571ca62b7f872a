#pragma once

#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include "rssiloc/vec3.hpp"

namespace rssiloc {

enum class SensorId { Center, Front, Left, Right, Back };

std::string_view to_string(SensorId id);

/// Robot radius plus the body-frame offset of every sensor. The body frame has
/// +x forward, +y to the left, +z up, origin at the center transceiver.
class SensorLayout {
  public:
    using Entry = std::pair<SensorId, Vec3>;

    /// Validates: radius > 0, center at the origin, every perimeter sensor at
    /// distance `radius` in the z = 0 plane, no sensor listed twice.
    SensorLayout(double radius, std::vector<Entry> offsets);

    double radius() const noexcept { return radius_; }
    const std::vector<Entry>& offsets() const noexcept { return offsets_; }
    std::size_t size() const noexcept { return offsets_.size(); }

    bool contains(SensorId id) const noexcept { return offset(id).has_value(); }
    std::optional<Vec3> offset(SensorId id) const noexcept;
    Vec3 offset_or_throw(SensorId id) const;

    /// True for the 5-sensor layout (a Back sensor is present).
    bool enhanced() const noexcept { return contains(SensorId::Back); }

  private:
    double radius_;
    std::vector<Entry> offsets_;
};

/// Center, front (r,0,0), left (0,r,0), right (0,-r,0); plus back (-r,0,0) when
/// `enhanced`. Throws Error{InvalidRadius} when radius <= 0.
SensorLayout standard_layout(double radius, bool enhanced);

}  // namespace rssiloc
