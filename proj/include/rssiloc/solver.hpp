#pragma once

#include <map>
#include <utility>

#include "rssiloc/sensor_layout.hpp"
#include "rssiloc/signal.hpp"
#include "rssiloc/vec3.hpp"

namespace rssiloc {

/// Sensor -> measured distance to one source, meters.
using DistanceReadings = std::map<SensorId, double>;

/// A source position in the robot body frame.
struct SourceEstimate {
    Vec3 position;
    bool z_clamped = false;         ///< the height radicand was negative and z was set to 0
    bool strength_clamped = false;  ///< at least one averaged RSSI hit the strength floor
    double group_spread = 0.0;      ///< enhanced mode: max pairwise distance between group estimates
};

/// One perimeter sensor of a group: its body offset and measured distance.
struct GroupMember {
    Vec3 offset;
    double distance = 0.0;
};

/// Four-sensor closed form (center, front, left, right):
///   x = (d0^2 + r^2 - df^2) / (2r),  y = (dr^2 - dl^2) / (4r),
///   z = +sqrt(d0^2 - x^2 - y^2)
/// The sensors are coplanar, so only the z >= 0 mirror image is returned.
/// Throws Error{InvalidLayout} for any other sensor set and
/// Error{IncompleteReadings} when a reading is missing or not a finite d >= 0.
SourceEstimate solve_basic(const DistanceReadings& readings, const SensorLayout& layout);

/// Solves one center + two perimeter sensor triangle. Expanding |s - p_i|^2 gives
///   p_i . (x, y) = (d0^2 + r^2 - d_i^2) / 2
/// for each perimeter sensor; z follows from d0 as in solve_basic.
/// Throws Error{SingularGroup} when the two offsets are (anti)parallel.
SourceEstimate solve_group(double d0, const GroupMember& first, const GroupMember& second, double radius);

/// Five-sensor mode: unweighted mean of the (F,L), (L,B), (B,R), (R,F) group
/// solutions. Throws Error{InvalidLayout} unless the layout is the 5-sensor set.
SourceEstimate solve_enhanced(const DistanceReadings& readings, const SensorLayout& layout);

/// Dispatches to solve_basic or solve_enhanced by layout.
SourceEstimate solve(const DistanceReadings& readings, const SensorLayout& layout);

/// Averages each sensor's batch, inverts the RSSI law and solves. Every batch
/// must come from the same source and channel (Error{MixedSources}).
SourceEstimate estimate_from_batches(const std::map<SensorId, PacketBatch>& batches, const SensorLayout& layout);

}  // namespace rssiloc
