#pragma once

#include <span>
#include <string_view>

#include "rssiloc/signal.hpp"
#include "rssiloc/solver.hpp"
#include "rssiloc/vec3.hpp"

namespace rssiloc {

/// A = global origin, B defines +x, C defines the +y half-plane.
enum class BeaconRole { A, B, C };

std::string_view to_string(BeaconRole role);
BeaconRole beacon_role_from_string(std::string_view text);

/// Beacon pairwise separations below this are rejected as coincident.
inline constexpr double kMinBeaconSeparation = 1e-6;
/// Beacons whose |AB x AC| / (|AB| |AC|) falls at or below this are collinear.
inline constexpr double kCollinearSine = 1e-9;
/// Below this sine the frame is still built but flagged ill-conditioned.
inline constexpr double kIllConditionedSine = 1e-3;

/// Body-frame positions of the three beacons.
struct BeaconTriple {
    Vec3 a;
    Vec3 b;
    Vec3 c;
};

/// Orthonormal, right-handed axes of the beacon frame expressed in the body frame.
struct GlobalFrame {
    Vec3 x_axis;
    Vec3 y_axis;
    Vec3 z_axis;
    Vec3 origin;  ///< body-frame position of beacon A
    bool ill_conditioned = false;
};

struct GlobalPosition {
    Vec3 coordinates;
    bool ill_conditioned = false;
};

/// Sine of the angle BAC, i.e. |AB x AC| / (|AB| |AC|); 0 for coincident points.
double beacon_angle_sine(const BeaconTriple& triple);

/// z = AB x AC, y = z x AB, x = y x z, each normalized; origin = A.
/// Throws Error{CollinearBeacons} when beacons coincide or are collinear.
GlobalFrame build_frame(const BeaconTriple& triple);

/// Beacon-frame coordinates of a body-frame point: ((p - A).x, (p - A).y, (p - A).z).
/// The robot itself is the body origin, so the default gives its global position.
GlobalPosition project(const GlobalFrame& frame, const Vec3& body_point = {});

struct BeaconObservation {
    SourceId id = 0;
    BeaconRole role = BeaconRole::A;
    SourceEstimate estimate;
};

/// build_frame + project for the robot at the body origin. Needs exactly one
/// observation per role (Error{MissingRole}) from distinct beacons
/// (Error{DuplicateBeacon}).
GlobalPosition localize(std::span<const BeaconObservation> observations);

}  // namespace rssiloc
