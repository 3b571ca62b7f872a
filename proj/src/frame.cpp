#include "rssiloc/frame.hpp"

#include <array>
#include <fmt/format.h>
#include <optional>

#include "rssiloc/error.hpp"

namespace rssiloc {

std::string_view to_string(BeaconRole role) {
    switch (role) {
        case BeaconRole::A: return "A";
        case BeaconRole::B: return "B";
        case BeaconRole::C: return "C";
    }
    return "?";
}

BeaconRole beacon_role_from_string(std::string_view text) {
    if (text == "A") return BeaconRole::A;
    if (text == "B") return BeaconRole::B;
    if (text == "C") return BeaconRole::C;
    throw Error(ErrorCode::InvalidConfig, fmt::format("unknown beacon role '{}'", text));
}

double beacon_angle_sine(const BeaconTriple& triple) {
    const Vec3 ab = triple.b - triple.a;
    const Vec3 ac = triple.c - triple.a;
    const double scale = norm(ab) * norm(ac);
    if (scale == 0.0) {
        return 0.0;
    }
    return norm(cross(ab, ac)) / scale;
}

GlobalFrame build_frame(const BeaconTriple& triple) {
    if (distance(triple.a, triple.b) <= kMinBeaconSeparation || distance(triple.a, triple.c) <= kMinBeaconSeparation ||
        distance(triple.b, triple.c) <= kMinBeaconSeparation) {
        throw Error(ErrorCode::CollinearBeacons, "two beacons coincide");
    }
    const double sine = beacon_angle_sine(triple);
    if (!(sine > kCollinearSine)) {
        throw Error(ErrorCode::CollinearBeacons, fmt::format("beacons are collinear (sin BAC = {:g})", sine));
    }
    const Vec3 ab = triple.b - triple.a;
    const Vec3 ac = triple.c - triple.a;

    GlobalFrame frame;
    try {
        frame.z_axis = normalize(cross(ab, ac));
        frame.y_axis = normalize(cross(frame.z_axis, ab));
        frame.x_axis = normalize(cross(frame.y_axis, frame.z_axis));
    } catch (const Error& e) {
        throw Error(ErrorCode::CollinearBeacons, e.what());
    }
    frame.origin = triple.a;
    frame.ill_conditioned = sine < kIllConditionedSine;
    return frame;
}

GlobalPosition project(const GlobalFrame& frame, const Vec3& body_point) {
    const Vec3 r = body_point - frame.origin;
    return {{dot(r, frame.x_axis), dot(r, frame.y_axis), dot(r, frame.z_axis)}, frame.ill_conditioned};
}

GlobalPosition localize(std::span<const BeaconObservation> observations) {
    std::array<std::optional<BeaconObservation>, 3> by_role;
    for (const auto& obs : observations) {
        auto& slot = by_role[static_cast<std::size_t>(obs.role)];
        if (slot) {
            throw Error(ErrorCode::MissingRole, fmt::format("role {} assigned twice", to_string(obs.role)));
        }
        slot = obs;
    }
    for (std::size_t i = 0; i < by_role.size(); ++i) {
        if (!by_role[i]) {
            throw Error(ErrorCode::MissingRole,
                        fmt::format("no beacon for role {}", to_string(static_cast<BeaconRole>(i))));
        }
    }
    if (by_role[0]->id == by_role[1]->id || by_role[0]->id == by_role[2]->id || by_role[1]->id == by_role[2]->id) {
        throw Error(ErrorCode::DuplicateBeacon, "one beacon fills several roles");
    }
    const GlobalFrame frame =
        build_frame({by_role[0]->estimate.position, by_role[1]->estimate.position, by_role[2]->estimate.position});
    return project(frame);
}

}  // namespace rssiloc
