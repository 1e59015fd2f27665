#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace salmon::plan {

// Mission elements in local NED coordinates relative to the plan origin:
// x north [m], y east [m], z depth [m] positive down, angles in degrees.

struct InitialElement {
    double x = 0.0;
    double y = 0.0;
    bool operator==(const InitialElement&) const = default;
};

struct FinalElement {
    double x = 0.0;
    double y = 0.0;
    bool operator==(const FinalElement&) const = default;
};

struct WaypointElement {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
    bool operator==(const WaypointElement&) const = default;
};

struct LineElement {
    double x1 = 0.0;
    double y1 = 0.0;
    double x2 = 0.0;
    double y2 = 0.0;
    double z = 0.0;
    bool operator==(const LineElement&) const = default;
};

struct ArcElement {
    double cx = 0.0;
    double cy = 0.0;
    double radius = 0.0;
    double start_angle_deg = 0.0;  // measured from north, positive toward east
    double end_angle_deg = 0.0;    // sweep is signed: end - start
    double z = 0.0;
    bool operator==(const ArcElement&) const = default;
};

/// Boustrophedon survey pattern: n_legs parallel legs of leg_length,
/// leg_distance apart, joined by half-circle U-turns, the whole pattern
/// rotated by rotation_deg about its start point.
struct MeanderElement {
    double x = 0.0;             // start of the first leg
    double y = 0.0;
    double z_max = 0.0;         // sawtooth bottom depth [m]
    double rotation_deg = 0.0;  // first leg runs at this compass heading
    double leg_length = 0.0;    // [m]
    double leg_distance = 0.0;  // [m]
    std::int64_t n_legs = 1;
    bool operator==(const MeanderElement&) const = default;
};

using MissionElement = std::variant<InitialElement, FinalElement, WaypointElement,
                                    LineElement, ArcElement, MeanderElement>;

struct MissionPlan {
    std::string name;
    double origin_lat = 0.0;  // WGS84 degrees
    double origin_lon = 0.0;
    std::vector<MissionElement> elements;  // first Initial, last Final
    bool operator==(const MissionPlan&) const = default;
};

/// Parses .mis text. Throws kv::ParseError (line number), kv::MissingKeyError,
/// kv::ValueError, or std::runtime_error on Initial/Final ordering and
/// element numbering violations.
MissionPlan parse_plan(std::string_view text);

/// Inverse of parse_plan: parse_plan(serialize_plan(p)) == p for any valid p.
std::string serialize_plan(const MissionPlan& plan);

/// Invariant check; returns one human-readable violation per broken
/// invariant (empty means the plan is valid). Never throws.
std::vector<std::string> validate_plan(const MissionPlan& plan);

MissionPlan load_plan_file(const std::string& path);

const char* element_type_name(const MissionElement& element);

}  // namespace salmon::plan
