#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "salmon/geo.hpp"
#include "salmon/geometry.hpp"
#include "salmon/mission_plan.hpp"

namespace salmon::route {

enum class WaypointKind {
    Track,          // plain path waypoint
    ArcPoint,       // lies on a discretized arc
    ArcTransition,  // smoothing point d_arc before/after an arc ("x" in the survey sketch)
    SubmergePivot,  // thruster/propeller handover point at z_min ("+")
    SurfaceStart,   // begin of a GPS surface run, z = 0
    SurfaceEnd,     // end of a GPS surface run, z = 0
};

const char* kind_name(WaypointKind kind);
WaypointKind kind_from_name(std::string_view name);

struct RouteProfile {
    double alpha_arc_deg = 30.0;   // max angular step when reproducing arcs
    double d_arc = 5.0;            // transition point offset before/after arcs [m]
    double z_min = 1.0;            // thruster/propeller handover depth [m]
    double alpha_dive_deg = 20.0;  // submerge/emerge angle
    double d_dive = 250.0;         // submerged track budget between GPS runs [m]
    double l_gps = 30.0;           // surface run track length [m]
    double cruise_speed = 1.5;     // [m/s]
};

/// Empty list iff the profile satisfies its invariants.
std::vector<std::string> validate_profile(const RouteProfile& profile);

struct Waypoint {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
    WaypointKind kind = WaypointKind::Track;
    double speed = 0.0;
};

struct Route {
    std::vector<Waypoint> waypoints;
    double horizontal_length = 0.0;  // sum of horizontal chord lengths [m]
    std::vector<std::pair<std::size_t, std::size_t>> submerged_segments;  // inclusive index ranges
    std::vector<std::string> warnings;
};

// Horizontal path structure, depth-free.

struct PathLeg {
    Vec2 start;
    Vec2 end;
};

/// Circle section. Angles are radians from north toward east; a point at
/// angle a sits at center + radius * (cos a, sin a). The sweep is signed:
/// end_angle - start_angle, direction included.
struct PathArc {
    Vec2 center;
    double radius = 0.0;
    double start_angle = 0.0;
    double end_angle = 0.0;
};

struct HorizontalPath {
    std::vector<std::variant<PathLeg, PathArc>> segments;
};

/// Polyline form of a horizontal path with per-vertex kinds and the index
/// spans (inclusive, endpoints included) that originate from arcs.
struct FlatPath {
    struct Vertex {
        Vec2 xy;
        WaypointKind kind = WaypointKind::Track;
    };
    struct ArcSpan {
        std::size_t first = 0;
        std::size_t last = 0;
    };
    std::vector<Vertex> pts;
    std::vector<ArcSpan> arcs;
};

/// Expands a meander into legs joined by half-circle U-turns of radius
/// leg_distance/2 with alternating turn sense, rotated by rotation_deg
/// about the start point. Throws std::invalid_argument on an invalid element.
HorizontalPath expand_meander(const plan::MeanderElement& m);

/// Points on the circle at angular steps <= alpha_arc (all radians),
/// endpoints included; step count is ceil(|sweep| / alpha_arc), equal
/// steps. Throws std::invalid_argument on zero sweep or radius <= 0.
std::vector<Vec2> discretize_arc(const Vec2& center, double radius, double start_angle,
                                 double end_angle, double alpha_arc);

/// Polyline with Track leg endpoints and ArcPoint arc vertices; coincident
/// junction points are merged (arc endpoints win).
FlatPath flatten(const HorizontalPath& path, double alpha_arc_rad);

/// Inserts one ArcTransition on the straight segment before each arc start
/// and after each arc end, at distance d_arc. With d_arc == 0 the arc
/// endpoints themselves are re-marked. Throws std::invalid_argument when
/// d_arc >= half the hosting segment length.
FlatPath insert_arc_transitions(FlatPath path, double d_arc);

/// Applies the sawtooth dive law to a horizontal path treated as one
/// survey span with bottom depth z_max: teeth between z_min and z_max at
/// slope tan(alpha_dive), GPS surface runs of l_gps when the submerged
/// track budget d_dive runs out, vertical thruster transitions at z_min.
Route apply_dive_profile(const FlatPath& path, const RouteProfile& profile, double z_max);

/// Full pipeline over a mission plan: expand, discretize, insert
/// transitions, apply dive profiles, join elements with transit legs.
Route generate_route(const plan::MissionPlan& plan, const RouteProfile& profile);

/// Sum of 3D chord lengths; coincident-(x,y) vertical transitions count |dz|.
double route_track_length(const Route& route);

// Exports consumed by guidance and the analyze CLI.
std::string route_to_csv(const Route& route);
Route route_from_csv(std::string_view text);
std::string route_to_geojson(const Route& route, const geo::Origin& origin);

}  // namespace salmon::route
