#include "salmon/route_gen.hpp"

#include <algorithm>
#include <cassert>
#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "salmon/keyvalue.hpp"

namespace salmon::route {

namespace {

constexpr double kMergeEps = 1e-7;  // [m] vertices closer than this are one waypoint

int kind_priority(WaypointKind k) {
    switch (k) {
        case WaypointKind::Track: return 0;
        case WaypointKind::ArcPoint: return 1;
        case WaypointKind::ArcTransition: return 2;
        case WaypointKind::SurfaceStart:
        case WaypointKind::SurfaceEnd: return 3;
        case WaypointKind::SubmergePivot: return 4;
    }
    return 0;
}

Vec2 direction(const Vec2& from, const Vec2& to) {
    const Vec2 d = to - from;
    const double n = d.norm();
    if (n <= 0.0) throw std::invalid_argument("degenerate zero-length segment");
    return d * (1.0 / n);
}

/// Collects waypoints, merging coincident emissions (higher-priority kind
/// wins) and keeping coincident-(x,y) pairs only for vertical transitions.
class RouteBuilder {
public:
    explicit RouteBuilder(double speed) : speed_(speed) {}

    void set_depth_cap(double cap) { depth_cap_ = cap; }

    void emit(const Vec2& xy, double z, WaypointKind kind) {
        z = std::clamp(z, 0.0, depth_cap_);
        if (!route_.waypoints.empty()) {
            Waypoint& last = route_.waypoints.back();
            const double dxy = std::hypot(xy.x - last.x, xy.y - last.y);
            const double dz = std::abs(z - last.z);
            if (dxy < kMergeEps && dz < kMergeEps) {
                if (kind_priority(kind) > kind_priority(last.kind)) last.kind = kind;
                return;
            }
            if (dxy >= kMergeEps) route_.horizontal_length += dxy;
        }
        route_.waypoints.push_back({xy.x, xy.y, z, kind, speed_});
    }

    void warn(std::string message) { route_.warnings.push_back(std::move(message)); }

    Route finish() {
        // Maximal index ranges strictly below the surface.
        std::size_t start = 0;
        bool open = false;
        for (std::size_t i = 0; i < route_.waypoints.size(); ++i) {
            const bool submerged = route_.waypoints[i].z > 0.0;
            if (submerged && !open) {
                start = i;
                open = true;
            } else if (!submerged && open) {
                route_.submerged_segments.emplace_back(start, i - 1);
                open = false;
            }
        }
        if (open) route_.submerged_segments.emplace_back(start, route_.waypoints.size() - 1);
        return std::move(route_);
    }

private:
    Route route_;
    double speed_;
    double depth_cap_ = std::numeric_limits<double>::infinity();
};

enum class SpanMode { Surface, FixedDepth, Sawtooth };

struct Span {
    std::size_t first = 0;  // polyline vertex index range, inclusive
    std::size_t last = 0;
    SpanMode mode = SpanMode::Surface;
    double depth = 0.0;  // FixedDepth: target depth; Sawtooth: z_max
};

/// Walks the global polyline span by span, laying the depth profile on top
/// of the horizontal geometry. Distances are polyline chord lengths; the
/// submerged-budget accumulator tracks 3D chord distance below the surface.
class DiveWalker {
public:
    DiveWalker(const std::vector<FlatPath::Vertex>& pts, const RouteProfile& profile,
               RouteBuilder& builder)
        : pts_(pts), prof_(profile), builder_(builder) {
        tan_a_ = std::tan(deg2rad(prof_.alpha_dive_deg));
        sin_a_ = std::sin(deg2rad(prof_.alpha_dive_deg));
        cum_.resize(pts_.size());
        cum_[0] = 0.0;
        for (std::size_t i = 1; i < pts_.size(); ++i) {
            cum_[i] = cum_[i - 1] + (pts_[i].xy - pts_[i - 1].xy).norm();
        }
        total_ = cum_.back();
    }

    void run(const std::vector<Span>& spans) {
        builder_.emit(pts_.front().xy, 0.0, pts_.front().kind);
        for (std::size_t i = 0; i < spans.size(); ++i) {
            const Span& span = spans[i];
            const bool last_span = (i + 1 == spans.size());
            const SpanMode next_mode = last_span ? SpanMode::Surface : spans[i + 1].mode;
            switch (span.mode) {
                case SpanMode::Surface: walk_surface(cum_[span.last]); break;
                case SpanMode::FixedDepth: walk_fixed(span, next_mode); break;
                case SpanMode::Sawtooth: walk_sawtooth(span); break;
            }
        }
        if (run_active_) {
            // Route ended inside a GPS run; the run was only started when
            // enough track remained, so this is just the final marker.
            builder_.emit(point_at(s_), 0.0, WaypointKind::SurfaceEnd);
            run_active_ = false;
        }
    }

private:
    Vec2 point_at(double s) const {
        const auto it = std::upper_bound(cum_.begin(), cum_.end(), s);
        std::size_t hi = std::min<std::size_t>(it - cum_.begin(), cum_.size() - 1);
        if (hi == 0) hi = 1;
        const std::size_t lo = hi - 1;
        const double len = cum_[hi] - cum_[lo];
        const double t = len > 0.0 ? std::clamp((s - cum_[lo]) / len, 0.0, 1.0) : 0.0;
        return pts_[lo].xy + (pts_[hi].xy - pts_[lo].xy) * t;
    }

    // Advances to s_target emitting crossed polyline vertices; depth varies
    // linearly from the current (s_, z_) at the given slope. Updates s_/z_
    // but does not emit the target point itself.
    void advance(double s_target, double slope) {
        while (next_vertex_ < pts_.size() && cum_[next_vertex_] < s_target + kMergeEps) {
            const double zv = z_ + slope * (cum_[next_vertex_] - s_);
            builder_.emit(pts_[next_vertex_].xy, std::max(0.0, zv), pts_[next_vertex_].kind);
            ++next_vertex_;
        }
        const double ds = s_target - s_;
        z_ = std::max(0.0, z_ + slope * ds);
        if (z_ > 0.0 || slope != 0.0) submerged_ += std::abs(ds) * std::hypot(1.0, slope);
        s_ = s_target;
    }

    void walk_surface_to(double s_end) {
        while (run_active_ && run_end_s_ <= s_end + kMergeEps) {
            advance(run_end_s_, 0.0);
            builder_.emit(point_at(s_), 0.0, WaypointKind::SurfaceEnd);
            run_active_ = false;
            submerged_ = 0.0;
        }
        advance(s_end, 0.0);
        submerged_ = 0.0;
    }

    void walk_surface(double s_end) {
        if (z_ > kMergeEps) {
            // Previous span should have surfaced; recover with a thruster ascent.
            builder_.warn("forced surfacing at start of surface span");
            ascend_vertical(WaypointKind::Track);
        }
        walk_surface_to(s_end);
    }

    void descend_vertical(double pivot_depth) {
        builder_.emit(point_at(s_), pivot_depth, WaypointKind::SubmergePivot);
        z_ = pivot_depth;
        submerged_ += pivot_depth;
    }

    void ascend_vertical(WaypointKind surface_kind) {
        builder_.emit(point_at(s_), z_, WaypointKind::SubmergePivot);
        builder_.emit(point_at(s_), 0.0, surface_kind);
        z_ = 0.0;
    }

    void walk_fixed(const Span& span, SpanMode next_mode) {
        const double s_end = cum_[span.last];
        const double zt = span.depth;
        if (zt <= kMergeEps) {
            walk_surface(s_end);
            return;
        }
        if (run_active_) {
            // A GPS run crossing in from a meander finishes before diving.
            if (run_end_s_ <= s_end + kMergeEps) {
                walk_surface_to(run_end_s_);
            } else {
                walk_surface_to(s_end);
                return;
            }
        }
        const double pivot = std::min(prof_.z_min, zt);
        if (z_ <= kMergeEps) {
            descend_vertical(pivot);
        }
        // Reserve track for the exit climb back to the pivot depth when the
        // route surfaces after this span.
        const bool exit_up = (next_mode == SpanMode::Surface);
        const auto ramp_to = [&](double target) {
            const double ds = std::abs(target - z_) / tan_a_;
            const double slope = target > z_ ? tan_a_ : -tan_a_;
            const double s_ramp = std::min(s_ + ds, s_end);
            if (s_ramp > s_ + kMergeEps) {
                advance(s_ramp, slope);
                builder_.emit(point_at(s_), z_, WaypointKind::Track);
            }
        };
        double hold_end = s_end;
        if (exit_up) hold_end = s_end - std::max(0.0, zt - pivot) / tan_a_;
        if (hold_end < s_) {
            builder_.warn("fixed-depth span too short for descent and climb");
        }
        ramp_to(zt);
        if (s_ < hold_end) advance(hold_end, 0.0);
        if (exit_up) {
            ramp_to(pivot);
            advance(s_end, z_ > pivot ? -tan_a_ : 0.0);
            ascend_vertical(WaypointKind::Track);
            submerged_ = 0.0;
        } else {
            advance(s_end, 0.0);
        }
    }

    void walk_sawtooth(const Span& span) {
        const double s_end = cum_[span.last];
        const double z_max = span.depth;
        const double z_min = prof_.z_min;
        const double half_cycle_3d = (z_max - z_min) / sin_a_;
        builder_.set_depth_cap(std::max(z_max, z_));

        if (run_active_) {
            if (run_end_s_ <= s_end + kMergeEps) {
                walk_surface_to(run_end_s_);
            } else {
                walk_surface_to(s_end);
                return;
            }
        }
        if (z_ <= kMergeEps) {
            if (s_end - s_ <= kMergeEps) return;  // empty span
            descend_vertical(z_min);
        }

        bool first_tooth = true;
        while (true) {
            if (s_end - s_ <= kMergeEps) {
                // Span exhausted; by construction we are back at z_min.
                ascend_vertical(WaypointKind::Track);
                submerged_ = 0.0;
                return;
            }
            // Tooth bottom: full depth, capped so the climb to z_min still
            // fits before the span ends.
            const double s_full = s_ + (z_max - z_) / tan_a_;
            const double s_reserve = 0.5 * (s_end + s_ + (z_min - z_) / tan_a_);
            const double s_bottom = std::min(s_full, s_reserve);
            if (s_bottom <= s_ + kMergeEps) {
                ascend_vertical(WaypointKind::Track);
                submerged_ = 0.0;
                advance(s_end, 0.0);
                submerged_ = 0.0;
                return;
            }
            if (first_tooth && s_reserve < s_full) {
                builder_.warn("survey span shorter than one sawtooth cycle; partial dive");
            }
            first_tooth = false;

            advance(s_bottom, tan_a_);
            z_ = std::min(z_, z_max);
            builder_.emit(point_at(s_), z_, WaypointKind::Track);
            const double s_top = s_ + (z_ - z_min) / tan_a_;
            advance(s_top, -tan_a_);
            z_ = std::max(z_, z_min);

            // Decision point at the tooth top (depth z_min).
            if (s_end - s_ <= kMergeEps) {
                ascend_vertical(WaypointKind::Track);
                submerged_ = 0.0;
                return;
            }
            if (submerged_ + half_cycle_3d > prof_.d_dive) {
                if (total_ - s_ < prof_.l_gps - kMergeEps) {
                    // Not enough track left for a full GPS run; finish the
                    // span on the surface instead.
                    ascend_vertical(WaypointKind::Track);
                    submerged_ = 0.0;
                    advance(s_end, 0.0);
                    submerged_ = 0.0;
                    return;
                }
                ascend_vertical(WaypointKind::SurfaceStart);
                run_active_ = true;
                run_end_s_ = s_ + prof_.l_gps;
                if (run_end_s_ <= s_end + kMergeEps) {
                    walk_surface_to(run_end_s_);
                    descend_vertical(z_min);
                } else {
                    walk_surface_to(s_end);
                    return;  // run continues into the next span
                }
            } else {
                builder_.emit(point_at(s_), z_, WaypointKind::Track);
            }
        }
    }

    const std::vector<FlatPath::Vertex>& pts_;
    const RouteProfile& prof_;
    RouteBuilder& builder_;
    std::vector<double> cum_;
    double total_ = 0.0;
    double tan_a_ = 0.0;
    double sin_a_ = 0.0;

    std::size_t next_vertex_ = 1;
    double s_ = 0.0;
    double z_ = 0.0;
    double submerged_ = 0.0;
    bool run_active_ = false;
    double run_end_s_ = 0.0;
};

void require_valid_profile(const RouteProfile& profile) {
    const auto violations = validate_profile(profile);
    if (!violations.empty()) {
        std::string msg = "invalid route profile:";
        for (const auto& v : violations) msg += " " + v + ";";
        throw std::invalid_argument(msg);
    }
}

}  // namespace

const char* kind_name(WaypointKind kind) {
    switch (kind) {
        case WaypointKind::Track: return "track";
        case WaypointKind::ArcPoint: return "arc_point";
        case WaypointKind::ArcTransition: return "arc_transition";
        case WaypointKind::SubmergePivot: return "submerge_pivot";
        case WaypointKind::SurfaceStart: return "surface_start";
        case WaypointKind::SurfaceEnd: return "surface_end";
    }
    return "track";
}

WaypointKind kind_from_name(std::string_view name) {
    if (name == "track") return WaypointKind::Track;
    if (name == "arc_point") return WaypointKind::ArcPoint;
    if (name == "arc_transition") return WaypointKind::ArcTransition;
    if (name == "submerge_pivot") return WaypointKind::SubmergePivot;
    if (name == "surface_start") return WaypointKind::SurfaceStart;
    if (name == "surface_end") return WaypointKind::SurfaceEnd;
    throw std::invalid_argument("unknown waypoint kind '" + std::string(name) + "'");
}

std::vector<std::string> validate_profile(const RouteProfile& p) {
    std::vector<std::string> v;
    if (!(p.alpha_arc_deg > 0.0 && p.alpha_arc_deg <= 90.0)) {
        v.push_back("alpha_arc_deg must be in (0, 90]");
    }
    if (p.d_arc < 0.0) v.push_back("d_arc must be >= 0");
    if (!(p.z_min > 0.0)) v.push_back("z_min must be > 0");
    if (!(p.alpha_dive_deg > 0.0 && p.alpha_dive_deg < 90.0)) {
        v.push_back("alpha_dive_deg must be in (0, 90)");
    }
    if (!(p.d_dive > 0.0)) v.push_back("d_dive must be > 0");
    if (!(p.l_gps > 0.0)) v.push_back("l_gps must be > 0");
    if (!(p.cruise_speed > 0.0)) v.push_back("cruise_speed must be > 0");
    return v;
}

HorizontalPath expand_meander(const plan::MeanderElement& m) {
    plan::MissionPlan probe;
    probe.elements = {plan::InitialElement{}, m, plan::FinalElement{}};
    const auto violations = plan::validate_plan(probe);
    if (!violations.empty()) {
        std::string msg = "invalid meander:";
        for (const auto& v : violations) msg += " " + v + ";";
        throw std::invalid_argument(msg);
    }

    const Vec2 start{m.x, m.y};
    const double theta = deg2rad(m.rotation_deg);
    const auto place = [&](const Vec2& local) { return start + rotate(local, theta); };

    HorizontalPath path;
    const double r = m.leg_distance / 2.0;
    for (std::int64_t leg = 0; leg < m.n_legs; ++leg) {
        const bool forward = (leg % 2 == 0);
        const double v = static_cast<double>(leg) * m.leg_distance;
        const Vec2 from_local{forward ? 0.0 : m.leg_length, v};
        const Vec2 to_local{forward ? m.leg_length : 0.0, v};
        path.segments.push_back(PathLeg{place(from_local), place(to_local)});

        if (leg + 1 < m.n_legs) {
            // U-turn bulging outward past the leg end, tangent to both legs.
            const Vec2 center_local{to_local.x, v + r};
            const double start_angle = -kPi / 2.0 + theta;
            const double sweep = forward ? kPi : -kPi;
            path.segments.push_back(
                PathArc{place(center_local), r, start_angle, start_angle + sweep});
        }
    }
    return path;
}

std::vector<Vec2> discretize_arc(const Vec2& center, double radius, double start_angle,
                                 double end_angle, double alpha_arc) {
    if (!(radius > 0.0)) throw std::invalid_argument("arc radius must be > 0");
    if (!(alpha_arc > 0.0)) throw std::invalid_argument("alpha_arc must be > 0");
    const double sweep = end_angle - start_angle;
    if (std::abs(sweep) < 1e-12) {
        throw std::invalid_argument("degenerate arc: zero sweep");
    }
    const auto steps = static_cast<std::size_t>(std::ceil(std::abs(sweep) / alpha_arc - 1e-12));
    const double step = sweep / static_cast<double>(steps);
    std::vector<Vec2> out;
    out.reserve(steps + 1);
    for (std::size_t i = 0; i <= steps; ++i) {
        const double a = start_angle + step * static_cast<double>(i);
        out.push_back(center + Vec2{std::cos(a), std::sin(a)} * radius);
    }
    return out;
}

FlatPath flatten(const HorizontalPath& path, double alpha_arc_rad) {
    FlatPath flat;
    const auto append = [&](const Vec2& p, WaypointKind kind) -> std::size_t {
        if (!flat.pts.empty() && (p - flat.pts.back().xy).norm() < kMergeEps) {
            if (kind_priority(kind) > kind_priority(flat.pts.back().kind)) {
                flat.pts.back().kind = kind;
            }
            return flat.pts.size() - 1;
        }
        flat.pts.push_back({p, kind});
        return flat.pts.size() - 1;
    };

    for (const auto& segment : path.segments) {
        if (const auto* leg = std::get_if<PathLeg>(&segment)) {
            append(leg->start, WaypointKind::Track);
            append(leg->end, WaypointKind::Track);
        } else {
            const auto& arc = std::get<PathArc>(segment);
            const auto points =
                discretize_arc(arc.center, arc.radius, arc.start_angle, arc.end_angle, alpha_arc_rad);
            FlatPath::ArcSpan span;
            span.first = append(points.front(), WaypointKind::ArcPoint);
            for (std::size_t i = 1; i < points.size(); ++i) {
                span.last = append(points[i], WaypointKind::ArcPoint);
            }
            flat.arcs.push_back(span);
        }
    }
    return flat;
}

FlatPath insert_arc_transitions(FlatPath path, double d_arc) {
    if (d_arc < 0.0) throw std::invalid_argument("d_arc must be >= 0");

    struct Job {
        bool head = false;
        bool tail = false;
    };
    std::vector<Job> jobs(path.arcs.size());
    for (std::size_t i = 0; i < path.arcs.size(); ++i) {
        const auto& span = path.arcs[i];
        const bool head_exists =
            span.first > 0 && (i == 0 || path.arcs[i - 1].last != span.first);
        const bool tail_exists = span.last + 1 < path.pts.size() &&
                                 (i + 1 == path.arcs.size() || path.arcs[i + 1].first != span.last);
        jobs[i] = {head_exists, tail_exists};
        if (d_arc == 0.0) continue;
        if (head_exists) {
            const double len = (path.pts[span.first].xy - path.pts[span.first - 1].xy).norm();
            if (d_arc >= len / 2.0) {
                throw std::invalid_argument("d_arc must be < half the leg length before an arc");
            }
        }
        if (tail_exists) {
            const double len = (path.pts[span.last + 1].xy - path.pts[span.last].xy).norm();
            if (d_arc >= len / 2.0) {
                throw std::invalid_argument("d_arc must be < half the leg length after an arc");
            }
        }
    }

    std::size_t shift = 0;
    for (std::size_t i = 0; i < path.arcs.size(); ++i) {
        auto& span = path.arcs[i];
        span.first += shift;
        span.last += shift;
        if (jobs[i].head) {
            if (d_arc == 0.0) {
                path.pts[span.first].kind = WaypointKind::ArcTransition;
            } else {
                const Vec2 dir = direction(path.pts[span.first - 1].xy, path.pts[span.first].xy);
                const Vec2 p = path.pts[span.first].xy - dir * d_arc;
                path.pts.insert(path.pts.begin() + static_cast<std::ptrdiff_t>(span.first),
                                {p, WaypointKind::ArcTransition});
                ++span.first;
                ++span.last;
                ++shift;
            }
        }
        if (jobs[i].tail) {
            if (d_arc == 0.0) {
                path.pts[span.last].kind = WaypointKind::ArcTransition;
            } else {
                const Vec2 dir = direction(path.pts[span.last].xy, path.pts[span.last + 1].xy);
                const Vec2 p = path.pts[span.last].xy + dir * d_arc;
                path.pts.insert(path.pts.begin() + static_cast<std::ptrdiff_t>(span.last + 1),
                                {p, WaypointKind::ArcTransition});
                ++shift;
            }
        }
    }
    return path;
}

Route apply_dive_profile(const FlatPath& path, const RouteProfile& profile, double z_max) {
    require_valid_profile(profile);
    if (!(profile.z_min < z_max)) {
        throw std::invalid_argument("z_min must be < z_max of the survey element");
    }
    if (path.pts.size() < 2) throw std::invalid_argument("path needs at least two vertices");

    RouteBuilder builder(profile.cruise_speed);
    DiveWalker walker(path.pts, profile, builder);
    walker.run({Span{0, path.pts.size() - 1, SpanMode::Sawtooth, z_max}});
    return builder.finish();
}

Route generate_route(const plan::MissionPlan& plan, const RouteProfile& profile) {
    require_valid_profile(profile);
    {
        const auto violations = plan::validate_plan(plan);
        if (!violations.empty()) {
            std::string msg = "invalid mission plan:";
            for (const auto& v : violations) msg += " " + v + ";";
            throw std::invalid_argument(msg);
        }
    }
    const double alpha_arc = deg2rad(profile.alpha_arc_deg);

    std::vector<FlatPath::Vertex> pts;
    std::vector<Span> spans;
    const auto append = [&](const Vec2& p, WaypointKind kind) -> std::size_t {
        if (!pts.empty() && (p - pts.back().xy).norm() < kMergeEps) {
            if (kind_priority(kind) > kind_priority(pts.back().kind)) pts.back().kind = kind;
            return pts.size() - 1;
        }
        pts.push_back({p, kind});
        return pts.size() - 1;
    };
    const auto add_span = [&](std::size_t first, std::size_t last, SpanMode mode, double depth) {
        if (last > first) spans.push_back({first, last, mode, depth});
    };

    for (const plan::MissionElement& element : plan.elements) {
        std::visit(
            [&](const auto& e) {
                using T = std::decay_t<decltype(e)>;
                const std::size_t before = pts.empty() ? 0 : pts.size() - 1;
                if constexpr (std::is_same_v<T, plan::InitialElement>) {
                    append({e.x, e.y}, WaypointKind::Track);
                } else if constexpr (std::is_same_v<T, plan::FinalElement>) {
                    const std::size_t idx = append({e.x, e.y}, WaypointKind::Track);
                    add_span(before, idx, SpanMode::Surface, 0.0);
                } else if constexpr (std::is_same_v<T, plan::WaypointElement>) {
                    const std::size_t idx = append({e.x, e.y}, WaypointKind::Track);
                    add_span(before, idx, SpanMode::FixedDepth, e.z);
                } else if constexpr (std::is_same_v<T, plan::LineElement>) {
                    append({e.x1, e.y1}, WaypointKind::Track);
                    const std::size_t idx = append({e.x2, e.y2}, WaypointKind::Track);
                    add_span(before, idx, SpanMode::FixedDepth, e.z);
                } else if constexpr (std::is_same_v<T, plan::ArcElement>) {
                    HorizontalPath local;
                    const PathArc arc{{e.cx, e.cy},
                                      e.radius,
                                      deg2rad(e.start_angle_deg),
                                      deg2rad(e.end_angle_deg)};
                    const Vec2 arc_start =
                        arc.center + Vec2{std::cos(arc.start_angle), std::sin(arc.start_angle)} *
                                         arc.radius;
                    if (!pts.empty() && (arc_start - pts.back().xy).norm() >= kMergeEps) {
                        local.segments.push_back(PathLeg{pts.back().xy, arc_start});
                    }
                    local.segments.push_back(arc);
                    FlatPath flat = insert_arc_transitions(flatten(local, alpha_arc), profile.d_arc);
                    for (const auto& v : flat.pts) append(v.xy, v.kind);
                    add_span(before, pts.size() - 1, SpanMode::FixedDepth, e.z);
                } else if constexpr (std::is_same_v<T, plan::MeanderElement>) {
                    FlatPath flat =
                        insert_arc_transitions(flatten(expand_meander(e), alpha_arc), profile.d_arc);
                    const std::size_t entry = append(flat.pts.front().xy, flat.pts.front().kind);
                    add_span(before, entry, SpanMode::Surface, 0.0);
                    for (std::size_t i = 1; i < flat.pts.size(); ++i) {
                        append(flat.pts[i].xy, flat.pts[i].kind);
                    }
                    add_span(entry, pts.size() - 1, SpanMode::Sawtooth, e.z_max);
                }
            },
            element);
    }

    if (pts.size() < 2) {
        // Null mission: initial and final at the same point.
        RouteBuilder builder(profile.cruise_speed);
        builder.emit(pts.front().xy, 0.0, pts.front().kind);
        return builder.finish();
    }

    for (const Span& span : spans) {
        if (span.mode == SpanMode::Sawtooth && !(profile.z_min < span.depth)) {
            throw std::invalid_argument("z_min must be < z_max of the survey element");
        }
    }

    RouteBuilder builder(profile.cruise_speed);
    DiveWalker walker(pts, profile, builder);
    walker.run(spans);
    return builder.finish();
}

double route_track_length(const Route& route) {
    double total = 0.0;
    for (std::size_t i = 1; i < route.waypoints.size(); ++i) {
        const Waypoint& a = route.waypoints[i - 1];
        const Waypoint& b = route.waypoints[i];
        const double dxy = std::hypot(b.x - a.x, b.y - a.y);
        total += std::hypot(dxy, b.z - a.z);
    }
    return total;
}

std::string route_to_csv(const Route& route) {
    std::string out = "index,x,y,z,kind,speed\n";
    for (std::size_t i = 0; i < route.waypoints.size(); ++i) {
        const Waypoint& w = route.waypoints[i];
        out += std::to_string(i);
        out += ',' + kv::format_double(w.x);
        out += ',' + kv::format_double(w.y);
        out += ',' + kv::format_double(w.z);
        out += ',';
        out += kind_name(w.kind);
        out += ',' + kv::format_double(w.speed);
        out += '\n';
    }
    return out;
}

Route route_from_csv(std::string_view text) {
    Route route;
    std::size_t pos = 0;
    std::size_t line_no = 0;
    while (pos < text.size()) {
        const std::size_t eol = text.find('\n', pos);
        std::string_view line =
            text.substr(pos, eol == std::string_view::npos ? text.size() - pos : eol - pos);
        pos = (eol == std::string_view::npos) ? text.size() : eol + 1;
        ++line_no;
        if (line.empty()) continue;
        if (line_no == 1) {
            if (line != "index,x,y,z,kind,speed") {
                throw std::runtime_error("unexpected route CSV header");
            }
            continue;
        }
        std::array<std::string_view, 6> fields;
        std::size_t field = 0;
        std::size_t start = 0;
        for (std::size_t i = 0; i <= line.size(); ++i) {
            if (i == line.size() || line[i] == ',') {
                if (field >= fields.size()) throw std::runtime_error("too many route CSV fields");
                fields[field++] = line.substr(start, i - start);
                start = i + 1;
            }
        }
        if (field != 6) {
            throw std::runtime_error("route CSV line " + std::to_string(line_no) + ": want 6 fields");
        }
        const auto num = [&](std::string_view s) {
            double v = 0.0;
            const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
            if (ec != std::errc() || ptr != s.data() + s.size()) {
                throw std::runtime_error("route CSV line " + std::to_string(line_no) +
                                         ": bad number '" + std::string(s) + "'");
            }
            return v;
        };
        Waypoint w;
        w.x = num(fields[1]);
        w.y = num(fields[2]);
        w.z = num(fields[3]);
        w.kind = kind_from_name(fields[4]);
        w.speed = num(fields[5]);
        if (!route.waypoints.empty()) {
            const auto& prev = route.waypoints.back();
            route.horizontal_length += std::hypot(w.x - prev.x, w.y - prev.y);
        }
        route.waypoints.push_back(w);
    }
    // Rebuild the submerged index ranges the same way the generator does.
    std::size_t seg_start = 0;
    bool open = false;
    for (std::size_t i = 0; i < route.waypoints.size(); ++i) {
        const bool submerged = route.waypoints[i].z > 0.0;
        if (submerged && !open) {
            seg_start = i;
            open = true;
        } else if (!submerged && open) {
            route.submerged_segments.emplace_back(seg_start, i - 1);
            open = false;
        }
    }
    if (open) route.submerged_segments.emplace_back(seg_start, route.waypoints.size() - 1);
    return route;
}

std::string route_to_geojson(const Route& route, const geo::Origin& origin) {
    nlohmann::json coords = nlohmann::json::array();
    for (const Waypoint& w : route.waypoints) {
        const auto ll = geo::to_latlon(origin, {w.x, w.y});
        coords.push_back({ll.lon_deg, ll.lat_deg});
    }
    nlohmann::json feature = {
        {"type", "Feature"},
        {"geometry", {{"type", "LineString"}, {"coordinates", coords}}},
        {"properties",
         {{"waypoints", route.waypoints.size()},
          {"horizontal_length_m", route.horizontal_length},
          {"track_length_m", route_track_length(route)}}},
    };
    return feature.dump(2) + "\n";
}

}  // namespace salmon::route
