#include "salmon/guidance.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace salmon::guidance {

namespace {

constexpr double kCoincident = 1e-6;  // [m] vertical-pair detection

bool nav_finite(const proto::NavData& nav) {
    // height_over_ground is legitimately NaN beyond DVL range.
    return std::isfinite(nav.timestamp) && std::isfinite(nav.latitude) &&
           std::isfinite(nav.longitude) && std::isfinite(nav.depth) &&
           std::isfinite(nav.pitch) && std::isfinite(nav.yaw) && std::isfinite(nav.speed);
}

std::int16_t to_pwm(double v) {
    const double clamped = std::clamp(v, -1000.0, 1000.0);
    return static_cast<std::int16_t>(std::lround(clamped));
}

}  // namespace

const char* mode_name(Mode mode) {
    switch (mode) {
        case Mode::Idle: return "idle";
        case Mode::ThrusterDescent: return "thruster_descent";
        case Mode::DiagonalTransit: return "diagonal_transit";
        case Mode::ThrusterAscent: return "thruster_ascent";
        case Mode::SurfaceRun: return "surface_run";
        case Mode::Complete: return "complete";
    }
    return "idle";
}

Mode mode_from_name(std::string_view name) {
    if (name == "idle") return Mode::Idle;
    if (name == "thruster_descent") return Mode::ThrusterDescent;
    if (name == "diagonal_transit") return Mode::DiagonalTransit;
    if (name == "thruster_ascent") return Mode::ThrusterAscent;
    if (name == "surface_run") return Mode::SurfaceRun;
    if (name == "complete") return Mode::Complete;
    throw std::invalid_argument("unknown guidance mode '" + std::string(name) + "'");
}

bool mode_edge_allowed(Mode from, Mode to) {
    if (from == to) return true;
    switch (from) {
        case Mode::Idle:
            return to == Mode::ThrusterDescent || to == Mode::SurfaceRun;
        case Mode::ThrusterDescent:
            return to == Mode::DiagonalTransit;
        case Mode::DiagonalTransit:
            return to == Mode::ThrusterAscent;
        case Mode::ThrusterAscent:
            return to == Mode::SurfaceRun;
        case Mode::SurfaceRun:
            return to == Mode::ThrusterDescent || to == Mode::Complete;
        case Mode::Complete:
            return false;
    }
    return false;
}

double los_heading(const traj::SplineTrajectory& trajectory, const Vec3& p, double s_hint,
                   double lookahead) {
    const double s_star = trajectory.project(p, s_hint);
    const double s_target = std::min(s_star + lookahead, trajectory.total_length());
    const Vec3 target = trajectory.eval(s_target);
    const double dx = target.x - p.x;
    const double dy = target.y - p.y;
    if (std::hypot(dx, dy) < 1e-9) {
        throw std::domain_error("LOS target coincides with vehicle position");
    }
    return std::atan2(dy, dx);
}

double Guidance::Pid::update(double error, double dt) {
    double derivative = 0.0;
    if (primed && dt > 0.0) {
        integral += error * dt;
        if (gains.ki > 0.0) {
            // Anti-windup: integral contribution never exceeds 60% of range.
            const double cap = 0.6 * output_limit / gains.ki;
            integral = std::clamp(integral, -cap, cap);
        }
        derivative = (error - last_error) / dt;
    }
    last_error = error;
    primed = true;
    const double out = gains.kp * error + gains.ki * integral + gains.kd * derivative;
    return std::clamp(out, -output_limit, output_limit);
}

void Guidance::Pid::reset() {
    integral = 0.0;
    last_error = 0.0;
    primed = false;
}

Guidance::Guidance(route::Route route, GuidanceConfig config, geo::Origin origin)
    : route_(std::move(route)), config_(config), origin_(origin) {
    if (route_.waypoints.size() < 2) {
        throw std::invalid_argument("guidance needs a route with at least 2 waypoints");
    }
    heading_pid_.gains = config_.gains.heading;
    heading_pid_.output_limit = config_.diff_limit;
    speed_pid_.gains = config_.gains.speed;
    speed_pid_.output_limit = config_.common_limit;
    depth_pid_.gains = config_.gains.depth;
    depth_pid_.output_limit = 1000.0;
    build_phases();
}

void Guidance::build_phases() {
    const auto& wps = route_.waypoints;

    // Split the route into sections at coincident-(x,y) vertical pairs.
    std::vector<std::pair<std::size_t, std::size_t>> sections;
    std::size_t begin = 0;
    for (std::size_t i = 0; i + 1 < wps.size(); ++i) {
        const double dxy = std::hypot(wps[i + 1].x - wps[i].x, wps[i + 1].y - wps[i].y);
        if (dxy < kCoincident) {
            sections.emplace_back(begin, i);
            begin = i + 1;
        }
    }
    sections.emplace_back(begin, wps.size() - 1);

    for (std::size_t k = 0; k < sections.size(); ++k) {
        const auto [first, last] = sections[k];
        if (k > 0) {
            // Vertical thruster transition bridging the previous section.
            Phase vertical;
            vertical.type = Phase::Type::Vertical;
            vertical.first_waypoint = first;
            vertical.last_waypoint = first;
            vertical.target_depth = wps[first].z;
            vertical.hold_position = {wps[first].x, wps[first].y};
            const double dz = std::abs(wps[first].z - wps[first - 1].z);
            vertical.length = dz;
            vertical.mode = wps[first].z > wps[first - 1].z ? Mode::ThrusterDescent
                                                            : Mode::ThrusterAscent;
            phases_.push_back(std::move(vertical));
        }
        if (last > first) {
            Phase follow;
            follow.type = Phase::Type::Follow;
            follow.first_waypoint = first;
            follow.last_waypoint = last;
            std::vector<Vec3> pts;
            pts.reserve(last - first + 1);
            double max_depth = 0.0;
            for (std::size_t i = first; i <= last; ++i) {
                pts.push_back({wps[i].x, wps[i].y, wps[i].z});
                max_depth = std::max(max_depth, wps[i].z);
            }
            follow.trajectory = traj::SplineTrajectory::fit(pts);
            follow.length = follow.trajectory->total_length();
            follow.mode = max_depth > 1e-6 ? Mode::DiagonalTransit : Mode::SurfaceRun;
            phases_.push_back(std::move(follow));
        }
    }
    for (const Phase& p : phases_) total_length_ += p.length;
    if (total_length_ <= 0.0) {
        throw std::invalid_argument("route has no track to follow");
    }
}

std::optional<proto::LlcCommand> Guidance::activate() {
    if (activated_) return std::nullopt;
    activated_ = true;
    return proto::LlcCommand{proto::LlcMode::Direct};
}

std::optional<proto::LlcCommand> Guidance::shutdown() {
    if (!activated_ || released_) return std::nullopt;
    released_ = true;
    return proto::LlcCommand{proto::LlcMode::NoControl};
}

void Guidance::set_mode(Mode mode, double timestamp) {
    if (mode == mode_) return;
    mode_ = mode;
    mode_history_.emplace_back(timestamp, mode);
}

void Guidance::mark_completed(std::size_t waypoint_index, double timestamp) {
    while (completed_waypoint_ < waypoint_index) {
        ++completed_waypoint_;
        completions_.emplace_back(timestamp, completed_waypoint_);
        if (route_.waypoints[completed_waypoint_].kind == route::WaypointKind::SurfaceStart) {
            ++surfacing_count_;
        }
    }
}

const Guidance::Phase* Guidance::next_follow_phase(std::size_t from) const {
    for (std::size_t i = from; i < phases_.size(); ++i) {
        if (phases_[i].type == Phase::Type::Follow) return &phases_[i];
    }
    return nullptr;
}

void Guidance::enter_phase(std::size_t index, double timestamp) {
    phase_index_ = index;
    s_hint_ = 0.0;
    depth_pid_.reset();
    if (index >= phases_.size()) {
        set_mode(Mode::Complete, timestamp);
        mark_completed(route_.waypoints.size() - 1, timestamp);
        return;
    }
    set_mode(phases_[index].mode, timestamp);
}

proto::LlcSetpointsCwolf Guidance::step(const proto::NavData& nav) {
    const proto::LlcSetpointsCwolf zeros{};
    if (!activated_ || mode_ == Mode::Complete) return zeros;
    if (!nav_finite(nav)) {
        ++bad_nav_;
        return zeros;
    }
    if (nav.timestamp <= last_timestamp_) {
        return last_setpoints_;  // stale fix
    }
    const double dt = last_timestamp_ < 0.0 ? 0.0 : nav.timestamp - last_timestamp_;
    last_timestamp_ = nav.timestamp;

    if (mode_ == Mode::Idle) {
        enter_phase(0, nav.timestamp);
        hold_heading_ = nav.yaw;
    }

    const Vec2 xy = geo::to_local(origin_, {nav.latitude, nav.longitude});
    const Vec3 p{xy.x, xy.y, nav.depth};

    double heading_target = hold_heading_;
    double speed_target = 0.0;
    double depth_out = 0.0;
    bool vertical_authority = false;
    bool elevator_authority = false;

    // Phase bookkeeping first: arriving may advance into the next phase.
    while (phase_index_ < phases_.size()) {
        const Phase& phase = phases_[phase_index_];
        if (phase.type == Phase::Type::Vertical) {
            const bool arrived = phase.mode == Mode::ThrusterDescent
                                     ? nav.depth >= phase.target_depth - config_.depth_tolerance
                                     : nav.depth <= std::max(config_.surfaced_depth,
                                                             phase.target_depth +
                                                                 config_.depth_tolerance) &&
                                           (phase.target_depth > 0.0 ||
                                            nav.depth <= config_.surfaced_depth);
            if (arrived) {
                completed_length_ += phase.length;
                mark_completed(phase.last_waypoint, nav.timestamp);
                enter_phase(phase_index_ + 1, nav.timestamp);
                continue;
            }
        } else {
            const auto& trajectory = *phase.trajectory;
            const double s_star = trajectory.project(p, s_hint_);
            s_hint_ = std::max(s_hint_, s_star);
            const auto& endpoint = route_.waypoints[phase.last_waypoint];
            const double dist_end = std::hypot(endpoint.x - p.x, endpoint.y - p.y);
            if (s_hint_ >= trajectory.total_length() - config_.capture_radius &&
                dist_end <= config_.capture_radius) {
                completed_length_ += phase.length;
                mark_completed(phase.last_waypoint, nav.timestamp);
                enter_phase(phase_index_ + 1, nav.timestamp);
                continue;
            }
            // Waypoints passed along the section.
            const auto& knots = trajectory.knots();
            std::size_t passed = phase.first_waypoint;
            for (std::size_t i = 0; i < knots.size(); ++i) {
                if (knots[i] <= s_hint_ + 1e-9) passed = phase.first_waypoint + i;
            }
            mark_completed(std::min(passed, phase.last_waypoint - 1), nav.timestamp);
        }
        break;
    }

    if (phase_index_ >= phases_.size()) {
        last_setpoints_ = zeros;
        return zeros;
    }

    last_cross_track_.reset();
    last_depth_ref_.reset();

    const Phase& phase = phases_[phase_index_];
    if (phase.type == Phase::Type::Vertical) {
        // Hold station, drive depth with the vertical thrusters.
        speed_target = 0.0;
        vertical_authority = true;
        const double depth_error = phase.target_depth - nav.depth;
        depth_out = depth_pid_.update(depth_error, dt);
        if (const Phase* next = next_follow_phase(phase_index_ + 1)) {
            // Pre-aim at the upcoming section so the resume is straight.
            const Vec3 a = next->trajectory->eval(0.0);
            const Vec3 b = next->trajectory->eval(
                std::min(config_.gains.lookahead, next->trajectory->total_length()));
            if (std::hypot(b.x - a.x, b.y - a.y) > 1e-6) {
                heading_target = std::atan2(b.y - a.y, b.x - a.x);
            }
        }
    } else {
        const auto& trajectory = *phase.trajectory;
        {
            const Vec3 ref = trajectory.eval(std::min(s_hint_, trajectory.total_length()));
            last_cross_track_ = std::hypot(ref.x - p.x, ref.y - p.y);
            last_depth_ref_ = ref.z;
        }
        const double remaining = trajectory.total_length() - s_hint_;
        const auto& endpoint = route_.waypoints[phase.last_waypoint];
        const double cruise = endpoint.speed > 0.0 ? endpoint.speed : 1.5;
        speed_target = std::clamp(0.6 * std::max(remaining, 0.0) + config_.min_approach_speed,
                                  config_.min_approach_speed, cruise);
        try {
            heading_target = los_heading(trajectory, p, s_hint_, config_.gains.lookahead);
            hold_heading_ = heading_target;
        } catch (const std::domain_error&) {
            heading_target = hold_heading_;
        }

        if (phase.mode == Mode::DiagonalTransit) {
            elevator_authority = true;
            const double s_ref = std::min(s_hint_, trajectory.total_length());
            const double z_ref = trajectory.eval(s_ref).z;
            // Feedforward pitch from the reference slope plus PID correction.
            double slope_ff = 0.0;
            try {
                const Vec3 t = trajectory.tangent(s_ref);
                const double horizontal = std::hypot(t.x, t.y);
                if (horizontal > 1e-6) slope_ff = t.z / horizontal;
            } catch (const std::domain_error&) {
            }
            const double gate = std::clamp(
                std::abs(nav.speed) / config_.elevator_gate_speed, 0.25, 1.0);
            const double theta_ff = std::atan(slope_ff);
            const double ff =
                1000.0 * theta_ff / deg2rad(config_.pitch_max_deg) / gate;
            const double depth_error = z_ref - nav.depth;
            depth_out = std::clamp(ff + depth_pid_.update(depth_error, dt), -1000.0, 1000.0);
        }
        // SurfaceRun: vertical thrusters and elevator stay at zero.
    }

    const double heading_error = wrap_angle(heading_target - nav.yaw);
    const double diff = heading_pid_.update(heading_error, dt);
    const double common = speed_pid_.update(speed_target - nav.speed, dt);

    proto::LlcSetpointsCwolf sp;
    sp.pwm[proto::kMainPort] = to_pwm(common + diff);
    sp.pwm[proto::kMainStarboard] = to_pwm(common - diff);
    sp.pwm[proto::kLateralBow] = elevator_authority ? to_pwm(depth_out) : 0;
    sp.pwm[proto::kLateralStern] = elevator_authority ? to_pwm(-depth_out) : 0;
    sp.pwm[proto::kVerticalBow] = vertical_authority ? to_pwm(depth_out) : 0;
    sp.pwm[proto::kVerticalStern] = vertical_authority ? to_pwm(depth_out) : 0;
    last_setpoints_ = sp;
    return sp;
}

ProgressReport Guidance::progress() const {
    ProgressReport report;
    report.mode = mode_;
    report.waypoint_index = completed_waypoint_;
    report.surfacing_count = surfacing_count_;
    double done = completed_length_;
    if (mode_ != Mode::Complete && phase_index_ < phases_.size() &&
        phases_[phase_index_].type == Phase::Type::Follow) {
        done += std::min(s_hint_, phases_[phase_index_].length);
    }
    report.fraction = total_length_ > 0.0 ? std::clamp(done / total_length_, 0.0, 1.0) : 1.0;
    if (mode_ == Mode::Complete) report.fraction = 1.0;
    return report;
}

}  // namespace salmon::guidance
