#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include "salmon/geo.hpp"
#include "salmon/geometry.hpp"
#include "salmon/protocol/telegrams.hpp"
#include "salmon/route_gen.hpp"
#include "salmon/trajectory.hpp"

namespace salmon::guidance {

// Scientific-computer runtime core: steps through the generated route and
// produces per-motor PWM setpoints in direct mode. Deterministic: state
// advances only on NavData, never on wall clock.

enum class Mode {
    Idle,
    ThrusterDescent,
    DiagonalTransit,
    ThrusterAscent,
    SurfaceRun,
    Complete,
};

const char* mode_name(Mode mode);
Mode mode_from_name(std::string_view name);

/// Legal transitions of the guidance state machine (see docs/guidance-modes.md).
bool mode_edge_allowed(Mode from, Mode to);

struct PidGains {
    double kp = 0.0;
    double ki = 0.0;
    double kd = 0.0;
};

struct ControlGains {
    PidGains heading{900.0, 20.0, 300.0};  // PWM per rad
    PidGains depth{420.0, 35.0, 520.0};    // PWM per m
    PidGains speed{600.0, 160.0, 0.0};     // PWM per m/s
    double lookahead = 6.0;                // [m]
};

struct GuidanceConfig {
    ControlGains gains;
    double capture_radius = 3.0;        // [m] waypoint/goal arrival
    double depth_tolerance = 0.25;      // [m] vertical target capture
    double surfaced_depth = 0.08;       // [m] thruster ascent complete below this
    double pitch_max_deg = 30.0;        // must match the vehicle allocation
    double elevator_gate_speed = 1.0;   // [m/s] must match the vehicle model
    double min_approach_speed = 0.35;   // [m/s] taper floor near pivots
    double diff_limit = 350.0;          // differential main PWM bound
    double common_limit = 650.0;        // common main PWM bound
};

struct ProgressReport {
    Mode mode = Mode::Idle;
    std::size_t waypoint_index = 0;  // last completed route waypoint
    double fraction = 0.0;           // [0, 1] monotone
    std::size_t surfacing_count = 0;
};

/// Heading toward the lookahead point on the trajectory: project p near
/// s_hint, aim at eval(s* + lookahead) clamped to the section end.
double los_heading(const traj::SplineTrajectory& trajectory, const Vec3& p, double s_hint,
                   double lookahead);

class Guidance {
public:
    Guidance(route::Route route, GuidanceConfig config, geo::Origin origin);

    /// First call returns LLC_Command{Direct} for the runtime to send;
    /// repeated calls return nothing (idempotent).
    std::optional<proto::LlcCommand> activate();

    /// Returns LLC_Command{NoControl} once, after activation.
    std::optional<proto::LlcCommand> shutdown();

    /// One setpoint per NavData tick. Stale fixes return the previous
    /// setpoints; non-finite fixes return safe zeros.
    proto::LlcSetpointsCwolf step(const proto::NavData& nav);

    Mode mode() const { return mode_; }
    bool activated() const { return activated_; }
    bool complete() const { return mode_ == Mode::Complete; }
    ProgressReport progress() const;

    /// (timestamp, waypoint index) in completion order.
    const std::vector<std::pair<double, std::size_t>>& completions() const {
        return completions_;
    }
    /// (timestamp, mode) at every transition, Idle excluded on entry.
    const std::vector<std::pair<double, Mode>>& mode_history() const { return mode_history_; }

    std::uint64_t bad_nav_count() const { return bad_nav_; }
    const route::Route& route() const { return route_; }

    /// Horizontal distance to the reference at the last step, when the
    /// vehicle was following a trajectory section (not pivoting).
    std::optional<double> last_cross_track() const { return last_cross_track_; }
    /// Reference depth at the last projected trajectory point.
    std::optional<double> last_depth_ref() const { return last_depth_ref_; }

private:
    struct Pid {
        PidGains gains;
        double integral = 0.0;
        double last_error = 0.0;
        bool primed = false;
        double output_limit = 1000.0;

        double update(double error, double dt);
        void reset();
    };

    // A phase is either a trajectory section to follow or a vertical
    // thruster transition between sections.
    struct Phase {
        enum class Type { Follow, Vertical };
        Type type = Type::Follow;
        Mode mode = Mode::SurfaceRun;
        std::optional<traj::SplineTrajectory> trajectory;  // Follow
        std::size_t first_waypoint = 0;
        std::size_t last_waypoint = 0;
        double target_depth = 0.0;  // Vertical
        Vec2 hold_position;         // Vertical: pivot location
        double length = 0.0;        // progress weight
    };

    void build_phases();
    void enter_phase(std::size_t index, double timestamp);
    void set_mode(Mode mode, double timestamp);
    void mark_completed(std::size_t waypoint_index, double timestamp);
    const Phase* next_follow_phase(std::size_t from) const;

    route::Route route_;
    GuidanceConfig config_;
    geo::Origin origin_;

    std::vector<Phase> phases_;
    std::size_t phase_index_ = 0;
    double s_hint_ = 0.0;

    Mode mode_ = Mode::Idle;
    bool activated_ = false;
    bool released_ = false;

    Pid heading_pid_;
    Pid depth_pid_;
    Pid speed_pid_;

    double last_timestamp_ = -1.0;
    proto::LlcSetpointsCwolf last_setpoints_{};
    double hold_heading_ = 0.0;

    std::size_t completed_waypoint_ = 0;
    double completed_length_ = 0.0;
    double total_length_ = 0.0;
    std::size_t surfacing_count_ = 0;
    std::uint64_t bad_nav_ = 0;

    std::vector<std::pair<double, std::size_t>> completions_;
    std::vector<std::pair<double, Mode>> mode_history_;
    std::optional<double> last_cross_track_;
    std::optional<double> last_depth_ref_;
};

}  // namespace salmon::guidance
