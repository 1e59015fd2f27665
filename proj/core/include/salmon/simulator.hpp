#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "salmon/geo.hpp"
#include "salmon/geometry.hpp"
#include "salmon/protocol/telegrams.hpp"

namespace salmon::sim {

/// CWolf data sheet values plus the fitted model coefficients. Thrust is
/// calibrated so full throttle on both mains balances drag exactly at
/// max_speed.
struct VehicleParams {
    // data sheet
    double length = 2.20;          // [m]
    double diameter = 0.30;        // [m]
    double mass = 135.0;           // [kg]
    double max_speed = 3.09;       // [m/s] (6 kn)
    double endurance_hours = 3.0;  // at 3 kn
    double payload_kg = 15.0;

    // model coefficients
    double added_mass_factor = 1.5;    // effective surge mass = mass * factor
    double drag_coeff = 30.0;          // [N s^2/m^2] quadratic surge drag
    double motor_tau = 0.3;            // [s] first-order motor lag
    double yaw_rate_gain = 0.4;        // [rad/s] per unit differential command
    double yaw_tau = 1.0;              // [s]
    double pitch_max_deg = 30.0;       // elevator authority at speed
    double pitch_tau = 1.5;            // [s]
    double elevator_gate_speed = 1.0;  // [m/s] full elevator authority above this
    double heave_max = 0.4;            // [m/s] vertical thruster authority at rest
    double thruster_fade_start = 1.0;  // [m/s] vertical thrusters fade above this
    double thruster_fade_end = 2.0;    // [m/s] and are gone here
    double min_speed = -0.5;           // [m/s] reverse bound

    /// Per-motor max thrust [N]; 2 * thrust_max = drag_coeff * max_speed^2.
    double thrust_max() const { return 0.5 * drag_coeff * max_speed * max_speed; }
};

struct VehicleState {
    double t = 0.0;  // [s]
    Vec3 position;   // true NED position
    double yaw = 0.0;
    double pitch = 0.0;
    double surge = 0.0;     // body forward speed u [m/s]
    double yaw_rate = 0.0;  // [rad/s]
    std::array<double, proto::kMotorCount> motor_pwm{};  // actual, after lag
};

/// Gaussian nitrate plume standing in for aqua-farm discharge.
struct PlumeField {
    Vec3 source{100.0, 45.0, 10.0};
    Vec3 sigma{60.0, 40.0, 6.0};  // [m]
    double peak = 800.0;          // [ug/l]
    double background = 3.0;      // [ug/l]
};

/// Concentration at a point, clamped to the sensor range [0, 1000] ug/l.
double sample_plume(const PlumeField& field, const Vec3& position);

/// Synthetic water column sampled by the measurement computer. The nitrate
/// channel is the plume; the others follow simple depth laws within their
/// sensor ranges.
struct EnvironmentModel {
    PlumeField plume;

    double nitrate(const Vec3& position) const { return sample_plume(plume, position); }
    double oxygen(double depth) const { return 320.0 - 1.5 * depth; }
    double conductivity(double depth) const { return 33.0 + 0.05 * depth; }
    double temperature(double depth) const { return 12.0 - 0.08 * depth; }
};

struct SimConfig {
    double dt = 0.1;              // [s] fixed step, 10 Hz NavData
    std::uint64_t seed = 1;
    double seabed_depth = 60.0;   // [m]
    double dvl_range = 80.0;      // [m] height-over-ground reports NaN beyond
    double drift_rate = 0.02;     // [m/sqrt(s)] dead-reckoning random walk
    double gps_depth = 0.3;       // [m] GPS fix available above this depth
    geo::Origin origin;
    Vec2 start_position;          // true NED start
    double start_yaw = 0.0;       // [rad]
    EnvironmentModel environment;
};

/// Control-computer stand-in: actuators, sensors and rigid-body behavior of
/// the vehicle. 4-DOF reduced model (surge, yaw, pitch, depth; roll frozen),
/// fixed-step and fully deterministic for a given seed and input sequence.
class Simulator {
public:
    Simulator(const VehicleParams& params, const SimConfig& config);

    /// Applies pending setpoints and advances one fixed step.
    void step();

    /// Direct-mode motor command; ignored (and counted) unless direct mode
    /// is active.
    void handle(const proto::Telegram& telegram);

    proto::NavData nav() const;
    proto::LlcStatus status() const;

    /// Error telegrams produced since the last drain (wrong-mode setpoints
    /// and similar protocol misuse).
    std::vector<proto::LlcError> drain_errors();

    const VehicleState& state() const { return state_; }
    proto::LlcMode mode() const { return mode_; }
    double time() const { return state_.t; }
    const SimConfig& config() const { return config_; }

    /// True once an LLC_Command{NoControl} arrived after direct mode was
    /// active: the mission is over from the vehicle's point of view.
    bool released() const { return released_; }

    /// "t,x,y,z,yaw,pitch,u" row for the state log.
    std::string state_csv_row() const;
    static const char* state_csv_header();

private:
    void step_dynamics(double dt);

    VehicleParams params_;
    SimConfig config_;
    VehicleState state_;
    proto::LlcMode mode_ = proto::LlcMode::NoControl;
    bool was_direct_ = false;
    bool released_ = false;
    std::array<std::int16_t, proto::kMotorCount> commanded_pwm_{};
    Vec2 estimate_;   // dead-reckoned horizontal position
    Vec2 last_true_;  // previous step's true position
    std::mt19937_64 rng_;
    std::normal_distribution<double> unit_normal_{0.0, 1.0};
    std::vector<proto::LlcError> pending_errors_;
    std::uint64_t rejected_setpoints_ = 0;
};

}  // namespace salmon::sim
