#include "salmon/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

#include "salmon/keyvalue.hpp"

namespace salmon::sim {

double sample_plume(const PlumeField& field, const Vec3& position) {
    const Vec3 d = position - field.source;
    const double q = (d.x * d.x) / (2.0 * field.sigma.x * field.sigma.x) +
                     (d.y * d.y) / (2.0 * field.sigma.y * field.sigma.y) +
                     (d.z * d.z) / (2.0 * field.sigma.z * field.sigma.z);
    const double c = field.background + field.peak * std::exp(-q);
    return std::clamp(c, 0.0, 1000.0);
}

Simulator::Simulator(const VehicleParams& params, const SimConfig& config)
    : params_(params), config_(config), rng_(config.seed) {
    state_.position = {config_.start_position.x, config_.start_position.y, 0.0};
    state_.yaw = wrap_angle(config_.start_yaw);
    estimate_ = config_.start_position;
    last_true_ = config_.start_position;
}

void Simulator::handle(const proto::Telegram& telegram) {
    if (const auto* cmd = std::get_if<proto::LlcCommand>(&telegram)) {
        if (cmd->mode == proto::LlcMode::Direct) was_direct_ = true;
        if (cmd->mode == proto::LlcMode::NoControl) {
            commanded_pwm_.fill(0);
            if (was_direct_) released_ = true;
        }
        mode_ = cmd->mode;
        return;
    }
    if (const auto* sp = std::get_if<proto::LlcSetpointsCwolf>(&telegram)) {
        if (mode_ != proto::LlcMode::Direct) {
            ++rejected_setpoints_;
            pending_errors_.push_back(
                {1, "LLC_Setpoints_CWolf received outside direct mode"});
            return;
        }
        commanded_pwm_ = sp->pwm;
        return;
    }
    if (std::get_if<proto::LlcSetpoint>(&telegram)) {
        // Controlled mode is accepted on the wire but not implemented here.
        if (mode_ != proto::LlcMode::Controlled) {
            ++rejected_setpoints_;
            pending_errors_.push_back({2, "LLC_Setpoint received outside controlled mode"});
        }
        return;
    }
    // NAV_Data / LLC_Status / LLC_Error are not consumed by the vehicle.
}

void Simulator::step_dynamics(double dt) {
    // Motor lag toward commanded PWM.
    for (std::size_t i = 0; i < proto::kMotorCount; ++i) {
        const double cmd = (mode_ == proto::LlcMode::Direct)
                               ? static_cast<double>(commanded_pwm_[i])
                               : 0.0;
        state_.motor_pwm[i] += (cmd - state_.motor_pwm[i]) * dt / params_.motor_tau;
    }
    const auto pwm = [&](std::size_t i) { return state_.motor_pwm[i] / 1000.0; };

    // Surge: thrust from both mains against quadratic drag.
    const double thrust = params_.thrust_max() * (pwm(proto::kMainPort) + pwm(proto::kMainStarboard));
    const double drag = params_.drag_coeff * state_.surge * std::abs(state_.surge);
    const double m_eff = params_.mass * params_.added_mass_factor;
    state_.surge += (thrust - drag) / m_eff * dt;
    state_.surge = std::clamp(state_.surge, params_.min_speed, params_.max_speed);

    // Yaw rate: first order toward the differential main command.
    const double delta = pwm(proto::kMainPort) - pwm(proto::kMainStarboard);
    state_.yaw_rate += (params_.yaw_rate_gain * delta - state_.yaw_rate) * dt / params_.yaw_tau;
    state_.yaw = wrap_angle(state_.yaw + state_.yaw_rate * dt);

    // Pitch: elevator pair, effective with flow over the planes.
    const double gate =
        std::clamp(std::abs(state_.surge) / params_.elevator_gate_speed, 0.0, 1.0);
    const double elevator = (pwm(proto::kLateralBow) - pwm(proto::kLateralStern)) / 2.0;
    const double pitch_cmd = -deg2rad(params_.pitch_max_deg) * elevator * gate;
    state_.pitch += (pitch_cmd - state_.pitch) * dt / params_.pitch_tau;
    state_.pitch = std::clamp(state_.pitch, -kPi / 4.0, kPi / 4.0);

    // Depth: pitched flight plus vertical thrusters (fading with speed).
    const double fade = std::clamp(
        (params_.thruster_fade_end - std::abs(state_.surge)) /
            (params_.thruster_fade_end - params_.thruster_fade_start),
        0.0, 1.0);
    const double heave =
        params_.heave_max * (pwm(proto::kVerticalBow) + pwm(proto::kVerticalStern)) / 2.0 * fade;
    const double z_rate = -state_.surge * std::sin(state_.pitch) + heave;
    state_.position.z = std::max(0.0, state_.position.z + z_rate * dt);

    // Horizontal kinematics.
    const double ground_speed = state_.surge * std::cos(state_.pitch);
    state_.position.x += ground_speed * std::cos(state_.yaw) * dt;
    state_.position.y += ground_speed * std::sin(state_.yaw) * dt;
}

void Simulator::step() {
    step_dynamics(config_.dt);
    state_.t += config_.dt;

    if (state_.position.z < config_.gps_depth) {
        // GPS fix resets dead reckoning.
        estimate_ = state_.position.horizontal();
    } else {
        const double sigma = config_.drift_rate * std::sqrt(config_.dt);
        estimate_.x += state_.position.x - last_true_.x + unit_normal_(rng_) * sigma;
        estimate_.y += state_.position.y - last_true_.y + unit_normal_(rng_) * sigma;
    }
    last_true_ = state_.position.horizontal();
}

proto::NavData Simulator::nav() const {
    proto::NavData nav;
    nav.timestamp = state_.t;
    const bool gps = state_.position.z < config_.gps_depth;
    const auto ll = geo::to_latlon(config_.origin, estimate_);
    nav.latitude = ll.lat_deg;
    nav.longitude = ll.lon_deg;
    nav.depth = state_.position.z;
    nav.roll = 0.0;
    nav.pitch = state_.pitch;
    nav.yaw = wrap_angle(state_.yaw);
    nav.speed = state_.surge;
    const double hog = config_.seabed_depth - state_.position.z;
    nav.height_over_ground =
        hog <= config_.dvl_range ? hog : std::numeric_limits<double>::quiet_NaN();
    nav.gps_fix = gps;
    return nav;
}

proto::LlcStatus Simulator::status() const {
    proto::LlcStatus st;
    for (std::size_t i = 0; i < proto::kMotorCount; ++i) {
        st.motors[i].rpm = static_cast<float>(state_.motor_pwm[i] * 3.0);
        st.motors[i].enabled = mode_ == proto::LlcMode::Direct;
    }
    st.mode_echo = mode_;
    return st;
}

std::vector<proto::LlcError> Simulator::drain_errors() {
    return std::exchange(pending_errors_, {});
}

const char* Simulator::state_csv_header() { return "t,x,y,z,yaw,pitch,u"; }

std::string Simulator::state_csv_row() const {
    std::string row = kv::format_double(state_.t);
    row += ',' + kv::format_double(state_.position.x);
    row += ',' + kv::format_double(state_.position.y);
    row += ',' + kv::format_double(state_.position.z);
    row += ',' + kv::format_double(state_.yaw);
    row += ',' + kv::format_double(state_.pitch);
    row += ',' + kv::format_double(state_.surge);
    return row;
}

}  // namespace salmon::sim
