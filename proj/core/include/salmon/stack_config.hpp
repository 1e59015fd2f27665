#pragma once

#include <string>
#include <string_view>

#include "salmon/guidance.hpp"
#include "salmon/measurement.hpp"
#include "salmon/mission_plan.hpp"
#include "salmon/route_gen.hpp"
#include "salmon/simulator.hpp"

namespace salmon::cfg {

/// Everything the stack processes need: UDP address plan, mission file,
/// route profile, control gains, simulator and sensor setup. One key-value
/// file, sections [stack], [profile], [gains], [guidance], [simulator],
/// [sensors]. All keys optional except stack.mission.
struct StackConfig {
    // [stack]
    std::string mission_path;
    std::string log_dir = "logs";
    std::string cc_addr = "127.0.0.1:45000";
    std::string sc_addr = "127.0.0.1:45001";
    std::string mc_addr = "127.0.0.1:45002";
    double nav_timeout_s = 5.0;        // SC watchdog on lost NavData
    double mission_timeout_s = 7200.0;  // simulated-time cap

    route::RouteProfile profile;
    guidance::GuidanceConfig guidance;
    sim::VehicleParams vehicle;
    sim::SimConfig simulator;
    meas::SensorConfig sensors;
};

/// Parses config text; relative mission paths resolve against base_dir.
StackConfig parse_stack_config(std::string_view text, const std::string& base_dir);

StackConfig load_stack_config(const std::string& path);

/// Loads the mission named by the config and fills derived simulator fields
/// (origin, start position at the initial element).
plan::MissionPlan load_mission(StackConfig& config);

}  // namespace salmon::cfg
