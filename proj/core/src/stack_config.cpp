#include "salmon/stack_config.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "salmon/keyvalue.hpp"

namespace salmon::cfg {

StackConfig parse_stack_config(std::string_view text, const std::string& base_dir) {
    const kv::Document doc = kv::Document::parse(text);
    StackConfig out;

    for (const kv::Section& sec : doc.sections) {
        if (sec.name != "stack" && sec.name != "profile" && sec.name != "gains" &&
            sec.name != "guidance" && sec.name != "simulator" && sec.name != "sensors") {
            throw std::runtime_error("unexpected section [" + sec.name + "] in stack config");
        }
    }

    if (const kv::Section* s = doc.find("stack")) {
        out.mission_path = s->get_string_or("mission", "");
        out.log_dir = s->get_string_or("log_dir", out.log_dir);
        out.cc_addr = s->get_string_or("cc", out.cc_addr);
        out.sc_addr = s->get_string_or("sc", out.sc_addr);
        out.mc_addr = s->get_string_or("mc", out.mc_addr);
        out.nav_timeout_s = s->get_double_or("nav_timeout_s", out.nav_timeout_s);
        out.mission_timeout_s = s->get_double_or("mission_timeout_s", out.mission_timeout_s);
    }
    if (!out.mission_path.empty() && !base_dir.empty()) {
        const std::filesystem::path p(out.mission_path);
        if (p.is_relative()) out.mission_path = (std::filesystem::path(base_dir) / p).string();
    }

    if (const kv::Section* s = doc.find("profile")) {
        auto& p = out.profile;
        p.alpha_arc_deg = s->get_double_or("alpha_arc_deg", p.alpha_arc_deg);
        p.d_arc = s->get_double_or("d_arc", p.d_arc);
        p.z_min = s->get_double_or("z_min", p.z_min);
        p.alpha_dive_deg = s->get_double_or("alpha_dive_deg", p.alpha_dive_deg);
        p.d_dive = s->get_double_or("d_dive", p.d_dive);
        p.l_gps = s->get_double_or("l_gps", p.l_gps);
        p.cruise_speed = s->get_double_or("cruise_speed", p.cruise_speed);
    }

    if (const kv::Section* s = doc.find("gains")) {
        auto& g = out.guidance.gains;
        g.heading.kp = s->get_double_or("heading_kp", g.heading.kp);
        g.heading.ki = s->get_double_or("heading_ki", g.heading.ki);
        g.heading.kd = s->get_double_or("heading_kd", g.heading.kd);
        g.depth.kp = s->get_double_or("depth_kp", g.depth.kp);
        g.depth.ki = s->get_double_or("depth_ki", g.depth.ki);
        g.depth.kd = s->get_double_or("depth_kd", g.depth.kd);
        g.speed.kp = s->get_double_or("speed_kp", g.speed.kp);
        g.speed.ki = s->get_double_or("speed_ki", g.speed.ki);
        g.speed.kd = s->get_double_or("speed_kd", g.speed.kd);
        g.lookahead = s->get_double_or("lookahead", g.lookahead);
    }

    if (const kv::Section* s = doc.find("guidance")) {
        auto& g = out.guidance;
        g.capture_radius = s->get_double_or("capture_radius", g.capture_radius);
        g.depth_tolerance = s->get_double_or("depth_tolerance", g.depth_tolerance);
        g.surfaced_depth = s->get_double_or("surfaced_depth", g.surfaced_depth);
        g.pitch_max_deg = s->get_double_or("pitch_max_deg", g.pitch_max_deg);
        g.elevator_gate_speed = s->get_double_or("elevator_gate_speed", g.elevator_gate_speed);
        g.min_approach_speed = s->get_double_or("min_approach_speed", g.min_approach_speed);
        g.diff_limit = s->get_double_or("diff_limit", g.diff_limit);
        g.common_limit = s->get_double_or("common_limit", g.common_limit);
    }

    if (const kv::Section* s = doc.find("simulator")) {
        auto& c = out.simulator;
        c.dt = s->get_double_or("dt", c.dt);
        c.seed = static_cast<std::uint64_t>(s->get_int_or("seed", static_cast<std::int64_t>(c.seed)));
        c.seabed_depth = s->get_double_or("seabed_depth", c.seabed_depth);
        c.dvl_range = s->get_double_or("dvl_range", c.dvl_range);
        c.drift_rate = s->get_double_or("drift_rate", c.drift_rate);
        c.gps_depth = s->get_double_or("gps_depth", c.gps_depth);
        c.start_yaw = deg2rad(s->get_double_or("start_yaw_deg", rad2deg(c.start_yaw)));
        auto& plume = c.environment.plume;
        plume.source.x = s->get_double_or("plume_x", plume.source.x);
        plume.source.y = s->get_double_or("plume_y", plume.source.y);
        plume.source.z = s->get_double_or("plume_z", plume.source.z);
        plume.sigma.x = s->get_double_or("plume_sx", plume.sigma.x);
        plume.sigma.y = s->get_double_or("plume_sy", plume.sigma.y);
        plume.sigma.z = s->get_double_or("plume_sz", plume.sigma.z);
        plume.peak = s->get_double_or("plume_peak", plume.peak);
        plume.background = s->get_double_or("plume_background", plume.background);
    }

    if (const kv::Section* s = doc.find("sensors")) {
        auto& m = out.sensors;
        m.nitrate.period = s->get_double_or("nitrate_period", m.nitrate.period);
        m.oxygen.period = s->get_double_or("oxygen_period", m.oxygen.period);
        m.conductivity.period = s->get_double_or("conductivity_period", m.conductivity.period);
        m.temperature.period = s->get_double_or("temperature_period", m.temperature.period);
        m.max_fix_age = s->get_double_or("max_fix_age", m.max_fix_age);
    }

    return out;
}

StackConfig load_stack_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open config '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_stack_config(buf.str(),
                              std::filesystem::path(path).parent_path().string());
}

plan::MissionPlan load_mission(StackConfig& config) {
    if (config.mission_path.empty()) {
        throw std::runtime_error("config has no stack.mission entry");
    }
    plan::MissionPlan plan = plan::load_plan_file(config.mission_path);
    config.simulator.origin = {plan.origin_lat, plan.origin_lon};
    if (!plan.elements.empty()) {
        if (const auto* initial = std::get_if<plan::InitialElement>(&plan.elements.front())) {
            config.simulator.start_position = {initial->x, initial->y};
        }
    }
    return plan;
}

}  // namespace salmon::cfg
