#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "salmon/analysis.hpp"
#include "salmon/harness.hpp"
#include "salmon/keyvalue.hpp"
#include "salmon/logs.hpp"
#include "salmon/mission_plan.hpp"
#include "salmon/route_gen.hpp"
#include "salmon/stack_config.hpp"

// Exit codes: 0 ok, 2 input error, 3 runtime/environment error, 4 invariant
// violation (analyze).

namespace {

namespace fs = std::filesystem;
using namespace salmon;

cfg::StackConfig load_config_or_default(const std::string& config_path,
                                        const std::string& mission_override) {
    cfg::StackConfig config;
    if (!config_path.empty()) config = cfg::load_stack_config(config_path);
    if (!mission_override.empty()) config.mission_path = mission_override;
    return config;
}

int cmd_compile(const std::string& mission_path, const std::string& config_path,
                const std::string& out_dir) {
    cfg::StackConfig config = load_config_or_default(config_path, mission_path);

    plan::MissionPlan plan;
    try {
        plan = plan::load_plan_file(config.mission_path);
    } catch (const std::exception& e) {
        std::cerr << "salmon compile: " << e.what() << "\n";
        return 2;
    }
    const auto violations = plan::validate_plan(plan);
    if (!violations.empty()) {
        for (const auto& v : violations) std::cerr << "violation: " << v << "\n";
        return 2;
    }

    route::Route route;
    try {
        route = route::generate_route(plan, config.profile);
    } catch (const std::exception& e) {
        std::cerr << "salmon compile: " << e.what() << "\n";
        return 2;
    }

    fs::create_directories(out_dir);
    logs::write_text_file((fs::path(out_dir) / "route.csv").string(), route::route_to_csv(route));
    logs::write_text_file((fs::path(out_dir) / "track.geojson").string(),
                          route::route_to_geojson(route, {plan.origin_lat, plan.origin_lon}));

    std::size_t surfacings = 0;
    for (const auto& w : route.waypoints) {
        if (w.kind == route::WaypointKind::SurfaceStart) ++surfacings;
    }
    std::cout << "mission:            " << plan.name << "\n"
              << "waypoints:          " << route.waypoints.size() << "\n"
              << "horizontal length:  " << kv::format_double(route.horizontal_length) << " m\n"
              << "track length:       " << kv::format_double(route::route_track_length(route))
              << " m\n"
              << "surfacings:         " << surfacings << "\n"
              << "submerged sections: " << route.submerged_segments.size() << "\n";
    for (const auto& warning : route.warnings) std::cout << "warning: " << warning << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "salmon - desk-scale AUV water-quality survey stack\n"
        "mission compiler, vehicle simulator, guidance/measurement runtime, log analyzer"};
    app.require_subcommand(1);

    std::string mission_path;
    std::string config_path;
    std::string out_dir = "out";
    std::string log_dir;
    double realtime = 0.0;
    double duration = 0.0;
    bool single_process = false;
    std::optional<std::uint64_t> seed;

    CLI::App* compile = app.add_subcommand("compile", "expand a mission plan into a route");
    compile->add_option("mission", mission_path, "mission plan (.mis)")->required();
    compile->add_option("--config", config_path, "stack config for the route profile");
    compile->add_option("-o,--out", out_dir, "output directory (route.csv, track.geojson)");

    CLI::App* sim = app.add_subcommand("sim", "run the vehicle simulator (CC stand-in)");
    sim->add_option("--config", config_path, "stack config")->required();
    sim->add_option("--realtime", realtime, "pacing factor (0 = free-running)");
    sim->add_option("--duration", duration, "simulated seconds cap (default: config timeout)");
    sim->add_option("--seed", seed, "override simulator seed");
    sim->add_option("--log-dir", log_dir, "override config log_dir");

    CLI::App* run = app.add_subcommand("run", "run guidance (SC) + measurement (MC)");
    run->add_option("--config", config_path, "stack config")->required();
    run->add_flag("--single-process", single_process,
                  "host simulator in-process over loopback ports (test-phase-2 topology)");
    run->add_option("--seed", seed, "override simulator seed (single-process)");
    run->add_option("--log-dir", log_dir, "override config log_dir");

    CLI::App* analyze = app.add_subcommand("analyze", "replay logs against the invariant suites");
    analyze->add_option("logdir", log_dir, "log directory of a finished run")->required();
    analyze->add_option("--config", config_path, "stack config the run used")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (compile->parsed()) {
            return cmd_compile(mission_path, config_path, out_dir);
        }

        if (sim->parsed() || run->parsed()) {
            cfg::StackConfig config;
            try {
                config = cfg::load_stack_config(config_path);
            } catch (const std::exception& e) {
                std::cerr << "salmon: " << e.what() << "\n";
                return 2;
            }
            if (seed) config.simulator.seed = *seed;
            const std::string dir = log_dir.empty() ? config.log_dir : log_dir;

            if (sim->parsed()) {
                return harness::run_simulator_process(std::move(config), realtime, duration, dir);
            }
            if (single_process) {
                const auto result = harness::run_single_process(
                    std::move(config), harness::Transport::InProcess, dir);
                std::cout << "salmon run: " << (result.completed ? "complete" : "timeout")
                          << " after " << result.sim_seconds << " s simulated, "
                          << result.surfacing_count << " surfacings\n";
                return result.completed ? 0 : 3;
            }
            return harness::run_sc_mc_process(std::move(config), dir);
        }

        if (analyze->parsed()) {
            if (!fs::exists(fs::path(log_dir) / "mission.jsonl")) {
                std::cerr << "salmon analyze: no mission.jsonl in '" << log_dir << "'\n";
                return 2;
            }
            cfg::StackConfig config;
            try {
                config = cfg::load_stack_config(config_path);
            } catch (const std::exception& e) {
                std::cerr << "salmon analyze: " << e.what() << "\n";
                return 2;
            }
            const auto report = analyze::analyze_run(std::move(config), log_dir);
            logs::write_text_file((fs::path(log_dir) / "depth_profile.csv").string(),
                                  report.depth_profile_csv);
            std::cout << "ticks:             " << report.ticks << "\n"
                      << "mode transitions:  " << report.mode_transitions << "\n"
                      << "surfacings:        " << report.surfacings << "\n"
                      << "cross-track RMS:   " << report.cross_track_rms << " m\n"
                      << "cross-track max:   " << report.max_cross_track << " m\n"
                      << "max depth:         " << report.max_depth << " m\n"
                      << "measurement rows:  " << report.measurement_rows << "\n";
            if (!report.ok()) {
                for (const auto& v : report.violations) std::cerr << "violation: " << v << "\n";
                return 4;
            }
            std::cout << "all invariants hold\n";
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "salmon: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
