#include "salmon/analysis.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <optional>
#include <sstream>

#include "salmon/guidance.hpp"
#include "salmon/keyvalue.hpp"
#include "salmon/logs.hpp"
#include "salmon/protocol/codec.hpp"

namespace salmon::analyze {

namespace {

struct StateRow {
    double t, x, y, z, yaw, pitch, u;
};

std::vector<StateRow> parse_state_csv(const std::string& text) {
    std::vector<StateRow> rows;
    std::istringstream in(text);
    std::string line;
    std::getline(in, line);  // header
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        StateRow row{};
        double* fields[] = {&row.t, &row.x, &row.y, &row.z, &row.yaw, &row.pitch, &row.u};
        std::size_t start = 0;
        for (double* field : fields) {
            const std::size_t comma = line.find(',', start);
            const std::string_view cell(line.data() + start,
                                        (comma == std::string::npos ? line.size() : comma) - start);
            std::from_chars(cell.data(), cell.data() + cell.size(), *field);
            start = comma == std::string::npos ? line.size() : comma + 1;
        }
        rows.push_back(row);
    }
    return rows;
}

struct MeasRow {
    double t = 0.0;
    std::optional<double> nano3, o2, cond, temp;
};

std::vector<MeasRow> parse_measurements_csv(const std::string& text) {
    std::vector<MeasRow> rows;
    std::istringstream in(text);
    std::string line;
    std::getline(in, line);  // header
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string_view> cells;
        std::size_t start = 0;
        const std::string_view view(line);
        while (true) {
            const std::size_t comma = view.find(',', start);
            cells.push_back(view.substr(start, comma == std::string_view::npos ? view.npos
                                                                               : comma - start));
            if (comma == std::string_view::npos) break;
            start = comma + 1;
        }
        if (cells.size() < 9) continue;
        const auto opt = [&](std::string_view cell) -> std::optional<double> {
            if (cell.empty()) return std::nullopt;
            double v = 0.0;
            std::from_chars(cell.data(), cell.data() + cell.size(), v);
            return v;
        };
        MeasRow row;
        row.t = opt(cells[0]).value_or(0.0);
        row.nano3 = opt(cells[4]);
        row.o2 = opt(cells[5]);
        row.cond = opt(cells[6]);
        row.temp = opt(cells[7]);
        rows.push_back(row);
    }
    return rows;
}

}  // namespace

Report analyze_run(cfg::StackConfig config, const std::string& log_dir) {
    namespace fs = std::filesystem;
    Report report;
    const fs::path dir(log_dir);
    if (!fs::exists(dir / "mission.jsonl")) {
        throw std::runtime_error("no mission.jsonl in '" + log_dir + "'");
    }
    const auto entries = logs::read_mission_log((dir / "mission.jsonl").string());
    if (entries.empty()) throw std::runtime_error("mission.jsonl is empty");
    report.ticks = entries.size();

    const auto violate = [&](const std::string& what) { report.violations.push_back(what); };

    const plan::MissionPlan plan = cfg::load_mission(config);
    const route::Route route = route::generate_route(plan, config.profile);

    // Deterministic replay: same route, same gains, logged NavData stream.
    guidance::Guidance replay(route, config.guidance, config.simulator.origin);
    replay.activate();

    double sum_sq = 0.0;
    std::size_t tracked = 0;
    guidance::Mode previous_mode = guidance::Mode::Idle;
    std::string depth_csv = "t,depth,depth_ref\n";
    std::size_t replay_mismatches = 0;

    for (const auto& entry : entries) {
        for (const std::int16_t pwm : entry.setpoints.pwm) {
            if (pwm < -proto::kPwmLimit || pwm > proto::kPwmLimit) {
                violate("PWM saturation: " + std::to_string(pwm) + " at t=" +
                        kv::format_double(entry.t));
            }
        }
        if (entry.mode != previous_mode) {
            if (!guidance::mode_edge_allowed(previous_mode, entry.mode)) {
                violate(std::string("illegal mode transition ") +
                        guidance::mode_name(previous_mode) + " -> " +
                        guidance::mode_name(entry.mode) + " at t=" + kv::format_double(entry.t));
            }
            if (entry.mode == guidance::Mode::ThrusterDescent &&
                entry.nav.depth > config.profile.z_min + 0.5) {
                violate("thruster descent started at depth " + kv::format_double(entry.nav.depth));
            }
            ++report.mode_transitions;
            previous_mode = entry.mode;
        }

        const auto sp = replay.step(entry.nav);
        if (sp.pwm != entry.setpoints.pwm && replay_mismatches < 5) {
            violate("replay mismatch at t=" + kv::format_double(entry.t) +
                    " (logged setpoints differ from deterministic recomputation)");
            ++replay_mismatches;
        }
        if (replay.mode() != entry.mode && replay_mismatches < 5) {
            violate("replay mode mismatch at t=" + kv::format_double(entry.t));
            ++replay_mismatches;
        }
        if (const auto xt = replay.last_cross_track()) {
            sum_sq += *xt * *xt;
            ++tracked;
            report.max_cross_track = std::max(report.max_cross_track, *xt);
        }
        depth_csv += kv::format_double(entry.t) + ',' + kv::format_double(entry.nav.depth) + ',' +
                     (replay.last_depth_ref() ? kv::format_double(*replay.last_depth_ref())
                                              : std::string()) +
                     '\n';
    }
    report.cross_track_rms = tracked > 0 ? std::sqrt(sum_sq / static_cast<double>(tracked)) : 0.0;
    report.depth_profile_csv = std::move(depth_csv);
    report.surfacings = replay.progress().surfacing_count;

    // Direct-mode safety over the SC telegram log.
    if (fs::exists(dir / "sc_telegrams.bin")) {
        const auto frames = logs::read_telegram_log((dir / "sc_telegrams.bin").string());
        bool direct_active = false;
        bool no_control_seen = false;
        for (const auto& frame : frames) {
            if (!frame.outbound) continue;
            const auto decoded = proto::decode(frame.frame);
            const auto* telegram = std::get_if<proto::Telegram>(&decoded);
            if (!telegram) {
                violate("SC log contains an undecodable outbound frame");
                continue;
            }
            if (const auto* cmd = std::get_if<proto::LlcCommand>(telegram)) {
                if (cmd->mode == proto::LlcMode::Direct) direct_active = true;
                if (cmd->mode == proto::LlcMode::NoControl) {
                    direct_active = false;
                    no_control_seen = true;
                }
            } else if (std::holds_alternative<proto::LlcSetpointsCwolf>(*telegram)) {
                if (!direct_active) {
                    violate("LLC_Setpoints_CWolf outside the direct-mode window at t=" +
                            kv::format_double(frame.t));
                }
            }
        }
        if (!no_control_seen) violate("SC never sent LLC_Command{no_control}");
    }

    // Surfacing spans over the truth trace, when the simulator log is here.
    if (fs::exists(dir / "sim_state.csv")) {
        const auto trace = parse_state_csv(logs::read_text_file((dir / "sim_state.csv").string()));
        for (const auto& row : trace) report.max_depth = std::max(report.max_depth, row.z);

        std::vector<double> ascent_times;
        for (std::size_t i = 1; i < entries.size(); ++i) {
            if (entries[i].mode == guidance::Mode::SurfaceRun &&
                entries[i - 1].mode == guidance::Mode::ThrusterAscent) {
                ascent_times.push_back(entries[i].t);
            }
        }
        for (const double t0 : ascent_times) {
            double span = 0.0;
            bool broke = false;
            for (std::size_t i = 1; i < trace.size(); ++i) {
                if (trace[i].t < t0) continue;
                if (trace[i].z >= 0.3) {
                    broke = span < config.profile.l_gps;
                    break;
                }
                span += std::hypot(trace[i].x - trace[i - 1].x, trace[i].y - trace[i - 1].y);
                if (span >= config.profile.l_gps) break;
            }
            if (broke || span < config.profile.l_gps) {
                violate("surface span after t=" + kv::format_double(t0) + " covered only " +
                        kv::format_double(span) + " m above 0.3 m depth");
            }
        }
    }

    // Measurement cadence and ranges.
    if (fs::exists(dir / "measurements.csv")) {
        const auto rows =
            parse_measurements_csv(logs::read_text_file((dir / "measurements.csv").string()));
        report.measurement_rows = rows.size();
        std::size_t fast = 0;
        std::size_t nitrate = 0;
        for (const auto& row : rows) {
            if (row.o2) ++fast;
            if (row.nano3) ++nitrate;
            const auto in_range = [&](const std::optional<double>& v, double lo, double hi,
                                      const char* name) {
                if (v && (*v < lo || *v > hi)) {
                    violate(std::string(name) + " out of range at t=" + kv::format_double(row.t));
                }
            };
            in_range(row.nano3, config.sensors.nitrate.range_min,
                     config.sensors.nitrate.range_max, "nitrate");
            in_range(row.o2, config.sensors.oxygen.range_min, config.sensors.oxygen.range_max,
                     "oxygen");
            in_range(row.cond, config.sensors.conductivity.range_min,
                     config.sensors.conductivity.range_max, "conductivity");
            in_range(row.temp, config.sensors.temperature.range_min,
                     config.sensors.temperature.range_max, "temperature");
        }
        if (!rows.empty()) {
            const double window = rows.back().t - rows.front().t;
            const auto fast_expected = static_cast<std::size_t>(window) + 1;
            if (fast + 1 < fast_expected || fast > fast_expected + 1) {
                violate("fast-channel cadence: " + std::to_string(fast) + " samples over " +
                        kv::format_double(window) + " s");
            }
            const auto nitrate_low = static_cast<std::size_t>(window / 5.0);
            if (nitrate + 1 < nitrate_low || nitrate > nitrate_low + 2) {
                violate("nitrate cadence: " + std::to_string(nitrate) + " samples over " +
                        kv::format_double(window) + " s");
            }
        }
    }

    return report;
}

}  // namespace salmon::analyze
