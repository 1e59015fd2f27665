#include "salmon/harness.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <stdexcept>
#include <thread>
#include <utility>

#include "salmon/logs.hpp"
#include "salmon/protocol/codec.hpp"
#include "salmon/protocol/dispatch.hpp"
#include "salmon/protocol/ports.hpp"
#include "salmon/route_gen.hpp"

namespace salmon::harness {

namespace {

using proto::Telegram;

constexpr int kStatusEveryTicks = 10;  // 1 Hz at the 10 Hz NavData rate

struct LoggedPort {
    std::shared_ptr<proto::Port> port;
    logs::TelegramLogWriter* log = nullptr;
    const double* clock = nullptr;

    void send(const Telegram& telegram) {
        const auto frame = proto::encode(telegram);
        if (log && log->is_open()) log->record(clock ? *clock : 0.0, true, frame);
        port->send(frame);
    }
};

/// Scientific-computer core shared by the lockstep harness and the
/// standalone process: reacts to NavData, logs every tick.
class ScEndpoint {
public:
    ScEndpoint(guidance::Guidance& guidance, LoggedPort out, logs::MissionLogWriter* mission_log)
        : guidance_(guidance), out_(std::move(out)), mission_log_(mission_log) {}

    void start() {
        if (const auto cmd = guidance_.activate()) {
            out_.send(Telegram{*cmd});
            ++sent_since_mark_;
        }
    }

    void handle(const Telegram& telegram) {
        if (const auto* nav = std::get_if<proto::NavData>(&telegram)) {
            on_nav(*nav);
        }
        // LLC_Status / LLC_Error are informational; the telegram log keeps them.
    }

    void on_nav(const proto::NavData& nav) {
        last_nav_t_ = nav.timestamp;
        ++nav_ticks_;
        const auto sp = guidance_.step(nav);
        if (!sent_no_control_) {
            out_.send(Telegram{sp});
            ++sent_since_mark_;
        }
        if (guidance_.complete() && !sent_no_control_) {
            if (const auto cmd = guidance_.shutdown()) {
                out_.send(Telegram{*cmd});
                ++sent_since_mark_;
            }
            sent_no_control_ = true;
        }
        if (mission_log_ && mission_log_->is_open()) {
            const auto progress = guidance_.progress();
            logs::MissionLogEntry entry;
            entry.t = nav.timestamp;
            entry.mode = guidance_.mode();
            entry.nav = nav;
            entry.setpoints = sp;
            entry.fraction = progress.fraction;
            entry.waypoint_index = progress.waypoint_index;
            mission_log_->record(entry);
        }
    }

    void abort() {
        if (sent_no_control_) return;
        if (const auto cmd = guidance_.shutdown()) out_.send(Telegram{*cmd});
        sent_no_control_ = true;
    }

    std::size_t take_sent_count() { return std::exchange(sent_since_mark_, 0); }
    double last_nav_t() const { return last_nav_t_; }
    std::size_t nav_ticks() const { return nav_ticks_; }

private:
    guidance::Guidance& guidance_;
    LoggedPort out_;
    logs::MissionLogWriter* mission_log_;
    bool sent_no_control_ = false;
    std::size_t sent_since_mark_ = 0;
    double last_nav_t_ = -1.0;
    std::size_t nav_ticks_ = 0;
};

/// Receives datagrams, logs them, decodes and forwards to a handler.
class LoggingReceiver {
public:
    LoggingReceiver(proto::InputPort& in, logs::TelegramLogWriter* log, const double* clock)
        : in_(in), log_(log), clock_(clock) {}

    template <typename Handler>
    bool poll_one(std::chrono::milliseconds timeout, Handler&& handler) {
        const auto datagram = in_.receive(timeout);
        if (!datagram) return false;
        if (log_ && log_->is_open()) log_->record(clock_ ? *clock_ : 0.0, false, *datagram);
        auto result = proto::decode(*datagram);
        if (const auto* telegram = std::get_if<Telegram>(&result)) {
            handler(*telegram);
        } else {
            ++malformed_;
        }
        return true;
    }

    std::uint64_t malformed() const { return malformed_; }

private:
    proto::InputPort& in_;
    logs::TelegramLogWriter* log_;
    const double* clock_;
    std::uint64_t malformed_ = 0;
};

std::filesystem::path ensure_log_dir(const std::string& log_dir) {
    const std::filesystem::path dir(log_dir);
    std::filesystem::create_directories(dir);
    return dir;
}

route::Route build_route(cfg::StackConfig& config, plan::MissionPlan& plan_out) {
    plan_out = cfg::load_mission(config);
    return route::generate_route(plan_out, config.profile);
}

double initial_heading(const route::Route& route) {
    for (std::size_t i = 1; i < route.waypoints.size(); ++i) {
        const double dx = route.waypoints[i].x - route.waypoints[0].x;
        const double dy = route.waypoints[i].y - route.waypoints[0].y;
        if (std::hypot(dx, dy) > 1e-6) return std::atan2(dy, dx);
    }
    return 0.0;
}

}  // namespace

RunResult run_single_process(cfg::StackConfig config, Transport transport,
                             const std::string& log_dir) {
    plan::MissionPlan plan;
    const route::Route route = build_route(config, plan);

    config.simulator.start_yaw = initial_heading(route);
    sim::Simulator simulator(config.vehicle, config.simulator);
    guidance::Guidance guide(route, config.guidance, config.simulator.origin);
    meas::MeasurementComputer mc(config.sensors, config.simulator.environment,
                                 config.simulator.origin);

    // Wire the Fig.-6 topology: CC->SC (nav, status, errors), SC->CC
    // (command, setpoints), CC->MC (nav).
    std::shared_ptr<proto::Port> cc_sc_port, sc_port, cc_mc_port, mc_port;
    if (transport == Transport::InProcess) {
        std::tie(cc_sc_port, sc_port) = proto::make_loopback_pair();
        std::tie(cc_mc_port, mc_port) = proto::make_loopback_pair();
    } else {
        cc_sc_port = proto::open_udp_port(config.cc_addr, config.sc_addr);
        sc_port = proto::open_udp_port(config.sc_addr, config.cc_addr);
        cc_mc_port = proto::open_udp_port("127.0.0.1:0", config.mc_addr);
        mc_port = proto::open_udp_port(config.mc_addr, config.cc_addr);
    }

    logs::MissionLogWriter mission_log;
    logs::TelegramLogWriter cc_log, sc_log, mc_log;
    std::string state_csv = std::string(sim::Simulator::state_csv_header()) + "\n";
    const bool with_logs = !log_dir.empty();
    std::filesystem::path dir;
    if (with_logs) {
        dir = ensure_log_dir(log_dir);
        mission_log.open((dir / "mission.jsonl").string());
        cc_log.open((dir / "cc_telegrams.bin").string());
        sc_log.open((dir / "sc_telegrams.bin").string());
        mc_log.open((dir / "mc_telegrams.bin").string());
    }

    const double* sim_clock = &simulator.state().t;
    LoggedPort cc_to_sc{cc_sc_port, &cc_log, sim_clock};
    LoggedPort cc_to_mc{cc_mc_port, &cc_log, sim_clock};
    LoggedPort sc_to_cc{sc_port, &sc_log, sim_clock};

    ScEndpoint sc(guide, sc_to_cc, with_logs ? &mission_log : nullptr);
    LoggingReceiver sc_rx(*sc_port, &sc_log, sim_clock);
    LoggingReceiver mc_rx(*mc_port, &mc_log, sim_clock);
    LoggingReceiver cc_rx(*cc_sc_port, &cc_log, sim_clock);

    const auto rx_timeout = std::chrono::milliseconds(2000);
    const auto cc_handle = [&](const Telegram& t) { simulator.handle(t); };

    // Lockstep: every simulator tick must reach SC and MC, and every SC
    // reply must reach the simulator before the next tick. This makes the
    // two transports byte-for-byte equivalent.
    const auto wait_cc = [&](std::size_t n) {
        for (std::size_t i = 0; i < n; ++i) {
            if (!cc_rx.poll_one(rx_timeout, cc_handle)) {
                throw std::runtime_error("lockstep: command lost in transit");
            }
        }
    };

    sc.start();
    wait_cc(sc.take_sent_count());

    RunResult result;
    int tick = 0;
    while (simulator.time() < config.mission_timeout_s) {
        simulator.step();
        ++tick;
        if (with_logs) state_csv += simulator.state_csv_row() + "\n";

        const proto::NavData nav = simulator.nav();
        cc_to_sc.send(Telegram{nav});
        cc_to_mc.send(Telegram{nav});
        if (tick % kStatusEveryTicks == 0) cc_to_sc.send(Telegram{simulator.status()});
        for (const auto& err : simulator.drain_errors()) cc_to_sc.send(Telegram{err});

        // SC consumes until it has processed this tick's NavData.
        while (sc.last_nav_t() < nav.timestamp) {
            if (!sc_rx.poll_one(rx_timeout, [&](const Telegram& t) { sc.handle(t); })) {
                throw std::runtime_error("lockstep: NavData lost toward SC");
            }
        }
        bool mc_got_nav = false;
        while (!mc_got_nav) {
            if (!mc_rx.poll_one(rx_timeout, [&](const Telegram& t) {
                    if (const auto* n = std::get_if<proto::NavData>(&t)) {
                        mc.on_nav(*n);
                        mc_got_nav = true;
                    }
                })) {
                throw std::runtime_error("lockstep: NavData lost toward MC");
            }
        }
        wait_cc(sc.take_sent_count());

        if (guide.complete() && simulator.released()) break;
    }

    result.completed = guide.complete();
    result.sim_seconds = simulator.time();
    result.mode_history = guide.mode_history();
    result.completions = guide.completions();
    result.surfacing_count = guide.progress().surfacing_count;
    result.nav_ticks = sc.nav_ticks();
    result.malformed_datagrams = sc_rx.malformed() + mc_rx.malformed() + cc_rx.malformed();

    if (with_logs) {
        logs::write_text_file((dir / "sim_state.csv").string(), state_csv);
        logs::write_text_file((dir / "measurements.csv").string(), mc.export_csv());
    }
    return result;
}

int run_simulator_process(cfg::StackConfig config, double realtime_factor, double duration_s,
                          const std::string& log_dir) {
    plan::MissionPlan plan;
    const route::Route route = build_route(config, plan);
    config.simulator.start_yaw = initial_heading(route);
    sim::Simulator simulator(config.vehicle, config.simulator);

    std::shared_ptr<proto::Port> sc_side, mc_side;
    try {
        sc_side = proto::open_udp_port(config.cc_addr, config.sc_addr);
        mc_side = proto::open_udp_port("127.0.0.1:0", config.mc_addr);
    } catch (const std::exception& e) {
        std::cerr << "salmon sim: " << e.what() << "\n";
        return 3;
    }

    const auto dir = ensure_log_dir(log_dir);
    logs::TelegramLogWriter cc_log((dir / "cc_telegrams.bin").string());
    std::string state_csv = std::string(sim::Simulator::state_csv_header()) + "\n";

    const double* clock = &simulator.state().t;
    LoggedPort to_sc{sc_side, &cc_log, clock};
    LoggedPort to_mc{mc_side, &cc_log, clock};
    LoggingReceiver rx(*sc_side, &cc_log, clock);

    const double cap = duration_s > 0.0 ? duration_s : config.mission_timeout_s;
    const auto wall_start = std::chrono::steady_clock::now();
    int tick = 0;
    while (simulator.time() < cap) {
        simulator.step();
        ++tick;
        state_csv += simulator.state_csv_row() + "\n";

        to_sc.send(Telegram{simulator.nav()});
        to_mc.send(Telegram{simulator.nav()});
        if (tick % kStatusEveryTicks == 0) to_sc.send(Telegram{simulator.status()});
        for (const auto& err : simulator.drain_errors()) to_sc.send(Telegram{err});

        while (rx.poll_one(std::chrono::milliseconds(0),
                           [&](const Telegram& t) { simulator.handle(t); })) {
        }
        if (simulator.released()) break;

        if (realtime_factor > 0.0) {
            const auto target = wall_start + std::chrono::duration_cast<
                                                 std::chrono::steady_clock::duration>(
                                                 std::chrono::duration<double>(
                                                     simulator.time() / realtime_factor));
            std::this_thread::sleep_until(target);
        }
    }

    logs::write_text_file((dir / "sim_state.csv").string(), state_csv);
    const bool mission_over = simulator.released();
    std::cout << "salmon sim: " << (mission_over ? "mission released" : "duration reached")
              << " after " << simulator.time() << " s simulated, " << tick << " ticks\n";
    return 0;
}

int run_sc_mc_process(cfg::StackConfig config, const std::string& log_dir) {
    plan::MissionPlan plan;
    const route::Route route = build_route(config, plan);
    guidance::Guidance guide(route, config.guidance, config.simulator.origin);
    meas::MeasurementComputer mc(config.sensors, config.simulator.environment,
                                 config.simulator.origin);

    std::shared_ptr<proto::Port> sc_port, mc_port;
    try {
        sc_port = proto::open_udp_port(config.sc_addr, config.cc_addr);
        mc_port = proto::open_udp_port(config.mc_addr, config.cc_addr);
    } catch (const std::exception& e) {
        std::cerr << "salmon run: " << e.what() << "\n";
        return 3;
    }

    const auto dir = ensure_log_dir(log_dir);
    logs::MissionLogWriter mission_log((dir / "mission.jsonl").string());
    logs::TelegramLogWriter sc_log((dir / "sc_telegrams.bin").string());
    logs::TelegramLogWriter mc_log((dir / "mc_telegrams.bin").string());

    double sc_clock = 0.0;
    LoggedPort sc_out{sc_port, &sc_log, &sc_clock};
    ScEndpoint sc(guide, sc_out, &mission_log);
    LoggingReceiver sc_rx(*sc_port, &sc_log, &sc_clock);

    std::atomic<bool> done{false};
    std::thread mc_thread([&] {
        LoggingReceiver mc_rx(*mc_port, &mc_log, &sc_clock);
        while (!done.load(std::memory_order_relaxed)) {
            mc_rx.poll_one(std::chrono::milliseconds(50), [&](const Telegram& t) {
                if (const auto* nav = std::get_if<proto::NavData>(&t)) mc.on_nav(*nav);
            });
        }
    });

    sc.start();
    bool aborted = false;
    auto last_rx_wall = std::chrono::steady_clock::now();
    while (!guide.complete()) {
        const bool got = sc_rx.poll_one(std::chrono::milliseconds(100), [&](const Telegram& t) {
            if (const auto* nav = std::get_if<proto::NavData>(&t)) sc_clock = nav->timestamp;
            sc.handle(t);
        });
        if (got) {
            last_rx_wall = std::chrono::steady_clock::now();
        } else {
            const auto silent = std::chrono::steady_clock::now() - last_rx_wall;
            if (std::chrono::duration<double>(silent).count() > config.nav_timeout_s) {
                std::cerr << "salmon run: no NavData for " << config.nav_timeout_s
                          << " s, aborting with no-control\n";
                sc.abort();
                aborted = true;
                break;
            }
        }
    }

    done.store(true, std::memory_order_relaxed);
    mc_thread.join();
    logs::write_text_file((dir / "measurements.csv").string(), mc.export_csv());

    if (aborted) return 3;
    std::cout << "salmon run: mission complete, " << sc.nav_ticks() << " NavData ticks, "
              << guide.progress().surfacing_count << " surfacings\n";
    return 0;
}

}  // namespace salmon::harness
