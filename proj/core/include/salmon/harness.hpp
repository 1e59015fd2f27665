#pragma once

#include <string>
#include <utility>
#include <vector>

#include "salmon/guidance.hpp"
#include "salmon/stack_config.hpp"

namespace salmon::harness {

// Staged test architecture. Phase 1 is the plain unit-test suites. Phase 2
// runs the full guidance/simulator/measurement interaction over in-process
// ports; phase 3 runs the identical lockstep over UDP loopback — only the
// Port implementation differs. Phases 4/5 run the stack as separate
// executables against each other over UDP (cmd_sim / cmd_run).

enum class Transport { InProcess, UdpLoopback };

struct RunResult {
    bool completed = false;
    double sim_seconds = 0.0;
    std::vector<std::pair<double, guidance::Mode>> mode_history;
    std::vector<std::pair<double, std::size_t>> completions;
    std::size_t surfacing_count = 0;
    std::size_t nav_ticks = 0;
    std::uint64_t malformed_datagrams = 0;
};

/// Runs simulator + guidance + measurement lockstep in one process until the
/// mission completes or the simulated-time cap expires. log_dir empty skips
/// log files. Deterministic: identical config and seed give identical logs.
RunResult run_single_process(cfg::StackConfig config, Transport transport,
                             const std::string& log_dir);

/// Control-computer executable body: simulate the vehicle, publish NAV_Data,
/// consume commands/setpoints over UDP. realtime_factor 0 free-runs; 1.0
/// paces to wall time. duration_s <= 0 uses the config mission timeout.
/// Returns a CLI exit code.
int run_simulator_process(cfg::StackConfig config, double realtime_factor, double duration_s,
                          const std::string& log_dir);

/// Scientific + measurement computer executable body over UDP. Aborts with
/// LLC_Command{NoControl} when NavData stays away longer than the config
/// watchdog. Returns a CLI exit code.
int run_sc_mc_process(cfg::StackConfig config, const std::string& log_dir);

}  // namespace salmon::harness
