#pragma once

#include <string>
#include <vector>

#include "salmon/route_gen.hpp"
#include "salmon/stack_config.hpp"

namespace salmon::analyze {

/// Result of replaying a run's logs against the invariant suites. Empty
/// violations means the run holds every checked property.
struct Report {
    std::vector<std::string> violations;
    std::size_t ticks = 0;
    std::size_t mode_transitions = 0;
    std::size_t surfacings = 0;
    double cross_track_rms = 0.0;   // [m] over trajectory-following ticks
    double max_cross_track = 0.0;   // [m]
    double max_depth = 0.0;         // [m] from the truth trace, when present
    std::size_t measurement_rows = 0;
    std::string depth_profile_csv;  // "t,depth,depth_ref"

    bool ok() const { return violations.empty(); }
};

/// Recomputes the invariant suites over the logs in log_dir: mode-machine
/// soundness, PWM bounds, direct-mode telegram ordering, surfacing spans,
/// measurement cadence/ranges, and a full deterministic replay of the
/// guidance core against the logged setpoints. The config must be the one
/// the run used (route and gains are regenerated from it). Throws
/// std::runtime_error when mandatory logs are missing.
Report analyze_run(cfg::StackConfig config, const std::string& log_dir);

}  // namespace salmon::analyze
