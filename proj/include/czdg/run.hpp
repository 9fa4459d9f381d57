#pragma once

#include <string>

namespace czdg {

// Loads a config, runs the schedule, and writes steps.csv, summary.txt and
// periodic field files into out_dir (created if needed).
//
// Returns 0 when the full schedule ran, 2 when a step failed to converge
// and the run stopped early, 1 for config or I/O problems. Problems are
// reported on stderr.
int run_simulation(const std::string& config_path, const std::string& out_dir);

}  // namespace czdg
