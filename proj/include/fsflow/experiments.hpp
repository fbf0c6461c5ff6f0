#pragma once

#include "fsflow/config.hpp"
#include "fsflow/report.hpp"

namespace fsflow {

/// Run the configured experiment, write CSV artifacts under out_dir (created
/// by the caller), and return the pass/fail report. Deterministic for a
/// fixed config and seed.
Report run_experiment(const SimConfig& cfg, const std::string& out_dir);

} // namespace fsflow
