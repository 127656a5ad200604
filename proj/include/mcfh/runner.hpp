#pragma once

#include <string>

#include "mcfh/config.hpp"

namespace mcfh {

// Executes the configured scenario, writing CSV/JSON/PGM outputs and
// manifest.json into config.out_dir. Returns the process exit status.
int run_scenario(const RunConfig& config);

// Dry run: validates the config and prints the execution plan (grids, CFL dt,
// step counts, memory) without computing. Writes the same manifest as run
// minus timing.
int explain_scenario(const RunConfig& config);

}  // namespace mcfh
