#pragma once

#include <string>
#include <vector>

namespace pageguard {

// Dispatches one subcommand (gen, split, optimize, evaluate, baseline,
// export-site, report). args exclude the program name. Returns 0 on
// success, 1 on domain errors, 2 on usage errors.
int run_command(const std::vector<std::string>& args);

}  // namespace pageguard
