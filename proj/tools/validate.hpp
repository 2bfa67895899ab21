// Built-in validation suite: oracle checks runnable from the CLI.
#pragma once

#include <string>

namespace qsdsim::tools {

// Runs every check whose name contains `filter` (all when empty) and prints
// a measured-vs-tolerance table. `dt` feeds the damped-cavity check so a
// deliberately coarse step can be injected. Returns the number of failures.
int run_validation(const std::string& filter, double dt);

} // namespace qsdsim::tools
