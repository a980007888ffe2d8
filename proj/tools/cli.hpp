#pragma once

#include <ostream>

namespace robsub::cli {

/// Report schema version written into every JSON report.
inline constexpr int kSchemaVersion = 1;

/// Exit codes: 0 ok, 2 unreadable input, 3 bad arguments or config, 4 numerical failure.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace robsub::cli
