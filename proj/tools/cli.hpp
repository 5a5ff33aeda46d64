#pragma once

#include <atomic>
#include <iosfwd>
#include <string>
#include <vector>

namespace lnsim::cli {

/// Set by the interrupt handler; long runs stop taking new cells and the
/// partial results are written out.
std::atomic<bool>& cancel_flag();

/// Runs one command line (without the program name). Exit codes: 0 success,
/// 1 data or I/O error, 2 usage error, 130 interrupted after flushing.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace lnsim::cli
