#pragma once

namespace hdsg::cli {

/// Entry point of the hdsg tool; returns the process exit status
/// (0 ok, 1 usage, 2 validation/infeasibility, 3 budget exceeded).
int run(int argc, const char* const* argv);

} // namespace hdsg::cli
