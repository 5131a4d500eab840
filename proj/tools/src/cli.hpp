#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace aramaid::cli
{

enum ExitCode : int
{
    kOk = 0,
    kModelError = 1,
    kIoError = 2,
};

/// Runs one `ara-maid` invocation. `args` excludes the program name.
/// Results go to `out`; diagnostics and the run report go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Worker count from ARA_MAID_THREADS, else the hardware concurrency.
unsigned thread_hint();

}  // namespace aramaid::cli
