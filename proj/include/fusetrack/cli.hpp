#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace fusetrack::cli {

/// Runs one `fusetrack` invocation. `args` excludes the program name.
/// Failures print a single `error[<code>]: <message>` line to `err` and
/// return a non-zero exit status (2 for usage errors, 1 otherwise).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace fusetrack::cli
