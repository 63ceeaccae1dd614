#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace docrec::cli {

/// Exit statuses of run().
inline constexpr int kOk = 0;
inline constexpr int kFailure = 1;  // validation or parse failure
inline constexpr int kUsage = 2;

/// Entry point behind the `docrec` binary. `args` excludes the program name.
/// Input "-" reads from `in`; results go to `out` unless --output is given.
int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err);

}  // namespace docrec::cli
