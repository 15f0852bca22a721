#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace liesym::cli {

/// Exit codes: 0 success or pass, 1 audit mismatch or failed check, 2 usage
/// or input error. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace liesym::cli
