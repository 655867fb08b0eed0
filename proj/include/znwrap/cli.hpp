#pragma once

#include <iostream>
#include <string>
#include <vector>

namespace znwrap {

/// Parse and run one subcommand.  Reports go to --out or `out`; logs and
/// errors go to `err`.  Exit codes: 0 success, 1 asserted-theorem or
/// internal failure, 2 usage error.
int dispatch(const std::vector<std::string>& args, std::ostream& out = std::cout,
             std::ostream& err = std::cerr);

}  // namespace znwrap
