#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace spellnet {

// Full command dispatch, factored out of main() so tests can drive the CLI
// in-process. Exit codes: 0 success, 1 usage, 2 data/validation, 3 internal.
int cli_run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace spellnet
