#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace diskmc {

// argv-style arguments without the program name. Returns the process exit
// code: 0 on success, 1 when a run fails (internal check, convergence, I/O,
// selftest mismatch), 2 on usage or model errors.
int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err);

} // namespace diskmc
