#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace itpnet {

/// Entry point behind main(). `args` is argv without the program name, in
/// natural order. Maps errors to exit codes: 0 success, 1 usage/config,
/// 2 data, 3 numeric, 4 failed check (gradcheck threshold, trend assertion,
/// failed sweep cells).
int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err);

} // namespace itpnet
