#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace stm {

// Full CLI entry point; args excludes the program name. Exit codes:
// 0 ok, 1 input error, 2 budget exceeded, 3 parameter out of domain.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace stm
