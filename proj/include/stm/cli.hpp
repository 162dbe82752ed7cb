#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace stm::cli {

/// Runs the `stm` command line. `args` excludes the program name.
/// Exit codes: 0 success, 2 config error, 3 data error, 4 backend error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int main(int argc, char** argv);

}  // namespace stm::cli
