// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace conecert::cli {

enum ExitCode : int { kHolds = 0, kFails = 1, kInputError = 2, kInconsistent = 3 };

/// Runs one command. JSON goes to `out` (or the --output file), messages to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
/// Same, with argv[0] supplied.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace conecert::cli
