#pragma once

#include <ostream>
#include <span>
#include <string>

#include "evkit/error.hpp"

namespace evkit::cli {

enum ExitCode : int {
  exit_ok = 0,
  exit_usage = 2,
  exit_format = 3,
  exit_capacity = 4,
  exit_internal = 5,
};

int exit_code_for(ErrorKind kind) noexcept;

/// Runs one subcommand. `args` excludes the program name. Results go to
/// files or `out`; progress notes and the single-line error go to `err`.
int run(std::span<const std::string> args, std::ostream& out, std::ostream& err);

}  // namespace evkit::cli
