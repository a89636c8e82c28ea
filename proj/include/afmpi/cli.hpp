#pragma once

#include "afmpi/error.hpp"

#include <iosfwd>
#include <string>

namespace afmpi::cli {

/// 0 success, 1 computation-contract violation, 2 input or usage error.
int exit_code(ErrorCode code) noexcept;

/// {"code", "message", "context"}; reasons, when present, go into context.
std::string error_json(const Error &error);

/// Runs one `afmpi` invocation. argv[0] is the program name. Human-readable
/// output goes to `out`; errors go to `err` as one JSON document.
int run(int argc, const char *const *argv, std::ostream &out, std::ostream &err);

} // namespace afmpi::cli
