#pragma once

// Command dispatch shared by the C API and the command-line tool: a command name
// and a JSON request in, a JSON (or CSV) document out.

#include "carnot/error.hpp"

#include <string>
#include <vector>

namespace carnot {

/// Runs a command; throws carnot::Error on bad input. The output ends with a newline.
std::string execute_command(const std::string& command, const std::string& request_json);

std::vector<std::string> command_names();

/// 2 parse, 3 validation/domain/unsupported, 4 resource cap, 5 no certified path.
int exit_code(ErrorKind kind);

}  // namespace carnot
