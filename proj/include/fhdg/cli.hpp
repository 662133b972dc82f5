#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace fhdg {

/// Exit codes of the command line tool.
enum ExitCode : int { exit_ok = 0, exit_failure = 1, exit_usage = 2 };

/// Parses `key = value` lines; `#` starts a comment.  Throws on malformed lines.
std::map<std::string, std::string> read_config(std::istream& in);

/// Entry point of the `fhdg` tool.
int run_cli(int argc, char** argv);
/// Same, with explicit streams (used by tests).
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace fhdg
