#pragma once

#include <string>
#include <vector>

namespace dkanon::cli {

// Dispatches one subcommand (anonymize | check | gen-constraints | synth |
// bench) given the arguments after the program name.  Returns the process
// exit code: 0 for a successful result or a positive verdict, 2 for an
// unsatisfiable outcome or negative verdict, 1 for any error.
int run(std::vector<std::string> args);

} // namespace dkanon::cli
