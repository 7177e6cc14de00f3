#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace noiselab::cli {

// Runs one command line (argv[0] is the program name) and returns the exit
// status. Nothing is written to disk for a command that fails validation.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace noiselab::cli
