#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "phasegp/fitness.hpp"

namespace phasegp::cli {

enum ExitCode : int {
    kOk = 0,
    kUsageError = 1,
    kDataError = 2,
    kRuntimeFailure = 3,
};

// Subcommands: synth, fit, eval, simulate. args excludes the program name.
int run(std::vector<std::string> const& args, std::ostream& out, std::ostream& err);
int run(int argc, char** argv);

// Human-readable NMSE breakdown followed by the four equations in infix form.
std::string format_report(FitnessReport const& report, TreeSet const& trees, std::span<std::string const> labels);

}  // namespace phasegp::cli
