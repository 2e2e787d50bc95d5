#pragma once

#include "wgqed/app/config.h"
#include "wgqed/model.h"

#include <exception>
#include <iosfwd>
#include <string>
#include <vector>

namespace wgqed::app {

enum ExitCode { kExitOk = 0, kExitConfig = 2, kExitNumeric = 3 };

int exit_code_for(const std::exception &e);

// Resolved ensemble plus what the manifest reports about it.
struct EnsembleChoice {
    model::EnsembleParams params;
    nlohmann::json info;
};

// Coupling assumed when only an optical depth is given (the nanofiber experiment).
inline constexpr double kDefaultOdBeta = 0.0055;

// (N, beta), explicit betas, or (OD, beta) with N = round(OD / 4 beta).
EnsembleChoice resolve_ensemble(const RunConfig &cfg);

// Each returns the list of files written.
std::vector<std::string> cmd_evolve(const RunConfig &cfg);
std::vector<std::string> cmd_subradiance(const RunConfig &cfg);
std::vector<std::string> cmd_homodyne(const RunConfig &cfg);
std::vector<std::string> cmd_spectrum(const RunConfig &cfg);
std::vector<std::string> cmd_decompose(const RunConfig &cfg);

// Full command line (argv[0] is the program name). Never throws.
int run_cli(int argc, const char *const *argv, std::ostream &out, std::ostream &err);

} // namespace wgqed::app
