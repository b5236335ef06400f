#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace nlh::cli {

enum ExitCode : int {
    kPass = 0,
    kError = 1,
    kCheckFailed = 2,
    kUsage = 64,
    kDomain = 65,
};

/// Fully resolved run configuration; echoed into every artifact.
struct RunConfig {
    std::string command;
    int d = 5;
    double p = 3.0;
    double q = 2.0;
    double r = 10.0;
    double alpha = 1.0;
    double alpha_min = 0.1;
    double alpha_max = 50.0;
    int alpha_steps = 11;
    double rho_max = 16.0;
    double drho = 0.01;
    double dtau = 0.01;
    /// Unset (<= 0) means automatic where the command supports it.
    double eps = 0.0;
    double tau0 = -12.0;
    double tau1 = -2.0;
    double tol = 1e-6;
    unsigned long long seed = 20240607ULL;
    std::string out = ".";
    std::string format = "both";
};

/// Parses argv (argv[0] is the program name), runs the command and writes
/// artifacts under config.out. Returns one of ExitCode.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace nlh::cli
