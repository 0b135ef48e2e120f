#pragma once

// Scenario runner behind the `hilbvp` executable.

#include "hilbvp/iteration.hpp"
#include "hilbvp/linear_bvp.hpp"

#include <json.hpp>

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace hilbvp::cli {

enum ExitCode : int { kOk = 0, kNumericalFailure = 1, kUsageError = 2 };

/// Invalid configuration document; the message carries `source:line:`.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct VdpRun {
    VdpConfig config;
    IterationOptions options;
};

struct LinearRun {
    LinearBvpProblem problem;
    std::optional<double> rank_tol;
    double consistency_tol = kDefaultConsistencyTol;
};

/// Keys: epsilon, modes, active, phases, grid_points, max_iter, tol, sign.
[[nodiscard]] VdpRun parse_vdp_config(const std::string& text, const std::string& source);

/// Keys: modes, period, frequencies, grid_points, forcing, boundary, rank_tol,
/// consistency_tol.
[[nodiscard]] LinearRun parse_linear_config(const std::string& text, const std::string& source);

struct CheckRow {
    std::string suite;
    std::string check;
    double value = 0.0;
    double threshold = 0.0;
    bool pass = true;
    /// Informational rows report a measurement and never fail.
    bool informational = false;
};

inline const std::vector<std::string> kSuites = {"evolution",     "pinv",  "w-plus",
                                                 "factorization", "vdp-F", "vdp-jacobian",
                                                 "linear",        "oracle"};

/// Runs one suite (or "all") with the given seed for randomized sweeps.
[[nodiscard]] std::vector<CheckRow> run_verify(const std::string& suite, unsigned long long seed);

void print_table(std::ostream& out, const std::vector<CheckRow>& rows);

/// Entry point of the executable; returns the process exit code.
int run(int argc, char** argv);

}  // namespace hilbvp::cli
