#pragma once

// Command-line front end: run configuration, subcommands and export formats.

#include <array>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "spin7/shooting.hpp"

namespace spin7::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInternal = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;
inline constexpr int kExitUndecided = 4;

const char* version();

/// Every option is global; the config file uses the long flag names as keys.
struct RunConfig {
    std::string command;

    double tol_rel = 1e-10;
    double tol_abs = 1e-12;
    double s_max = 200.0;
    double t_series = 1e-2;
    double t_ac_min = 10.0;
    unsigned threads = 0;
    double omega_eps = 0.1;
    double cs_delta = 1e-6;

    /// Empty selects the default path (stdout) or the command's default format.
    std::string out;
    std::string format;

    std::string family;
    double param = 1.0;
    double beta = 0.0;
    double z = 0.15;
    double lo = 0.0;
    double hi = 0.0;
    int n = 25;
    bool log = false;
    double tol = 1e-10;

    std::string expansion = "s5";
    std::vector<double> t_values;
    int order = 0;

    std::string trajectory_out;
    std::string points_csv;
    std::vector<double> params;
    bool cs_branches = false;

    ShootingConfig shooting() const;
    /// param plus beta (AC) or z (Omega) for the selected family.
    FamilyParams family_params(double value) const;
    /// Effective configuration in a fixed key order.
    std::vector<std::pair<std::string, std::string>> echo() const;
};

/// Throws ConfigError on invalid flags, files or values. Returns false (after
/// printing to out) when help or the version was requested.
bool parse_run_config(int argc, const char* const* argv, RunConfig& config, std::ostream& out);

/// Runs one invocation and returns the exit code. Results go to --out or to
/// out; errors are written to err as a single JSON object.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Shortest representation that reads back to the same double; empty for NaN
/// and infinities.
std::string format_double(double value);

struct PlotTrace {
    std::string label;
    /// (X, Y) points in flow order.
    std::vector<std::array<double, 2>> xy;
};

/// 800x800 (X, Y) phase portrait: regions D1-D4 shaded, the Q = 0 curve, the
/// line Y = Y_c, the fixed points and one path per trace. metadata lines are
/// embedded verbatim.
std::string render_phase_portrait(const std::vector<PlotTrace>& traces, const std::vector<std::string>& metadata);

}  // namespace spin7::cli
