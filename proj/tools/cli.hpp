// cli.hpp: command-line front end: configuration, validation, dispatch

#pragma once

#include "oscdelta/barrier.hpp"
#include "oscdelta/timescales.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace oscdelta::cli {

enum ExitCode : int {
    kSuccess = 0,
    kUsage = 2,
    kSolverFailure = 3,
    kConvergenceFailure = 4,
};

enum class Format { CSV, JSON };

// Everything the flags (or a --config file) can set. Unset optionals take the
// per-command defaults applied by resolve().
struct RunConfig {
    std::string command;

    std::optional<double> hbar, mass, V0, eps, omega, E;
    std::optional<int> trunc;   // fixed window [-trunc, trunc] instead of convergence
    std::optional<double> tol;
    std::optional<std::string> solver;
    std::optional<double> omega_min, omega_max;
    std::optional<int> omega_points;

    std::optional<double> L, x0, sigma, k_mean, t_final;
    std::optional<int> levels;

    std::string out;   // empty: standard output
    Format format{Format::CSV};

    std::string panel{"a"};   // fig2
    bool regime_c{false};     // sweep
    int threads{0};
};

// Per-command values after defaults and presets are applied.
struct ResolvedRun {
    BarrierParams params;
    TruncationOptions truncation;
    std::optional<int> fixed_window;
    double tdse_tol{1e-8};
    SolverKind solver{SolverKind::FS};
    std::vector<double> omega_grid;
};

// Applies the command's defaults and presets and validates every field.
// Throws InvalidParameter with a named diagnostic on the first violation.
ResolvedRun resolve(const RunConfig& config);

// args excludes the program name. Output goes to `out` unless --out names a
// file; diagnostics and progress go to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace oscdelta::cli
