#include "cli.hpp"

#include "oscdelta/errors.hpp"
#include "oscdelta/full_solution.hpp"
#include "oscdelta/parallel.hpp"
#include "oscdelta/serialization.hpp"
#include "oscdelta/tdse.hpp"
#include "oscdelta/toeplitz.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

namespace oscdelta::cli {

namespace {

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

template <class T>
T value_or(const std::optional<T>& v, T fallback) {
    return v ? *v : fallback;
}

void require(bool ok, const std::string& what) {
    if (!ok) throw InvalidParameter(what);
}

BarrierParams::Values command_defaults(const RunConfig& c) {
    BarrierParams::Values v;
    v.hbar = 1.0;
    v.mass = 0.5;
    if (c.command == "sweep") {
        v.V0 = 10.0;
        v.eps = 1e-3;
        v.E = 2.5;
        v.Omega = 0.01;
    } else if (c.command == "tdse" || c.command == "fig3") {
        v.V0 = 5.0;
        v.eps = 0.9;
        v.E = 5.0;
        v.Omega = 5.0;
    } else if (c.command == "fig2") {
        v.V0 = 10.0;
        v.Omega = 1.0;
        v.eps = c.panel == "d" ? 0.5 : 1.0;
        v.E = c.panel == "b" ? 1.5 : c.panel == "c" ? 0.5 : 2.5;
    } else {   // fs, ts
        v.V0 = 10.0;
        v.eps = 1.0;
        v.Omega = 1.0;
        v.E = 2.5;
    }
    return v;
}

struct GridDefaults {
    double lo;
    double hi;
    int points;
};

GridDefaults grid_defaults(const std::string& command) {
    if (command == "fig3") return {1.0, 10.0, 20};
    return {0.01, 0.2, 20};
}

bool uses_grid(const std::string& command) { return command == "sweep" || command == "fig3"; }

// Geometry for a single tdse run: the sideband-resolved setup unless --L is
// given, in which case the packet defaults follow the well width.
CollisionSetup tdse_setup(const RunConfig& c, const BarrierParams& params) {
    CollisionSetup setup;
    if (c.L) {
        require(*c.L > 0.0, "--L must be > 0");
        setup.well.width = *c.L;
        const double k = std::sqrt(2.0 * params.mass() * params.E()) / params.hbar();
        setup.packet = default_packet(setup.well, k);
    } else {
        setup = sideband_resolved_setup(params, params.E());
    }
    if (c.x0) setup.packet.x0 = *c.x0;
    if (c.sigma) setup.packet.sigma = *c.sigma;
    if (c.k_mean) setup.packet.k_mean = *c.k_mean;
    if (c.levels) setup.well.n_levels = *c.levels;
    return setup;
}

TdseOptions tdse_options(const RunConfig& c, const ResolvedRun& r) {
    TdseOptions o;
    o.tol = r.tdse_tol;
    if (c.t_final) o.t_final = *c.t_final;
    return o;
}

void emit(const std::string& text, const RunConfig& c, std::ostream& out) {
    if (c.out.empty()) {
        out << text;
        return;
    }
    std::ofstream file(c.out, std::ios::binary);
    if (!file) throw IoError("cannot open '" + c.out + "' for writing");
    file << text;
    if (!file) throw IoError("failed writing '" + c.out + "'");
}

void emit_sidecar(const std::string& text, const std::string& path) {
    std::ofstream file(path, std::ios::binary);
    if (!file) throw IoError("cannot open '" + path + "' for writing");
    file << text;
}

std::string render(const Table& table, Format format) {
    return format == Format::CSV ? to_csv(table) : to_json(table);
}

SidebandSolution fs_solution(const ResolvedRun& r) {
    if (r.fixed_window) return solve_fs(r.params, -*r.fixed_window, *r.fixed_window);
    return converge_truncation(r.params, r.truncation).solution;
}

void cmd_fs(const RunConfig& c, const ResolvedRun& r, std::ostream& out) {
    const SidebandSolution sol = fs_solution(r);
    emit(c.format == Format::CSV ? to_csv(sideband_table(sol)) : sideband_json(sol, "fs"), c, out);
}

void cmd_ts(const RunConfig& c, const ResolvedRun& r, std::ostream& out) {
    const ToeplitzSolution sol = solve_ts(r.params);
    emit(c.format == Format::CSV ? to_csv(sideband_table(sol.sidebands)) : toeplitz_json(sol), c, out);
}

void cmd_sweep(const RunConfig& c, const ResolvedRun& r, std::ostream& out, std::ostream& err) {
    if (c.regime_c) {
        const RegimeCTable table = regime_c_check(r.params, r.omega_grid, r.truncation);
        for (const auto& w : table.warnings) err << "warning: " << w << '\n';
        emit(c.format == Format::CSV ? to_csv(regime_c_table(table)) : regime_c_json(table), c, out);
        return;
    }
    SweepOptions options;
    options.truncation = r.truncation;
    options.threads = c.threads;
    const SweepResult sweep = frequency_sweep(r.params, r.omega_grid, r.solver, options);
    if (c.format == Format::JSON) {
        emit(sweep_json(sweep), c, out);
        return;
    }
    emit(to_csv(sweep_table(sweep)), c, out);
    if (!c.out.empty()) {
        emit_sidecar(sweep_json(sweep), c.out + ".json");
    }
    if (sweep.fit) {
        err << "fit: slope " << format_number(sweep.fit->slope) << ", intercept "
            << format_number(sweep.fit->intercept) << ", R^2 " << format_number(sweep.fit->r_squared)
            << " over " << sweep.fit->points << " points; tau_delta " << format_number(tau_delta(r.params))
            << '\n';
    } else {
        err << "fit: slope undefined (fewer than two points with E > hbar*Omega)\n";
    }
}

void cmd_tdse(const RunConfig& c, const ResolvedRun& r, std::ostream& out, std::ostream& err) {
    const CollisionSetup setup = tdse_setup(c, r.params);
    const TdseRun run = propagate(setup.well, setup.packet, r.params, tdse_options(c, r));
    if (run.plateau.found) {
        err << "P_right plateau " << format_number(run.plateau.value) << " from t = "
            << format_number(run.plateau.time) << '\n';
    } else {
        err << "warning: no P_right plateau within the run; final P_right "
            << format_number(run.history.back().p_right) << '\n';
    }
    emit(c.format == Format::CSV ? to_csv(tdse_table(run)) : tdse_json(run), c, out);
}

void cmd_fig2(const RunConfig& c, const ResolvedRun& r, std::ostream& out) {
    constexpr int kExtent = 5;
    const SidebandSolution fs = fs_solution(r);
    const ToeplitzSolution ts = solve_ts(r.params, kExtent);
    Table table;
    table.columns = {"n", "I_fs", "I_ts"};
    for (int n = -kExtent; n <= kExtent; ++n) {
        table.add_row({static_cast<double>(n), fs.intensity(n), ts.sidebands.intensity(n)});
    }
    emit(render(table, c.format), c, out);
}

void cmd_fig3(const RunConfig& c, const ResolvedRun& r, std::ostream& out, std::ostream& err) {
    const std::size_t count = r.omega_grid.size();
    std::vector<double> p_fs(count), p_tdse(count);
    std::vector<std::string> notes(count);

    parallel_for(count, c.threads, [&](std::size_t i) {
        const double omega = r.omega_grid[i];
        const BarrierParams p = r.params.with_omega(omega);
        CollisionSetup setup = sideband_resolved_setup(p, p.E());
        if (c.levels) setup.well.n_levels = *c.levels;
        const TdseRun run = propagate(setup.well, setup.packet, p, tdse_options(c, r));
        std::vector<EnergyWeight> weights = packet_energy_weights(run, WeightModel::Projection);
        double total = 0.0;
        for (const auto& w : weights) total += w.weight;
        for (auto& w : weights) w.weight /= total;
        p_fs[i] = energy_averaged_transmission(weights, p, omega, r.truncation);
        std::ostringstream note;
        if (run.plateau.found) {
            p_tdse[i] = run.plateau.value;
        } else {
            p_tdse[i] = run.history.back().p_right;
            note << "warning: Omega = " << format_number(omega) << " has no P_right plateau; using the final value\n";
        }
        note << "Omega " << format_number(omega) << ": P_fs " << format_number(p_fs[i]) << ", P_tdse "
             << format_number(p_tdse[i]) << " (" << run.well.n_levels << " levels)\n";
        notes[i] = note.str();
    });
    for (const auto& n : notes) err << n;

    Table table;
    table.columns = {"omega", "P_fs", "P_tdse"};
    for (std::size_t i = 0; i < count; ++i) table.add_row({r.omega_grid[i], p_fs[i], p_tdse[i]});
    emit(render(table, c.format), c, out);
}

int exit_code(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::InvalidInput: return kUsage;
    case ErrorKind::Convergence: return kConvergenceFailure;
    case ErrorKind::Solver: break;
    }
    return kSolverFailure;
}

} // namespace

ResolvedRun resolve(const RunConfig& c) {
    static const std::vector<std::string> commands{"fs", "ts", "sweep", "tdse", "fig2", "fig3"};
    require(std::find(commands.begin(), commands.end(), c.command) != commands.end(),
            "unknown command '" + c.command + "'");
    require(c.panel == "a" || c.panel == "b" || c.panel == "c" || c.panel == "d", "--panel must be one of a, b, c, d");
    require(c.threads >= 0, "--threads must be >= 0");

    BarrierParams::Values v = command_defaults(c);
    if (c.hbar) v.hbar = *c.hbar;
    if (c.mass) v.mass = *c.mass;
    if (c.V0) v.V0 = *c.V0;
    if (c.eps) v.eps = *c.eps;
    if (c.E) v.E = *c.E;
    if (c.omega) v.Omega = *c.omega;

    std::vector<double> grid;
    if (uses_grid(c.command)) {
        const GridDefaults g = grid_defaults(c.command);
        const double lo = value_or(c.omega_min, g.lo);
        const double hi = value_or(c.omega_max, g.hi);
        const int points = value_or(c.omega_points, g.points);
        require(points >= 1, "--omega-points must be >= 1");
        require(lo > 0.0 && std::isfinite(lo), "--omega-min must be finite and > 0");
        require(std::isfinite(hi), "--omega-max must be finite");
        require(points == 1 || hi > lo, "--omega-max must exceed --omega-min when --omega-points > 1");
        grid = linear_grid(lo, hi, points);
        if (!c.omega) v.Omega = grid.front();
    }

    ResolvedRun r{BarrierParams(v), {}, std::nullopt, 1e-8, SolverKind::FS, std::move(grid)};

    const bool tdse_like = c.command == "tdse" || c.command == "fig3";
    if (c.tol) {
        require(*c.tol > 0.0 && *c.tol < 1.0, "--tol must lie in (0, 1)");
        if (tdse_like) {
            r.tdse_tol = *c.tol;
        } else {
            r.truncation.tol = *c.tol;
        }
    }
    if (c.trunc) {
        require(*c.trunc >= 1, "--trunc must be >= 1");
        r.fixed_window = *c.trunc;
    }
    if (c.solver) {
        require(*c.solver == "fs" || *c.solver == "ts", "--solver must be fs or ts");
        r.solver = *c.solver == "ts" ? SolverKind::TS : SolverKind::FS;
    }
    if (c.levels) require(*c.levels >= 2, "--levels must be >= 2");
    if (c.t_final) require(*c.t_final > 0.0, "--t-final must be > 0");
    if (c.sigma) require(*c.sigma > 0.0, "--sigma must be > 0");
    if (c.k_mean) require(*c.k_mean > 0.0, "--k-mean must be > 0");

    if (c.command == "tdse") {
        const CollisionSetup setup = tdse_setup(c, r.params);
        validate_packet(setup.packet, setup.well);
    }
    return r;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Scattering through an oscillating delta barrier: Floquet sidebands, Toeplitz closure, "
                 "wave-packet propagation",
                 "oscdelta"};
    app.fallthrough();
    app.require_subcommand(1);
    app.set_config("--config", "", "Flat 'key = value' file using the long flag names; flags win");

    RunConfig c;
    app.add_option("--hbar", c.hbar, "Action unit (default 1)");
    app.add_option("--mass", c.mass, "Mass unit (default 0.5)");
    app.add_option("--V0", c.V0, "Barrier strength");
    app.add_option("--eps", c.eps, "Modulation amplitude, 0 <= eps <= 1");
    app.add_option("--omega", c.omega, "Modulation angular frequency");
    app.add_option("--E", c.E, "Incident energy (packet mean energy for tdse/fig3)");
    app.add_option("--trunc", c.trunc, "Fixed sideband window [-N, N] instead of automatic convergence");
    app.add_option("--tol", c.tol, "Truncation tolerance (fs, ts, sweep, fig2) or integrator tolerance (tdse, fig3)");
    app.add_option("--solver", c.solver, "Sweep solver")->check(CLI::IsMember({"fs", "ts"}));
    app.add_option("--omega-min", c.omega_min, "Lowest grid frequency");
    app.add_option("--omega-max", c.omega_max, "Highest grid frequency");
    app.add_option("--omega-points", c.omega_points, "Number of grid frequencies");
    app.add_option("--L", c.L, "Well width");
    app.add_option("--x0", c.x0, "Packet centre");
    app.add_option("--sigma", c.sigma, "Packet position spread");
    app.add_option("--k-mean", c.k_mean, "Packet mean wavenumber");
    app.add_option("--levels", c.levels, "Retained well eigenstates (even + odd)");
    app.add_option("--t-final", c.t_final, "Propagation time");
    app.add_option("--out", c.out, "Output file (default: standard output)");
    std::string format = "csv";
    app.add_option("--format", format, "Output format")->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--threads", c.threads, "Worker threads for sweep and fig3 (0 = all cores)");

    app.add_subcommand("fs", "Converged full Floquet solution at one parameter set");
    app.add_subcommand("ts", "Toeplitz-closure solution at one parameter set");
    auto* sweep = app.add_subcommand("sweep", "Frequency sweep of the first sidebands and asymmetry fit");
    sweep->add_flag("--regime-c", c.regime_c, "Tabulate the E < hbar*Omega comparison instead");
    app.add_subcommand("tdse", "Wave-packet collision in the infinite well");
    auto* fig2 = app.add_subcommand("fig2", "FS and TS sideband intensities side by side");
    fig2->add_option("--panel", c.panel, "a: E=2.5, b: E=1.5, c: E=0.5, d: E=2.5 with eps=0.5")
        ->check(CLI::IsMember({"a", "b", "c", "d"}));
    app.add_subcommand("fig3", "TDSE transmission against the FS energy average over an Omega grid");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kSuccess : kUsage;
    }

    c.command = app.get_subcommands().front()->get_name();
    c.format = format == "json" ? Format::JSON : Format::CSV;

    try {
        const ResolvedRun r = resolve(c);
        if (c.command == "fs") {
            cmd_fs(c, r, out);
        } else if (c.command == "ts") {
            cmd_ts(c, r, out);
        } else if (c.command == "sweep") {
            cmd_sweep(c, r, out, err);
        } else if (c.command == "tdse") {
            cmd_tdse(c, r, out, err);
        } else if (c.command == "fig2") {
            cmd_fig2(c, r, out);
        } else {
            cmd_fig3(c, r, out, err);
        }
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return exit_code(e.kind());
    } catch (const IoError& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    return kSuccess;
}

} // namespace oscdelta::cli
