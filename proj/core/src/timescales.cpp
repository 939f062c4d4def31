#include "oscdelta/timescales.hpp"

#include "oscdelta/parallel.hpp"
#include "oscdelta/toeplitz.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace oscdelta {

namespace {

double flux_intensity(const SidebandSolution& sol, int n) {
    const Channel ch = channel(BarrierParams(sol.params), n);
    if (!ch.carries_flux()) return 0.0;
    const double k0 = channel(BarrierParams(sol.params), 0).k.real();
    return ch.k.real() / k0 * sol.intensity(n);
}

} // namespace

double asymmetry(double i_minus, double i_plus) {
    const double sum = i_plus + i_minus;
    if (!(sum > 0.0)) {
        std::ostringstream os;
        os << "asymmetry: both first sidebands vanish (I-1 = " << i_minus << ", I+1 = " << i_plus << ")";
        throw UndefinedAsymmetry(os.str());
    }
    return (i_plus - i_minus) / sum;
}

double asymmetry(const SidebandSolution& sol) { return asymmetry(sol.intensity(-1), sol.intensity(1)); }

double tau_delta(const BarrierParams& params) {
    const double h = params.hbar();
    return 2.0 * h * h * h / (params.mass() * params.V0() * params.V0());
}

void RectBarrierParams::validate() const {
    if (!(hbar > 0.0) || !(mass > 0.0)) throw InvalidParameter("RectBarrierParams: hbar and mass must be > 0");
    if (!(d > 0.0)) throw InvalidParameter("RectBarrierParams: width d must be > 0");
    if (!(E > 0.0)) throw InvalidParameter("RectBarrierParams: energy E must be > 0");
    if (!(V > E)) {
        std::ostringstream os;
        os << "RectBarrierParams: need V > E for tunneling (V = " << V << ", E = " << E << ")";
        throw InvalidParameter(os.str());
    }
}

double RectBarrierParams::kappa() const { return std::sqrt(2.0 * mass * (V - E)) / hbar; }
double RectBarrierParams::k() const { return std::sqrt(2.0 * mass * E) / hbar; }
double RectBarrierParams::k0() const { return std::sqrt(2.0 * mass * V) / hbar; }

double tau_bl_rect(const RectBarrierParams& rect) {
    rect.validate();
    const double kap = rect.kappa();
    const double k = rect.k();
    const double k0 = rect.k0();
    const double x = kap * rect.d;
    const double kap2 = kap * kap;
    const double k2 = k * k;
    const double k04 = k0 * k0 * k0 * k0;

    // 1/sinh²x = 4e^{-2x}/(1 - e^{-2x})², sinh 2x / sinh²x = 2/tanh x
    const double e2 = std::exp(-2.0 * x);
    const double one_minus = -std::expm1(-2.0 * x);
    const double inv_sinh2 = 4.0 * e2 / (one_minus * one_minus);
    const double sinh2x_over_sinh2 = 2.0 / std::tanh(x);

    const double numerator = (kap2 - k2) * (kap2 - k2) * x * x * inv_sinh2 + k04 * (1.0 + x * x) +
                             k0 * k0 * x * (kap2 - k2) * sinh2x_over_sinh2;
    const double denominator = 4.0 * k2 * kap2 * inv_sinh2 + k04;
    return rect.mass / (rect.hbar * kap2) * std::sqrt(numerator / denominator);
}

double tau_rect_opaque(const RectBarrierParams& rect) {
    rect.validate();
    const double kap = rect.kappa();
    const double k = rect.k();
    const double k0 = rect.k0();
    const double x = kap * rect.d;
    return rect.mass / (rect.hbar * kap * kap) *
           std::sqrt(1.0 + x * x + 2.0 * x * (kap * kap - k * k) / (k0 * k0));
}

double tau_bl(const RectBarrierParams& rect) {
    rect.validate();
    return rect.mass * rect.d / (rect.hbar * rect.kappa());
}

double high_frequency_asymmetry(const RectBarrierParams& rect, double omega) {
    return std::tanh(omega * tau_bl(rect));
}

const char* to_string(SolverKind kind) noexcept { return kind == SolverKind::FS ? "fs" : "ts"; }

std::optional<LinearFit> fit_line(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw InvalidParameter("fit_line: x and y differ in length");
    const std::size_t n = x.size();
    if (n < 2) return std::nullopt;
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (!(sxx > 0.0)) return std::nullopt;

    LinearFit fit;
    fit.points = static_cast<int>(n);
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double ss_res = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = y[i] - (fit.intercept + fit.slope * x[i]);
        ss_res += r * r;
    }
    fit.residual_rms = std::sqrt(ss_res / static_cast<double>(n));
    fit.r_squared = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
    return fit;
}

std::vector<double> linear_grid(double lo, double hi, int points) {
    if (points < 1) throw InvalidParameter("linear_grid: need at least one point");
    if (points == 1) return {lo};
    std::vector<double> grid(static_cast<std::size_t>(points));
    for (int i = 0; i < points; ++i) {
        grid[static_cast<std::size_t>(i)] = lo + (hi - lo) * static_cast<double>(i) / (points - 1);
    }
    grid.back() = hi;
    return grid;
}

SweepResult frequency_sweep(const BarrierParams& base, std::span<const double> omega_grid, SolverKind solver,
                            const SweepOptions& options) {
    for (std::size_t i = 0; i < omega_grid.size(); ++i) {
        if (!(omega_grid[i] > 0.0) || !std::isfinite(omega_grid[i])) {
            throw InvalidParameter("frequency_sweep: omega grid values must be finite and > 0");
        }
        if (i > 0 && !(omega_grid[i] > omega_grid[i - 1])) {
            throw InvalidParameter("frequency_sweep: omega grid must be strictly increasing");
        }
    }

    SweepResult result;
    result.params = base.values();
    result.solver = solver;
    result.points.resize(omega_grid.size());

    parallel_for(omega_grid.size(), options.threads, [&](std::size_t i) {
        const double omega = omega_grid[i];
        try {
            const BarrierParams p = base.with_omega(omega);
            const SidebandSolution sol = solver == SolverKind::FS ? converge_truncation(p, options.truncation).solution
                                                                  : solve_ts(p).sidebands;
            SweepPoint& pt = result.points[i];
            pt.omega = omega;
            pt.i_minus = sol.intensity(-1);
            pt.i_zero = sol.intensity(0);
            pt.i_plus = sol.intensity(1);
            if (pt.i_minus + pt.i_plus > 0.0) pt.F = asymmetry(pt.i_minus, pt.i_plus);
            pt.regime = classify_regime(p);
        } catch (const Error& e) {
            std::ostringstream os;
            os << "frequency_sweep (" << to_string(solver) << ", Omega = " << omega << ")";
            rethrow_with_context(e, os.str());
        }
    });

    std::vector<double> xs, ys;
    for (auto& pt : result.points) {
        // Regimes (a) and (b): E > ħΩ. The boundary E = ħΩ is labelled (c).
        if (pt.regime.regime != Regime::C && pt.F) {
            pt.in_fit = true;
            xs.push_back(pt.omega);
            ys.push_back(*pt.F);
        }
    }
    result.fit = fit_line(xs, ys);
    return result;
}

std::optional<double> regime_c_reference(const BarrierParams& params) {
    const double radicand = params.Omega() * tau_delta(params) - static_transmission(params);
    if (radicand < 0.0) return std::nullopt;
    return std::sqrt(radicand);
}

RegimeCTable regime_c_check(const BarrierParams& base, std::span<const double> omega_grid,
                            const TruncationOptions& truncation) {
    RegimeCTable table;
    table.tau_delta = tau_delta(base);
    table.T0 = static_transmission(base);

    for (const double omega : omega_grid) {
        const BarrierParams p = base.with_omega(omega);
        if (classify_regime(p).regime != Regime::C || !(base.E() < p.photon_energy())) {
            std::ostringstream os;
            os << "Omega = " << omega << " skipped: E = " << base.E() << " is not below hbar*Omega";
            table.warnings.push_back(os.str());
            continue;
        }
        const SidebandSolution sol = converge_truncation(p, truncation).solution;
        RegimeCRow row;
        row.omega = omega;
        row.F_amplitude = asymmetry(sol);
        row.F_flux = asymmetry(flux_intensity(sol, -1), flux_intensity(sol, 1));
        row.reference = regime_c_reference(p);
        table.rows.push_back(row);
    }
    if (table.rows.empty()) table.warnings.push_back("no grid point lies in regime (c); table is empty");
    return table;
}

double energy_averaged_transmission(std::span<const EnergyWeight> weights, const BarrierParams& base,
                                    double omega, const TruncationOptions& truncation) {
    double total = 0.0;
    for (const auto& w : weights) {
        if (!(w.weight >= 0.0)) throw InvalidParameter("energy_averaged_transmission: weights must be >= 0");
        total += w.weight;
    }
    if (!(std::abs(total - 1.0) <= 1e-10)) {
        std::ostringstream os;
        os.precision(17);
        os << "energy_averaged_transmission: weights sum to " << total << ", not 1";
        throw InvalidParameter(os.str());
    }

    const BarrierParams at_omega = base.with_omega(omega);
    double sum = 0.0;
    for (const auto& w : weights) {
        if (w.weight == 0.0) continue;
        try {
            const BarrierParams p = at_omega.with_energy(w.energy);
            sum += w.weight * converge_truncation(p, truncation).solution.transmitted_flux;
        } catch (const Error& e) {
            std::ostringstream os;
            os << "energy_averaged_transmission (E = " << w.energy << ", Omega = " << omega << ")";
            rethrow_with_context(e, os.str());
        }
    }
    return sum;
}

} // namespace oscdelta
