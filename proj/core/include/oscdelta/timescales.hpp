// timescales.hpp: frequency sweeps, sideband asymmetry and traversal-time
// estimates built on the sideband solvers

#pragma once

#include "oscdelta/barrier.hpp"
#include "oscdelta/errors.hpp"
#include "oscdelta/full_solution.hpp"
#include "oscdelta/tdse.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace oscdelta {

class UndefinedAsymmetry : public SolverError {
public:
    using SolverError::SolverError;
};

// F = (I+1 - I-1) / (I+1 + I-1) with I_n = |t_n|².
double asymmetry(double i_minus, double i_plus);
double asymmetry(const SidebandSolution& sol);

// 2ħ³ / (m V0²)
double tau_delta(const BarrierParams& params);

// Rectangular barrier of height V and width d, tunneling at E < V.
// Careful: k0 here is √(2mV)/ħ, the wavenumber at the barrier top, not the
// incident wavenumber of the delta problem.
struct RectBarrierParams {
    double V{1.0};
    double d{1.0};
    double E{0.5};
    double hbar{1.0};
    double mass{0.5};

    void validate() const;   // throws InvalidParameter unless V > E > 0, d > 0
    double kappa() const;    // √(2m(V - E))/ħ
    double k() const;        // √(2mE)/ħ
    double k0() const;       // √(2mV)/ħ
};

// Low-frequency traversal time for a general rectangular barrier:
//
//   τ = (m/ħκ²) [ ((κ²-k²)² κ²d² + k0⁴(1+κ²d²) sinh²κd + k0² κd (κ²-k²) sinh 2κd)
//                 / (4k²κ² + k0⁴ sinh²κd) ]^{1/2}
//
// evaluated with the sinh² factor divided out so that opaque barriers do not
// overflow.
double tau_bl_rect(const RectBarrierParams& rect);

// κd → ∞ limit of tau_bl_rect: (m/ħκ²) √(1 + κ²d² + 2κd(κ² - k²)/k0²).
double tau_rect_opaque(const RectBarrierParams& rect);

// Büttiker-Landauer traversal time m d / (ħ κ).
double tau_bl(const RectBarrierParams& rect);

// High-frequency asymmetry tanh(Ω τ_BL).
double high_frequency_asymmetry(const RectBarrierParams& rect, double omega);

enum class SolverKind { FS, TS };

const char* to_string(SolverKind kind) noexcept;

struct SweepPoint {
    double omega{0.0};
    double i_minus{0.0};   // I_{-1}
    double i_zero{0.0};    // I_0
    double i_plus{0.0};    // I_{+1}
    std::optional<double> F;   // absent when both sidebands vanish
    RegimeInfo regime;
    bool in_fit{false};
};

struct LinearFit {
    double slope{0.0};
    double intercept{0.0};
    double r_squared{0.0};
    double residual_rms{0.0};
    int points{0};
};

struct SweepResult {
    BarrierParams::Values params;   // Omega is the only field that varies
    SolverKind solver{SolverKind::FS};
    std::vector<SweepPoint> points;
    std::optional<LinearFit> fit;   // F vs Ω over points with E > ħΩ; needs two
};

struct SweepOptions {
    TruncationOptions truncation;
    int threads{1};   // 0 = hardware concurrency
};

// Ordinary least squares y = a + b x; std::nullopt for fewer than two points
// or a degenerate abscissa.
std::optional<LinearFit> fit_line(std::span<const double> x, std::span<const double> y);

// Grid must be strictly increasing and positive. Solver failures are
// re-raised with the offending Ω in the message.
SweepResult frequency_sweep(const BarrierParams& base, std::span<const double> omega_grid, SolverKind solver,
                            const SweepOptions& options = {});

// Evenly spaced grid of `points` values over [lo, hi].
std::vector<double> linear_grid(double lo, double hi, int points);

// Regime (c) comparison. Channel -1 is evanescent there, so two readings of
// I_{-1} are reported: the amplitude |t_{-1}|² and the flux (k_{-1}/k0)|t_{-1}|²,
// which vanishes and pins F to 1.
struct RegimeCRow {
    double omega{0.0};
    double F_amplitude{0.0};
    double F_flux{0.0};
    std::optional<double> reference;   // √(Ωτ_δ - T0), absent when Ωτ_δ < T0
};

struct RegimeCTable {
    double tau_delta{0.0};
    double T0{0.0};
    std::vector<RegimeCRow> rows;
    std::vector<std::string> warnings;
};

// √(Ωτ_δ - T0) at params.Omega(); absent when Ωτ_δ < T0. The zero of the
// radicand sits at ħΩ = E g²/(1 + g²) with g = mV0/(ħ²k0), which is below E,
// so inside regime (c) the reference is always defined.
std::optional<double> regime_c_reference(const BarrierParams& params);

// Grid points outside regime (c) are skipped with a warning.
RegimeCTable regime_c_check(const BarrierParams& base, std::span<const double> omega_grid,
                            const TruncationOptions& truncation = {});

// Σ_E w(E) Σ_prop (k_n/k0)|t_n(E)|² from converged FS solutions at the given Ω.
// Weights must be non-negative and sum to 1 within 1e-10.
double energy_averaged_transmission(std::span<const EnergyWeight> weights, const BarrierParams& base,
                                    double omega, const TruncationOptions& truncation = {});

} // namespace oscdelta
