// tdse.hpp: wave-packet collision with the oscillating delta barrier in an
// infinite well, propagated in the instantaneous eigenbasis
//
// The state is ψ(x,t) = Σ_j c_j(t) e^{-iΦ_j(t)} φ_j(x; t) with Φ_j = ∫ E_j dt'/ħ.
// Only even states feel the barrier, so the odd coefficients stay constant and
// the even ones obey
//
//   dc_i/dt = -Σ_j ⟨φ_i|∂_t φ_j⟩ e^{i(Φ_i - Φ_j)} c_j,
//
// integrated together with the phases by adaptive Cash-Karp steps.

#pragma once

#include "oscdelta/barrier.hpp"
#include "oscdelta/cash_karp.hpp"
#include "oscdelta/well.hpp"

#include <Eigen/Core>

#include <vector>

namespace oscdelta {

// Gaussian ψ0(x) ∝ exp(-(x - x0)² / (4σ²) + i k x); σ is the position spread
// of |ψ0|².
struct PacketSpec {
    double x0{-5.0};
    double sigma{0.625};
    double k_mean{1.0};
    double tail_threshold{1e-6};   // |ψ0| at x = 0 and x = -L/2 relative to the peak
};

// Packet at the centre of the left half (x0 = -L/4) with σ = L/32.
PacketSpec default_packet(const WellSpec& well, double k_mean);

// ħ²(k² + 1/(4σ²)) / 2m
double packet_mean_energy(const PacketSpec& packet, double hbar = 1.0, double mass = 0.5);

// Throws InvalidParameter when the packet leaks past x = 0 or the left wall.
void validate_packet(const PacketSpec& packet, const WellSpec& well);

// Levels needed to cover ⟨E⟩ + bands·ħΩ and the packet's momentum spread,
// with a 25% margin on the count.
int default_level_count(const WellSpec& well, const PacketSpec& packet, const BarrierParams& params,
                        int bands = 6);

// Amplitudes ⟨φ_j|ψ0⟩ in basis index order.
std::vector<cplx> project_packet(const InstantBasis& basis, const PacketSpec& packet);

struct EnergyWeight {
    double energy{0.0};
    double weight{0.0};
};

struct TdseOptions {
    double tol{1e-8};               // accuracy target; norm drift must stay within norm_drift_factor * tol
    double local_tol_factor{0.1};   // per-step Cash-Karp tolerance = factor * tol; errors add up over ~10³ steps
    double t_final{0.0};            // <= 0: 0.85 L / v_group
    int samples{400};               // observable samples over [0, t_final]
    double plateau_tol{1e-5};       // max spread of P_right inside a plateau window
    int plateau_window{0};          // samples; 0 = samples / 40
    int bands{6};                   // for the automatic level count
    double min_captured_norm{1.0 - 1e-6};
    double norm_drift_factor{10.0};   // NormDriftError once |norm - 1| > factor * tol
};

struct TdseSample {
    double t{0.0};
    double norm{0.0};
    double p_right{0.0};
};

struct Plateau {
    bool found{false};
    double time{0.0};
    double value{0.0};
};

struct TdseRun {
    BarrierParams::Values params;
    WellSpec well;                  // n_levels resolved
    PacketSpec packet;
    double t{0.0};
    Eigen::VectorXcd c_even;        // adiabatic coefficients at t
    Eigen::VectorXd phase_even;     // Φ_j(t)
    Eigen::VectorXcd c_odd;         // constant
    std::vector<double> odd_energy;
    std::vector<TdseSample> history;
    std::vector<EnergyWeight> initial_weights;   // |⟨φ_j(0)|ψ0⟩|² at E_j(0)
    double captured_norm{0.0};      // Σ|⟨φ_j|ψ0⟩|² before renormalisation
    double max_norm_drift{0.0};
    IntegratorStats stats;
    Plateau plateau;

    // Amplitudes c_j e^{-iΦ_j} in basis index order at the current time.
    std::vector<cplx> amplitudes() const;
};

class NormDriftError : public SolverError {
public:
    NormDriftError(const std::string& what, double t, double drift)
        : SolverError(what), t_(t), drift_(drift) {}
    double time() const noexcept { return t_; }
    double drift() const noexcept { return drift_; }

private:
    double t_;
    double drift_;
};

// Right-hand side of the coefficient/phase system with state
// y = [Re c (n), Im c (n), Φ (n)] over the even levels.
class AdiabaticSystem {
public:
    AdiabaticSystem(const BarrierParams& params, double width, int n_even);

    void operator()(double t, const Eigen::VectorXd& y, Eigen::VectorXd& dydt) const;

    int even_count() const noexcept { return n_even_; }

private:
    BarrierParams params_;
    double width_;
    int n_even_;
};

TdseRun propagate(const WellSpec& well, const PacketSpec& packet, const BarrierParams& params,
                  const TdseOptions& options = {});

// P_right from the recorded samples, linearly interpolated; t must lie within
// the run's history.
double transmitted_probability(const TdseRun& run, double t);

// First window of `window` samples after the rise in which P_right varies by
// at most `tol`.
Plateau find_plateau(const std::vector<TdseSample>& history, int window, double tol);

enum class WeightModel {
    Projection,   // |⟨φ_j(0)|ψ0⟩|² at the instantaneous energies E_j(0)
    Momentum,     // free-space |ψ0(k)|² mapped to E = ħ²k²/2m
};

std::vector<EnergyWeight> packet_energy_weights(const TdseRun& run, WeightModel model);

// Free-space momentum distribution of the packet on `points` nodes over
// k_mean ± 8 σ_k (k > 0), normalised to 1.
std::vector<EnergyWeight> momentum_energy_weights(const PacketSpec& packet, double hbar, double mass,
                                                  int points = 401);

// Geometry that resolves individual sidebands: energy spread ħΩ/resolution
// (σ = resolution ħ k / (2 m Ω)), L = 48σ, x0 = -L/4. The wide well keeps the
// packet far enough from the barrier that P_right starts below 1e-6 at half the
// crossing time L/(4v).
struct CollisionSetup {
    WellSpec well;
    PacketSpec packet;
};

CollisionSetup sideband_resolved_setup(const BarrierParams& params, double mean_energy,
                                       double resolution = 8.0);

} // namespace oscdelta
