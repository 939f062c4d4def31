// well.hpp: eigenstates of an infinite well [-L/2, L/2] with a static delta
// barrier of strength V at x = 0
//
// Odd states do not see the barrier: φ = sqrt(2/L) sin(q x), q = 2jπ/L.
// Even states are φ = A sin(k (L/2 - |x|)) with the matching condition
// tan(k L/2) = -2k/B, B = 2 m V / ħ². Each even root lies in its own interval
// k L/2 ∈ ((j - 1/2)π, jπ) for B > 0.

#pragma once

#include "oscdelta/barrier.hpp"

#include <Eigen/Core>

#include <span>
#include <vector>

namespace oscdelta {

struct WellSpec {
    double width{20.0};   // L; the well spans [-L/2, L/2]
    int n_levels{0};      // retained eigenstates (even + odd); 0 selects automatically
};

struct EvenLevel {
    double k{0.0};
    double energy{0.0};
    double norm{0.0};        // A
    double at_origin{0.0};   // φ(0) = A sin(k L/2)
};

// Lowest `count` even levels for barrier coupling B >= 0 (B = 2 m V / ħ²).
std::vector<EvenLevel> even_spectrum(double coupling, double width, int count, double hbar = 1.0,
                                     double mass = 0.5);

// Residual of the even matching condition, scaled to O(1):
// |B sin(kL/2) + 2k cos(kL/2)| / (B + 2k).
double even_matching_residual(double coupling, double width, double k);

// Even and odd states at one instant. Index order: evens first, then odds.
struct InstantBasis {
    double width{0.0};
    double coupling{0.0};
    double hbar{1.0};
    double mass{0.5};
    std::vector<EvenLevel> even;
    std::vector<double> odd_k;
    std::vector<double> odd_energy;

    int even_count() const noexcept { return static_cast<int>(even.size()); }
    int odd_count() const noexcept { return static_cast<int>(odd_k.size()); }
    int size() const noexcept { return even_count() + odd_count(); }
    bool is_even(int index) const noexcept { return index < even_count(); }

    double energy(int index) const;
    double at_origin(int index) const;   // zero for odd states
    double value(int index, double x) const;
};

// n_levels split as ceil(n/2) even and floor(n/2) odd states.
InstantBasis instant_basis(double coupling, const WellSpec& well, double hbar = 1.0, double mass = 0.5);

// Basis for the oscillating barrier at time t, B(t) = B (1 + ε cos Ωt).
InstantBasis instant_basis(const BarrierParams& params, const WellSpec& well, double t);

// ⟨φ_i|∂_t φ_j⟩ = ⟨φ_i|∂_t H|φ_j⟩ / (E_j - E_i) with ∂_t H = (dV/dt) δ(x),
// i.e. dV_dt φ_i(0) φ_j(0) / (E_j - E_i). Odd rows and columns vanish.
// Throws SolverError if two coupled levels are degenerate.
Eigen::MatrixXd adiabatic_couplings(const InstantBasis& basis, double dV_dt);

// O_ij = ∫_0^{L/2} φ_i φ_j dx. Same-parity blocks are δ_ij / 2; the
// even-odd block is A q sin(kL/2) sqrt(2/L) / (q² - k²).
Eigen::MatrixXd right_half_overlaps(const InstantBasis& basis);

// Probability on x > 0 for the state Σ a_j φ_j (a in basis index order).
double right_probability(const InstantBasis& basis, std::span<const cplx> amplitudes);

} // namespace oscdelta
