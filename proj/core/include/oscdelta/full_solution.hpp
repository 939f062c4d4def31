// full_solution.hpp: truncated Floquet system for the sideband amplitudes
//
// Matching the free-particle sideband expansion across the barrier gives, for
// every integer n,
//
//   (2 i k_n / B - 1) r_n - (ε/2)(r_{n+1} + r_{n-1}) = δ_{0,n} + (ε/2)(δ_{0,n+1} + δ_{0,n-1}),
//
// with t_n = r_n for n != 0 and t_0 = 1 + r_0. The infinite system is cut to a
// window [n_min, n_max] with r = 0 outside, and the window is grown until the
// central amplitudes stop moving.

#pragma once

#include "oscdelta/barrier.hpp"
#include "oscdelta/errors.hpp"

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace oscdelta {

struct TridiagonalSystem {
    int n_min{-1};
    int n_max{1};
    std::vector<cplx> diag;   // 2 i k_n / B - 1
    double off{0.0};          // -ε/2 on both off-diagonals
    std::vector<cplx> rhs;

    std::size_t size() const noexcept { return diag.size(); }
    std::size_t row(int n) const noexcept { return static_cast<std::size_t>(n - n_min); }

    // A x for the truncated operator.
    std::vector<cplx> apply(std::span<const cplx> x) const;
};

TridiagonalSystem assemble(const BarrierParams& params, int n_min, int n_max);

// Diagonal entry 2 i k_n / B - 1 of row n.
cplx floquet_diagonal(const BarrierParams& params, int n);

struct SidebandSolution {
    BarrierParams::Values params;
    int n_min{0};
    int n_max{0};
    std::vector<Channel> channels;   // indexed by n - n_min
    std::vector<cplx> r;
    std::vector<cplx> t;
    double residual{0.0};
    double reflected_flux{0.0};      // Σ_prop (k_n/k0) |r_n|²
    double transmitted_flux{0.0};    // Σ_prop (k_n/k0) |t_n|²

    bool contains(int n) const noexcept { return n >= n_min && n <= n_max; }
    // Amplitudes outside the window are reported as zero.
    cplx r_at(int n) const noexcept;
    cplx t_at(int n) const noexcept;
    // I_n = |t_n|²
    double intensity(int n) const noexcept;
    double flux_sum() const noexcept { return reflected_flux + transmitted_flux; }
};

// Builds t (continuity at x = 0) and the flux sums from reflection amplitudes
// r covering [n_min, n_min + r.size() - 1].
SidebandSolution make_sideband_solution(const BarrierParams& params, int n_min,
                                        std::vector<cplx> r, double residual);

SidebandSolution solve_fs(const BarrierParams& params, int n_min, int n_max);

struct TruncationOptions {
    double tol{1e-10};
    int initial_half_width{4};
    int growth_step{2};
    int max_half_width{200};
};

struct ConvergedSolution {
    SidebandSolution solution;
    int half_width{1};
    int iterations{0};
    double last_change{0.0};
};

class TruncationNotConverged : public ConvergenceError {
public:
    using Central = std::array<cplx, 3>;   // r_{-1}, r_0, r_{+1}

    TruncationNotConverged(const std::string& what, Central previous, Central last)
        : ConvergenceError(what), previous_(previous), last_(last) {}

    const Central& previous() const noexcept { return previous_; }
    const Central& last() const noexcept { return last_; }

private:
    Central previous_;
    Central last_;
};

// Symmetric window growth until max |Δr_n|, n ∈ {-1, 0, 1}, drops below tol.
ConvergedSolution converge_truncation(const BarrierParams& params,
                                      const TruncationOptions& options = {});

} // namespace oscdelta
