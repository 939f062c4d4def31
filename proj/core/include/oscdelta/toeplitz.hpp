// toeplitz.hpp: exponential closure of the Floquet system to a 3x3 problem
//
// Far from n = 0 the diagonal of the Floquet system is nearly constant, so
// the amplitudes decay geometrically: r_n = r_{-1} e^{(n+1)θ_-} for n <= -1
// and r_n = r_1 e^{-(n-1)θ_+} for n >= 1. Substituting into a row with frozen
// diagonal d gives, with x = e^{-θ},
//
//   (ε/2) x² - d x + ε/2 = 0,
//
// whose roots multiply to 1. The decaying root |x| < 1 closes the system onto
// r_{-1}, r_0, r_{+1}. The diagonal is frozen at n = -2 for θ_- and at n = +2
// for θ_+.

#pragma once

#include "oscdelta/barrier.hpp"
#include "oscdelta/errors.hpp"
#include "oscdelta/full_solution.hpp"

#include <string>

namespace oscdelta {

struct CharacteristicRoots {
    int frozen_index{0};
    cplx diagonal;     // 2 i k / B - 1 at frozen_index
    cplx decaying;     // selected root, |x| < 1
    cplx growing;      // its reciprocal partner

    // |(ε/2) x² - d x + ε/2| at the selected root.
    double residual(double eps) const noexcept;
};

struct DecayExponents {
    cplx theta_plus;
    cplx theta_minus;
    RegimeInfo regime;
    CharacteristicRoots plus;
    CharacteristicRoots minus;
};

// ε = 0: there is no coupling to close; use the full solution instead.
class DegenerateClosure : public SolverError {
public:
    using SolverError::SolverError;
};

// Both characteristic roots sit on the unit circle (propagating band edge).
class NoDecayingRoot : public SolverError {
public:
    NoDecayingRoot(const std::string& what, const CharacteristicRoots& roots)
        : SolverError(what), roots_(roots) {}
    const CharacteristicRoots& roots() const noexcept { return roots_; }

private:
    CharacteristicRoots roots_;
};

class SingularClosure : public SolverError {
public:
    SingularClosure(const std::string& what, cplx determinant)
        : SolverError(what), determinant_(determinant) {}
    cplx determinant() const noexcept { return determinant_; }

private:
    cplx determinant_;
};

// Roots of (ε/2) x² - d x + ε/2 = 0, decaying root first.
CharacteristicRoots characteristic_roots(cplx diagonal, double eps, int frozen_index = 0);

DecayExponents decay_exponents(const BarrierParams& params);

struct ToeplitzSolution {
    SidebandSolution sidebands;   // central three solved, |n| > 1 from the exponential tails
    DecayExponents exponents;
    cplx determinant;
};

// `tail_extent` sets how far the reported window [-tail_extent, tail_extent]
// extends the amplitudes with the exponential tails (>= 1).
ToeplitzSolution solve_ts(const BarrierParams& params, int tail_extent = 5);

} // namespace oscdelta
