// root_find.hpp: bracketed scalar root refinement (Illinois regula falsi with
// bisection fallback)

#pragma once

#include "oscdelta/errors.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <utility>

namespace oscdelta {

class BracketError : public SolverError {
public:
    BracketError(const std::string& what, double lo, double hi, double f_lo, double f_hi)
        : SolverError(what), lo_(lo), hi_(hi), f_lo_(f_lo), f_hi_(f_hi) {}

    double lo() const noexcept { return lo_; }
    double hi() const noexcept { return hi_; }
    double f_lo() const noexcept { return f_lo_; }
    double f_hi() const noexcept { return f_hi_; }

private:
    double lo_, hi_, f_lo_, f_hi_;
};

struct RootResult {
    double root{0.0};
    double value{0.0};   // f(root)
    int iterations{0};
};

// Refines a sign-changing bracket [lo, hi] of f. Stops when f vanishes or the
// bracket is no wider than max(x_tol, 4 ulp of the root).
template <class F>
RootResult find_root(F&& f, double lo, double hi, double x_tol = 0.0, int max_iterations = 200) {
    double a = lo;
    double b = hi;
    double fa = f(a);
    double fb = f(b);
    if (fa == 0.0) return {a, fa, 0};
    if (fb == 0.0) return {b, fb, 0};
    if (!(std::isfinite(fa) && std::isfinite(fb)) || std::signbit(fa) == std::signbit(fb)) {
        std::ostringstream os;
        os << "find_root: [" << lo << ", " << hi << "] does not bracket a root (f = " << fa << ", " << fb
           << ")";
        throw BracketError(os.str(), lo, hi, fa, fb);
    }

    constexpr double kUlp = std::numeric_limits<double>::epsilon();
    int side = 0;   // which end was kept last: -1 = a, +1 = b
    double width = std::abs(b - a);
    RootResult best{std::abs(fa) < std::abs(fb) ? a : b, std::abs(fa) < std::abs(fb) ? fa : fb, 0};

    for (int it = 1; it <= max_iterations; ++it) {
        double x = (a * fb - b * fa) / (fb - fa);
        // Fall back to bisection when regula falsi stalls or leaves the bracket.
        if (!(x > std::min(a, b) && x < std::max(a, b)) || it % 4 == 0) {
            x = 0.5 * (a + b);
        }
        const double fx = f(x);
        best = {x, fx, it};
        if (fx == 0.0) return best;

        if (std::signbit(fx) == std::signbit(fb)) {
            b = x;
            fb = fx;
            if (side == +1) fa *= 0.5;
            side = +1;
        } else {
            a = x;
            fa = fx;
            if (side == -1) fb *= 0.5;
            side = -1;
        }
        width = std::abs(b - a);
        if (width <= std::max(x_tol, 4.0 * kUlp * std::abs(x))) return best;
    }
    std::ostringstream os;
    os << "find_root: no convergence in " << max_iterations << " iterations on [" << lo << ", " << hi
       << "], final width " << width;
    throw BracketError(os.str(), lo, hi, fa, fb);
}

} // namespace oscdelta
