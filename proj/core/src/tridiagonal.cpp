#include "oscdelta/tridiagonal.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace oscdelta {

std::vector<cplx> solve_tridiagonal(std::span<const cplx> lower,
                                    std::span<const cplx> diag,
                                    std::span<const cplx> upper,
                                    std::span<const cplx> rhs) {
    const std::size_t n = diag.size();
    if (lower.size() != n || upper.size() != n || rhs.size() != n) {
        throw InvalidParameter("solve_tridiagonal: band and rhs lengths differ");
    }
    if (n == 0) return {};

    constexpr double kTiny = 64.0 * std::numeric_limits<double>::epsilon();

    auto check_pivot = [&](std::size_t row, cplx pivot, double scale) {
        if (!(std::abs(pivot) > kTiny * scale)) {
            std::ostringstream os;
            os << "solve_tridiagonal: singular pivot at row " << row << " (|pivot| = " << std::abs(pivot)
               << ")";
            throw SingularPivotError(row, os.str());
        }
    };

    std::vector<cplx> c_prime(n);
    std::vector<cplx> d_prime(n);

    double scale = std::abs(diag[0]) + (n > 1 ? std::abs(upper[0]) : 0.0);
    check_pivot(0, diag[0], scale);
    c_prime[0] = n > 1 ? upper[0] / diag[0] : cplx{};
    d_prime[0] = rhs[0] / diag[0];

    for (std::size_t i = 1; i < n; ++i) {
        const cplx pivot = diag[i] - lower[i] * c_prime[i - 1];
        scale = std::abs(diag[i]) + std::abs(lower[i]) + (i + 1 < n ? std::abs(upper[i]) : 0.0);
        check_pivot(i, pivot, scale);
        c_prime[i] = i + 1 < n ? upper[i] / pivot : cplx{};
        d_prime[i] = (rhs[i] - lower[i] * d_prime[i - 1]) / pivot;
    }

    std::vector<cplx> x(n);
    x[n - 1] = d_prime[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) {
        x[i] = d_prime[i] - c_prime[i] * x[i + 1];
    }
    return x;
}

} // namespace oscdelta
