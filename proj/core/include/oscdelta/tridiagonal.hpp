// tridiagonal.hpp: complex tridiagonal elimination sweep (Thomas algorithm)

#pragma once

#include "oscdelta/barrier.hpp"
#include "oscdelta/errors.hpp"

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace oscdelta {

// Raised when an elimination pivot vanishes; `row()` is the zero-based row.
class SingularPivotError : public SolverError {
public:
    SingularPivotError(std::size_t row, const std::string& what)
        : SolverError(what), row_(row) {}
    std::size_t row() const noexcept { return row_; }

private:
    std::size_t row_;
};

// Solves A x = rhs for tridiagonal A without pivoting. Row i reads
//   lower[i] x[i-1] + diag[i] x[i] + upper[i] x[i+1] = rhs[i];
// lower[0] and upper[n-1] are ignored. All spans must have equal length.
std::vector<cplx> solve_tridiagonal(std::span<const cplx> lower,
                                    std::span<const cplx> diag,
                                    std::span<const cplx> upper,
                                    std::span<const cplx> rhs);

} // namespace oscdelta
