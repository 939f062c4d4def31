#include "oscdelta/full_solution.hpp"

#include "oscdelta/tridiagonal.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace oscdelta {

std::vector<cplx> TridiagonalSystem::apply(std::span<const cplx> x) const {
    const std::size_t n = size();
    std::vector<cplx> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        cplx acc = diag[i] * x[i];
        if (i > 0) acc += off * x[i - 1];
        if (i + 1 < n) acc += off * x[i + 1];
        y[i] = acc;
    }
    return y;
}

cplx floquet_diagonal(const BarrierParams& params, int n) {
    // Threshold channels have k = 0 and fall back to the evanescent limit -1.
    const cplx k = channel(params, n).k;
    return cplx(0.0, 2.0) * k / params.coupling() - 1.0;
}

TridiagonalSystem assemble(const BarrierParams& params, int n_min, int n_max) {
    if (n_min > -1 || n_max < 1) {
        std::ostringstream os;
        os << "assemble: window [" << n_min << ", " << n_max << "] must contain {-1, 0, 1}";
        throw InvalidParameter(os.str());
    }
    TridiagonalSystem sys;
    sys.n_min = n_min;
    sys.n_max = n_max;
    sys.off = -0.5 * params.eps();
    const auto size = static_cast<std::size_t>(n_max - n_min + 1);
    sys.diag.resize(size);
    sys.rhs.assign(size, cplx{});
    for (int n = n_min; n <= n_max; ++n) {
        sys.diag[sys.row(n)] = floquet_diagonal(params, n);
    }
    sys.rhs[sys.row(0)] = 1.0;
    sys.rhs[sys.row(-1)] = 0.5 * params.eps();
    sys.rhs[sys.row(1)] = 0.5 * params.eps();
    return sys;
}

cplx SidebandSolution::r_at(int n) const noexcept {
    return contains(n) ? r[static_cast<std::size_t>(n - n_min)] : cplx{};
}

cplx SidebandSolution::t_at(int n) const noexcept {
    if (!contains(n)) return n == 0 ? cplx{1.0, 0.0} : cplx{};
    return t[static_cast<std::size_t>(n - n_min)];
}

double SidebandSolution::intensity(int n) const noexcept {
    return std::norm(t_at(n));
}

SidebandSolution make_sideband_solution(const BarrierParams& params, int n_min,
                                        std::vector<cplx> r, double residual) {
    SidebandSolution sol;
    sol.params = params.values();
    sol.n_min = n_min;
    sol.n_max = n_min + static_cast<int>(r.size()) - 1;
    sol.residual = residual;
    sol.r = std::move(r);
    sol.t = sol.r;
    sol.channels.reserve(sol.r.size());

    const double k0 = channel(params, 0).k.real();
    for (int n = sol.n_min; n <= sol.n_max; ++n) {
        const auto i = static_cast<std::size_t>(n - n_min);
        if (n == 0) sol.t[i] += 1.0;
        const Channel ch = channel(params, n);
        sol.channels.push_back(ch);
        if (ch.carries_flux()) {
            const double weight = ch.k.real() / k0;
            sol.reflected_flux += weight * std::norm(sol.r[i]);
            sol.transmitted_flux += weight * std::norm(sol.t[i]);
        }
    }
    return sol;
}

SidebandSolution solve_fs(const BarrierParams& params, int n_min, int n_max) {
    const TridiagonalSystem sys = assemble(params, n_min, n_max);
    const std::vector<cplx> band(sys.size(), cplx(sys.off, 0.0));
    std::vector<cplx> r;
    try {
        r = solve_tridiagonal(band, sys.diag, band, sys.rhs);
    } catch (const SingularPivotError& e) {
        std::ostringstream os;
        os << "solve_fs: singular pivot at sideband n = " << n_min + static_cast<int>(e.row())
           << " (E = " << params.E() << ", V0 = " << params.V0() << ", eps = " << params.eps()
           << ", Omega = " << params.Omega() << ")";
        throw SingularPivotError(e.row(), os.str());
    }

    const std::vector<cplx> lhs = sys.apply(r);
    double residual = 0.0;
    for (std::size_t i = 0; i < lhs.size(); ++i) {
        residual = std::max(residual, std::abs(lhs[i] - sys.rhs[i]));
    }
    return make_sideband_solution(params, n_min, std::move(r), residual);
}

namespace {

TruncationNotConverged::Central central_of(const SidebandSolution& sol) {
    return {sol.r_at(-1), sol.r_at(0), sol.r_at(1)};
}

double max_change(const TruncationNotConverged::Central& a, const TruncationNotConverged::Central& b) {
    double change = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) change = std::max(change, std::abs(a[i] - b[i]));
    return change;
}

} // namespace

ConvergedSolution converge_truncation(const BarrierParams& params, const TruncationOptions& options) {
    if (!(options.tol > 0.0)) throw InvalidParameter("converge_truncation: tol must be > 0");
    if (options.initial_half_width < 1 || options.growth_step < 1 ||
        options.max_half_width < options.initial_half_width) {
        throw InvalidParameter("converge_truncation: invalid window schedule");
    }

    // Decoupled channels: the minimal window is exact.
    if (params.eps() == 0.0) {
        return {solve_fs(params, -1, 1), 1, 1, 0.0};
    }

    int half = options.initial_half_width;
    SidebandSolution previous = solve_fs(params, -half, half);
    TruncationNotConverged::Central before = central_of(previous);
    int iterations = 1;
    double change = 0.0;
    while (half < options.max_half_width) {
        half = std::min(half + options.growth_step, options.max_half_width);
        SidebandSolution current = solve_fs(params, -half, half);
        ++iterations;
        change = max_change(central_of(previous), central_of(current));
        if (change < options.tol) {
            return {std::move(current), half, iterations, change};
        }
        before = central_of(previous);
        previous = std::move(current);
    }

    std::ostringstream os;
    os << "converge_truncation: central amplitudes still moved by " << change << " at |n| <= "
       << options.max_half_width << " (tol " << options.tol << ")";
    throw TruncationNotConverged(os.str(), before, central_of(previous));
}

} // namespace oscdelta
