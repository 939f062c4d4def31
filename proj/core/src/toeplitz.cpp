#include "oscdelta/toeplitz.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <sstream>

namespace oscdelta {

namespace {

constexpr double kUnitCircleGap = 1e-12;

} // namespace

double CharacteristicRoots::residual(double eps) const noexcept {
    const cplx x = decaying;
    return std::abs(0.5 * eps * x * x - diagonal * x + 0.5 * eps);
}

CharacteristicRoots characteristic_roots(cplx diagonal, double eps, int frozen_index) {
    if (!(eps > 0.0)) {
        throw DegenerateClosure("characteristic_roots: eps = 0 leaves the Floquet system decoupled");
    }
    // x = (d ± sqrt(d² - ε²)) / ε. Take q = d ± s with the larger modulus so the
    // small root ε/q is formed without cancellation.
    const cplx s = std::sqrt(diagonal * diagonal - eps * eps);
    const cplx q = std::abs(diagonal + s) >= std::abs(diagonal - s) ? diagonal + s : diagonal - s;

    CharacteristicRoots roots;
    roots.frozen_index = frozen_index;
    roots.diagonal = diagonal;
    roots.decaying = eps / q;
    roots.growing = q / eps;

    if (!(std::abs(roots.decaying) < 1.0 - kUnitCircleGap)) {
        std::ostringstream os;
        os << "characteristic_roots: no decaying root at n = " << frozen_index << " (d = " << diagonal
           << ", eps = " << eps << ", |x| = " << std::abs(roots.decaying) << ")";
        throw NoDecayingRoot(os.str(), roots);
    }
    return roots;
}

DecayExponents decay_exponents(const BarrierParams& params) {
    if (params.eps() == 0.0) {
        throw DegenerateClosure("decay_exponents: eps = 0 has no finite closure; use the full solution");
    }
    DecayExponents out;
    out.regime = classify_regime(params);
    out.minus = characteristic_roots(floquet_diagonal(params, -2), params.eps(), -2);
    out.plus = characteristic_roots(floquet_diagonal(params, 2), params.eps(), 2);
    // θ = -log x; log(q/ε) avoids the log of a tiny number.
    out.theta_minus = std::log(out.minus.growing);
    out.theta_plus = std::log(out.plus.growing);
    return out;
}

ToeplitzSolution solve_ts(const BarrierParams& params, int tail_extent) {
    if (tail_extent < 1) throw InvalidParameter("solve_ts: tail_extent must be >= 1");

    ToeplitzSolution out;
    out.exponents = decay_exponents(params);

    const double half_eps = 0.5 * params.eps();
    Eigen::Matrix3cd A;
    A << -half_eps * out.exponents.minus.decaying + floquet_diagonal(params, -1), -half_eps, 0.0,
        -half_eps, floquet_diagonal(params, 0), -half_eps,
        0.0, -half_eps, -half_eps * out.exponents.plus.decaying + floquet_diagonal(params, 1);
    const Eigen::Vector3cd b(half_eps, 1.0, half_eps);

    const Eigen::FullPivLU<Eigen::Matrix3cd> lu(A);
    out.determinant = lu.determinant();
    const double scale = A.cwiseAbs().maxCoeff();
    if (!lu.isInvertible() ||
        std::abs(out.determinant) <= 64.0 * std::numeric_limits<double>::epsilon() * scale * scale * scale) {
        std::ostringstream os;
        os << "solve_ts: singular 3x3 closure, det = " << out.determinant << " (E = " << params.E()
           << ", V0 = " << params.V0() << ", eps = " << params.eps() << ", Omega = " << params.Omega()
           << ")";
        throw SingularClosure(os.str(), out.determinant);
    }
    const Eigen::Vector3cd central = lu.solve(b);
    const double residual = (A * central - b).cwiseAbs().maxCoeff();

    std::vector<cplx> r(static_cast<std::size_t>(2 * tail_extent + 1));
    const auto at = [&](int n) -> cplx& { return r[static_cast<std::size_t>(n + tail_extent)]; };
    at(-1) = central(0);
    at(0) = central(1);
    at(1) = central(2);
    for (int n = 2; n <= tail_extent; ++n) {
        at(-n) = at(-n + 1) * out.exponents.minus.decaying;
        at(n) = at(n - 1) * out.exponents.plus.decaying;
    }
    out.sidebands = make_sideband_solution(params, -tail_extent, std::move(r), residual);
    return out;
}

} // namespace oscdelta
