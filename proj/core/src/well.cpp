#include "oscdelta/well.hpp"

#include "oscdelta/errors.hpp"
#include "oscdelta/root_find.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace oscdelta {

namespace {

constexpr double kPi = std::numbers::pi;

double normalization(double k, double width) {
    // ∫ sin²(k(L/2 - |x|)) dx over the well = L/2 - sin(kL)/(2k)
    return 1.0 / std::sqrt(0.5 * width - std::sin(k * width) / (2.0 * k));
}

} // namespace

double even_matching_residual(double coupling, double width, double k) {
    const double z = 0.5 * k * width;
    return std::abs(coupling * std::sin(z) + 2.0 * k * std::cos(z)) / (coupling + 2.0 * k);
}

std::vector<EvenLevel> even_spectrum(double coupling, double width, int count, double hbar, double mass) {
    if (!(coupling >= 0.0) || !std::isfinite(coupling)) {
        throw InvalidParameter("even_spectrum: barrier coupling must be finite and >= 0");
    }
    if (!(width > 0.0)) throw InvalidParameter("even_spectrum: well width must be > 0");
    if (count < 0) throw InvalidParameter("even_spectrum: count must be >= 0");

    std::vector<EvenLevel> levels;
    levels.reserve(static_cast<std::size_t>(count));
    const double scale = 4.0 / width;   // 2k = (4/L) z with z = kL/2

    for (int j = 1; j <= count; ++j) {
        const double lo = (j - 0.5) * kPi;
        const double hi = j * kPi;
        double z = lo;
        if (coupling > 0.0) {
            // f(z) = B sin z + (4z/L) cos z changes sign across (lo, hi).
            const auto f = [&](double zz) { return coupling * std::sin(zz) + scale * zz * std::cos(zz); };
            try {
                z = find_root(f, lo, hi).root;
            } catch (const BracketError& e) {
                std::ostringstream os;
                os << "even_spectrum: level " << j << " not bracketed in z in [" << lo << ", " << hi
                   << "] (B = " << coupling << ", L = " << width << "): " << e.what();
                throw BracketError(os.str(), e.lo(), e.hi(), e.f_lo(), e.f_hi());
            }
        }
        EvenLevel level;
        level.k = 2.0 * z / width;
        level.energy = hbar * hbar * level.k * level.k / (2.0 * mass);
        level.norm = normalization(level.k, width);
        level.at_origin = level.norm * std::sin(z);
        levels.push_back(level);
    }
    return levels;
}

double InstantBasis::energy(int index) const {
    return is_even(index) ? even[static_cast<std::size_t>(index)].energy
                          : odd_energy[static_cast<std::size_t>(index - even_count())];
}

double InstantBasis::at_origin(int index) const {
    return is_even(index) ? even[static_cast<std::size_t>(index)].at_origin : 0.0;
}

double InstantBasis::value(int index, double x) const {
    if (std::abs(x) > 0.5 * width) return 0.0;
    if (is_even(index)) {
        const EvenLevel& lv = even[static_cast<std::size_t>(index)];
        return lv.norm * std::sin(lv.k * (0.5 * width - std::abs(x)));
    }
    const double q = odd_k[static_cast<std::size_t>(index - even_count())];
    return std::sqrt(2.0 / width) * std::sin(q * x);
}

InstantBasis instant_basis(double coupling, const WellSpec& well, double hbar, double mass) {
    if (well.n_levels < 1) throw InvalidParameter("instant_basis: n_levels must be >= 1");
    InstantBasis basis;
    basis.width = well.width;
    basis.coupling = coupling;
    basis.hbar = hbar;
    basis.mass = mass;
    const int n_even = (well.n_levels + 1) / 2;
    const int n_odd = well.n_levels / 2;
    basis.even = even_spectrum(coupling, well.width, n_even, hbar, mass);
    basis.odd_k.reserve(static_cast<std::size_t>(n_odd));
    basis.odd_energy.reserve(static_cast<std::size_t>(n_odd));
    for (int j = 1; j <= n_odd; ++j) {
        const double q = 2.0 * j * kPi / well.width;
        basis.odd_k.push_back(q);
        basis.odd_energy.push_back(hbar * hbar * q * q / (2.0 * mass));
    }
    return basis;
}

InstantBasis instant_basis(const BarrierParams& params, const WellSpec& well, double t) {
    const double coupling = params.coupling() * (1.0 + params.eps() * std::cos(params.Omega() * t));
    return instant_basis(coupling, well, params.hbar(), params.mass());
}

Eigen::MatrixXd adiabatic_couplings(const InstantBasis& basis, double dV_dt) {
    const int n = basis.size();
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n, n);
    if (dV_dt == 0.0) return M;
    const int ne = basis.even_count();
    double e_scale = 0.0;
    for (const auto& lv : basis.even) e_scale = std::max(e_scale, lv.energy);
    for (int i = 0; i < ne; ++i) {
        for (int j = 0; j < ne; ++j) {
            if (i == j) continue;
            const double gap = basis.even[j].energy - basis.even[i].energy;
            if (std::abs(gap) <= 1e-12 * e_scale) {
                std::ostringstream os;
                os << "adiabatic_couplings: even levels " << i << " and " << j << " are degenerate (gap " << gap
                   << ")";
                throw SolverError(os.str());
            }
            M(i, j) = dV_dt * basis.even[i].at_origin * basis.even[j].at_origin / gap;
        }
    }
    return M;
}

Eigen::MatrixXd right_half_overlaps(const InstantBasis& basis) {
    const int n = basis.size();
    const int ne = basis.even_count();
    Eigen::MatrixXd O = 0.5 * Eigen::MatrixXd::Identity(n, n);
    const double odd_norm = std::sqrt(2.0 / basis.width);
    for (int i = 0; i < ne; ++i) {
        const EvenLevel& lv = basis.even[static_cast<std::size_t>(i)];
        const double s = std::sin(0.5 * lv.k * basis.width);
        for (int j = 0; j < basis.odd_count(); ++j) {
            const double q = basis.odd_k[static_cast<std::size_t>(j)];
            const double v = lv.norm * odd_norm * q * s / (q * q - lv.k * lv.k);
            O(i, ne + j) = v;
            O(ne + j, i) = v;
        }
    }
    return O;
}

double right_probability(const InstantBasis& basis, std::span<const cplx> amplitudes) {
    if (static_cast<int>(amplitudes.size()) != basis.size()) {
        throw InvalidParameter("right_probability: amplitude count does not match the basis");
    }
    const int ne = basis.even_count();
    const double odd_norm = std::sqrt(2.0 / basis.width);
    double diagonal = 0.0;
    for (const cplx& a : amplitudes) diagonal += std::norm(a);

    cplx cross{};
    for (int i = 0; i < ne; ++i) {
        const EvenLevel& lv = basis.even[static_cast<std::size_t>(i)];
        const double s = lv.norm * odd_norm * std::sin(0.5 * lv.k * basis.width);
        cplx row{};
        for (int j = 0; j < basis.odd_count(); ++j) {
            const double q = basis.odd_k[static_cast<std::size_t>(j)];
            row += amplitudes[static_cast<std::size_t>(ne + j)] * (q / (q * q - lv.k * lv.k));
        }
        cross += std::conj(amplitudes[static_cast<std::size_t>(i)]) * s * row;
    }
    return 0.5 * diagonal + 2.0 * cross.real();
}

} // namespace oscdelta
