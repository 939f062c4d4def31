#include "oscdelta/barrier.hpp"

#include "oscdelta/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace oscdelta {

namespace {

void require(bool ok, const char* field, const char* constraint, double value) {
    if (!ok) {
        std::ostringstream os;
        os << "BarrierParams: " << field << " must be " << constraint << " (got " << value << ")";
        throw InvalidParameter(os.str());
    }
}

// Energies equal up to a few ulps of the larger operand count as equal.
bool nearly_zero(double value, double scale) {
    return std::abs(value) <= 4.0 * std::numeric_limits<double>::epsilon() * scale;
}

} // namespace

BarrierParams::BarrierParams(const Values& v) : v_(v) {
    require(std::isfinite(v.hbar) && v.hbar > 0.0, "hbar", "finite and > 0", v.hbar);
    require(std::isfinite(v.mass) && v.mass > 0.0, "mass", "finite and > 0", v.mass);
    require(std::isfinite(v.V0) && v.V0 > 0.0, "V0", "finite and > 0", v.V0);
    require(std::isfinite(v.eps) && v.eps >= 0.0 && v.eps <= 1.0, "eps", "in [0, 1]", v.eps);
    require(std::isfinite(v.Omega) && v.Omega > 0.0, "Omega", "finite and > 0", v.Omega);
    require(std::isfinite(v.E) && v.E > 0.0, "E", "finite and > 0", v.E);
    const double B = coupling();
    require(std::isfinite(B) && B > 0.0, "2 m V0 / hbar^2", "finite and > 0", B);
}

BarrierParams BarrierParams::with_energy(double E) const {
    Values v = v_;
    v.E = E;
    return BarrierParams(v);
}

BarrierParams BarrierParams::with_omega(double Omega) const {
    Values v = v_;
    v.Omega = Omega;
    return BarrierParams(v);
}

BarrierParams BarrierParams::with_eps(double eps) const {
    Values v = v_;
    v.eps = eps;
    return BarrierParams(v);
}

const char* to_string(ChannelKind kind) noexcept {
    switch (kind) {
    case ChannelKind::Propagating: return "propagating";
    case ChannelKind::Evanescent: return "evanescent";
    case ChannelKind::Threshold: return "threshold";
    }
    return "unknown";
}

const char* to_string(Regime regime) noexcept {
    switch (regime) {
    case Regime::A: return "A";
    case Regime::B: return "B";
    case Regime::C: return "C";
    }
    return "?";
}

Channel channel(const BarrierParams& params, int n) {
    const double hw = params.photon_energy();
    const double shift = static_cast<double>(n) * hw;
    const double energy = params.E() + shift;

    Channel ch;
    ch.n = n;
    ch.omega = energy / params.hbar();

    if (nearly_zero(energy, std::max(params.E(), std::abs(shift)))) {
        ch.omega = 0.0;
        ch.k = 0.0;
        ch.kind = ChannelKind::Threshold;
        return ch;
    }

    // k² = 2 m E_n / ħ²
    const double k2 = 2.0 * params.mass() * energy / (params.hbar() * params.hbar());
    if (k2 > 0.0) {
        ch.k = cplx(std::sqrt(k2), 0.0);
        ch.kind = ChannelKind::Propagating;
    } else {
        ch.k = cplx(0.0, std::sqrt(-k2));
        ch.kind = ChannelKind::Evanescent;
    }
    return ch;
}

RegimeInfo classify_regime(const BarrierParams& params) {
    const double E = params.E();
    const double hw = params.photon_energy();
    const double scale = std::max(E, 2.0 * hw);

    if (nearly_zero(E - hw, scale)) return {Regime::C, true};
    if (nearly_zero(E - 2.0 * hw, scale)) return {Regime::B, true};
    if (E < hw) return {Regime::C, false};
    if (E < 2.0 * hw) return {Regime::B, false};
    return {Regime::A, false};
}

double static_transmission(const BarrierParams& params) {
    return static_transmission(params.V0(), params.E(), params.hbar(), params.mass());
}

double static_transmission(double V0, double E, double hbar, double mass) {
    if (!(E > 0.0)) throw InvalidParameter("static_transmission: E must be > 0");
    if (V0 < 0.0) throw InvalidParameter("static_transmission: V0 must be >= 0");
    const double B = 2.0 * mass * V0 / (hbar * hbar);
    const double k0 = std::sqrt(2.0 * mass * E) / hbar;
    const double ratio = B / (2.0 * k0);
    return 1.0 / (1.0 + ratio * ratio);
}

} // namespace oscdelta
