// barrier.hpp: oscillating delta barrier parameters, sideband channels, regimes
//
// The barrier is V(x,t) = V0 δ(x) (1 + ε cos Ωt). A particle incident with
// energy E scatters into sidebands n with energy E + nħΩ. All formulas carry
// ħ and m explicitly; the default unit system is ħ = 1, m = 1/2 (ħ = 2m = 1).

#pragma once

#include <complex>

namespace oscdelta {

using cplx = std::complex<double>;

class BarrierParams {
public:
    struct Values {
        double V0{10.0};     // barrier strength (energy * length)
        double eps{0.0};     // modulation amplitude, 0 <= eps <= 1
        double Omega{1.0};   // modulation angular frequency
        double E{1.0};       // incident energy
        double hbar{1.0};
        double mass{0.5};
    };

    // Throws InvalidParameter on any positivity / range violation.
    explicit BarrierParams(const Values& v);

    double V0() const noexcept { return v_.V0; }
    double eps() const noexcept { return v_.eps; }
    double Omega() const noexcept { return v_.Omega; }
    double E() const noexcept { return v_.E; }
    double hbar() const noexcept { return v_.hbar; }
    double mass() const noexcept { return v_.mass; }
    const Values& values() const noexcept { return v_; }

    // B = 2 m V0 / ħ², the inverse length scale of the delta barrier.
    double coupling() const noexcept { return 2.0 * v_.mass * v_.V0 / (v_.hbar * v_.hbar); }

    // Quantum of modulation energy ħΩ.
    double photon_energy() const noexcept { return v_.hbar * v_.Omega; }

    BarrierParams with_energy(double E) const;
    BarrierParams with_omega(double Omega) const;
    BarrierParams with_eps(double eps) const;

private:
    Values v_;
};

enum class ChannelKind { Propagating, Evanescent, Threshold };

const char* to_string(ChannelKind kind) noexcept;

struct Channel {
    int n{0};
    double omega{0.0};     // (E + nħΩ)/ħ
    cplx k{0.0, 0.0};      // k² = 2 m ω / ħ; evanescent channels carry k = iκ, κ > 0
    ChannelKind kind{ChannelKind::Propagating};

    // Only propagating channels carry probability flux.
    bool carries_flux() const noexcept { return kind == ChannelKind::Propagating; }
};

Channel channel(const BarrierParams& params, int n);

enum class Regime { A, B, C };

const char* to_string(Regime regime) noexcept;

// (a) E > 2ħΩ, (b) ħΩ < E < 2ħΩ, (c) E < ħΩ. Equality falls into the lower
// regime with `boundary` set.
struct RegimeInfo {
    Regime regime{Regime::A};
    bool boundary{false};
};

RegimeInfo classify_regime(const BarrierParams& params);

// Transmission probability of the static (ε = 0) delta barrier,
// T0 = 1 / (1 + (B / 2k0)²).
double static_transmission(const BarrierParams& params);

// Same closed form with V0 = 0 admitted (returns 1).
double static_transmission(double V0, double E, double hbar = 1.0, double mass = 0.5);

} // namespace oscdelta
