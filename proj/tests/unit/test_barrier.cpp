#include <doctest.h>

#include "oracles.hpp"

#include "oscdelta/barrier.hpp"
#include "oscdelta/errors.hpp"

#include <cmath>
#include <limits>

using namespace oscdelta;

namespace {

BarrierParams make(double E, double omega, double V0 = 10.0, double eps = 0.0, double hbar = 1.0,
                   double mass = 0.5) {
    BarrierParams::Values v;
    v.E = E;
    v.Omega = omega;
    v.V0 = V0;
    v.eps = eps;
    v.hbar = hbar;
    v.mass = mass;
    return BarrierParams(v);
}

} // namespace

TEST_CASE("parameters reject every out-of-range field") {
    BarrierParams::Values good;
    CHECK_NOTHROW(BarrierParams{good});

    auto bad = [&](auto mutate) {
        BarrierParams::Values v = good;
        mutate(v);
        CHECK_THROWS_AS(BarrierParams{v}, InvalidParameter);
    };
    bad([](auto& v) { v.hbar = 0.0; });
    bad([](auto& v) { v.hbar = -1.0; });
    bad([](auto& v) { v.mass = 0.0; });
    bad([](auto& v) { v.V0 = 0.0; });
    bad([](auto& v) { v.V0 = -3.0; });
    bad([](auto& v) { v.Omega = 0.0; });
    bad([](auto& v) { v.E = 0.0; });
    bad([](auto& v) { v.E = -1.0; });
    bad([](auto& v) { v.eps = -0.1; });
    bad([](auto& v) { v.eps = 1.5; });
    bad([](auto& v) { v.E = std::numeric_limits<double>::quiet_NaN(); });
    bad([](auto& v) { v.V0 = std::numeric_limits<double>::infinity(); });
    bad([](auto& v) {
        v.V0 = 1e300;
        v.hbar = 1e-10;
    });

    BarrierParams::Values edge = good;
    edge.eps = 1.0;
    CHECK_NOTHROW(BarrierParams{edge});
}

TEST_CASE("coupling constant B = 2 m V0 / hbar^2") {
    CHECK(make(2.5, 1.0).coupling() == doctest::Approx(10.0));
    CHECK(make(2.5, 1.0, 10.0, 0.0, 2.0, 1.0).coupling() == doctest::Approx(5.0));
}

TEST_CASE("channel examples") {
    SUBCASE("propagating incident channel") {
        const Channel ch = channel(make(2.5, 1.0), 0);
        CHECK(ch.kind == ChannelKind::Propagating);
        CHECK(ch.k.real() == doctest::Approx(1.58113883).epsilon(1e-8));
        CHECK(ch.k.imag() == 0.0);
    }
    SUBCASE("evanescent lower sideband") {
        const Channel ch = channel(make(0.5, 1.0), -1);
        CHECK(ch.kind == ChannelKind::Evanescent);
        CHECK(ch.omega == doctest::Approx(-0.5));
        CHECK(ch.k.real() == 0.0);
        CHECK(ch.k.imag() == doctest::Approx(std::sqrt(0.5)));
        CHECK_FALSE(ch.carries_flux());
    }
    SUBCASE("threshold") {
        const Channel ch = channel(make(1.0, 1.0), -1);
        CHECK(ch.kind == ChannelKind::Threshold);
        CHECK(ch.omega == 0.0);
        CHECK(ch.k == cplx(0.0, 0.0));
        CHECK_FALSE(ch.carries_flux());
    }
}

TEST_CASE("threshold detection survives rounding in E + n hbar Omega") {
    // 0.3 - 3 * 0.1 is not exactly zero in binary floating point.
    const Channel ch = channel(make(0.3, 0.1), -3);
    CHECK(ch.kind == ChannelKind::Threshold);
}

TEST_CASE("channel wavenumbers obey k^2 = 2 m omega / hbar and branch rules") {
    for (double hbar : {1.0, 0.7}) {
        for (double mass : {0.5, 2.0}) {
            for (double E : {0.3, 1.7, 4.0}) {
                for (double omega : {0.45, 1.0, 2.3}) {
                    const BarrierParams p = make(E, omega, 10.0, 0.2, hbar, mass);
                    for (int n = -8; n <= 8; ++n) {
                        const Channel ch = channel(p, n);
                        const cplx k2 = ch.k * ch.k;
                        const double expect = 2.0 * mass * ch.omega / hbar;
                        CHECK(std::abs(k2 - expect) <= 1e-13 * std::max(1.0, std::abs(expect)));
                        CHECK(ch.k.imag() >= 0.0);
                        if (ch.kind == ChannelKind::Propagating) {
                            CHECK(ch.k.real() > 0.0);
                            CHECK(ch.k.imag() == 0.0);
                        } else if (ch.kind == ChannelKind::Evanescent) {
                            CHECK(ch.k.real() == 0.0);
                            CHECK(ch.k.imag() > 0.0);
                        }
                        const cplx ref = oracle::wavenumber(E, omega, n, hbar, mass);
                        CHECK(std::abs(ch.k - ref) <= 1e-12 * std::max(1.0, std::abs(ref)));
                    }
                }
            }
        }
    }
}

TEST_CASE("k^2 spacing between neighbouring sidebands is 2 m Omega / hbar") {
    const BarrierParams p = make(1.3, 0.8, 10.0, 0.5, 1.1, 0.9);
    const double spacing = 2.0 * p.mass() * p.Omega() / p.hbar();
    for (int n = -6; n <= 6; ++n) {
        const cplx a = channel(p, n).k;
        const cplx b = channel(p, n - 1).k;
        CHECK(std::abs((a * a - b * b) - spacing) <= 1e-12 * spacing);
    }
}

TEST_CASE("regime classification") {
    CHECK(classify_regime(make(2.5, 1.0)).regime == Regime::A);
    CHECK(classify_regime(make(1.5, 1.0)).regime == Regime::B);
    CHECK(classify_regime(make(0.5, 1.0)).regime == Regime::C);
    CHECK_FALSE(classify_regime(make(2.5, 1.0)).boundary);

    const RegimeInfo two = classify_regime(make(2.0, 1.0));
    CHECK(two.regime == Regime::B);
    CHECK(two.boundary);
    const RegimeInfo one = classify_regime(make(1.0, 1.0));
    CHECK(one.regime == Regime::C);
    CHECK(one.boundary);
}

TEST_CASE("static transmission") {
    CHECK(static_transmission(make(2.5, 1.0)) == doctest::Approx(1.0 / 11.0).epsilon(1e-14));
    CHECK(static_transmission(0.0, 2.5) == 1.0);
    CHECK(static_transmission(make(2.5, 1.0, 10.0, 0.0, 1.3, 0.7)) ==
          doctest::Approx(oracle::delta_transmission(10.0, 2.5, 1.3, 0.7)).epsilon(1e-14));

    // r0 = 1/(2ik0/B - 1) gives |1 + r0|² = T0
    const BarrierParams p = make(2.5, 1.0);
    const cplx r0 = 1.0 / (2.0 * cplx(0.0, 1.0) * channel(p, 0).k / p.coupling() - 1.0);
    CHECK(std::norm(1.0 + r0) == doctest::Approx(static_transmission(p)).epsilon(1e-14));

    SUBCASE("increasing in E, decreasing in V0") {
        double previous = 0.0;
        for (double E = 0.1; E < 1e4; E *= 1.7) {
            const double T = static_transmission(10.0, E);
            CHECK(T > previous);
            previous = T;
        }
        CHECK(previous > 0.99);
        previous = 2.0;
        for (double V0 = 0.1; V0 < 100.0; V0 *= 1.5) {
            const double T = static_transmission(V0, 2.5);
            CHECK(T < previous);
            previous = T;
        }
    }
}

TEST_CASE("with_* copies change one field and revalidate") {
    const BarrierParams p = make(2.5, 1.0, 10.0, 0.3);
    CHECK(p.with_energy(1.0).E() == 1.0);
    CHECK(p.with_energy(1.0).Omega() == 1.0);
    CHECK(p.with_omega(2.0).Omega() == 2.0);
    CHECK(p.with_eps(0.9).eps() == 0.9);
    CHECK_THROWS_AS(p.with_eps(2.0), InvalidParameter);
    CHECK_THROWS_AS(p.with_energy(-1.0), InvalidParameter);
}
