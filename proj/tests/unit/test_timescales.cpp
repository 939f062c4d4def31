#include <doctest.h>

#include "oracles.hpp"

#include "oscdelta/timescales.hpp"
#include "oscdelta/toeplitz.hpp"

#include <cmath>
#include <string>

using namespace oscdelta;

namespace {

BarrierParams make(double E, double omega, double V0, double eps, double hbar = 1.0, double mass = 0.5) {
    BarrierParams::Values v;
    v.E = E;
    v.Omega = omega;
    v.V0 = V0;
    v.eps = eps;
    v.hbar = hbar;
    v.mass = mass;
    return BarrierParams(v);
}

RectBarrierParams rect(double V, double d, double E) {
    RectBarrierParams r;
    r.V = V;
    r.d = d;
    r.E = E;
    return r;
}

// First-order small-Ω prediction for the slope of F(Ω): -τ_δ / (1 + E τ_δ / ħ).
double first_order_slope(const BarrierParams& p) {
    const double tau = 2.0 * std::pow(p.hbar(), 3) / (p.mass() * p.V0() * p.V0());
    return -tau / (1.0 + p.E() * tau / p.hbar());
}

} // namespace

TEST_CASE("asymmetry") {
    CHECK(asymmetry(0.3, 0.3) == 0.0);
    CHECK(asymmetry(0.0, 0.2) == 1.0);
    CHECK(asymmetry(0.2, 0.0) == -1.0);
    CHECK(asymmetry(1.0, 3.0) == doctest::Approx(0.5));
    CHECK_THROWS_AS(asymmetry(0.0, 0.0), UndefinedAsymmetry);
    const SidebandSolution still = converge_truncation(make(2.5, 1.0, 10.0, 0.0)).solution;
    CHECK_THROWS_AS(asymmetry(still), UndefinedAsymmetry);
    const SidebandSolution driven = converge_truncation(make(2.5, 1.0, 10.0, 0.5)).solution;
    const double F = asymmetry(driven);
    CHECK(F >= -1.0);
    CHECK(F <= 1.0);
    CHECK(F == doctest::Approx((driven.intensity(1) - driven.intensity(-1)) /
                               (driven.intensity(1) + driven.intensity(-1))));
}

TEST_CASE("tau_delta = 2 hbar^3 / (m V0^2)") {
    CHECK(tau_delta(make(2.5, 1.0, 10.0, 0.0)) == doctest::Approx(0.04).epsilon(1e-15));
    CHECK(tau_delta(make(2.5, 1.0, 20.0, 0.0)) == doctest::Approx(0.01).epsilon(1e-15));
    CHECK(tau_delta(make(2.5, 1.0, 10.0, 0.0, 2.0, 0.5)) == doctest::Approx(0.32).epsilon(1e-15));
}

TEST_CASE("rectangular-barrier traversal time") {
    SUBCASE("agrees with the direct evaluation where sinh is harmless") {
        for (double V : {1.0, 4.0, 25.0}) {
            for (double frac : {0.1, 0.5, 0.9}) {
                for (double d : {0.05, 0.5, 2.0}) {
                    const RectBarrierParams r = rect(V, d, frac * V);
                    CHECK(tau_bl_rect(r) == doctest::Approx(oracle::rect_time_direct(V, d, frac * V)).epsilon(1e-12));
                }
            }
        }
    }
    SUBCASE("opaque limit") {
        RectBarrierParams r = rect(4.0, 1.0, 1.0);
        r.d = 10.0 / r.kappa();
        CHECK(std::abs(tau_rect_opaque(r) / tau_bl_rect(r) - 1.0) <= 0.01);
        r.d = 400.0 / r.kappa();   // sinh² alone would overflow
        CHECK(std::isfinite(tau_bl_rect(r)));
        CHECK(tau_rect_opaque(r) / tau_bl_rect(r) == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("positive on a sampled grid") {
        for (double V = 0.1; V < 100.0; V *= 3.0) {
            for (double frac = 0.05; frac < 1.0; frac += 0.15) {
                for (double d = 1e-3; d < 50.0; d *= 4.0) CHECK(tau_bl_rect(rect(V, d, frac * V)) > 0.0);
            }
        }
    }
    SUBCASE("delta limit at fixed V d") {
        const double strength = 10.0, E = 2.5;
        double previous = 1e300;
        for (double d = 1.0; d >= 1e-4 * (1.0 - 1e-12); d /= std::sqrt(10.0)) {
            const double tau = tau_bl_rect(rect(strength / d, d, E));
            CHECK(tau < previous);
            previous = tau;
        }
        CHECK(previous < 1e-3 * tau_bl_rect(rect(strength, 1.0, E)));
    }
    SUBCASE("companion values and domain errors") {
        const RectBarrierParams r = rect(4.0, 2.0, 1.0);
        CHECK(tau_bl(r) == doctest::Approx(0.5 * 2.0 / std::sqrt(3.0)));
        CHECK(high_frequency_asymmetry(r, 0.7) == doctest::Approx(std::tanh(0.7 * tau_bl(r))));
        CHECK(r.k0() == doctest::Approx(2.0));
        CHECK_THROWS_AS(tau_bl_rect(rect(1.0, 1.0, 1.0)), InvalidParameter);
        CHECK_THROWS_AS(tau_bl_rect(rect(1.0, 1.0, 2.0)), InvalidParameter);
        CHECK_THROWS_AS(tau_bl_rect(rect(1.0, 0.0, 0.5)), InvalidParameter);
    }
}

TEST_CASE("least-squares fit and grids") {
    const std::vector<double> x{0.0, 1.0, 2.0, 3.0};
    const std::vector<double> y{1.0, 3.0, 5.0, 7.0};
    const auto fit = fit_line(x, y);
    REQUIRE(fit);
    CHECK(fit->slope == doctest::Approx(2.0));
    CHECK(fit->intercept == doctest::Approx(1.0));
    CHECK(fit->r_squared == doctest::Approx(1.0));
    CHECK(fit->residual_rms <= 1e-14);
    CHECK(fit->points == 4);
    CHECK_FALSE(fit_line(std::vector<double>{1.0}, std::vector<double>{2.0}));
    CHECK_FALSE(fit_line(std::vector<double>{1.0, 1.0}, std::vector<double>{2.0, 3.0}));
    CHECK_THROWS_AS(fit_line(x, std::vector<double>{1.0}), InvalidParameter);

    const auto g = linear_grid(0.01, 0.2, 20);
    CHECK(g.size() == 20);
    CHECK(g.front() == 0.01);
    CHECK(g.back() == 0.2);
    CHECK(g[1] - g[0] == doctest::Approx(0.01));
    CHECK_THROWS_AS(linear_grid(0.0, 1.0, 0), InvalidParameter);
}

TEST_CASE("frequency sweep bookkeeping") {
    const BarrierParams base = make(2.5, 1.0, 10.0, 1e-3);
    SUBCASE("single point: intensities but no fit") {
        const std::vector<double> grid{0.05};
        const SweepResult r = frequency_sweep(base, grid, SolverKind::FS);
        REQUIRE(r.points.size() == 1);
        CHECK(r.points[0].i_minus > 0.0);
        CHECK(r.points[0].i_plus > 0.0);
        CHECK(r.points[0].i_zero > 0.0);
        CHECK(r.points[0].F);
        CHECK_FALSE(r.fit);
    }
    SUBCASE("grid validation") {
        CHECK_THROWS_AS(frequency_sweep(base, std::vector<double>{0.1, 0.1}, SolverKind::FS), InvalidParameter);
        CHECK_THROWS_AS(frequency_sweep(base, std::vector<double>{0.2, 0.1}, SolverKind::FS), InvalidParameter);
        CHECK_THROWS_AS(frequency_sweep(base, std::vector<double>{-0.1, 0.1}, SolverKind::FS), InvalidParameter);
    }
    SUBCASE("solver failures name the frequency") {
        try {
            frequency_sweep(base.with_eps(0.0), std::vector<double>{0.05, 0.1}, SolverKind::TS);
            FAIL("expected a solver error");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::Solver);
            CHECK(std::string(e.what()).find("Omega = 0.05") != std::string::npos);
        }
    }
    SUBCASE("regime-(c) points stay out of the fit") {
        const SweepResult r = frequency_sweep(make(0.5, 1.0, 10.0, 1e-3), linear_grid(0.1, 1.0, 10), SolverKind::FS);
        int fitted = 0;
        for (const auto& pt : r.points) {
            CHECK(pt.in_fit == (pt.regime.regime != Regime::C));
            CHECK(*pt.F >= -1.0);
            CHECK(*pt.F <= 1.0);
            fitted += pt.in_fit;
        }
        REQUIRE(r.fit);
        CHECK(r.fit->points == fitted);
    }
    SUBCASE("threads do not change the result") {
        const auto grid = linear_grid(0.01, 0.2, 20);
        SweepOptions serial, pooled;
        pooled.threads = 4;
        const SweepResult a = frequency_sweep(base, grid, SolverKind::FS, serial);
        const SweepResult b = frequency_sweep(base, grid, SolverKind::FS, pooled);
        for (std::size_t i = 0; i < grid.size(); ++i) {
            CHECK(a.points[i].i_minus == b.points[i].i_minus);
            CHECK(a.points[i].i_plus == b.points[i].i_plus);
        }
        CHECK(a.fit->slope == b.fit->slope);
    }
}

TEST_CASE("full and closure solutions give the same asymmetry at small eps") {
    for (double E : {2.5, 1.5, 0.5}) {
        for (double omega : {0.7, 1.0}) {
            const BarrierParams p = make(E, omega, 10.0, 0.01);
            if (classify_regime(p).boundary) continue;
            const double f_fs = asymmetry(converge_truncation(p).solution);
            const double f_ts = asymmetry(solve_ts(p).sidebands);
            CAPTURE(E);
            CAPTURE(omega);
            CHECK(std::abs(f_fs - f_ts) <= 0.01 * std::abs(f_fs));
        }
    }
}

TEST_CASE("small-frequency slope of the asymmetry") {
    SUBCASE("follows -tau_delta / (1 + E tau_delta / hbar) at E = 2.5") {
        const BarrierParams base = make(2.5, 1.0, 10.0, 1e-3);
        for (SolverKind kind : {SolverKind::FS, SolverKind::TS}) {
            const SweepResult r = frequency_sweep(base, linear_grid(0.01, 0.2, 20), kind);
            REQUIRE(r.fit);
            CHECK(r.fit->slope == doctest::Approx(first_order_slope(base)).epsilon(0.01));
            CHECK(r.fit->r_squared > 0.999);
            CHECK(std::abs(r.fit->intercept) <= 1e-3);
        }
        // single point, F(0.05) against the same law
        const SidebandSolution s = converge_truncation(base.with_omega(0.05)).solution;
        CHECK(asymmetry(s) == doctest::Approx(0.05 * first_order_slope(base)).epsilon(0.01));
    }
    SUBCASE("approaches -tau_delta once E tau_delta / hbar <= 0.01") {
        for (double V0 : {10.0, 20.0}) {
            const BarrierParams base = make(0.0025 * V0 * V0, 1.0, V0, 1e-3);
            const double tau = tau_delta(base);
            REQUIRE(base.E() * tau <= 0.01 + 1e-15);
            // stay in regimes (a)/(b): ħΩ < E
            const SweepResult r = frequency_sweep(base, linear_grid(0.02 * base.E(), 0.8 * base.E(), 20), SolverKind::FS);
            REQUIRE(r.fit);
            CAPTURE(V0);
            CHECK(r.fit->slope == doctest::Approx(-tau).epsilon(0.05));
        }
    }
    SUBCASE("first-order oracle agrees with the solver at small eps") {
        for (double omega : {0.02, 0.1, 0.4}) {
            const oracle::FirstOrder fo = oracle::first_order_sidebands(10.0, omega, 2.5);
            const SidebandSolution s = converge_truncation(make(2.5, omega, 10.0, 1e-4)).solution;
            CHECK(asymmetry(s) == doctest::Approx(fo.asymmetry).epsilon(1e-3));
        }
    }
}

TEST_CASE("regime (c) table") {
    const BarrierParams base = make(0.5, 1.0, 10.0, 1e-3);
    SUBCASE("reference vanishes where Omega tau_delta = T0") {
        const double tau = tau_delta(base);
        const double T0 = static_transmission(base);
        CHECK(T0 == doctest::Approx(1.0 / 51.0));
        CHECK(tau == doctest::Approx(0.04));
        double omega = T0 / tau;
        while (omega * tau < T0) omega = std::nextafter(omega, 1e300);
        const auto ref = regime_c_reference(base.with_omega(omega));
        REQUIRE(ref);
        CHECK(*ref <= 1e-7);
        CHECK_FALSE(regime_c_reference(base.with_omega(0.9 * T0 / tau)));
        // the zero lies below the regime-(c) threshold ħΩ = E
        CHECK(classify_regime(base.with_omega(omega)).regime != Regime::C);
        CHECK(regime_c_reference(base.with_omega(2.0)).value() == doctest::Approx(std::sqrt(0.08 - T0)));
    }
    SUBCASE("grid over regime (c)") {
        const RegimeCTable t = regime_c_check(base, linear_grid(1.0, 10.0, 10));
        CHECK(t.rows.size() == 10);
        CHECK(t.warnings.empty());
        double previous = -1.0;
        for (const auto& row : t.rows) {
            CHECK(row.F_flux == 1.0);
            CHECK(row.F_amplitude >= -1.0);
            CHECK(row.F_amplitude <= 1.0);
            REQUIRE(row.reference);
            CHECK(*row.reference > previous);
            previous = *row.reference;
        }
    }
    SUBCASE("no regime (c) point leaves an empty table with a warning") {
        const RegimeCTable t = regime_c_check(make(2.5, 1.0, 10.0, 1e-3), linear_grid(0.1, 0.5, 5));
        CHECK(t.rows.empty());
        CHECK(t.warnings.size() == 6);
    }
    SUBCASE("points outside regime (c) are skipped") {
        const RegimeCTable t = regime_c_check(base, std::vector<double>{0.3, 0.6});
        REQUIRE(t.rows.size() == 1);
        CHECK(t.rows[0].omega == 0.6);
        CHECK(t.warnings.size() == 1);
    }
}

TEST_CASE("energy-averaged transmission") {
    const BarrierParams base = make(2.5, 1.0, 10.0, 0.0);
    SUBCASE("point mass without driving is the static transmission") {
        const std::vector<EnergyWeight> w{{2.5, 1.0}};
        CHECK(energy_averaged_transmission(w, base, 1.0) == doctest::Approx(1.0 / 11.0).epsilon(1e-14));
    }
    SUBCASE("linear in the weights") {
        const BarrierParams driven = base.with_eps(0.5);
        const double a = energy_averaged_transmission(std::vector<EnergyWeight>{{2.0, 1.0}}, driven, 1.3);
        const double b = energy_averaged_transmission(std::vector<EnergyWeight>{{3.1, 1.0}}, driven, 1.3);
        const double mix = energy_averaged_transmission(std::vector<EnergyWeight>{{2.0, 0.5}, {3.1, 0.5}}, driven, 1.3);
        CHECK(mix == doctest::Approx(0.5 * (a + b)).epsilon(1e-14));
        const double skew =
            energy_averaged_transmission(std::vector<EnergyWeight>{{2.0, 0.25}, {3.1, 0.75}}, driven, 1.3);
        CHECK(skew == doctest::Approx(0.25 * a + 0.75 * b).epsilon(1e-14));
        // Fixed E: total flux from the converged solution
        CHECK(a == doctest::Approx(converge_truncation(make(2.0, 1.3, 10.0, 0.5)).solution.transmitted_flux));
    }
    SUBCASE("weight validation") {
        CHECK_THROWS_AS(energy_averaged_transmission(std::vector<EnergyWeight>{{2.0, 0.5}}, base, 1.0),
                        InvalidParameter);
        CHECK_THROWS_AS(energy_averaged_transmission(std::vector<EnergyWeight>{{2.0, 1.5}, {3.0, -0.5}}, base, 1.0),
                        InvalidParameter);
        CHECK_THROWS_AS(energy_averaged_transmission(std::vector<EnergyWeight>{{-2.0, 1.0}}, base, 1.0), Error);
    }
}
