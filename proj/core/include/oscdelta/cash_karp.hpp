// cash_karp.hpp: adaptive embedded Runge-Kutta 5(4) with Cash-Karp coefficients

#pragma once

#include "oscdelta/errors.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

namespace oscdelta {

struct CashKarpOptions {
    double rtol{1e-8};
    double atol{1e-8};
    double safety{0.9};
    double h_min{1e-12};   // relative to the integration span
    long max_steps{50'000'000};
};

struct IntegratorStats {
    long steps{0};
    long rejected{0};
    long rhs_evaluations{0};
};

class StepSizeUnderflow : public SolverError {
public:
    StepSizeUnderflow(const std::string& what, double t, Eigen::VectorXd state)
        : SolverError(what), t_(t), state_(std::move(state)) {}
    double time() const noexcept { return t_; }
    const Eigen::VectorXd& state() const noexcept { return state_; }

private:
    double t_;
    Eigen::VectorXd state_;
};

// Integrates dy/dt = rhs(t, y) from t0 to t1 in place. `h` carries the step
// size in and out so consecutive calls continue smoothly; pass h <= 0 for an
// automatic first step. The last step is clipped to land on t1 exactly.
//
// A step is accepted when the Euclidean norm (not RMS) of err_i / (atol +
// rtol |y_i|) is at most 1. Summing rather than taking the max keeps the
// accumulated error of quadratic invariants such as the norm near tol.
//
// rhs signature: void(double t, const Eigen::VectorXd& y, Eigen::VectorXd& dydt)
template <class Rhs>
void integrate_cash_karp(Rhs&& rhs, double t0, double t1, Eigen::VectorXd& y, double& h,
                         const CashKarpOptions& opt, IntegratorStats& stats) {
    static constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 3.0 / 5.0, c6 = 7.0 / 8.0;
    static constexpr double a21 = 1.0 / 5.0;
    static constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
    static constexpr double a41 = 3.0 / 10.0, a42 = -9.0 / 10.0, a43 = 6.0 / 5.0;
    static constexpr double a51 = -11.0 / 54.0, a52 = 5.0 / 2.0, a53 = -70.0 / 27.0, a54 = 35.0 / 27.0;
    static constexpr double a61 = 1631.0 / 55296.0, a62 = 175.0 / 512.0, a63 = 575.0 / 13824.0,
                            a64 = 44275.0 / 110592.0, a65 = 253.0 / 4096.0;
    static constexpr double b1 = 37.0 / 378.0, b3 = 250.0 / 621.0, b4 = 125.0 / 594.0,
                            b6 = 512.0 / 1771.0;
    // fifth- minus fourth-order weights
    static constexpr double e1 = b1 - 2825.0 / 27648.0, e3 = b3 - 18575.0 / 48384.0,
                            e4 = b4 - 13525.0 / 55296.0, e5 = -277.0 / 14336.0, e6 = b6 - 0.25;

    const double span = t1 - t0;
    if (span == 0.0) return;
    if (span < 0.0) throw InvalidParameter("integrate_cash_karp: t1 must not precede t0");

    const Eigen::Index n = y.size();
    Eigen::VectorXd k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), tmp(n), y_new(n), err(n);

    const double h_floor = opt.h_min * std::max(span, std::abs(t0));
    if (!(h > 0.0)) h = 1e-3 * span;

    double t = t0;
    rhs(t, y, k1);
    ++stats.rhs_evaluations;

    while (t < t1) {
        if (stats.steps + stats.rejected >= opt.max_steps) {
            throw StepSizeUnderflow("integrate_cash_karp: step budget exhausted", t, y);
        }
        bool last = false;
        const double h_unclipped = h;
        if (t + h >= t1) {
            h = t1 - t;
            last = true;
        }

        tmp = y + h * a21 * k1;
        rhs(t + c2 * h, tmp, k2);
        tmp = y + h * (a31 * k1 + a32 * k2);
        rhs(t + c3 * h, tmp, k3);
        tmp = y + h * (a41 * k1 + a42 * k2 + a43 * k3);
        rhs(t + c4 * h, tmp, k4);
        tmp = y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
        rhs(t + h, tmp, k5);
        tmp = y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
        rhs(t + c6 * h, tmp, k6);
        stats.rhs_evaluations += 5;

        y_new = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b6 * k6);
        err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6);

        double err_norm = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            const double scale = opt.atol + opt.rtol * std::max(std::abs(y(i)), std::abs(y_new(i)));
            const double e = err(i) / scale;
            err_norm += e * e;
        }
        err_norm = std::sqrt(err_norm);
        if (!std::isfinite(err_norm)) err_norm = 1e10;

        if (err_norm <= 1.0) {
            t = last ? t1 : t + h;
            y.swap(y_new);
            ++stats.steps;
            const double grow = err_norm > 0.0 ? opt.safety * std::pow(err_norm, -0.2) : 5.0;
            const double h_next = h * std::clamp(grow, 0.2, 5.0);
            // A clipped final step says little about the next interval.
            h = last ? std::max(h_unclipped, h_next) : h_next;
            if (t < t1) {
                rhs(t, y, k1);
                ++stats.rhs_evaluations;
            }
        } else {
            ++stats.rejected;
            h *= std::max(0.1, opt.safety * std::pow(err_norm, -0.25));
            if (h < h_floor) {
                std::ostringstream os;
                os << "integrate_cash_karp: step size underflow at t = " << t << " (h = " << h << ")";
                throw StepSizeUnderflow(os.str(), t, y);
            }
        }
    }
}

} // namespace oscdelta
