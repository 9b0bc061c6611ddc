#pragma once

// Adaptive Dormand-Prince 5(4) stepping over one interval, shared by the
// Schrodinger propagator and the Riccati integrator.

#include <algorithm>
#include <array>
#include <cmath>

#include <boost/numeric/odeint.hpp>

#include "epdyn/core.hpp"
#include "epdyn/error.hpp"

namespace epdyn::detail {

struct OdeTolerance {
    double rtol = 1e-10;
    double atol = 1e-12;
    double h_init = 0.0;  ///< first trial step; 0 picks interval / 16
};

template <std::size_t N>
using CState = std::array<cplx, N>;

/// Carries the step size across consecutive intervals.
template <std::size_t N>
class Stepper {
public:
    explicit Stepper(const OdeTolerance& tol)
        : tol_(tol),
          controlled_(boost::numeric::odeint::make_controlled<
                      boost::numeric::odeint::runge_kutta_dopri5<CState<N>>>(tol.atol, tol.rtol)),
          h_(tol.h_init) {}

    /// Advance y from t0 to t1. `after_step(t, y)` runs after each accepted
    /// step and may throw to abort.
    template <class Rhs, class AfterStep>
    void advance(Rhs&& rhs, CState<N>& y, double t0, double t1, AfterStep&& after_step) {
        using boost::numeric::odeint::controlled_step_result;
        const double span = t1 - t0;
        if (span <= 0) return;
        if (!(h_ > 0)) h_ = span / 16;
        double t = t0;
        int rejected_in_row = 0;
        while (t1 - t > 1e-13 * span) {
            const bool last = t + h_ >= t1;
            double h = last ? t1 - t : h_;
            const double h_before = h;
            auto res = controlled_.try_step(rhs, y, t, h);
            if (res == controlled_step_result::success) {
                rejected_in_row = 0;
                // h now holds the suggested next step; keep it unless the
                // accepted step was clipped to the interval end.
                if (!last || h > h_) h_ = h;
                if (last) t = t1;
                after_step(t, y);
            } else {
                h_ = h;
                if (++rejected_in_row > 200 || h < 1e-14 * std::max(1.0, std::abs(t)) ||
                    h_before == h)
                    throw Error(ErrorCode::StepSizeUnderflow, "adaptive step size underflow",
                                {}, t);
            }
        }
        if (t != t1) after_step(t1, y);
    }

    template <class Rhs>
    void advance(Rhs&& rhs, CState<N>& y, double t0, double t1) {
        advance(std::forward<Rhs>(rhs), y, t0, t1, [](double, const CState<N>&) {});
    }

private:
    OdeTolerance tol_;
    boost::numeric::odeint::controlled_runge_kutta<
        boost::numeric::odeint::runge_kutta_dopri5<CState<N>>>
        controlled_;
    double h_;
};

}  // namespace epdyn::detail
