#pragma once

// Internal: adaptive Dormand-Prince integration that lands exactly on a list
// of output abscissae and reports the last good point on failure.

#include <algorithm>
#include <array>
#include <cmath>
#include <span>
#include <string>

#include <boost/numeric/odeint.hpp>

#include "nlh/errors.hpp"

namespace nlh::detail {

struct OdeTolerances {
    double rel = 1e-10;
    double abs = 1e-12;
    /// Cap on |step|.
    double max_step = 0.05;
    /// Magnitude treated as overflow.
    double overflow = 1e150;
};

/// Integrates y' = rhs(y, x) from x0 through every target in `targets`
/// (monotone, in the direction of integration) and calls on_target(i, y, x)
/// at each. Targets equal to x0 are reported without stepping.
template <std::size_t N, class Rhs, class OnTarget>
void integrate_through(Rhs&& rhs, std::array<double, N>& y, double x0, std::span<const double> targets,
                       OnTarget&& on_target, const OdeTolerances& tol = {}) {
    namespace odeint = boost::numeric::odeint;
    using State = std::array<double, N>;
    auto stepper = odeint::make_controlled(tol.abs, tol.rel, odeint::runge_kutta_dopri5<State>());

    auto system = [&rhs](const State& s, State& ds, double x) { ds = rhs(s, x); };

    double x = x0;
    double direction = 0.0;
    if (!targets.empty()) direction = targets.back() >= x0 ? 1.0 : -1.0;
    double dt = direction * std::min(tol.max_step, 1e-3 * std::max(std::abs(x0), 1e-6));

    for (std::size_t i = 0; i < targets.size(); ++i) {
        const double target = targets[i];
        int failures = 0;
        while (direction * (target - x) > 0.0) {
            double trial = dt;
            if (direction * (x + trial - target) > 0.0) trial = target - x;
            if (std::abs(trial) > tol.max_step) trial = direction * tol.max_step;
            const bool last = (trial == target - x);
            double x_try = x;
            const auto res = stepper.try_step(system, y, x_try, trial);
            if (res == odeint::success) {
                x = last ? target : x_try;
                // A step shortened to land on a target must not shrink the next suggestion.
                dt = last ? direction * std::max(std::abs(dt), std::abs(trial)) : trial;
                failures = 0;
                for (double v : y) {
                    if (!std::isfinite(v) || std::abs(v) > tol.overflow)
                        throw IntegrationError("solution overflow near rho = " + std::to_string(x), x);
                }
            } else {
                dt = trial;
                if (++failures > 200 || std::abs(dt) < 1e-15 * (1.0 + std::abs(x)))
                    throw IntegrationError("step size collapse near rho = " + std::to_string(x), x);
            }
        }
        on_target(i, static_cast<const State&>(y), x);
    }
}

}  // namespace nlh::detail
