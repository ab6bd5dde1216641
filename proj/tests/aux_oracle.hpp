#pragma once

// Reference integration of the auxiliary system with boost odeint (adaptive Dormand-Prince).

#include <boost/numeric/odeint.hpp>

#include <array>
#include <cmath>
#include <random>

#include "epa/auxlin.hpp"

namespace testing_oracle {

using State = std::array<double, 2>;

/// Integrates p' = k - kcq, q' = p - beta q from t = 0 back to t_end < 0.
inline epa::PhasePoint integrate_back(const epa::PhysParams& P, double beta, epa::PhasePoint start, double t_end) {
    namespace ode = boost::numeric::odeint;
    // reversed time s = -t
    auto rhs = [&](const State& x, State& dx, double) {
        dx[0] = -(P.k - P.k * P.c * x[1]);
        dx[1] = -(x[0] - beta * x[1]);
    };
    State x{start.p, start.q};
    auto stepper = ode::make_controlled(1e-13, 1e-13, ode::runge_kutta_dopri5<State>());
    ode::integrate_adaptive(stepper, rhs, x, 0.0, -t_end, 1e-3);
    return {x[0], x[1]};
}

struct Draw {
    double beta;
    epa::PhasePoint start;
};

/// beta drawn from the given eigen regime, start from a box around the equilibrium scale.
inline Draw draw(const epa::PhysParams& P, epa::EigenRegime regime, std::mt19937_64& rng) {
    const double crit = 2.0 * P.sqrt_kc();
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double beta = crit;
    if (regime == epa::EigenRegime::Spiral) beta = 0.95 * crit * u(rng);
    if (regime == epa::EigenRegime::Node) beta = crit * (1.05 + 1.95 * u(rng));
    const double ps = P.p_scale();
    return {beta, {ps * (4.0 * u(rng) - 2.0), (3.0 * u(rng)) / P.c}};
}

/// Largest relative deviation between closed form and odeint over [-10/lambda, 0].
inline double max_relative_error(const epa::PhysParams& P, const Draw& d, int n_checks = 10) {
    const epa::AuxTrajectory tr(P, d.beta, d.start);
    const double t_min = -10.0 / P.lambda();
    double worst = 0.0;
    for (int i = 1; i <= n_checks; ++i) {
        const double t = t_min * i / n_checks;
        const auto ref = integrate_back(P, d.beta, d.start, t);
        const auto got = tr.evaluate(t);
        const double scale = 1.0 + std::hypot(ref.p, ref.q);
        worst = std::max(worst, std::hypot(got.p - ref.p, got.q - ref.q) / scale);
    }
    return worst;
}

}  // namespace testing_oracle
