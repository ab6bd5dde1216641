#pragma once

// Closed-form solutions of the frozen-coefficient auxiliary system
//   p' = k - k c q,   q' = p - beta q
// and the crossing-time searches used to glue region boundaries.

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "params.hpp"

namespace epa {

struct PhasePoint {
    double p = 0.0;
    double q = 0.0;
};

inline PhasePoint operator+(PhasePoint a, PhasePoint b) { return {a.p + b.p, a.q + b.q}; }
inline PhasePoint operator-(PhasePoint a, PhasePoint b) { return {a.p - b.p, a.q - b.q}; }
inline PhasePoint operator*(double s, PhasePoint a) { return {s * a.p, s * a.q}; }

/// A point of a trajectory with its time stamp.
struct TimedPoint {
    double t = 0.0;
    double p = 0.0;
    double q = 0.0;
};

class NoCrossing : public std::runtime_error {
public:
    NoCrossing(const std::string& what, double lo, double hi)
        : std::runtime_error(what), lo_(lo), hi_(hi) {}
    double searched_lo() const noexcept { return lo_; }
    double searched_hi() const noexcept { return hi_; }

private:
    double lo_, hi_;
};

/// Solution of the auxiliary system through a given start point.
///
/// With x = (p, q) - (beta/c, 1/c) and N = A + (beta/2) I, N^2 = (beta^2/4 - kc) I, so
///   x(t) = exp(-beta t/2) [C(t) I + S(t) N] x0
/// where (C, S) = (cos wt, sin wt / w), (cosh wt, sinh wt / w) or (1, t).
class AuxTrajectory {
public:
    AuxTrajectory() = default;
    AuxTrajectory(const PhysParams& params, double beta, PhasePoint start)
        : params_(params), eigen_(AuxEigen::from(params, beta)), start_(start) {
        eq_ = {beta / params.c, 1.0 / params.c};
        x0_ = start - eq_;
        const double kc = params.k * params.c;
        // N x0
        nx0_ = {0.5 * beta * x0_.p - kc * x0_.q, x0_.p - 0.5 * beta * x0_.q};
    }

    double beta() const { return eigen_.beta; }
    const AuxEigen& eigen() const { return eigen_; }
    const PhysParams& params() const { return params_; }
    PhasePoint start() const { return start_; }
    PhasePoint equilibrium() const { return eq_; }

    PhasePoint evaluate(double t) const {
        double cpart = 0.0, spart = 0.0;
        modal(t, cpart, spart);
        const double damp = std::exp(-0.5 * eigen_.beta * t);
        return {eq_.p + damp * (cpart * x0_.p + spart * nx0_.p),
                eq_.q + damp * (cpart * x0_.q + spart * nx0_.q)};
    }

    /// Right-hand side of the ODE at a point.
    PhasePoint velocity_at(PhasePoint x) const {
        return {params_.k - params_.k * params_.c * x.q, x.p - eigen_.beta * x.q};
    }
    PhasePoint velocity(double t) const { return velocity_at(evaluate(t)); }

    double q_dot(double t) const {
        const PhasePoint x = evaluate(t);
        return x.p - eigen_.beta * x.q;
    }

private:
    void modal(double t, double& cpart, double& spart) const {
        const double w = eigen_.omega;
        switch (eigen_.regime) {
            case EigenRegime::Spiral:
                cpart = std::cos(w * t);
                spart = std::sin(w * t) / w;
                return;
            case EigenRegime::Node:
                cpart = std::cosh(w * t);
                spart = w * std::abs(t) < 1e-8 ? t : std::sinh(w * t) / w;
                return;
            case EigenRegime::Degenerate:
                cpart = 1.0;
                spart = t;
                return;
        }
    }

    PhysParams params_{};
    AuxEigen eigen_{};
    PhasePoint start_{}, eq_{}, x0_{}, nx0_{};
};

inline AuxTrajectory solve_aux(double beta, PhasePoint start, const PhysParams& params) {
    return AuxTrajectory(params, beta, start);
}

/// Search modes for crossing_time_q.
struct FirstNegative {};
struct UniqueNegative {};
struct LargestNegativeInBracket {
    double lo;
    double hi;
};
using CrossingMode = std::variant<FirstNegative, UniqueNegative, LargestNegativeInBracket>;

namespace detail {

/// Natural time scale of the trajectory, used to size scan steps.
inline double time_scale(const AuxTrajectory& traj) {
    const auto& e = traj.eigen();
    const double rate = std::max({e.omega, 0.5 * e.beta, traj.params().sqrt_kc()});
    return 1.0 / rate;
}

/// Bisection on a sign change of f over [lo, hi], then one Newton polish.
template <class F, class DF>
double refine_root(F&& f, DF&& df, double lo, double hi) {
    double flo = f(lo);
    for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        const double fm = f(mid);
        if (fm == 0.0) return mid;
        if ((fm < 0.0) == (flo < 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    double t = 0.5 * (lo + hi);
    const double slope = df(t);
    if (slope != 0.0 && std::isfinite(slope)) {
        const double polished = t - f(t) / slope;
        if (polished >= lo && polished <= hi && std::abs(f(polished)) <= std::abs(f(t))) t = polished;
    }
    return t;
}

inline std::string interval_text(double lo, double hi) {
    std::ostringstream os;
    os << "[" << lo << ", " << hi << "]";
    return os.str();
}

}  // namespace detail

/// Finds t < 0 with q(t) = q_target.
///
/// FirstNegative scans backwards on a uniform grid of a fraction of the natural
/// time scale and returns the crossing closest to 0. UniqueNegative expands
/// geometrically, which suits node trajectories that leave exponentially.
/// The bracketed mode returns the largest root inside [lo, hi].
inline double crossing_time_q(const AuxTrajectory& traj, double q_target, CrossingMode mode) {
    auto f = [&](double t) { return traj.evaluate(t).q - q_target; };
    auto df = [&](double t) { return traj.q_dot(t); };
    const double scale = detail::time_scale(traj);
    const double tol = 1e-13 * std::max(1.0, std::abs(q_target));

    auto scan = [&](double hi, double lo, double step, bool geometric) -> double {
        double t_hi = hi;
        double f_hi = f(t_hi);
        if (std::abs(f_hi) <= tol) {
            // start sits on the target; step off it so the trivial root is skipped
            t_hi = hi - 1e-9 * step;
            f_hi = f(t_hi);
        }
        double h = step;
        while (t_hi > lo) {
            const double t_lo = std::max(lo, t_hi - h);
            const double f_lo = f(t_lo);
            if (f_lo == 0.0) return t_lo;
            if ((f_lo < 0.0) != (f_hi < 0.0)) return detail::refine_root(f, df, t_lo, t_hi);
            t_hi = t_lo;
            f_hi = f_lo;
            if (geometric) h *= 1.5;
        }
        throw NoCrossing("crossing_time_q: no crossing of q = " + std::to_string(q_target) +
                             " in " + detail::interval_text(lo, hi),
                         lo, hi);
    };

    if (std::holds_alternative<FirstNegative>(mode)) return scan(0.0, -2e3 * scale, scale / 64.0, false);
    if (std::holds_alternative<UniqueNegative>(mode)) return scan(0.0, -1e4 * scale, scale / 64.0, true);
    const auto br = std::get<LargestNegativeInBracket>(mode);
    if (!(br.lo < br.hi)) throw std::invalid_argument("crossing_time_q: empty bracket");
    const double span = br.hi - br.lo;
    return scan(br.hi, br.lo, std::min(span / 8.0, scale / 64.0), false);
}

/// Largest t < 0 where q'(t) changes sign, i.e. the first backward turning point of q.
/// Returns -inf when none exists within the search horizon.
inline double first_backward_turn(const AuxTrajectory& traj, double horizon_scales = 2e3) {
    const double scale = detail::time_scale(traj);
    const double step = scale / 64.0;
    auto g = [&](double t) { return traj.q_dot(t); };
    auto dg = [&](double t) {
        const PhasePoint v = traj.velocity(t);
        return v.p - traj.beta() * v.q;
    };
    double t_hi = 0.0;
    double g_hi = g(t_hi);
    if (std::abs(g_hi) <= 1e-14 * (1.0 + std::abs(traj.start().p))) {
        t_hi = -1e-9 * step;
        g_hi = g(t_hi);
    }
    const double lo = -horizon_scales * scale;
    while (t_hi > lo) {
        const double t_lo = t_hi - step;
        const double g_lo = g(t_lo);
        if ((g_lo < 0.0) != (g_hi < 0.0)) return detail::refine_root(g, dg, t_lo, t_hi);
        t_hi = t_lo;
        g_hi = g_lo;
    }
    return -kInf;
}

/// Time of the first backward return to q = 1/c from the origin. Valid in all regimes.
inline double first_return_time_from_origin(const PhysParams& params, double beta) {
    const double disc = beta * beta - params.four_kc();
    switch (classify_regime(params, beta)) {
        case EigenRegime::Spiral: {
            const double s = std::sqrt(-disc);
            return -2.0 * std::atan2(s, beta) / s;
        }
        case EigenRegime::Node: {
            const double s = std::sqrt(disc);
            return -2.0 * std::atanh(s / beta) / s;
        }
        case EigenRegime::Degenerate:
            return -2.0 / beta;
    }
    return kNaN;
}

/// Uniformly sampled piece of a trajectory; endpoints are evaluated exactly.
inline std::vector<TimedPoint> trajectory_segment(const AuxTrajectory& traj, double t_from, double t_to,
                                                  std::size_t n_samples) {
    if (!(t_from < t_to)) throw std::invalid_argument("trajectory_segment: need t_from < t_to");
    if (n_samples < 2) throw std::invalid_argument("trajectory_segment: need n_samples >= 2");
    std::vector<TimedPoint> out;
    out.reserve(n_samples);
    const double n1 = static_cast<double>(n_samples - 1);
    for (std::size_t i = 0; i < n_samples; ++i) {
        const double t = i + 1 == n_samples ? t_to : t_from + (t_to - t_from) * (static_cast<double>(i) / n1);
        const PhasePoint x = traj.evaluate(t);
        out.push_back({t, x.p, x.q});
    }
    return out;
}

}  // namespace epa
