#pragma once

// Characteristic ODEs driven by alignment signals, invariance fuzzing and
// Riccati blowup bounds along vacuum characteristics.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "params.hpp"
#include "regions.hpp"
#include "spectral.hpp"

namespace epa {

/// Time-dependent stand-in for psi*rho along a characteristic.
class AlignmentSignal {
public:
    enum class Kind { Constant, PiecewiseConstant, Coupled };
    /// Coupled signals see the current time and state (w, s) or (G, rho).
    using Coupling = std::function<double(double t, double a, double b)>;

    static AlignmentSignal constant(double beta) {
        AlignmentSignal s;
        s.kind_ = Kind::Constant;
        s.values_ = {beta};
        s.band_ = {beta, beta};
        return s;
    }

    /// values[i] holds on [breakpoints[i-1], breakpoints[i]); values.size() == breakpoints.size() + 1.
    static AlignmentSignal piecewise(std::vector<double> breakpoints, std::vector<double> values,
                                     AlignmentBand band) {
        if (values.size() != breakpoints.size() + 1)
            throw std::invalid_argument("AlignmentSignal: need one more value than breakpoints");
        if (!std::is_sorted(breakpoints.begin(), breakpoints.end()))
            throw std::invalid_argument("AlignmentSignal: breakpoints must be sorted");
        for (double v : values)
            if (!band.contains(v)) throw std::domain_error("AlignmentSignal: value outside the declared band");
        AlignmentSignal s;
        s.kind_ = Kind::PiecewiseConstant;
        s.breaks_ = std::move(breakpoints);
        s.values_ = std::move(values);
        s.band_ = band;
        return s;
    }

    /// Coupled output is clamped into the declared band.
    static AlignmentSignal coupled(Coupling f, AlignmentBand band) {
        AlignmentSignal s;
        s.kind_ = Kind::Coupled;
        s.coupling_ = std::move(f);
        s.band_ = band;
        return s;
    }

    Kind kind() const { return kind_; }
    const AlignmentBand& band() const { return band_; }

    double value(double t, double a = 0.0, double b = 0.0) const {
        switch (kind_) {
            case Kind::Constant: return values_[0];
            case Kind::PiecewiseConstant: {
                const auto it = std::upper_bound(breaks_.begin(), breaks_.end(), t);
                return values_[static_cast<std::size_t>(it - breaks_.begin())];
            }
            case Kind::Coupled: return std::clamp(coupling_(t, a, b), band_.beta_min, band_.beta_max);
        }
        return kNaN;
    }

    /// First breakpoint strictly after t, or +inf.
    double next_breakpoint(double t) const {
        if (kind_ != Kind::PiecewiseConstant) return kInf;
        const auto it = std::upper_bound(breaks_.begin(), breaks_.end(), t);
        return it == breaks_.end() ? kInf : *it;
    }

private:
    Kind kind_ = Kind::Constant;
    std::vector<double> breaks_;
    std::vector<double> values_;
    Coupling coupling_;
    AlignmentBand band_{};
};

/// Piecewise-constant signal with exponential switching times and uniform values in the band.
inline AlignmentSignal random_band_signal(const AlignmentBand& band, double mean_switch, double T,
                                          std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::exponential_distribution<double> wait(1.0 / mean_switch);
    std::uniform_real_distribution<double> pick(band.beta_min, band.beta_max);
    std::vector<double> breaks, values{band.degenerate() ? band.beta_min : pick(rng)};
    double t = wait(rng);
    while (t < T) {
        breaks.push_back(t);
        values.push_back(band.degenerate() ? band.beta_min : pick(rng));
        t += wait(rng);
    }
    return AlignmentSignal::piecewise(std::move(breaks), std::move(values), band);
}

enum class EventKind { ExitedRegion, HitAxis, BlowupDetected, VacuumHandoff };

inline const char* to_string(EventKind k) {
    switch (k) {
        case EventKind::ExitedRegion: return "exited_region";
        case EventKind::HitAxis: return "hit_axis";
        case EventKind::BlowupDetected: return "blowup_detected";
        case EventKind::VacuumHandoff: return "vacuum_handoff";
    }
    return "?";
}

struct TrajectoryEvent {
    EventKind kind;
    double t;
    double a;  ///< w or G
    double b;  ///< s or rho
};

/// Samples of (w, s) or (G, rho) with events.
struct Trajectory {
    Plane plane = Plane::PQ;
    std::vector<double> times;
    std::vector<PhasePoint> states;  ///< (a, b) stored in the (p, q) slots
    std::vector<TrajectoryEvent> events;

    bool has(EventKind k) const {
        return std::any_of(events.begin(), events.end(), [&](const auto& e) { return e.kind == k; });
    }
    const TrajectoryEvent* first(EventKind k) const {
        for (const auto& e : events)
            if (e.kind == k) return &e;
        return nullptr;
    }
};

/// Data handed to step observers: both ends of an accepted step and their slopes.
struct StepInfo {
    double t0, t1;
    PhasePoint x0, x1, f0, f1;

    /// Cubic Hermite interpolant at the step midpoint.
    PhasePoint midpoint() const {
        const double h = t1 - t0;
        return {0.5 * (x0.p + x1.p) + h / 8.0 * (f0.p - f1.p), 0.5 * (x0.q + x1.q) + h / 8.0 * (f0.q - f1.q)};
    }
};

/// Return false to stop the integration.
using StepObserver = std::function<bool(const StepInfo&)>;

namespace detail {

template <class Rhs>
PhasePoint rk4(const Rhs& f, double t, PhasePoint x, double h) {
    const PhasePoint k1 = f(t, x);
    const PhasePoint k2 = f(t + 0.5 * h, x + (0.5 * h) * k1);
    const PhasePoint k3 = f(t + 0.5 * h, x + (0.5 * h) * k2);
    const PhasePoint k4 = f(t + h, x + h * k3);
    return x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

}  // namespace detail

/// RK4 for w' = k - k c s, s' = w - s beta(t). Steps are split at signal breakpoints.
inline Trajectory integrate_ws(PhasePoint start, const AlignmentSignal& signal, const PhysParams& params, double dt,
                               double T, const StepObserver& observer = {}, bool record = true) {
    if (!(dt > 0.0) || !(T > 0.0)) throw std::invalid_argument("integrate_ws: need dt > 0 and T > 0");
    const double k = params.k, kc = params.k * params.c;
    auto f = [&](double t, PhasePoint x) {
        return PhasePoint{k - kc * x.q, x.p - x.q * signal.value(t, x.p, x.q)};
    };
    Trajectory tr;
    tr.plane = Plane::PQ;
    double t = 0.0;
    PhasePoint x = start;
    if (record) {
        tr.times.push_back(t);
        tr.states.push_back(x);
    }
    PhasePoint fx = f(t, x);
    while (t < T) {
        double h = std::min(dt, T - t);
        const double brk = signal.next_breakpoint(t);
        // evaluate the right-hand side on the piece to the right of t
        if (brk < t + h) h = brk - t;
        const double t_mid = t + 0.5 * h;
        auto f_piece = [&](double, PhasePoint y) { return f(t_mid, y); };
        const PhasePoint f0 = signal.kind() == AlignmentSignal::Kind::PiecewiseConstant ? f(t_mid, x) : fx;
        const PhasePoint xn = signal.kind() == AlignmentSignal::Kind::PiecewiseConstant
                                  ? detail::rk4(f_piece, t, x, h)
                                  : detail::rk4(f, t, x, h);
        const double tn = h == T - t ? T : t + h;
        const PhasePoint f1 = signal.kind() == AlignmentSignal::Kind::PiecewiseConstant ? f(t_mid, xn) : f(tn, xn);
        if (record) {
            tr.times.push_back(tn);
            tr.states.push_back(xn);
        }
        const StepInfo info{t, tn, x, xn, f0, f1};
        t = tn;
        x = xn;
        fx = f(t, x);
        if (observer && !observer(info)) break;
    }
    if (!record) {
        tr.times.push_back(t);
        tr.states.push_back(x);
    }
    return tr;
}

struct BlowupEstimate {
    double t0 = kNaN;
    double G_t0 = kNaN;
    double bound = kNaN;  ///< t0 + 1/(-G(t0))
};

struct RiccatiResult {
    Trajectory trajectory;
    std::optional<BlowupEstimate> estimate;
    std::optional<double> blowup_time;
    bool bounded_certified = false;
    double trap_lo = kNaN, trap_hi = kNaN;
};

struct BlowupOptions {
    double G_threshold_factor = 1e6;  ///< |G| > factor sqrt(kc)
    double rho_cap_factor = 1e6;      ///< rho > factor c
    double q_cap_factor = 1e3;        ///< hand off to the vacuum branch when rho < c / factor
    double max_relative_change = 0.1;
    double min_dt = 1e-14;
};

/// G' = -(G^2 - G beta(t) + kc), the rho = 0 characteristic.
///
/// Once G(t0) < min(0, beta_min) the comparison G' <= -G^2 gives blowup before
/// t0 + 1/(-G(t0)). When beta_min^2 >= 4kc and G0 exceeds the lower root for
/// beta_min, G stays trapped in [lower root(beta_min), max(G0, upper root(beta_max))].
inline RiccatiResult riccati_rho0(double G0, const AlignmentSignal& signal, const PhysParams& params, double dt,
                                  double T, const BlowupOptions& opt = {}, double t_start = 0.0) {
    RiccatiResult res;
    res.trajectory.plane = Plane::GRho;
    const AlignmentBand& band = signal.band();
    const double kc = params.k * params.c;
    const double threshold = opt.G_threshold_factor * params.sqrt_kc();
    if (classify_regime(params, band.beta_min) != EigenRegime::Spiral) {
        const double lo = riccati_lower_root(params, band.beta_min);
        if (G0 > lo) {
            res.bounded_certified = true;
            res.trap_lo = lo;
            res.trap_hi = std::max(G0, riccati_upper_root(params, band.beta_max));
        }
    }
    const double trigger = std::min(0.0, band.beta_min);
    auto f = [&](double t, PhasePoint x) {
        const double beta = signal.value(t, x.p, 0.0);
        return PhasePoint{-(x.p * x.p - x.p * beta + kc), 0.0};
    };
    double t = t_start;
    PhasePoint x{G0, 0.0};
    res.trajectory.times.push_back(t);
    res.trajectory.states.push_back(x);
    double h = dt;
    const double t_end = t_start + T;
    while (t < t_end) {
        if (!res.estimate && x.p < trigger) res.estimate = BlowupEstimate{t, x.p, t + 1.0 / (-x.p)};
        if (x.p < -threshold) {
            res.blowup_time = t;
            res.trajectory.events.push_back({EventKind::BlowupDetected, t, x.p, 0.0});
            return res;
        }
        double step = std::min(h, t_end - t);
        const double brk = signal.next_breakpoint(t);
        if (brk < t + step) step = brk - t;
        const PhasePoint xn = detail::rk4(f, t, x, step);
        const double change = std::abs(xn.p - x.p);
        if ((!std::isfinite(xn.p) || change > opt.max_relative_change * (1.0 + std::abs(x.p))) &&
            step > opt.min_dt) {
            h = 0.5 * step;
            continue;
        }
        t += step;
        x = xn;
        res.trajectory.times.push_back(t);
        res.trajectory.states.push_back(x);
        h = std::min(dt, 2.0 * h);
    }
    return res;
}

/// Quadratic system G' = -G(G - beta) + k(rho - c), rho' = -rho(G - beta) with adaptive step halving.
/// Crossing rho < c/q_cap_factor hands off to the rho = 0 branch.
inline Trajectory integrate_grho(double G0, double rho0, const AlignmentSignal& signal, const PhysParams& params,
                                 double dt, double T, const BlowupOptions& opt = {}) {
    if (!(rho0 > 0.0)) throw std::domain_error("integrate_grho: need rho(0) > 0");
    const double k = params.k, c = params.c;
    const double G_thr = opt.G_threshold_factor * params.sqrt_kc();
    const double rho_cap = opt.rho_cap_factor * c;
    const double rho_vac = c / opt.q_cap_factor;
    auto f = [&](double t, PhasePoint x) {
        const double beta = signal.value(t, x.p, x.q);
        return PhasePoint{-x.p * (x.p - beta) + k * (x.q - c), -x.q * (x.p - beta)};
    };
    Trajectory tr;
    tr.plane = Plane::GRho;
    double t = 0.0;
    PhasePoint x{G0, rho0};
    tr.times.push_back(t);
    tr.states.push_back(x);
    double h = dt;
    while (t < T) {
        if (std::abs(x.p) > G_thr || x.q > rho_cap) {
            tr.events.push_back({EventKind::BlowupDetected, t, x.p, x.q});
            return tr;
        }
        if (x.q < rho_vac) {
            tr.events.push_back({EventKind::VacuumHandoff, t, x.p, x.q});
            auto rest = riccati_rho0(x.p, signal, params, dt, T - t, opt, t);
            for (std::size_t i = 1; i < rest.trajectory.times.size(); ++i) {
                tr.times.push_back(rest.trajectory.times[i]);
                tr.states.push_back({rest.trajectory.states[i].p, 0.0});
            }
            for (const auto& e : rest.trajectory.events) tr.events.push_back(e);
            return tr;
        }
        double step = std::min(h, T - t);
        const double brk = signal.next_breakpoint(t);
        if (brk < t + step) step = brk - t;
        const PhasePoint xn = detail::rk4(f, t, x, step);
        const bool too_fast = !std::isfinite(xn.p) || !std::isfinite(xn.q) ||
                              std::abs(xn.p - x.p) > opt.max_relative_change * (1.0 + std::abs(x.p)) ||
                              std::abs(xn.q - x.q) > opt.max_relative_change * x.q;
        if (too_fast && step > opt.min_dt) {
            h = 0.5 * step;
            continue;
        }
        t += step;
        x = xn;
        tr.times.push_back(t);
        tr.states.push_back(x);
        h = std::min(dt, 2.0 * h);
    }
    return tr;
}

enum class FuzzMode { Auto, Invariance, Supercritical };

struct FuzzOptions {
    std::size_t n_trials = 1000;
    std::uint64_t seed = 1;
    double T = kNaN;            ///< default 50 / lambda
    double dt = kNaN;           ///< default: 1/200 of the slowest auxiliary period scale
    double mean_switch = kNaN;  ///< default (2 pi / lambda) / 8
    unsigned threads = 0;       ///< 0 = hardware concurrency
    FuzzMode mode = FuzzMode::Auto;
    std::size_t max_start_attempts = 100000;
    std::optional<AlignmentBand> signal_band;  ///< defaults to the region's band
};

struct FuzzViolation {
    std::uint64_t seed = 0;
    PhasePoint start{};
    double t_exit = kNaN;
    std::string reason;
};

struct FuzzReport {
    std::string region;
    std::string mode;
    std::size_t n_trials = 0;
    std::size_t n_exits = 0;     ///< invariance: exits; supercritical: trials without certified blowup
    std::size_t n_success = 0;   ///< supercritical: trials reaching s <= 0 with w < 0 or G-blowup
    std::size_t n_axis = 0;      ///< supercritical: trials that reached s <= 0 with w < 0
    std::size_t n_riccati = 0;   ///< supercritical: trials certified through the vacuum branch
    std::vector<FuzzViolation> violations;
    double wall_time = 0.0;
};

namespace detail {

struct Box {
    double p_lo, p_hi, q_lo, q_hi;
};

inline Box sampling_box(const Region& region, const PhysParams& params) {
    double pmin = kInf, pmax = -kInf, qmin = kInf, qmax = -kInf;
    for (const auto& seg : region.boundary)
        for (const auto& s : seg.samples) {
            if (s.q > 10.0 / params.c) continue;
            pmin = std::min(pmin, s.p);
            pmax = std::max(pmax, s.p);
            qmin = std::min(qmin, s.q);
            qmax = std::max(qmax, s.q);
        }
    if (region.closure == Closure::Bounded) return {pmin, pmax, qmin, qmax};
    const double L = region.length_scale();
    return {pmin - L, pmax + L, std::max(0.0, qmin), qmax + L};
}

inline std::optional<PhasePoint> sample_interior(const Region& region, const Box& box, std::mt19937_64& rng,
                                                 std::size_t attempts) {
    std::uniform_real_distribution<double> up(box.p_lo, box.p_hi), uq(box.q_lo, box.q_hi);
    const double margin = 2.0 * region.epsilon();
    for (std::size_t i = 0; i < attempts; ++i) {
        const PhasePoint x{up(rng), uq(rng)};
        if (region.signed_distance_pq(x.p, x.q) > margin) return x;
    }
    return std::nullopt;
}

inline FuzzViolation run_invariance_trial(const Region& region, const PhysParams& params, const FuzzOptions& o,
                                          std::uint64_t seed, PhasePoint start, const AlignmentSignal& sig,
                                          bool& exited) {
    FuzzViolation v{seed, start, kNaN, ""};
    exited = false;
    auto outside = [&](PhasePoint x) { return region.membership(x).label == Verdict::Outside; };
    integrate_ws(
        start, sig, params, o.dt, o.T,
        [&](const StepInfo& s) {
            if (outside(s.midpoint())) {
                exited = true;
                v.t_exit = 0.5 * (s.t0 + s.t1);
            } else if (outside(s.x1)) {
                exited = true;
                v.t_exit = s.t1;
            }
            if (exited) v.reason = "left the region";
            return !exited;
        },
        false);
    return v;
}

inline FuzzViolation run_supercritical_trial(const Region& region, const PhysParams& params, const FuzzOptions& o,
                                             std::uint64_t seed, PhasePoint start, const AlignmentSignal& sig,
                                             int& outcome) {
    // outcome: 0 = failure, 1 = reached s <= 0 with w < 0, 2 = vacuum-branch blowup
    FuzzViolation v{seed, start, kNaN, ""};
    outcome = 0;
    const double q_cap = region.options().q_cap_factor / params.c;
    double t_hit = kNaN, w_hit = kNaN, t_vac = kNaN, G_vac = kNaN;
    integrate_ws(
        start, sig, params, o.dt, o.T,
        [&](const StepInfo& s) {
            if (s.x1.q <= 0.0) {
                t_hit = s.t1;
                w_hit = s.x1.p;
                return false;
            }
            if (s.x1.q > q_cap) {
                t_vac = s.t1;
                G_vac = s.x1.p / s.x1.q;
                return false;
            }
            return true;
        },
        false);
    if (std::isfinite(t_hit)) {
        if (w_hit < 0.0) {
            outcome = 1;
        } else {
            v.t_exit = t_hit;
            v.reason = "reached s = 0 with w >= 0";
        }
        return v;
    }
    if (std::isfinite(t_vac)) {
        BlowupOptions bo;
        const auto r = riccati_rho0(G_vac, sig, params, o.dt, std::max(o.T - t_vac, o.T), bo, t_vac);
        if (r.blowup_time) {
            outcome = 2;
        } else {
            v.t_exit = t_vac;
            v.reason = "vacuum branch did not blow up";
        }
        return v;
    }
    v.t_exit = o.T;
    v.reason = "no blowup signature before T";
    return v;
}

}  // namespace detail

/// Default time step: a fraction of the fastest auxiliary time scale.
inline double default_fuzz_dt(const PhysParams& params, const AlignmentBand& band) {
    const double rate = std::max({params.sqrt_kc(), band.beta_max, 1e-12});
    return 0.02 / rate;
}

/// Runs band-signal trials from interior starts. For subcritical regions an exit is a
/// step (or Hermite midpoint) classified Outside. For supercritical regions each trial
/// must reach s <= 0 with w < 0, or reach the vacuum branch and blow up there.
inline FuzzReport fuzz_invariance(const Region& region, const PhysParams& params, FuzzOptions o = {}) {
    const auto t_start = std::chrono::steady_clock::now();
    const AlignmentBand band = o.signal_band.value_or(region.scaffold.band);
    if (!std::isfinite(o.T)) o.T = 50.0 / params.lambda();
    if (!std::isfinite(o.dt)) o.dt = default_fuzz_dt(params, band);
    if (!std::isfinite(o.mean_switch)) o.mean_switch = (2.0 * std::numbers::pi / params.lambda()) / 8.0;
    FuzzMode mode = o.mode;
    if (mode == FuzzMode::Auto) mode = is_subcritical(region.kind()) ? FuzzMode::Invariance : FuzzMode::Supercritical;

    FuzzReport rep;
    rep.region = region.name();
    rep.mode = mode == FuzzMode::Invariance ? "invariance" : "supercritical";
    rep.n_trials = o.n_trials;
    const detail::Box box = detail::sampling_box(region, params);

    struct Slot {
        bool failed = false;
        int outcome = 0;
        FuzzViolation v;
    };
    std::vector<Slot> slots(o.n_trials);
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (std::size_t i = next++; i < o.n_trials; i = next++) {
            const std::uint64_t seed = o.seed + i;
            std::mt19937_64 rng(seed);
            const auto start = detail::sample_interior(region, box, rng, o.max_start_attempts);
            if (!start) {
                slots[i].failed = true;
                slots[i].v = {seed, {kNaN, kNaN}, kNaN, "no interior start found"};
                continue;
            }
            const auto sig = random_band_signal(band, o.mean_switch, o.T, rng());
            if (mode == FuzzMode::Invariance) {
                bool exited = false;
                slots[i].v = detail::run_invariance_trial(region, params, o, seed, *start, sig, exited);
                slots[i].failed = exited;
            } else {
                int outcome = 0;
                slots[i].v = detail::run_supercritical_trial(region, params, o, seed, *start, sig, outcome);
                slots[i].outcome = outcome;
                slots[i].failed = outcome == 0;
            }
        }
    };
    unsigned n_threads = o.threads ? o.threads : std::max(1u, std::thread::hardware_concurrency());
    n_threads = static_cast<unsigned>(std::min<std::size_t>(n_threads, std::max<std::size_t>(1, o.n_trials)));
    if (n_threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned i = 0; i < n_threads; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    // slots are indexed by trial, so violations come out sorted by seed
    for (const auto& s : slots) {
        if (s.failed) {
            ++rep.n_exits;
            rep.violations.push_back(s.v);
        }
        if (s.outcome == 1) ++rep.n_axis;
        if (s.outcome == 2) ++rep.n_riccati;
        if (s.outcome != 0) ++rep.n_success;
    }
    rep.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    return rep;
}

enum class FieldClass { AllSubcritical, SomeSupercritical, Mixed };

inline const char* to_string(FieldClass k) {
    switch (k) {
        case FieldClass::AllSubcritical: return "all_subcritical";
        case FieldClass::SomeSupercritical: return "some_supercritical";
        case FieldClass::Mixed: return "mixed";
    }
    return "?";
}

struct PointVerdict {
    double x = 0.0;
    double G = 0.0;
    double rho = 0.0;
    MembershipVerdict sub{};
    std::optional<MembershipVerdict> sup;
};

struct FieldClassification {
    FieldClass summary = FieldClass::Mixed;
    std::string region;            ///< subcritical region name when AllSubcritical
    std::optional<std::size_t> witness;  ///< grid index inside the supercritical region
    std::size_t n_inside = 0, n_outside = 0, n_indeterminate = 0, n_supercritical = 0;
    std::vector<PointVerdict> points;
};

/// Computes G0 = u0_x + psi*rho0 spectrally and classifies every grid point.
/// A vacuum point inside the supercritical region is preferred as witness.
inline FieldClassification classify_field(const std::vector<double>& rho0, const std::vector<double>& u0,
                                          const std::vector<double>& kernel_cells, const PhysParams& params,
                                          const Region& subcritical, const Region* supercritical = nullptr,
                                          double mean_tolerance = 1e-8) {
    const std::size_t n = rho0.size();
    if (u0.size() != n || kernel_cells.size() != n) throw std::domain_error("classify_field: size mismatch");
    for (double r : rho0)
        if (!(r >= 0.0)) throw std::domain_error("classify_field: density must be non-negative");
    double mean = 0.0;
    for (double r : rho0) mean += r;
    mean /= static_cast<double>(n);
    if (std::abs(mean - params.c) > mean_tolerance * params.c)
        throw std::domain_error("classify_field: mean density differs from c");

    Spectral fft(n);
    Convolver conv(fft, kernel_cells);
    const auto ux = fft.derivative(u0);
    const auto cr = conv.apply(rho0);
    FieldClassification out;
    out.points.resize(n);
    std::optional<std::size_t> vacuum_witness;
    for (std::size_t i = 0; i < n; ++i) {
        auto& pv = out.points[i];
        pv.x = -0.5 + static_cast<double>(i) / static_cast<double>(n);
        pv.G = ux[i] + cr[i];
        pv.rho = rho0[i];
        pv.sub = subcritical.membership(pv.G, pv.rho, Plane::GRho);
        out.n_inside += pv.sub.label == Verdict::Inside;
        out.n_outside += pv.sub.label == Verdict::Outside;
        out.n_indeterminate += pv.sub.label == Verdict::Indeterminate;
        if (supercritical) {
            pv.sup = supercritical->membership(pv.G, pv.rho, Plane::GRho);
            if (pv.sup->label == Verdict::Inside) {
                ++out.n_supercritical;
                if (!out.witness) out.witness = i;
                if (pv.rho == 0.0 && !vacuum_witness) vacuum_witness = i;
            }
        }
    }
    if (vacuum_witness) out.witness = vacuum_witness;
    if (out.n_inside == n) {
        out.summary = FieldClass::AllSubcritical;
        out.region = subcritical.name();
    } else if (out.witness) {
        out.summary = FieldClass::SomeSupercritical;
    } else {
        out.summary = FieldClass::Mixed;
    }
    return out;
}

}  // namespace epa
