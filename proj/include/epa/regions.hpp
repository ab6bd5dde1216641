#pragma once

// Phase-plane regions assembled from glued auxiliary trajectories.
//
// Every region is stored as a horizontal band q_lo < q < q_hi together with
// left and right boundary graphs p = xi(q). Each graph is a chain of pieces on
// which q is strictly monotone along the trajectory, so xi(q) is evaluated
// exactly by inverting q(t). Sampled polylines are kept only for export.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "auxlin.hpp"
#include "geometry.hpp"
#include "params.hpp"
#include "rearrange.hpp"

namespace epa {

enum class RegionKind { Sigma1, Sigma2, Sigma3, Delta1, Delta2, SigmaL };
enum class Plane { PQ, GRho };
enum class Closure { Bounded, UnboundedWithCap };
enum class Verdict { Inside, Outside, Indeterminate };

inline const char* to_string(RegionKind k) {
    switch (k) {
        case RegionKind::Sigma1: return "Sigma1";
        case RegionKind::Sigma2: return "Sigma2";
        case RegionKind::Sigma3: return "Sigma3";
        case RegionKind::Delta1: return "Delta1";
        case RegionKind::Delta2: return "Delta2";
        case RegionKind::SigmaL: return "SigmaL";
    }
    return "?";
}
inline const char* to_string(Plane p) { return p == Plane::PQ ? "pq" : "grho"; }
inline const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::Inside: return "inside";
        case Verdict::Outside: return "outside";
        case Verdict::Indeterminate: return "indeterminate";
    }
    return "?";
}

inline bool is_subcritical(RegionKind k) { return k != RegionKind::Delta1 && k != RegionKind::Delta2; }

struct MembershipVerdict {
    Verdict label = Verdict::Outside;
    double distance_estimate = kNaN;  ///< signed, positive inside, measured in the (p,q) plane
};

struct RegionOptions {
    std::size_t n_samples = 512;
    double q_cap_factor = 1e3;    ///< q_cap = factor / c
    double rho_cap_factor = 1e3;  ///< rho_cap = factor * c
    double eps_rel = 1e-6;
    bool literal_paper_boundary = false;
    std::size_t table_size = 256;
};

struct RegionScaffold {
    RegionKind kind = RegionKind::Sigma1;
    AlignmentRegime regime = AlignmentRegime::Weak;
    double p1 = kNaN, p2 = kNaN, p3 = kNaN;
    double t1 = kNaN, t2 = kNaN, t3 = kNaN;
    double q_star = kNaN;
    AlignmentBand band{};
    Admissibility admissibility{true, kInf};
    double q_floor = 0.0;
    std::optional<BoundsConfig> bounds;
};

/// Admissible G values at rho = 0.
struct RhoZeroRay {
    enum class Kind { All, Above, Below } kind = Kind::All;
    double threshold = 0.0;

    bool contains(double g) const {
        switch (kind) {
            case Kind::All: return true;
            case Kind::Above: return g > threshold;
            case Kind::Below: return g < threshold;
        }
        return false;
    }
    double signed_distance(double g) const {
        switch (kind) {
            case Kind::All: return kInf;
            case Kind::Above: return g - threshold;
            case Kind::Below: return threshold - g;
        }
        return kNaN;
    }
};

/// One piece of a boundary graph p = xi(q) on [q_min, q_max].
class CurvePiece {
public:
    struct Eval {
        double p;
        double slope;  ///< dp/dq
    };

    CurvePiece(const AuxTrajectory& traj, double t_a, double t_b, std::size_t table_size)
        : traj_(traj), ta_(std::min(t_a, t_b)), tb_(std::max(t_a, t_b)) {
        table_size = std::max<std::size_t>(table_size, 8);
        tq_.resize(table_size);
        tt_.resize(table_size);
        for (std::size_t i = 0; i < table_size; ++i) {
            const double s = static_cast<double>(i) / static_cast<double>(table_size - 1);
            tt_[i] = i + 1 == table_size ? tb_ : ta_ + (tb_ - ta_) * s;
            tq_[i] = traj_.evaluate(tt_[i]).q;
        }
        increasing_ = tq_.back() > tq_.front();
        if (!increasing_) {
            std::reverse(tq_.begin(), tq_.end());
            std::reverse(tt_.begin(), tt_.end());
        }
        for (std::size_t i = 1; i < tq_.size(); ++i)
            if (!(tq_[i] > tq_[i - 1]))
                throw std::logic_error("CurvePiece: q is not strictly monotone along the piece");
    }

    static CurvePiece vertical(double p0, double q_lo, double q_hi) {
        CurvePiece c;
        c.vertical_ = true;
        c.p0_ = p0;
        c.tq_ = {q_lo, q_hi};
        return c;
    }

    double q_min() const { return tq_.front(); }
    double q_max() const { return tq_.back(); }

    double time_at(double q) const {
        q = std::clamp(q, q_min(), q_max());
        const auto it = std::upper_bound(tq_.begin(), tq_.end(), q);
        std::size_t hi = static_cast<std::size_t>(it - tq_.begin());
        hi = std::clamp<std::size_t>(hi, 1, tq_.size() - 1);
        const std::size_t lo = hi - 1;
        double a = tt_[lo], b = tt_[hi];  // q(a) <= q <= q(b) in table order
        double fa = tq_[lo] - q;
        if (fa == 0.0) return a;
        if (tq_[hi] - q == 0.0) return b;
        double t = a + (b - a) * (q - tq_[lo]) / (tq_[hi] - tq_[lo]);
        for (int it_count = 0; it_count < 60; ++it_count) {
            const PhasePoint x = traj_.evaluate(t);
            const double f = x.q - q;
            if (f == 0.0) return t;
            if ((f < 0.0) == (fa < 0.0)) {
                a = t;
                fa = f;
            } else {
                b = t;
            }
            const double qd = x.p - traj_.beta() * x.q;
            double next = qd != 0.0 ? t - f / qd : 0.5 * (a + b);
            const double lo_t = std::min(a, b), hi_t = std::max(a, b);
            if (!(next > lo_t && next < hi_t)) next = 0.5 * (a + b);
            if (std::abs(next - t) <= 1e-15 * (1.0 + std::abs(t))) return next;
            t = next;
        }
        return t;
    }

    Eval at(double q) const {
        if (vertical_) return {p0_, 0.0};
        const double t = time_at(q);
        const PhasePoint x = traj_.evaluate(t);
        const PhasePoint v = traj_.velocity_at(x);
        const double slope = v.q != 0.0 ? v.p / v.q : (v.p >= 0.0 ? kInf : -kInf);
        return {x.p, slope};
    }

private:
    CurvePiece() = default;
    bool vertical_ = false;
    double p0_ = 0.0;
    AuxTrajectory traj_{};
    double ta_ = 0.0, tb_ = 0.0;
    bool increasing_ = true;
    std::vector<double> tq_, tt_;
};

/// A boundary graph made of contiguous pieces in ascending q.
struct Side {
    std::vector<CurvePiece> pieces;
    bool extend_above = false;  ///< linear continuation past the last piece

    CurvePiece::Eval at(double q) const {
        for (const auto& pc : pieces)
            if (q <= pc.q_max()) return pc.at(q);
        const auto& last = pieces.back();
        const auto end = last.at(last.q_max());
        if (!extend_above) return end;
        return {end.p + end.slope * (q - last.q_max()), end.slope};
    }
};

/// Definition of one exported boundary segment.
struct SegmentDef {
    std::string label;
    bool curve = true;
    AuxTrajectory traj{};
    double t_begin = 0.0, t_end = 0.0;  ///< traversal order along the loop
    PhasePoint a{}, b{};                ///< line endpoints
};

struct BoundarySegment {
    std::string label;
    std::vector<TimedPoint> samples;  ///< (t, p, q) or (t, G, rho), depending on the plane
};

class Region {
public:
    RegionScaffold scaffold;
    std::vector<BoundarySegment> boundary;
    Closure closure = Closure::Bounded;
    Plane plane = Plane::PQ;
    std::optional<RhoZeroRay> rho_zero_ray;
    double q_cap = kInf;
    double rho_cap = kInf;

    RegionKind kind() const { return scaffold.kind; }
    std::string name() const { return to_string(scaffold.kind); }
    double epsilon() const { return eps_; }
    double length_scale() const { return length_scale_; }

    /// Verdict for a point given in either plane. Distances are measured in (p, q).
    MembershipVerdict membership(double a, double b, Plane query_plane) const {
        double p = a, q = b;
        if (query_plane == Plane::GRho) {
            const double rho = b;
            if (rho < 0.0 || !std::isfinite(rho)) return {Verdict::Outside, -kInf};
            if (rho == 0.0) {
                if (!rho_zero_ray) return {Verdict::Outside, -kInf};
                const double d = rho_zero_ray->signed_distance(a);
                return {label(d), d};
            }
            p = a / rho;
            q = 1.0 / rho;
        }
        const double d = signed_distance_pq(p, q);
        return {label(d), d};
    }
    MembershipVerdict membership(PhasePoint x) const { return membership(x.p, x.q, Plane::PQ); }

    /// Signed distance estimate in the (p, q) plane, positive inside.
    double signed_distance_pq(double p, double q) const {
        if (!std::isfinite(p) || !std::isfinite(q)) return -kInf;
        if (!complement_) return shape_distance(p, q);
        return std::min(q, -shape_distance(p, q));
    }

    /// Closed boundary loop in (p, q) for bounded shapes (the enclosure for Delta1).
    std::vector<geom::Vec2> closed_loop_pq() const {
        std::vector<geom::Vec2> loop;
        for (const auto& def : defs_) {
            const auto pts = sample_def(def, options_.n_samples);
            for (std::size_t i = 0; i + 1 < pts.size(); ++i) loop.push_back({pts[i].p, pts[i].q});
        }
        return loop;
    }

    /// Same loop with n samples per curve, for resampling comparisons.
    std::vector<geom::Vec2> closed_loop_pq(std::size_t n) const {
        std::vector<geom::Vec2> loop;
        for (const auto& def : defs_) {
            const auto pts = sample_def(def, n);
            for (std::size_t i = 0; i + 1 < pts.size(); ++i) loop.push_back({pts[i].p, pts[i].q});
        }
        return loop;
    }

    bool shape_is_closed() const { return std::isfinite(q_hi_) && left_ && right_; }
    bool is_complement() const { return complement_; }
    const RegionOptions& options() const { return options_; }
    const std::vector<SegmentDef>& segment_defs() const { return defs_; }

    // Construction interface used by the builders.
    struct Shape {
        double q_lo = 0.0;
        double q_hi = kInf;
        PhasePoint apex{kNaN, kNaN};
        std::optional<Side> left, right;
        bool complement = false;
    };
    void set_shape(Shape s) {
        q_lo_ = s.q_lo;
        q_hi_ = s.q_hi;
        apex_ = s.apex;
        left_ = std::move(s.left);
        right_ = std::move(s.right);
        complement_ = s.complement;
    }
    void set_defs(std::vector<SegmentDef> defs, const RegionOptions& opt, double c) {
        defs_ = std::move(defs);
        options_ = opt;
        boundary.clear();
        for (const auto& def : defs_) boundary.push_back({def.label, sample_def(def, opt.n_samples)});
        // length scale: bounding-box diagonal of samples with q <= 10/c
        double pmin = kInf, pmax = -kInf, qmin = kInf, qmax = -kInf;
        for (const auto& seg : boundary)
            for (const auto& s : seg.samples) {
                if (s.q > 10.0 / c) continue;
                pmin = std::min(pmin, s.p);
                pmax = std::max(pmax, s.p);
                qmin = std::min(qmin, s.q);
                qmax = std::max(qmax, s.q);
            }
        length_scale_ = std::hypot(pmax - pmin, qmax - qmin);
        eps_ = opt.eps_rel * length_scale_;
    }

    static std::vector<TimedPoint> sample_def(const SegmentDef& def, std::size_t n) {
        if (!def.curve) {
            std::vector<TimedPoint> out;
            for (std::size_t i = 0; i < n; ++i) {
                const double s = static_cast<double>(i) / static_cast<double>(n - 1);
                out.push_back({s, def.a.p + s * (def.b.p - def.a.p), def.a.q + s * (def.b.q - def.a.q)});
            }
            out.back() = {1.0, def.b.p, def.b.q};
            return out;
        }
        const double lo = std::min(def.t_begin, def.t_end), hi = std::max(def.t_begin, def.t_end);
        auto pts = trajectory_segment(def.traj, lo, hi, n);
        if (def.t_begin > def.t_end) std::reverse(pts.begin(), pts.end());
        return pts;
    }

private:
    Verdict label(double d) const {
        if (std::abs(d) < eps_) return Verdict::Indeterminate;
        return d > 0.0 ? Verdict::Inside : Verdict::Outside;
    }

    double shape_distance(double p, double q) const {
        if (q >= q_hi_) return -std::hypot(p - apex_.p, q - apex_.q);
        double d = q - q_lo_;
        if (q <= q_lo_) return d;
        if (left_) {
            const auto e = left_->at(q);
            d = std::min(d, (p - e.p) / std::sqrt(1.0 + e.slope * e.slope));
        }
        if (right_) {
            const auto e = right_->at(q);
            d = std::min(d, (e.p - p) / std::sqrt(1.0 + e.slope * e.slope));
        }
        return d;
    }

    double q_lo_ = 0.0, q_hi_ = kInf;
    PhasePoint apex_{kNaN, kNaN};
    std::optional<Side> left_, right_;
    bool complement_ = false;
    std::vector<SegmentDef> defs_;
    RegionOptions options_{};
    double length_scale_ = 1.0;
    double eps_ = 1e-6;
};

namespace detail {

inline void require_positive_margin(const Admissibility& a, const char* what) {
    if (!a.holds) {
        std::ostringstream os;
        os << what << ": admissibility condition fails (margin " << a.margin << ")";
        throw AdmissibilityViolated(os.str(), a.margin);
    }
}

/// Start point of the first segment: the origin, or (beta/rho_max, 1/rho_max).
inline double first_leg_p1(const PhysParams& params, double beta, double shrink) {
    return beta / params.c - params.p_scale() * shrink * spiral_gain(params, beta);
}

struct HalfTurn {
    AuxTrajectory traj;
    double t2, p2, t_apex, q_star;
};

/// Spiral half-turn from (p1, 1/c) back to the line q = 1/c.
inline HalfTurn half_turn(const PhysParams& params, double beta, double p1) {
    const AuxEigen e = AuxEigen::from(params, beta);
    if (e.regime != EigenRegime::Spiral) throw RegimeMismatch("half_turn: requires a spiral trajectory");
    HalfTurn h{AuxTrajectory(params, beta, {p1, 1.0 / params.c}), -std::numbers::pi / e.theta, kNaN, kNaN, kNaN};
    const double grow = half_turn_growth(params, beta);
    h.p2 = (beta / params.c) * (1.0 + grow) - p1 * grow;
    auto qd = [&](double t) { return h.traj.q_dot(t); };
    auto qdd = [&](double t) {
        const PhasePoint v = h.traj.velocity(t);
        return v.p - beta * v.q;
    };
    h.t_apex = refine_root(qd, qdd, h.t2, 0.0);
    h.q_star = h.traj.evaluate(h.t_apex).q;
    return h;
}

/// Descent from (p2, 1/c) to q = q_floor; empty when the trajectory turns first.
inline std::optional<double> descent_time(const AuxTrajectory& traj, double q_floor) {
    const auto& e = traj.eigen();
    try {
        if (e.regime == EigenRegime::Spiral) {
            const double t0 = (-std::numbers::pi + std::atan2(2.0 * e.theta, e.beta)) / e.theta;
            return crossing_time_q(traj, q_floor, LargestNegativeInBracket{t0, 0.0});
        }
        return crossing_time_q(traj, q_floor, UniqueNegative{});
    } catch (const NoCrossing&) {
        return std::nullopt;
    }
}

inline SegmentDef curve_def(std::string label, const AuxTrajectory& traj, double t_begin, double t_end) {
    SegmentDef d;
    d.label = std::move(label);
    d.curve = true;
    d.traj = traj;
    d.t_begin = t_begin;
    d.t_end = t_end;
    return d;
}

inline SegmentDef line_def(std::string label, PhasePoint a, PhasePoint b) {
    SegmentDef d;
    d.label = std::move(label);
    d.curve = false;
    d.a = a;
    d.b = b;
    return d;
}

/// Closed shape bounded by: first leg (beta_a), half-turn (beta_b), descent (beta_a), floor.
/// Used by Sigma1, Sigma3, the weak/medium SigmaL and the Delta1 enclosure.
struct ClosedBuild {
    RegionScaffold sc;
    Region::Shape shape;
    std::vector<SegmentDef> defs;
};

inline ClosedBuild build_closed(const PhysParams& params, double beta_a, double beta_b, double q_floor,
                                const RegionOptions& opt, const char* labels[4], const char* who,
                                double margin = kNaN) {
    const double c = params.c;
    const double shrink = 1.0 - c * q_floor;  // q_floor = 0 or 1/rho_max
    const PhasePoint start{beta_a * q_floor, q_floor};
    ClosedBuild out;
    auto& sc = out.sc;

    const AuxTrajectory leg1(params, beta_a, start);
    sc.t1 = first_return_time_from_origin(params, beta_a);
    sc.p1 = first_leg_p1(params, beta_a, shrink);

    const HalfTurn ht = half_turn(params, beta_b, sc.p1);
    sc.t2 = ht.t2;
    sc.p2 = ht.p2;
    sc.q_star = ht.q_star;

    const AuxTrajectory leg3(params, beta_a, {sc.p2, 1.0 / c});
    const auto t3 = descent_time(leg3, q_floor);
    if (!t3) {
        std::ostringstream os;
        os << who << ": closing segment turns before reaching q = " << q_floor;
        throw AdmissibilityViolated(os.str(), margin);
    }
    sc.t3 = *t3;
    sc.p3 = leg3.evaluate(sc.t3).p;
    sc.q_floor = q_floor;

    Side left, right;
    left.pieces.emplace_back(leg1, sc.t1, 0.0, opt.table_size);
    left.pieces.emplace_back(ht.traj, ht.t_apex, 0.0, opt.table_size);
    right.pieces.emplace_back(leg3, sc.t3, 0.0, opt.table_size);
    right.pieces.emplace_back(ht.traj, ht.t2, ht.t_apex, opt.table_size);
    out.shape.q_lo = q_floor;
    out.shape.q_hi = ht.q_star;
    out.shape.apex = ht.traj.evaluate(ht.t_apex);
    out.shape.left = std::move(left);
    out.shape.right = std::move(right);

    out.defs.push_back(curve_def(labels[0], leg1, 0.0, sc.t1));
    out.defs.push_back(curve_def(labels[1], ht.traj, 0.0, ht.t2));
    out.defs.push_back(curve_def(labels[2], leg3, 0.0, sc.t3));
    out.defs.push_back(line_def(labels[3], {sc.p3, q_floor}, start));
    return out;
}

/// Unbounded shape: first leg (beta_a) from start, then beta_b from (p1, 1/c) up to q_cap.
struct OpenBuild {
    RegionScaffold sc;
    Side side;
    std::vector<SegmentDef> defs;  ///< leg1, leg2 (in that order)
    PhasePoint cap_point{};
};

inline OpenBuild build_open(const PhysParams& params, double beta_a, double beta_b, double q_floor,
                            const RegionOptions& opt, const char* l1, const char* l2) {
    const double c = params.c;
    const double shrink = 1.0 - c * q_floor;
    const PhasePoint start{beta_a * q_floor, q_floor};
    const double q_cap = opt.q_cap_factor / c;
    OpenBuild out;
    auto& sc = out.sc;
    const AuxTrajectory leg1(params, beta_a, start);
    sc.t1 = first_return_time_from_origin(params, beta_a);
    sc.p1 = first_leg_p1(params, beta_a, shrink);
    const AuxTrajectory leg2(params, beta_b, {sc.p1, 1.0 / c});
    const double t_cap = crossing_time_q(leg2, q_cap, UniqueNegative{});
    sc.t2 = t_cap;
    sc.q_floor = q_floor;
    out.cap_point = leg2.evaluate(t_cap);
    out.side.pieces.emplace_back(leg1, sc.t1, 0.0, opt.table_size);
    out.side.pieces.emplace_back(leg2, t_cap, 0.0, opt.table_size);
    out.side.extend_above = true;
    out.defs.push_back(curve_def(l1, leg1, 0.0, sc.t1));
    out.defs.push_back(curve_def(l2, leg2, 0.0, t_cap));
    return out;
}

inline Region assemble(RegionScaffold sc, Region::Shape shape, std::vector<SegmentDef> defs, Closure closure,
                       std::optional<RhoZeroRay> ray, const PhysParams& params, const RegionOptions& opt) {
    Region r;
    r.scaffold = std::move(sc);
    r.closure = closure;
    r.plane = Plane::PQ;
    r.rho_zero_ray = ray;
    r.q_cap = closure == Closure::Bounded ? kInf : opt.q_cap_factor / params.c;
    r.rho_cap = opt.rho_cap_factor * params.c;
    r.set_shape(std::move(shape));
    r.set_defs(std::move(defs), opt, params.c);
    return r;
}

inline double far_extent(const PhysParams& params, double p_hint) {
    return std::max(std::abs(p_hint), 10.0 * params.p_scale());
}

}  // namespace detail

/// Weak alignment subcritical region: closed, floored by the p-axis.
inline Region build_sigma1(const PhysParams& params, const AlignmentBand& band, const RegionOptions& opt = {}) {
    if (classify_band(params, band) != AlignmentRegime::Weak)
        throw RegimeMismatch("build_sigma1: requires beta_max^2 < 4kc");
    const Admissibility adm = admissibility_weak(params, band);
    detail::require_positive_margin(adm, "build_sigma1");
    const char* labels[4] = {"C1", "C2", "C3", "axis"};
    auto b = detail::build_closed(params, band.beta_max, band.beta_min, 0.0, opt, labels, "build_sigma1",
                                    adm.margin);
    b.sc.kind = RegionKind::Sigma1;
    b.sc.regime = AlignmentRegime::Weak;
    b.sc.band = band;
    b.sc.admissibility = adm;
    return detail::assemble(b.sc, std::move(b.shape), std::move(b.defs), Closure::Bounded, std::nullopt, params,
                            opt);
}

/// Strong alignment subcritical region: unbounded to the right and upwards.
inline Region build_sigma2(const PhysParams& params, const AlignmentBand& band, const RegionOptions& opt = {}) {
    if (classify_band(params, band) != AlignmentRegime::Strong)
        throw RegimeMismatch("build_sigma2: requires beta_min^2 >= 4kc");
    auto b = detail::build_open(params, band.beta_max, band.beta_min, 0.0, opt, "C1", "C2");
    b.sc.kind = RegionKind::Sigma2;
    b.sc.regime = AlignmentRegime::Strong;
    b.sc.band = band;
    b.sc.admissibility = {true, kInf};
    Region::Shape shape;
    shape.q_lo = 0.0;
    shape.left = std::move(b.side);
    std::vector<SegmentDef> defs;
    const double x_far = detail::far_extent(params, b.cap_point.p);
    defs.push_back(detail::line_def("axis", {x_far, 0.0}, {0.0, 0.0}));
    for (auto& d : b.defs) defs.push_back(std::move(d));
    RhoZeroRay ray{RhoZeroRay::Kind::Above, riccati_lower_root(params, band.beta_min)};
    return detail::assemble(b.sc, std::move(shape), std::move(defs), Closure::UnboundedWithCap, ray, params, opt);
}

/// Medium alignment subcritical region: node legs with beta_max, spiral half-turn with beta_min.
/// The single-beta band at beta = 2 sqrt(kc) has no half-turn; it falls back to the
/// unbounded construction, which is its limit.
inline Region build_sigma3(const PhysParams& params, const AlignmentBand& band, const RegionOptions& opt = {}) {
    const Admissibility adm = admissibility_medium(params, band);  // throws on regime mismatch
    if (classify_regime(params, band.beta_min) != EigenRegime::Spiral) {
        Region r = build_sigma2(params, band, opt);
        r.scaffold.kind = RegionKind::Sigma3;
        r.scaffold.regime = AlignmentRegime::Medium;
        r.scaffold.admissibility = adm;
        return r;
    }
    detail::require_positive_margin(adm, "build_sigma3");
    const char* labels[4] = {"C1", "C2", "C3", "axis"};
    auto b = detail::build_closed(params, band.beta_max, band.beta_min, 0.0, opt, labels, "build_sigma3",
                                    adm.margin);
    b.sc.kind = RegionKind::Sigma3;
    b.sc.regime = AlignmentRegime::Medium;
    b.sc.band = band;
    b.sc.admissibility = adm;
    return detail::assemble(b.sc, std::move(b.shape), std::move(b.defs), Closure::Bounded, std::nullopt, params,
                            opt);
}

/// Weak alignment supercritical region: the upper half-plane minus the closed B-enclosure.
inline Region build_delta1(const PhysParams& params, const AlignmentBand& band, const RegionOptions& opt = {}) {
    if (classify_band(params, band) != AlignmentRegime::Weak)
        throw RegimeMismatch("build_delta1: requires beta_max^2 < 4kc");
    const char* labels[4] = {"B1", "B2", "B3", "axis"};
    auto b = detail::build_closed(params, band.beta_min, band.beta_max, 0.0, opt, labels, "build_delta1");
    b.sc.kind = RegionKind::Delta1;
    b.sc.regime = AlignmentRegime::Weak;
    b.sc.band = band;
    b.sc.admissibility = {true, kInf};
    b.shape.complement = true;
    RhoZeroRay ray{RhoZeroRay::Kind::All, 0.0};
    return detail::assemble(b.sc, std::move(b.shape), std::move(b.defs), Closure::UnboundedWithCap, ray, params,
                            opt);
}

/// Supercritical region when beta_max^2 >= 4kc: left of the B1/B2 graph.
inline Region build_delta2(const PhysParams& params, const AlignmentBand& band, const RegionOptions& opt = {}) {
    if (classify_regime(params, band.beta_max) == EigenRegime::Spiral)
        throw RegimeMismatch("build_delta2: requires beta_max^2 >= 4kc");
    auto b = detail::build_open(params, band.beta_min, band.beta_max, 0.0, opt, "B1", "B2");
    b.sc.kind = RegionKind::Delta2;
    b.sc.regime = classify_band(params, band);
    b.sc.band = band;
    b.sc.admissibility = {true, kInf};
    Region::Shape shape;
    shape.q_lo = 0.0;
    shape.right = std::move(b.side);
    std::vector<SegmentDef> defs;
    const double x_far = detail::far_extent(params, b.cap_point.p);
    defs.push_back(detail::line_def("axis", {-x_far, 0.0}, {0.0, 0.0}));
    for (auto& d : b.defs) defs.push_back(std::move(d));
    RhoZeroRay ray{RhoZeroRay::Kind::Below, riccati_lower_root(params, band.beta_max)};
    return detail::assemble(b.sc, std::move(shape), std::move(defs), Closure::UnboundedWithCap, ray, params, opt);
}

/// Subcritical region for the weakly singular case, floored at q = 1/rho_max.
inline Region build_sigma_L(const PhysParams& params, const InfluenceModel& influence, const BoundsConfig& bounds,
                            const RegionOptions& opt = {}) {
    if (!(bounds.rho_max > params.c))
        throw std::domain_error("build_sigma_L: bad bounds config, rho_max must exceed c");
    bounds.validate(params.c);
    const AlignmentBand band = band_for_weakly_singular(influence, bounds, params.c);
    const Admissibility adm = admissibility_weakly_singular(params, band, bounds);
    detail::require_positive_margin(adm, "build_sigma_L");
    const AlignmentRegime regime = classify_band(params, band);
    const double q_floor = 1.0 / bounds.rho_max;

    if (regime != AlignmentRegime::Strong) {
        const char* labels[4] = {"C1", "C2", "C3", "C4"};
        auto b = detail::build_closed(params, band.beta_max, band.beta_min, q_floor, opt, labels, "build_sigma_L",
                                            adm.margin);
        b.sc.kind = RegionKind::SigmaL;
        b.sc.regime = regime;
        b.sc.band = band;
        b.sc.admissibility = adm;
        b.sc.bounds = bounds;
        return detail::assemble(b.sc, std::move(b.shape), std::move(b.defs), Closure::Bounded, std::nullopt, params,
                                opt);
    }

    auto b = detail::build_open(params, band.beta_max, band.beta_min, q_floor, opt, "C1", "C2");
    b.sc.kind = RegionKind::SigmaL;
    b.sc.regime = regime;
    b.sc.band = band;
    b.sc.admissibility = adm;
    b.sc.bounds = bounds;
    const PhasePoint start{band.beta_max * q_floor, q_floor};
    const double x_far = detail::far_extent(params, b.cap_point.p);
    Region::Shape shape;
    std::vector<SegmentDef> defs;
    if (opt.literal_paper_boundary) {
        shape.q_lo = 0.0;
        b.side.pieces.insert(b.side.pieces.begin(), CurvePiece::vertical(start.p, 0.0, q_floor));
        defs.push_back(detail::line_def("axis", {x_far, 0.0}, {start.p, 0.0}));
        defs.push_back(detail::line_def("floor", {start.p, 0.0}, start));
        b.sc.q_floor = 0.0;
    } else {
        shape.q_lo = q_floor;
        defs.push_back(detail::line_def("floor", {x_far, q_floor}, start));
    }
    shape.left = std::move(b.side);
    for (auto& d : b.defs) defs.push_back(std::move(d));
    RhoZeroRay ray{RhoZeroRay::Kind::Above, riccati_lower_root(params, band.beta_min)};
    return detail::assemble(b.sc, std::move(shape), std::move(defs), Closure::UnboundedWithCap, ray, params, opt);
}

/// Picks Sigma1 / Sigma3 / Sigma2 from the band regime.
inline Region build_subcritical(const PhysParams& params, const AlignmentBand& band, const RegionOptions& opt = {}) {
    switch (classify_band(params, band)) {
        case AlignmentRegime::Weak: return build_sigma1(params, band, opt);
        case AlignmentRegime::Medium: return build_sigma3(params, band, opt);
        case AlignmentRegime::Strong: return build_sigma2(params, band, opt);
    }
    throw std::logic_error("build_subcritical: unreachable");
}

inline Region build_supercritical(const PhysParams& params, const AlignmentBand& band,
                                  const RegionOptions& opt = {}) {
    if (classify_band(params, band) == AlignmentRegime::Weak) return build_delta1(params, band, opt);
    return build_delta2(params, band, opt);
}

/// Image of a (p, q) region under F(p, q) = (p/q, 1/q). Membership is unchanged;
/// only the exported boundary is resampled. Samples with q < 1/rho_cap are cut off
/// and the gap is closed by a "cut" segment on bounded loops.
inline Region to_grho(const Region& region) {
    Region out = region;
    out.plane = Plane::GRho;
    out.boundary.clear();
    const double q_min = 1.0 / region.rho_cap;
    const std::size_t n = region.options().n_samples;

    for (const auto& def : region.segment_defs()) {
        auto pts = Region::sample_def(def, n);
        std::vector<TimedPoint> kept;
        for (std::size_t i = 0; i < pts.size(); ++i) {
            const bool in = pts[i].q >= q_min;
            if (i > 0 && def.curve && (pts[i - 1].q >= q_min) != in) {
                // exact crossing of q = q_min between consecutive samples
                auto f = [&](double t) { return def.traj.evaluate(t).q - q_min; };
                auto df = [&](double t) { return def.traj.q_dot(t); };
                const double lo = std::min(pts[i - 1].t, pts[i].t), hi = std::max(pts[i - 1].t, pts[i].t);
                const double tc = detail::refine_root(f, df, lo, hi);
                const PhasePoint x = def.traj.evaluate(tc);
                kept.push_back({tc, x.p, std::max(x.q, q_min)});
            }
            if (in) kept.push_back(pts[i]);
        }
        if (kept.size() < 2) continue;
        BoundarySegment seg{def.label, {}};
        for (const auto& s : kept) seg.samples.push_back({s.t, s.p / s.q, 1.0 / s.q});
        out.boundary.push_back(std::move(seg));
    }

    if (region.closure == Closure::Bounded || region.is_complement()) {
        std::vector<BoundarySegment> closed;
        for (std::size_t i = 0; i < out.boundary.size(); ++i) {
            closed.push_back(out.boundary[i]);
            const auto& tail = out.boundary[i].samples.back();
            const auto& head = out.boundary[(i + 1) % out.boundary.size()].samples.front();
            if (std::hypot(tail.p - head.p, tail.q - head.q) > 1e-9 * (1.0 + std::abs(tail.p))) {
                BoundarySegment cut{"cut", {}};
                cut.samples.push_back({0.0, tail.p, tail.q});
                cut.samples.push_back({1.0, head.p, head.q});
                closed.push_back(std::move(cut));
            }
        }
        out.boundary = std::move(closed);
    }
    return out;
}

inline MembershipVerdict membership(const Region& region, double a, double b, Plane plane) {
    return region.membership(a, b, plane);
}

}  // namespace epa
