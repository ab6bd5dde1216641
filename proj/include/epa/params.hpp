#pragma once

// Physical parameters, alignment kernels and the admissibility conditions
// that decide whether the glued phase-plane regions close up.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace epa {

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

/// Thrown when a builder is asked for a region whose regime does not match
/// the alignment band (e.g. a spiral construction with beta_max^2 >= 4kc).
class RegimeMismatch : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Thrown when the glued boundary would not close. Carries the signed margin.
class AdmissibilityViolated : public std::domain_error {
public:
    AdmissibilityViolated(const std::string& what, double margin)
        : std::domain_error(what), margin_(margin) {}
    double margin() const noexcept { return margin_; }

private:
    double margin_;
};

struct PhysParams {
    double k = 1.0;  ///< repulsive force strength
    double c = 1.0;  ///< background charge == mean density

    PhysParams() = default;
    PhysParams(double k_, double c_) : k(k_), c(c_) {
        if (!(k > 0.0) || !(c > 0.0) || !std::isfinite(k) || !std::isfinite(c))
            throw std::domain_error("PhysParams: k and c must be positive and finite");
    }

    /// k = 0: no electric force. Only meaningful for the PDE solver; the phase-plane
    /// constructions require k > 0.
    static PhysParams without_force(double c_) {
        PhysParams p(1.0, c_);
        p.k = 0.0;
        return p;
    }

    double lambda() const { return 2.0 * std::sqrt(k / c); }
    double sqrt_kc() const { return std::sqrt(k * c); }
    double four_kc() const { return 4.0 * k * c; }
    /// sqrt(k/c): the natural p-scale of the phase plane.
    double p_scale() const { return std::sqrt(k / c); }
};

/// A priori bounds on psi*rho along characteristics.
struct AlignmentBand {
    double beta_min = 0.0;
    double beta_max = 0.0;

    AlignmentBand() = default;
    AlignmentBand(double lo, double hi) : beta_min(lo), beta_max(hi) {
        if (!(lo >= 0.0) || !(hi >= lo) || !std::isfinite(hi))
            throw std::domain_error("AlignmentBand: need 0 <= beta_min <= beta_max < inf");
    }
    double width() const { return beta_max - beta_min; }
    bool degenerate() const { return beta_max == beta_min; }
    bool contains(double beta) const { return beta >= beta_min && beta <= beta_max; }
};

enum class EigenRegime { Spiral, Node, Degenerate };

/// Relative tolerance used to decide beta^2 == 4kc.
inline constexpr double kDegenerateRelTol = 1e-12;

inline EigenRegime classify_regime(const PhysParams& params, double beta) {
    const double disc = beta * beta - params.four_kc();
    if (std::abs(disc) <= kDegenerateRelTol * params.four_kc()) return EigenRegime::Degenerate;
    return disc < 0.0 ? EigenRegime::Spiral : EigenRegime::Node;
}

inline const char* to_string(EigenRegime r) {
    switch (r) {
        case EigenRegime::Spiral: return "spiral";
        case EigenRegime::Node: return "node";
        case EigenRegime::Degenerate: return "degenerate";
    }
    return "?";
}

/// Eigen-structure of the linear auxiliary system p' = k - kcq, q' = p - beta q.
/// The eigenvalues are -beta/2 +- omega (node) or -beta/2 +- i*omega (spiral).
struct AuxEigen {
    double beta = 0.0;
    EigenRegime regime = EigenRegime::Spiral;
    double omega = 0.0;        ///< theta (spiral) or half the node eigen-gap; 0 when degenerate
    double theta = kNaN;       ///< 0.5*sqrt(4kc - beta^2), spiral only
    double gamma_plus = kNaN;  ///< (beta + sqrt(beta^2-4kc))/2, node/degenerate
    double gamma_minus = kNaN; ///< (beta - sqrt(beta^2-4kc))/2, node/degenerate
    double tau = kInf;         ///< sqrt(kc)/beta; z = sqrt(4 tau^2 - 1) may be imaginary

    static AuxEigen from(const PhysParams& params, double beta) {
        if (!(beta >= 0.0) || !std::isfinite(beta))
            throw std::domain_error("AuxEigen: beta must be finite and non-negative");
        AuxEigen e;
        e.beta = beta;
        e.regime = classify_regime(params, beta);
        e.tau = beta > 0.0 ? params.sqrt_kc() / beta : kInf;
        const double disc = beta * beta - params.four_kc();
        switch (e.regime) {
            case EigenRegime::Spiral:
                e.theta = 0.5 * std::sqrt(-disc);
                e.omega = e.theta;
                break;
            case EigenRegime::Node: {
                const double s = std::sqrt(disc);
                e.omega = 0.5 * s;
                e.gamma_plus = 0.5 * (beta + s);
                // kc / gamma_plus avoids cancellation when beta >> sqrt(kc)
                e.gamma_minus = params.k * params.c / e.gamma_plus;
                break;
            }
            case EigenRegime::Degenerate:
                e.omega = 0.0;
                e.gamma_plus = e.gamma_minus = 0.5 * beta;
                break;
        }
        return e;
    }
};

/// E(tau) = exp(atan(z)/z) with z = sqrt(4 tau^2 - 1), continued to tau < 1/2
/// through exp(atanh(y)/y), y = sqrt(1 - 4 tau^2). E(1/2) = e, E(inf) = 1.
inline double extended_exponential(double tau) {
    if (!(tau > 0.0)) throw std::domain_error("extended_exponential: tau must be positive");
    if (std::isinf(tau)) return 1.0;
    const double four_tau2 = 4.0 * tau * tau;
    const double gap = four_tau2 - 1.0;
    if (gap > 0.0) {
        const double z = std::sqrt(gap);
        const double ratio = z < 1e-6 ? 1.0 - z * z / 3.0 : std::atan(z) / z;
        return std::exp(ratio);
    }
    if (gap == 0.0) return std::numbers::e;
    const double y = std::sqrt(-gap);
    if (y < 1e-6) return std::exp(1.0 + y * y / 3.0);
    // atanh(y) = 0.5 log((1+y)/(1-y)); 1-y = 4 tau^2/(1+y) avoids cancellation near y -> 1
    const double one_minus_y = four_tau2 / (1.0 + y);
    const double atanh_y = 0.5 * std::log((1.0 + y) / one_minus_y);
    return std::exp(atanh_y / y);
}

/// exp(atan(z)/z) for the auxiliary system with the given beta (beta = 0 -> 1).
inline double spiral_gain(const PhysParams& params, double beta) {
    if (beta == 0.0) return 1.0;
    return extended_exponential(params.sqrt_kc() / beta);
}

/// exp(-pi/z) = exp(-pi beta / sqrt(4kc - beta^2)); 1 at beta = 0, 0 once beta^2 >= 4kc.
inline double half_turn_decay(const PhysParams& params, double beta) {
    const double gap = params.four_kc() - beta * beta;
    if (classify_regime(params, beta) != EigenRegime::Spiral || gap <= 0.0) return 0.0;
    return std::exp(-std::numbers::pi * beta / std::sqrt(gap));
}

/// exp(+pi/z), the growth of |p - beta/c| over one backward half-turn. Spiral only.
inline double half_turn_growth(const PhysParams& params, double beta) {
    const double gap = params.four_kc() - beta * beta;
    if (classify_regime(params, beta) != EigenRegime::Spiral || gap <= 0.0) return kInf;
    return std::exp(std::numbers::pi * beta / std::sqrt(gap));
}

/// Lower root (beta - sqrt(beta^2 - 4kc))/2 of G^2 - beta G + kc. Node/degenerate only.
inline double riccati_lower_root(const PhysParams& params, double beta) {
    const double disc = beta * beta - params.four_kc();
    if (disc < 0.0) {
        if (classify_regime(params, beta) == EigenRegime::Degenerate) return 0.5 * beta;
        return kNaN;
    }
    const double s = std::sqrt(disc);
    return params.k * params.c / (0.5 * (beta + s));
}

inline double riccati_upper_root(const PhysParams& params, double beta) {
    const double disc = beta * beta - params.four_kc();
    if (disc < 0.0) {
        if (classify_regime(params, beta) == EigenRegime::Degenerate) return 0.5 * beta;
        return kNaN;
    }
    return 0.5 * (beta + std::sqrt(disc));
}

enum class AlignmentRegime { Weak, Medium, Strong };

inline const char* to_string(AlignmentRegime r) {
    switch (r) {
        case AlignmentRegime::Weak: return "weak";
        case AlignmentRegime::Medium: return "medium";
        case AlignmentRegime::Strong: return "strong";
    }
    return "?";
}

/// weak: beta_max^2 < 4kc; strong: beta_min^2 >= 4kc; medium otherwise.
inline AlignmentRegime classify_band(const PhysParams& params, const AlignmentBand& band) {
    if (classify_regime(params, band.beta_max) == EigenRegime::Spiral) return AlignmentRegime::Weak;
    if (classify_regime(params, band.beta_min) != EigenRegime::Spiral) return AlignmentRegime::Strong;
    return AlignmentRegime::Medium;
}

struct Admissibility {
    bool holds = false;
    double margin = kNaN;  ///< signed; positive iff the condition holds
};

/// Weak alignment closure: the beta_max spiral through (p2, 1/c) must reach
/// q = 0 before its first backward turning point.
inline Admissibility admissibility_weak(const PhysParams& params, const AlignmentBand& band) {
    if (classify_regime(params, band.beta_max) != EigenRegime::Spiral)
        throw RegimeMismatch("admissibility_weak: requires beta_max^2 < 4kc");
    const double decay_hat = half_turn_decay(params, band.beta_max);
    const double decay_tilde = half_turn_decay(params, band.beta_min);
    const double lhs = band.width() * (1.0 + decay_tilde) / spiral_gain(params, band.beta_max);
    const double rhs = params.sqrt_kc() * (1.0 - decay_hat * decay_tilde);
    const double margin = rhs - lhs;
    return {margin > 0.0, margin};
}

/// Weaker closure condition p2 > beta_max/c (weak and medium constructions).
inline Admissibility admissibility_p2(const PhysParams& params, const AlignmentBand& band) {
    const double lhs = params.sqrt_kc() * spiral_gain(params, band.beta_max);
    const double rhs = band.width() * (1.0 + half_turn_decay(params, band.beta_min));
    const double margin = lhs - rhs;
    return {margin > 0.0, margin};
}

/// Medium alignment closure: p2 > beta_max/c. Also accepts the degenerate
/// single-beta band at beta = 2 sqrt(kc).
inline Admissibility admissibility_medium(const PhysParams& params, const AlignmentBand& band) {
    const auto lo = classify_regime(params, band.beta_min);
    const auto hi = classify_regime(params, band.beta_max);
    const bool medium = lo == EigenRegime::Spiral && hi != EigenRegime::Spiral;
    const bool degenerate_point = band.degenerate() && hi == EigenRegime::Degenerate;
    if (!medium && !degenerate_point)
        throw RegimeMismatch("admissibility_medium: requires beta_min^2 < 4kc <= beta_max^2");
    return admissibility_p2(params, band);
}

/// Density window used to bound psi*rho for integrable kernels.
struct BoundsConfig {
    double rho_min = 0.0;
    double rho_max = 2.0;

    BoundsConfig() = default;
    BoundsConfig(double lo, double hi) : rho_min(lo), rho_max(hi) {}

    /// Measure of the set where the minimizing density sits at rho_min.
    double d(double c) const { return (rho_max - c) / (rho_max - rho_min); }
    double d_hat(double c) const { return (c - rho_min) / (rho_max - rho_min); }

    void validate(double c) const {
        if (!(rho_min >= 0.0) || !(rho_min < c) || !(c < rho_max) || !std::isfinite(rho_max))
            throw std::domain_error("BoundsConfig: need 0 <= rho_min < c < rho_max < inf");
    }
    bool symmetric(double c, double tol = 1e-12) const {
        return std::abs(rho_min + rho_max - 2.0 * c) <= tol * c;
    }
    static BoundsConfig standard(double c) { return {0.0, 2.0 * c}; }
};

/// Closure conditions for the weakly singular construction, whose first segment
/// starts at (beta_max/rho_max, 1/rho_max). The weak case is the condition that
/// the third segment reaches q = 1/rho_max before turning; medium needs
/// p2 > beta_max/c; strong needs p1 < beta_min/c.
inline Admissibility admissibility_weakly_singular(const PhysParams& params,
                                                   const AlignmentBand& band,
                                                   const BoundsConfig& bounds) {
    if (!(bounds.rho_max > params.c))
        throw std::domain_error("admissibility_weakly_singular: rho_max must exceed c");
    const double shrink = 1.0 - params.c / bounds.rho_max;
    const double scale = params.sqrt_kc() * shrink * spiral_gain(params, band.beta_max);
    const double decay_tilde = half_turn_decay(params, band.beta_min);
    double margin = 0.0;
    switch (classify_band(params, band)) {
        case AlignmentRegime::Weak: {
            const double decay_hat = half_turn_decay(params, band.beta_max);
            margin = scale * (1.0 - decay_hat * decay_tilde) / (1.0 + decay_tilde) - band.width();
            break;
        }
        case AlignmentRegime::Medium:
            margin = scale - band.width() * (1.0 + decay_tilde);
            break;
        case AlignmentRegime::Strong:
            margin = scale - band.width();
            break;
    }
    return {margin > 0.0, margin};
}

enum class InfluenceKind { Bounded, WeaklySingular, Tabulated };

inline const char* to_string(InfluenceKind k) {
    switch (k) {
        case InfluenceKind::Bounded: return "bounded";
        case InfluenceKind::WeaklySingular: return "weakly_singular";
        case InfluenceKind::Tabulated: return "tabulated";
    }
    return "?";
}

/// The alignment kernel psi on the unit torus.
///
/// Tabulated kernels hold cell averages: samples[m] is the mean of psi over the
/// cell of width 1/N centred at offset m/N (offsets >= N/2 wrap to negative).
struct InfluenceModel {
    InfluenceKind kind = InfluenceKind::Bounded;
    double psi_min = 0.0;
    double psi_max = 0.0;
    double l1_norm = 0.0;
    double gamma = kNaN;  ///< integral of the decreasing rearrangement over [1/2, 1]
    std::vector<double> samples;

    static InfluenceModel bounded(double psi_min, double psi_max, std::optional<double> l1 = {}) {
        if (!(psi_min >= 0.0) || !(psi_max >= psi_min) || !std::isfinite(psi_max))
            throw std::domain_error("InfluenceModel::bounded: need 0 <= psi_min <= psi_max < inf");
        InfluenceModel m;
        m.kind = InfluenceKind::Bounded;
        m.psi_min = psi_min;
        m.psi_max = psi_max;
        m.l1_norm = l1.value_or(0.5 * (psi_min + psi_max));
        if (m.l1_norm < psi_min || m.l1_norm > psi_max)
            throw std::domain_error("InfluenceModel::bounded: l1_norm outside [psi_min, psi_max]");
        return m;
    }

    static InfluenceModel constant(double psi) { return bounded(psi, psi, psi); }

    static InfluenceModel weakly_singular(double l1_norm, double gamma) {
        if (!(gamma >= 0.0) || !(2.0 * gamma <= l1_norm * (1.0 + 1e-14)) || !std::isfinite(l1_norm))
            throw std::domain_error("InfluenceModel::weakly_singular: need 0 <= 2 gamma <= l1_norm");
        InfluenceModel m;
        m.kind = InfluenceKind::WeaklySingular;
        m.l1_norm = l1_norm;
        m.gamma = gamma;
        m.psi_min = 0.0;
        m.psi_max = kInf;
        return m;
    }

    static InfluenceModel tabulated(std::vector<double> cells) {
        if (cells.empty()) throw std::domain_error("InfluenceModel::tabulated: no samples");
        for (double v : cells)
            if (!(v >= 0.0) || !std::isfinite(v))
                throw std::domain_error("InfluenceModel::tabulated: samples must be finite and >= 0");
        InfluenceModel m;
        m.kind = InfluenceKind::Tabulated;
        auto [lo, hi] = std::minmax_element(cells.begin(), cells.end());
        m.psi_min = *lo;
        m.psi_max = *hi;
        const double width = 1.0 / static_cast<double>(cells.size());
        m.l1_norm = std::accumulate(cells.begin(), cells.end(), 0.0) * width;
        std::vector<double> sorted = cells;
        std::sort(sorted.begin(), sorted.end(), std::greater<>());
        // tail integral over [1/2, 1] of the step function
        double tail = 0.0;
        const double n = static_cast<double>(sorted.size());
        for (std::size_t i = 0; i < sorted.size(); ++i) {
            const double a = std::max(static_cast<double>(i) / n, 0.5);
            const double b = static_cast<double>(i + 1) / n;
            if (b > a) tail += sorted[i] * (b - a);
        }
        m.gamma = tail;
        m.samples = std::move(cells);
        return m;
    }

    bool has_samples() const { return !samples.empty(); }
};

/// Band for bounded kernels: beta = c psi.
inline AlignmentBand band_from_bounded(const PhysParams& params, const InfluenceModel& psi) {
    if (!std::isfinite(psi.psi_max))
        throw std::domain_error("band_from_bounded: kernel is not bounded");
    return {params.c * psi.psi_min, params.c * psi.psi_max};
}

}  // namespace epa
