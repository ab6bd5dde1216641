#pragma once

// Decreasing rearrangement of a cell-averaged kernel and the convolution
// bounds it yields under mass and box constraints on the density.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "params.hpp"

namespace epa {

class RearrangedKernel {
public:
    explicit RearrangedKernel(std::vector<double> samples) {
        if (samples.empty()) throw std::domain_error("rearrange_kernel: no samples");
        for (double v : samples)
            if (!(v >= 0.0) || !std::isfinite(v))
                throw std::domain_error("rearrange_kernel: samples must be finite and >= 0");
        values_ = std::move(samples);
        std::sort(values_.begin(), values_.end(), std::greater<>());
        width_ = 1.0 / static_cast<double>(values_.size());
        prefix_.resize(values_.size() + 1, 0.0);
        for (std::size_t i = 0; i < values_.size(); ++i) prefix_[i + 1] = prefix_[i] + values_[i];
        l1_ = prefix_.back() * width_;
    }

    const std::vector<double>& values() const { return values_; }
    std::size_t size() const { return values_.size(); }
    double width() const { return width_; }
    double l1_norm() const { return l1_; }

    /// Integral of psi* over [0, d], with one fractional cell.
    double head(double d) const {
        d = std::clamp(d, 0.0, 1.0);
        const double pos = d / width_;
        auto whole = static_cast<std::size_t>(std::floor(pos));
        if (whole >= values_.size()) return l1_;
        const double frac = pos - static_cast<double>(whole);
        return prefix_[whole] * width_ + frac * width_ * values_[whole];
    }

    /// Integral of psi* over [d, 1].
    double tail(double d) const { return l1_ - head(d); }

    double gamma() const { return tail(0.5); }
    double gamma1(double d) const { return tail(d); }
    double gamma2(double d_hat) const { return tail(d_hat); }

private:
    std::vector<double> values_;
    std::vector<double> prefix_;
    double width_ = 0.0;
    double l1_ = 0.0;
};

inline RearrangedKernel rearrange_kernel(std::vector<double> samples) {
    return RearrangedKernel(std::move(samples));
}

struct ConvolutionBounds {
    double lower = kNaN;
    double upper = kNaN;
    double gamma1 = kNaN;
    double gamma2 = kNaN;
};

inline ConvolutionBounds improved_bounds(const RearrangedKernel& kernel, const BoundsConfig& cfg, double c) {
    cfg.validate(c);
    const double spread = cfg.rho_max - cfg.rho_min;
    ConvolutionBounds b;
    b.gamma1 = kernel.gamma1(cfg.d(c));
    b.gamma2 = kernel.gamma2(cfg.d_hat(c));
    b.lower = cfg.rho_min * kernel.l1_norm() + spread * b.gamma1;
    b.upper = cfg.rho_max * kernel.l1_norm() - spread * b.gamma2;
    return b;
}

/// The alignment band induced by the bounds on psi*rho.
inline AlignmentBand band_from_bounds(const ConvolutionBounds& b) {
    return {b.lower, std::max(b.lower, b.upper)};
}

/// Band for the weakly singular construction. Tabulated kernels go through the
/// rearrangement; closed-form ones need the symmetric window, where gamma1 = gamma2 = gamma.
inline AlignmentBand band_for_weakly_singular(const InfluenceModel& psi, const BoundsConfig& cfg, double c) {
    cfg.validate(c);
    if (psi.has_samples()) return band_from_bounds(improved_bounds(RearrangedKernel(psi.samples), cfg, c));
    if (!cfg.symmetric(c))
        throw std::domain_error("band_for_weakly_singular: asymmetric window needs a tabulated kernel");
    const double spread = cfg.rho_max - cfg.rho_min;
    const double lower = cfg.rho_min * psi.l1_norm + spread * psi.gamma;
    const double upper = cfg.rho_max * psi.l1_norm - spread * psi.gamma;
    return {lower, std::max(lower, upper)};
}

enum class OracleTarget { Min, Max };

struct OracleResult {
    double value = kNaN;
    std::vector<double> density;
};

/// Exact solution of the discrete linear program
///   min/max sum_i psi_i rho_i dx  s.t.  sum_i rho_i dx = c,  rho_min <= rho_i <= rho_max.
/// Start from rho_min everywhere and pour the remaining mass into cells in order of
/// increasing psi (Min) or decreasing psi (Max). Ties keep cell-index order.
inline OracleResult bound_oracle(const std::vector<double>& psi, const BoundsConfig& cfg, double c,
                                 OracleTarget target) {
    cfg.validate(c);
    const std::size_t n = psi.size();
    if (n == 0) throw std::domain_error("bound_oracle: empty kernel");
    const double dx = 1.0 / static_cast<double>(n);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    if (target == OracleTarget::Min)
        std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return psi[a] < psi[b]; });
    else
        std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return psi[a] > psi[b]; });

    OracleResult r;
    r.density.assign(n, cfg.rho_min);
    double remaining = (c - cfg.rho_min) / dx;  // in units of density per cell
    const double room = cfg.rho_max - cfg.rho_min;
    for (std::size_t idx : order) {
        if (remaining <= 0.0) break;
        const double add = std::min(room, remaining);
        r.density[idx] += add;
        remaining -= add;
    }
    double v = 0.0;
    for (std::size_t i = 0; i < n; ++i) v += psi[i] * r.density[i];
    r.value = v * dx;
    return r;
}

/// Discrete periodic convolution (psi * rho)(x_i) = sum_j psi_{i-j} rho_j dx.
inline double discrete_convolution_at(const std::vector<double>& psi, const std::vector<double>& rho,
                                      std::size_t i) {
    const std::size_t n = psi.size();
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) acc += psi[(i + n - j) % n] * rho[j];
    return acc / static_cast<double>(n);
}

}  // namespace epa
