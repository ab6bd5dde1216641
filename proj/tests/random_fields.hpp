#pragma once

// Random kernels and feasible densities for the rearrangement checks.

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "epa/params.hpp"

namespace testing_fields {

/// Non-negative cell values: a random floor, uniform noise and a few spikes.
inline std::vector<double> random_kernel(std::size_t n, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double floor = 2.0 * u(rng);
    const double noise = 3.0 * u(rng);
    std::vector<double> cells(n);
    for (auto& v : cells) v = floor + noise * u(rng);
    const int spikes = static_cast<int>(4 * u(rng));
    for (int s = 0; s < spikes; ++s) cells[static_cast<std::size_t>(u(rng) * n) % n] += 20.0 * u(rng);
    return cells;
}

/// Density with values in [rho_min, rho_max] and cell mean c, by clamped shifting of random values.
inline std::vector<double> random_density(std::size_t n, const epa::BoundsConfig& b, double c,
                                          std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(b.rho_min, b.rho_max);
    std::vector<double> raw(n);
    for (auto& v : raw) v = u(rng);
    auto mean_at = [&](double s) {
        double m = 0.0;
        for (double v : raw) m += std::clamp(v + s, b.rho_min, b.rho_max);
        return m / static_cast<double>(n);
    };
    double lo = -(b.rho_max - b.rho_min), hi = b.rho_max - b.rho_min;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (mean_at(mid) < c ? lo : hi) = mid;
    }
    std::vector<double> rho(n);
    for (std::size_t i = 0; i < n; ++i) rho[i] = std::clamp(raw[i] + 0.5 * (lo + hi), b.rho_min, b.rho_max);
    return rho;
}

}  // namespace testing_fields
