#pragma once

// Cell-averaged alignment kernels on the unit torus.
//
// Cell m (0 <= m < N) is centred at offset m/N, wrapped into [-1/2, 1/2).
// Averages come from exact antiderivatives so singular kernels keep their L1 mass.

#include <cmath>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "params.hpp"

namespace epa::kernels {

/// Signed centre offset of cell m.
inline double cell_offset(std::size_t m, std::size_t n) {
    const auto mi = static_cast<long long>(m);
    const auto ni = static_cast<long long>(n);
    return static_cast<double>(mi < ni / 2 ? mi : mi - ni) / static_cast<double>(n);
}

/// Cell averages of an even kernel given the odd antiderivative F of psi on [-1/2, 1/2].
/// The cell straddling x = +-1/2 is folded back by evenness.
inline std::vector<double> from_antiderivative(std::size_t n, const std::function<double(double)>& antiderivative) {
    if (n < 2 || n % 2 != 0) throw std::domain_error("kernels: cell count must be even and >= 2");
    std::vector<double> cells(n);
    const double dx = 1.0 / static_cast<double>(n);
    for (std::size_t m = 0; m < n; ++m) {
        const double centre = cell_offset(m, n);
        if (m == n / 2) {
            // [-1/2 - dx/2, -1/2 + dx/2] wraps; by evenness it equals twice [1/2 - dx/2, 1/2]
            cells[m] = 2.0 * (antiderivative(0.5) - antiderivative(0.5 - 0.5 * dx)) / dx;
            continue;
        }
        cells[m] = (antiderivative(centre + 0.5 * dx) - antiderivative(centre - 0.5 * dx)) / dx;
    }
    return cells;
}

/// Enforce psi_m = psi_{-m} exactly so the discrete interaction is antisymmetric.
inline void symmetrize(std::vector<double>& cells) {
    const std::size_t n = cells.size();
    for (std::size_t m = 1; m < n / 2; ++m) {
        const double avg = 0.5 * (cells[m] + cells[n - m]);
        cells[m] = cells[n - m] = avg;
    }
}

inline std::vector<double> constant(std::size_t n, double psi0) { return std::vector<double>(n, psi0); }

/// psi(x) = psi_min + (psi_max - psi_min)(1 + cos 2 pi x)/2, which has mean (psi_min + psi_max)/2.
inline std::vector<double> raised_cosine(std::size_t n, double psi_min, double psi_max) {
    const double two_pi = 2.0 * std::numbers::pi;
    const double amp = 0.5 * (psi_max - psi_min);
    auto antider = [&](double x) { return (psi_min + amp) * x + amp * std::sin(two_pi * x) / two_pi; };
    auto cells = from_antiderivative(n, antider);
    symmetrize(cells);
    return cells;
}

/// psi(x) = a |x|^{-1/2} + b on the torus.
inline std::vector<double> inverse_sqrt(std::size_t n, double a, double b) {
    auto antider = [&](double x) {
        const double s = x < 0.0 ? -1.0 : 1.0;
        return a * 2.0 * s * std::sqrt(std::abs(x)) + b * x;
    };
    auto cells = from_antiderivative(n, antider);
    symmetrize(cells);
    return cells;
}

/// Coefficients of a |x|^{-1/2} + b with prescribed L1 norm and gamma (the integral
/// of the decreasing rearrangement over [1/2, 1]). The rearrangement is sqrt(2/y) a + b.
struct InverseSqrtCoefficients {
    double a;
    double b;
};

inline InverseSqrtCoefficients inverse_sqrt_for(double l1_norm, double gamma) {
    const double a = (0.5 * l1_norm - gamma) / (2.0 - std::numbers::sqrt2);
    const double b = l1_norm - 2.0 * std::numbers::sqrt2 * a;
    if (a < 0.0 || b < 0.0) throw std::domain_error("inverse_sqrt_for: (l1_norm, gamma) not representable");
    return {a, b};
}

/// Continuous gamma of a |x|^{-1/2} + b.
inline double inverse_sqrt_gamma(double a, double b) { return a * (2.0 * std::numbers::sqrt2 - 2.0) + 0.5 * b; }

}  // namespace epa::kernels
