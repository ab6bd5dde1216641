#pragma once

// Periodic spectral operators on the unit torus backed by FFTW.

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <memory>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace epa {

namespace detail {
// Plan creation in FFTW is not thread-safe; execution on distinct arrays is.
inline std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}
}  // namespace detail

class Spectral {
public:
    using Field = std::vector<double>;
    using Modes = std::vector<std::complex<double>>;

    explicit Spectral(std::size_t n) : n_(n), real_(n), modes_(n / 2 + 1) {
        if (n < 4 || (n & (n - 1)) != 0) throw std::domain_error("Spectral: N must be a power of two >= 4");
        std::lock_guard lock(detail::fftw_planner_mutex());
        auto* cplx = reinterpret_cast<fftw_complex*>(modes_.data());
        forward_ = fftw_plan_dft_r2c_1d(static_cast<int>(n), real_.data(), cplx, FFTW_ESTIMATE);
        backward_ = fftw_plan_dft_c2r_1d(static_cast<int>(n), cplx, real_.data(), FFTW_ESTIMATE);
    }
    ~Spectral() {
        std::lock_guard lock(detail::fftw_planner_mutex());
        fftw_destroy_plan(forward_);
        fftw_destroy_plan(backward_);
    }
    Spectral(const Spectral&) = delete;
    Spectral& operator=(const Spectral&) = delete;

    std::size_t size() const { return n_; }

    Modes forward(const Field& f) {
        real_ = f;
        fftw_execute(forward_);
        return modes_;
    }

    /// Inverse transform including the 1/N normalization.
    Field backward(const Modes& m) {
        modes_ = m;
        fftw_execute(backward_);  // c2r overwrites its input; modes_ is scratch
        Field out(real_);
        const double inv = 1.0 / static_cast<double>(n_);
        for (double& v : out) v *= inv;
        return out;
    }

    /// d/dx with the Nyquist mode dropped. Optionally keeps only |m| <= N/3.
    Field derivative(const Field& f, bool dealias = false) {
        Modes m = forward(f);
        const std::size_t cutoff = dealias ? n_ / 3 : n_ / 2 - 1;
        for (std::size_t j = 0; j < m.size(); ++j) {
            if (j > cutoff) {
                m[j] = 0.0;
                continue;
            }
            m[j] *= std::complex<double>(0.0, 2.0 * std::numbers::pi * static_cast<double>(j));
        }
        return backward(m);
    }

    /// Zero-mean periodic phi_x for -phi_xx = s (s must have zero mean).
    Field poisson_gradient(const Field& s) {
        Modes m = forward(s);
        m[0] = 0.0;
        for (std::size_t j = 1; j < m.size(); ++j) {
            if (2 * j == n_) {
                m[j] = 0.0;
                continue;
            }
            // phi_hat = s_hat / (2 pi j)^2, phi_x hat = i 2 pi j phi_hat
            m[j] *= std::complex<double>(0.0, 1.0 / (2.0 * std::numbers::pi * static_cast<double>(j)));
        }
        return backward(m);
    }

    /// Fraction of the energy of f (excluding the mean) in modes N/6 < |m| <= N/3.
    double tail_energy_fraction(const Field& f) {
        const Modes m = forward(f);
        double total = 0.0, tail = 0.0;
        for (std::size_t j = 1; j < m.size(); ++j) {
            const double e = std::norm(m[j]);
            total += e;
            if (6 * j > n_ && 3 * j <= n_) tail += e;
        }
        return total > 0.0 ? tail / total : 0.0;
    }

    Modes modes_of(const Field& f) { return forward(f); }

private:
    std::size_t n_;
    Field real_;
    Modes modes_;
    fftw_plan forward_{};
    fftw_plan backward_{};
};

/// Circular convolution with a fixed kernel: (psi * f)_i = sum_j psi_{i-j} f_j dx.
class Convolver {
public:
    Convolver(Spectral& fft, const std::vector<double>& kernel_cells) : fft_(fft) {
        if (kernel_cells.size() != fft.size())
            throw std::domain_error("Convolver: kernel size does not match the grid");
        kernel_hat_ = fft_.forward(kernel_cells);
        const double dx = 1.0 / static_cast<double>(fft.size());
        for (auto& v : kernel_hat_) v *= dx;
    }

    std::vector<double> apply(const std::vector<double>& f) {
        auto m = fft_.forward(f);
        for (std::size_t j = 0; j < m.size(); ++j) m[j] *= kernel_hat_[j];
        return fft_.backward(m);
    }

private:
    Spectral& fft_;
    Spectral::Modes kernel_hat_;
};

}  // namespace epa
