#pragma once

// Pseudo-spectral solver for the periodic Euler-Poisson-alignment system in
// conservative variables (rho, m = rho u) with SSP-RK3 time stepping.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "params.hpp"
#include "regions.hpp"
#include "spectral.hpp"

namespace epa {

struct Grid {
    std::size_t N = 256;
    double dx = 1.0 / 256.0;
    std::vector<double> x;

    static Grid make(std::size_t n) {
        if (n < 16 || (n & (n - 1)) != 0) throw std::domain_error("Grid: N must be a power of two >= 16");
        Grid g;
        g.N = n;
        g.dx = 1.0 / static_cast<double>(n);
        g.x.resize(n);
        for (std::size_t j = 0; j < n; ++j) g.x[j] = -0.5 + static_cast<double>(j) * g.dx;
        return g;
    }
};

struct GridState {
    double t = 0.0;
    std::vector<double> rho;
    std::vector<double> m;  ///< momentum rho u

    static GridState from_primitive(const std::vector<double>& rho, const std::vector<double>& u) {
        if (rho.size() != u.size()) throw std::domain_error("GridState: size mismatch");
        GridState s;
        s.rho = rho;
        s.m.resize(rho.size());
        for (std::size_t i = 0; i < rho.size(); ++i) s.m[i] = rho[i] * u[i];
        return s;
    }
};

/// Fields derived from a state.
struct DerivedFields {
    std::vector<double> u, u_x, conv_rho, conv_m, phi_x, G;
};

struct SolverConfig {
    double cfl = 0.4;
    double dt_max = 1e-2;
    double rho_floor_rel = 1e-12;
    double blowup_ux = 1e3;        ///< blowup when min u_x < -blowup_ux
    double rho_cap_factor = 1e6;   ///< blowup when max rho > factor * c
    double tail_fraction_max = 0.1;
    double mean_tolerance = 1e-8;
};

enum class SolverEventKind { Blowup, UnderResolved };

inline const char* to_string(SolverEventKind k) { return k == SolverEventKind::Blowup ? "blowup" : "under_resolved"; }

struct SolverEvent {
    SolverEventKind kind = SolverEventKind::Blowup;
    double t = 0.0;
    std::string reason;
    std::size_t locus = 0;  ///< grid index of min u_x
    double x = 0.0;
    double min_ux = 0.0;
    double rho_at_locus = 0.0;
    double max_rho = 0.0;
    double min_rho = 0.0;
    double tail_fraction = 0.0;
};

struct DiagnosticsRow {
    double t = 0.0;
    double min_ux = 0.0;
    double max_rho = 0.0;
    double min_rho = 0.0;
    double mean_G = 0.0;
    double momentum = 0.0;
    double mass = 0.0;
    double min_G = 0.0;
    double max_G = 0.0;
    double inside_fraction = kNaN;
    double indeterminate_fraction = kNaN;
};

struct RunReport {
    std::vector<DiagnosticsRow> diagnostics;
    std::vector<SolverEvent> events;
    GridState final_state;
    bool reached_T = false;
    std::size_t steps = 0;
};

class CflViolation : public std::runtime_error {
public:
    CflViolation(const std::string& what, double suggested) : std::runtime_error(what), suggested_(suggested) {}
    double suggested_dt() const noexcept { return suggested_; }

private:
    double suggested_;
};

class Solver {
public:
    Solver(const PhysParams& params, std::vector<double> kernel_cells, std::size_t n, SolverConfig cfg = {})
        : params_(params), grid_(Grid::make(n)), cfg_(cfg), fft_(n), kernel_(std::move(kernel_cells)),
          conv_(fft_, kernel_) {
        kernel_l1_ = std::accumulate(kernel_.begin(), kernel_.end(), 0.0) * grid_.dx;
    }

    const Grid& grid() const { return grid_; }
    const PhysParams& params() const { return params_; }
    const SolverConfig& config() const { return cfg_; }
    double kernel_l1() const { return kernel_l1_; }
    const std::vector<double>& kernel() const { return kernel_; }

    double mean(const std::vector<double>& f) const {
        return std::accumulate(f.begin(), f.end(), 0.0) * grid_.dx;
    }

    /// -k phi_x with -phi_xx = rho - c.
    std::vector<double> poisson_force(const std::vector<double>& rho) {
        const double avg = mean(rho);
        if (std::abs(avg - params_.c) > cfg_.mean_tolerance * params_.c)
            throw std::domain_error("poisson_force: mean density differs from c");
        std::vector<double> s(rho.size());
        for (std::size_t i = 0; i < rho.size(); ++i) s[i] = rho[i] - avg;
        auto phi_x = fft_.poisson_gradient(s);
        for (double& v : phi_x) v *= -params_.k;
        return phi_x;
    }

    /// psi*(rho u) - u psi*rho.
    std::vector<double> alignment_force(const std::vector<double>& rho, const std::vector<double>& u) {
        std::vector<double> m(rho.size());
        for (std::size_t i = 0; i < rho.size(); ++i) m[i] = rho[i] * u[i];
        const auto cm = conv_.apply(m);
        const auto cr = conv_.apply(rho);
        std::vector<double> out(rho.size());
        for (std::size_t i = 0; i < rho.size(); ++i) out[i] = cm[i] - u[i] * cr[i];
        return out;
    }

    std::vector<double> velocity(const GridState& s) const {
        const double floor = cfg_.rho_floor_rel * params_.c;
        std::vector<double> u(s.rho.size());
        for (std::size_t i = 0; i < u.size(); ++i) u[i] = s.m[i] / std::max(s.rho[i], floor);
        return u;
    }

    DerivedFields derived(const GridState& s) {
        DerivedFields d;
        d.u = velocity(s);
        d.u_x = fft_.derivative(d.u);
        d.conv_rho = conv_.apply(s.rho);
        d.conv_m = conv_.apply(s.m);
        d.phi_x = fft_.poisson_gradient(centered(s.rho));
        d.G.resize(d.u.size());
        for (std::size_t i = 0; i < d.u.size(); ++i) d.G[i] = d.u_x[i] + d.conv_rho[i];
        return d;
    }

    /// Semi-discrete right-hand side (rho_t, m_t).
    void rhs(const GridState& s, std::vector<double>& drho, std::vector<double>& dm) {
        const std::size_t n = s.rho.size();
        const auto u = velocity(s);
        std::vector<double> flux(n);
        for (std::size_t i = 0; i < n; ++i) flux[i] = s.m[i] * u[i];
        drho = fft_.derivative(s.m, true);
        const auto dflux = fft_.derivative(flux, true);
        const auto phi_x = fft_.poisson_gradient(centered(s.rho));
        const auto cr = conv_.apply(s.rho);
        const auto cm = conv_.apply(s.m);
        std::vector<double> src(n);
        for (std::size_t i = 0; i < n; ++i) {
            drho[i] = -drho[i];
            src[i] = -params_.k * s.rho[i] * phi_x[i] + s.rho[i] * cm[i] - s.m[i] * cr[i];
        }
        dm.resize(n);
        const auto src_f = dealias(src);
        for (std::size_t i = 0; i < n; ++i) dm[i] = -dflux[i] + src_f[i];
    }

    double stable_dt(const GridState& s) const {
        const auto u = velocity(s);
        double umax = 0.0;
        for (double v : u) umax = std::max(umax, std::abs(v));
        const double cfl_dt = umax > 0.0 ? cfg_.cfl * grid_.dx / umax : kInf;
        return std::min(cfl_dt, cfg_.dt_max);
    }

    /// One SSP-RK3 step. Throws CflViolation when dt exceeds the CFL limit.
    GridState step(const GridState& s, double dt) {
        const auto u = velocity(s);
        double umax = 0.0;
        for (double v : u) umax = std::max(umax, std::abs(v));
        if (umax > 0.0 && dt > cfg_.cfl * grid_.dx / umax * (1.0 + 1e-12))
            throw CflViolation("step: dt exceeds the CFL limit", cfg_.cfl * grid_.dx / umax);
        const std::size_t n = s.rho.size();
        std::vector<double> dr, dm;
        rhs(s, dr, dm);
        GridState s1 = s;
        for (std::size_t i = 0; i < n; ++i) {
            s1.rho[i] = s.rho[i] + dt * dr[i];
            s1.m[i] = s.m[i] + dt * dm[i];
        }
        rhs(s1, dr, dm);
        GridState s2 = s;
        for (std::size_t i = 0; i < n; ++i) {
            s2.rho[i] = 0.75 * s.rho[i] + 0.25 * (s1.rho[i] + dt * dr[i]);
            s2.m[i] = 0.75 * s.m[i] + 0.25 * (s1.m[i] + dt * dm[i]);
        }
        rhs(s2, dr, dm);
        GridState out = s;
        for (std::size_t i = 0; i < n; ++i) {
            out.rho[i] = (s.rho[i] + 2.0 * (s2.rho[i] + dt * dr[i])) / 3.0;
            out.m[i] = (s.m[i] + 2.0 * (s2.m[i] + dt * dm[i])) / 3.0;
        }
        out.t = s.t + dt;
        return out;
    }

    /// L2 norm of G_t + (G u)_x - k(rho - c), with G_t taken from the semi-discrete RHS.
    double g_equation_residual(const GridState& s) {
        const std::size_t n = s.rho.size();
        std::vector<double> dr, dm;
        rhs(s, dr, dm);
        const auto d = derived(s);
        std::vector<double> u_t(n), gu(n);
        for (std::size_t i = 0; i < n; ++i) {
            u_t[i] = (dm[i] - d.u[i] * dr[i]) / s.rho[i];
            gu[i] = d.G[i] * d.u[i];
        }
        const auto ux_t = fft_.derivative(u_t);
        const auto conv_rt = conv_.apply(dr);
        const auto gu_x = fft_.derivative(gu);
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double r = ux_t[i] + conv_rt[i] + gu_x[i] - params_.k * (s.rho[i] - params_.c);
            acc += r * r;
        }
        return std::sqrt(acc * grid_.dx);
    }

    DiagnosticsRow diagnose(const GridState& s, const Region* census) {
        const auto d = derived(s);
        DiagnosticsRow row;
        row.t = s.t;
        row.min_ux = *std::min_element(d.u_x.begin(), d.u_x.end());
        row.max_rho = *std::max_element(s.rho.begin(), s.rho.end());
        row.min_rho = *std::min_element(s.rho.begin(), s.rho.end());
        row.mean_G = mean(d.G);
        row.momentum = mean(s.m);
        row.mass = mean(s.rho);
        row.min_G = *std::min_element(d.G.begin(), d.G.end());
        row.max_G = *std::max_element(d.G.begin(), d.G.end());
        if (census) {
            std::size_t inside = 0, indet = 0;
            for (std::size_t i = 0; i < s.rho.size(); ++i) {
                const auto v = census->membership(d.G[i], s.rho[i], Plane::GRho);
                inside += v.label == Verdict::Inside;
                indet += v.label == Verdict::Indeterminate;
            }
            row.inside_fraction = static_cast<double>(inside) / static_cast<double>(s.rho.size());
            row.indeterminate_fraction = static_cast<double>(indet) / static_cast<double>(s.rho.size());
        }
        return row;
    }

    /// Checks the blowup and resolution monitors; returns an event when one trips.
    std::optional<SolverEvent> monitor(const GridState& s) {
        const auto u = velocity(s);
        const auto u_x = fft_.derivative(u);
        SolverEvent ev;
        ev.t = s.t;
        const auto it = std::min_element(u_x.begin(), u_x.end());
        ev.locus = static_cast<std::size_t>(it - u_x.begin());
        ev.x = grid_.x[ev.locus];
        ev.min_ux = *it;
        ev.rho_at_locus = s.rho[ev.locus];
        ev.max_rho = *std::max_element(s.rho.begin(), s.rho.end());
        ev.min_rho = *std::min_element(s.rho.begin(), s.rho.end());
        bool finite = std::isfinite(ev.min_ux) && std::isfinite(ev.max_rho);
        for (double v : s.m) finite = finite && std::isfinite(v);
        if (!finite) {
            ev.kind = SolverEventKind::UnderResolved;
            ev.reason = "non-finite field";
            return ev;
        }
        if (ev.min_ux < -cfg_.blowup_ux) {
            ev.kind = SolverEventKind::Blowup;
            ev.reason = "min u_x below threshold";
            return ev;
        }
        if (ev.max_rho > cfg_.rho_cap_factor * params_.c) {
            ev.kind = SolverEventKind::Blowup;
            ev.reason = "max rho above cap";
            return ev;
        }
        ev.tail_fraction = fft_.tail_energy_fraction(u_x);
        if (ev.tail_fraction > cfg_.tail_fraction_max) {
            ev.kind = SolverEventKind::UnderResolved;
            ev.reason = "spectral tail energy of u_x above limit";
            return ev;
        }
        return std::nullopt;
    }

    /// Advances to T or to the first event, logging diagnostics every output_interval.
    RunReport run(const GridState& initial, double T, double output_interval, const Region* census = nullptr) {
        if (std::abs(mean(initial.rho) - params_.c) > cfg_.mean_tolerance * params_.c)
            throw std::domain_error("run: mean density differs from c");
        RunReport rep;
        GridState s = initial;
        rep.diagnostics.push_back(diagnose(s, census));
        double next_out = s.t + output_interval;
        while (s.t < T) {
            if (auto ev = monitor(s)) {
                rep.events.push_back(*ev);
                if (rep.diagnostics.back().t != s.t) rep.diagnostics.push_back(diagnose(s, census));
                rep.final_state = s;
                return rep;
            }
            double dt = stable_dt(s);
            dt = std::min({dt, next_out - s.t, T - s.t});
            if (dt <= 0.0) dt = std::min(stable_dt(s), T - s.t);
            s = step(s, dt);
            ++rep.steps;
            if (s.t >= next_out - 1e-12 * std::max(1.0, T) || s.t >= T) {
                rep.diagnostics.push_back(diagnose(s, census));
                next_out += output_interval;
            }
        }
        if (auto ev = monitor(s)) rep.events.push_back(*ev);
        rep.reached_T = rep.events.empty();
        rep.final_state = s;
        return rep;
    }

    Spectral& fft() { return fft_; }
    Convolver& convolver() { return conv_; }

private:
    std::vector<double> centered(const std::vector<double>& rho) const {
        std::vector<double> s(rho.size());
        for (std::size_t i = 0; i < rho.size(); ++i) s[i] = rho[i] - params_.c;
        return s;
    }

    std::vector<double> dealias(const std::vector<double>& f) {
        auto modes = fft_.forward(f);
        for (std::size_t j = 0; j < modes.size(); ++j)
            if (3 * j > grid_.N) modes[j] = 0.0;
        return fft_.backward(modes);
    }

    PhysParams params_;
    Grid grid_;
    SolverConfig cfg_;
    Spectral fft_;
    std::vector<double> kernel_;
    Convolver conv_;
    double kernel_l1_ = 0.0;
};

/// Built-in initial family: rho = c + rho_amp cos(2 pi x), u = u_mean - u_amp sin(2 pi x)/(2 pi).
/// min u_x = -u_amp at x = 0.
inline GridState cosine_initial(const Grid& grid, double c, double rho_amp, double u_amp, double u_mean = 0.0) {
    std::vector<double> rho(grid.N), u(grid.N);
    const double two_pi = 2.0 * std::numbers::pi;
    for (std::size_t i = 0; i < grid.N; ++i) {
        rho[i] = c + rho_amp * std::cos(two_pi * grid.x[i]);
        u[i] = u_mean - u_amp * std::sin(two_pi * grid.x[i]) / two_pi;
    }
    return GridState::from_primitive(rho, u);
}

}  // namespace epa
