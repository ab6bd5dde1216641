#pragma once

// CSV and JSON serialization of regions, reports and fields.

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "dynamics.hpp"
#include "rearrange.hpp"
#include "regions.hpp"
#include "solver.hpp"

namespace epa::io {

using json = nlohmann::ordered_json;

/// Non-finite numbers become null.
inline json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

inline std::string fmt(double v) {
    if (!std::isfinite(v)) return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

inline json to_json(const RhoZeroRay& ray) {
    json j;
    switch (ray.kind) {
        case RhoZeroRay::Kind::All: j["kind"] = "all"; break;
        case RhoZeroRay::Kind::Above: j["kind"] = "G_above"; break;
        case RhoZeroRay::Kind::Below: j["kind"] = "G_below"; break;
    }
    j["threshold"] = ray.kind == RhoZeroRay::Kind::All ? json(nullptr) : num(ray.threshold);
    return j;
}

inline json scaffold_json(const Region& r) {
    const auto& s = r.scaffold;
    json j;
    j["kind"] = to_string(s.kind);
    j["p1"] = num(s.p1);
    j["p2"] = num(s.p2);
    j["p3"] = num(s.p3);
    j["t1"] = num(s.t1);
    j["t2"] = num(s.t2);
    j["t3"] = num(s.t3);
    j["q_star"] = num(s.q_star);
    j["beta_min"] = num(s.band.beta_min);
    j["beta_max"] = num(s.band.beta_max);
    j["admissibility"] = {{"holds", s.admissibility.holds}, {"margin", num(s.admissibility.margin)}};
    j["regime"] = to_string(s.regime);
    j["closure"] = r.closure == Closure::Bounded ? "bounded" : "unbounded_with_cap";
    j["q_floor"] = num(s.q_floor);
    j["q_cap"] = num(r.q_cap);
    j["rho_cap"] = num(r.rho_cap);
    j["epsilon_boundary"] = num(r.epsilon());
    j["rho_zero_ray"] = r.rho_zero_ray ? to_json(*r.rho_zero_ray) : json(nullptr);
    if (s.bounds) j["bounds"] = {{"rho_min", s.bounds->rho_min}, {"rho_max", s.bounds->rho_max}};
    return j;
}

/// Boundary CSV: segment_label,t,p,q (PQ) or segment_label,t,G,rho (GRho).
inline void write_boundary_csv(const Region& r, std::ostream& os) {
    os << (r.plane == Plane::PQ ? "segment_label,t,p,q\n" : "segment_label,t,G,rho\n");
    for (const auto& seg : r.boundary)
        for (const auto& s : seg.samples) os << seg.label << ',' << fmt(s.t) << ',' << fmt(s.p) << ',' << fmt(s.q) << '\n';
}

inline json fuzz_json(const FuzzReport& r, bool include_wall_time = true) {
    json j;
    j["region"] = r.region;
    j["mode"] = r.mode;
    j["n_trials"] = r.n_trials;
    j["n_exits"] = r.n_exits;
    if (r.mode == "supercritical") {
        j["n_success"] = r.n_success;
        j["n_hit_axis"] = r.n_axis;
        j["n_vacuum_blowup"] = r.n_riccati;
    }
    json v = json::array();
    for (const auto& x : r.violations)
        v.push_back({{"seed", x.seed}, {"start", {num(x.start.p), num(x.start.q)}}, {"t_exit", num(x.t_exit)},
                     {"reason", x.reason}});
    j["violations"] = v;
    if (include_wall_time) j["wall_time"] = r.wall_time;
    return j;
}

inline json bounds_json(const RearrangedKernel& k, const ConvolutionBounds& b) {
    json j;
    j["l1_norm"] = num(k.l1_norm());
    j["gamma"] = num(k.gamma());
    j["gamma1"] = num(b.gamma1);
    j["gamma2"] = num(b.gamma2);
    j["lower"] = num(b.lower);
    j["upper"] = num(b.upper);
    j["beta_min"] = num(b.lower);
    j["beta_max"] = num(b.upper);
    return j;
}

inline void write_diagnostics_csv(const std::vector<DiagnosticsRow>& rows, std::ostream& os) {
    os << "t,min_ux,max_rho,min_rho,meanG,momentum,inside_fraction\n";
    for (const auto& r : rows)
        os << fmt(r.t) << ',' << fmt(r.min_ux) << ',' << fmt(r.max_rho) << ',' << fmt(r.min_rho) << ','
           << fmt(r.mean_G) << ',' << fmt(r.momentum) << ',' << fmt(r.inside_fraction) << '\n';
}

inline json events_json(const std::vector<SolverEvent>& events) {
    json a = json::array();
    for (const auto& e : events)
        a.push_back({{"kind", to_string(e.kind)},
                     {"t", num(e.t)},
                     {"reason", e.reason},
                     {"x", num(e.x)},
                     {"min_ux", num(e.min_ux)},
                     {"rho_at_locus", num(e.rho_at_locus)},
                     {"max_rho", num(e.max_rho)},
                     {"min_rho", num(e.min_rho)},
                     {"tail_fraction", num(e.tail_fraction)}});
    return a;
}

/// Trajectory CSV with an events trailer.
inline void write_trajectory_csv(const Trajectory& tr, std::ostream& os) {
    os << (tr.plane == Plane::PQ ? "t,p,q\n" : "t,G,rho\n");
    for (std::size_t i = 0; i < tr.times.size(); ++i)
        os << fmt(tr.times[i]) << ',' << fmt(tr.states[i].p) << ',' << fmt(tr.states[i].q) << '\n';
    for (const auto& e : tr.events)
        os << "# event," << to_string(e.kind) << ',' << fmt(e.t) << ',' << fmt(e.a) << ',' << fmt(e.b) << '\n';
}

/// Reads numeric CSV columns by header name. Lines starting with '#' are skipped.
inline std::vector<std::vector<double>> read_csv_columns(const std::string& path,
                                                         const std::vector<std::string>& names) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::string line;
    std::vector<std::string> header;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
            while (!cell.empty() && cell.front() == ' ') cell.erase(cell.begin());
            header.push_back(cell);
        }
        break;
    }
    std::vector<std::size_t> idx;
    for (const auto& n : names) {
        const auto it = std::find(header.begin(), header.end(), n);
        if (it == header.end()) throw std::runtime_error(path + ": missing column '" + n + "'");
        idx.push_back(static_cast<std::size_t>(it - header.begin()));
    }
    std::vector<std::vector<double>> cols(names.size());
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        for (std::size_t c = 0; c < idx.size(); ++c) {
            if (idx[c] >= cells.size())
                throw std::runtime_error(path + ":" + std::to_string(lineno) + ": too few columns");
            try {
                cols[c].push_back(std::stod(cells[idx[c]]));
            } catch (const std::exception&) {
                throw std::runtime_error(path + ":" + std::to_string(lineno) + ": not a number");
            }
        }
    }
    return cols;
}

inline void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << text;
}

inline void write_json(const std::string& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

}  // namespace epa::io
