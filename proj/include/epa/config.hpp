#pragma once

// Run configuration: a single JSON document, defaults filled in on load.

#include <nlohmann/json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "io.hpp"
#include "kernels.hpp"
#include "params.hpp"
#include "regions.hpp"

namespace epa {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct InfluenceSpec {
    std::string kind = "bounded";  ///< bounded | constant | weakly_singular | tabulated
    double psi_min = 0.25, psi_max = 0.75;
    double psi = 0.5;
    double l1_norm = 2.0, gamma = 0.95;
    std::string kernel_file;  ///< CSV with a "psi" column of cell averages
};

struct InitialSpec {
    std::string family = "cosine";  ///< cosine | table
    double rho_amplitude = 0.05;
    double u_amplitude = 0.0;
    double u_mean = 0.0;
    std::string file;  ///< CSV with rho,u columns (family = table)
};

struct SolverSpec {
    std::size_t N = 256;
    double cfl = 0.4;
    double dt_max = 1e-2;
    double T = kNaN;                ///< default 50 / lambda
    double output_interval = kNaN;  ///< default T / 50
    double blowup_ux = 1e3;
    double rho_cap_factor = 1e6;
    double tail_fraction_max = 0.1;
    InitialSpec initial;
};

struct FuzzSpec {
    std::size_t n_trials = 1000;
    std::uint64_t seed = 1;
    double T = kNaN, dt = kNaN, mean_switch = kNaN;
    unsigned threads = 0;
    std::string mode = "auto";
};

struct RunConfig {
    PhysParams params{0.5, 1.0};
    InfluenceSpec influence;
    std::optional<BoundsConfig> bounds;
    std::string region_select = "auto";
    RegionOptions region;
    SolverSpec solver;
    FuzzSpec fuzz;
    std::string classify_file;
    std::filesystem::path base_dir;

    BoundsConfig resolved_bounds() const { return bounds.value_or(BoundsConfig::standard(params.c)); }

    std::string resolve_path(const std::string& p) const {
        if (p.empty()) return p;
        const std::filesystem::path path(p);
        return path.is_absolute() ? p : (base_dir / path).string();
    }
};

namespace detail {

inline const io::json& field(const io::json& obj, const char* name, const std::string& where) {
    if (!obj.contains(name)) throw ConfigError(where + "." + name + ": missing");
    return obj.at(name);
}

template <class T>
void read_opt(const io::json& obj, const char* name, T& out, const std::string& where) {
    if (!obj.contains(name) || obj.at(name).is_null()) return;
    try {
        out = obj.at(name).get<T>();
    } catch (const std::exception& e) {
        throw ConfigError(where + "." + name + ": " + e.what());
    }
}

inline void require(bool ok, const std::string& what) {
    if (!ok) throw ConfigError(what);
}

}  // namespace detail

inline RunConfig parse_config(const io::json& j, const std::filesystem::path& base_dir = {}) {
    using detail::read_opt;
    using detail::require;
    RunConfig cfg;
    cfg.base_dir = base_dir;
    require(j.is_object(), "config: top level must be an object");
    for (const auto& [key, _] : j.items())
        require(key == "params" || key == "influence" || key == "bounds" || key == "region" || key == "solver" ||
                    key == "fuzz" || key == "classify",
                "config: unknown key '" + key + "'");

    if (j.contains("params")) {
        const auto& p = j.at("params");
        double k = 0.5, c = 1.0;
        read_opt(p, "k", k, "params");
        read_opt(p, "c", c, "params");
        if (p.contains("lambda")) {
            // lambda = 2 sqrt(k/c) determines k when given
            double lambda = 0.0;
            read_opt(p, "lambda", lambda, "params");
            require(lambda > 0.0, "params.lambda: must be positive");
            k = 0.25 * lambda * lambda * c;
        }
        require(k > 0.0 && std::isfinite(k), "params.k: must be positive");
        require(c > 0.0 && std::isfinite(c), "params.c: must be positive");
        cfg.params = PhysParams(k, c);
    }

    if (j.contains("influence")) {
        const auto& f = j.at("influence");
        auto& s = cfg.influence;
        read_opt(f, "kind", s.kind, "influence");
        read_opt(f, "psi_min", s.psi_min, "influence");
        read_opt(f, "psi_max", s.psi_max, "influence");
        read_opt(f, "psi", s.psi, "influence");
        read_opt(f, "l1_norm", s.l1_norm, "influence");
        read_opt(f, "gamma", s.gamma, "influence");
        read_opt(f, "kernel_file", s.kernel_file, "influence");
        require(s.kind == "bounded" || s.kind == "constant" || s.kind == "weakly_singular" || s.kind == "tabulated",
                "influence.kind: expected bounded | constant | weakly_singular | tabulated");
        if (s.kind == "bounded")
            require(s.psi_min >= 0.0 && s.psi_max >= s.psi_min, "influence: need 0 <= psi_min <= psi_max");
        if (s.kind == "constant") require(s.psi >= 0.0, "influence.psi: must be >= 0");
        if (s.kind == "weakly_singular")
            require(s.gamma >= 0.0 && 2.0 * s.gamma <= s.l1_norm * (1.0 + 1e-14),
                    "influence: need 0 <= 2 gamma <= l1_norm");
        if (s.kind == "tabulated") require(!s.kernel_file.empty(), "influence.kernel_file: required for tabulated");
    }

    if (j.contains("bounds")) {
        BoundsConfig b = BoundsConfig::standard(cfg.params.c);
        read_opt(j.at("bounds"), "rho_min", b.rho_min, "bounds");
        read_opt(j.at("bounds"), "rho_max", b.rho_max, "bounds");
        try {
            b.validate(cfg.params.c);
        } catch (const std::exception& e) {
            throw ConfigError(std::string("bounds: ") + e.what());
        }
        cfg.bounds = b;
    }

    if (j.contains("region")) {
        const auto& r = j.at("region");
        read_opt(r, "select", cfg.region_select, "region");
        read_opt(r, "n_samples", cfg.region.n_samples, "region");
        read_opt(r, "q_cap_factor", cfg.region.q_cap_factor, "region");
        read_opt(r, "rho_cap_factor", cfg.region.rho_cap_factor, "region");
        read_opt(r, "eps_rel", cfg.region.eps_rel, "region");
        read_opt(r, "literal_paper_boundary", cfg.region.literal_paper_boundary, "region");
        static const std::vector<std::string> allowed{"auto",   "subcritical", "supercritical", "sigma1",
                                                      "sigma2", "sigma3",      "delta1",        "delta2",
                                                      "sigma_L"};
        require(std::find(allowed.begin(), allowed.end(), cfg.region_select) != allowed.end(),
                "region.select: unknown region '" + cfg.region_select + "'");
        require(cfg.region.n_samples >= 2, "region.n_samples: must be >= 2");
    }

    if (j.contains("solver")) {
        const auto& s = j.at("solver");
        auto& o = cfg.solver;
        read_opt(s, "N", o.N, "solver");
        read_opt(s, "cfl", o.cfl, "solver");
        read_opt(s, "dt_max", o.dt_max, "solver");
        read_opt(s, "T", o.T, "solver");
        read_opt(s, "output_interval", o.output_interval, "solver");
        read_opt(s, "blowup_ux", o.blowup_ux, "solver");
        read_opt(s, "rho_cap_factor", o.rho_cap_factor, "solver");
        read_opt(s, "tail_fraction_max", o.tail_fraction_max, "solver");
        require(o.N >= 16 && (o.N & (o.N - 1)) == 0, "solver.N: must be a power of two >= 16");
        require(o.cfl > 0.0, "solver.cfl: must be positive");
        if (s.contains("initial")) {
            const auto& i = s.at("initial");
            read_opt(i, "family", o.initial.family, "solver.initial");
            read_opt(i, "rho_amplitude", o.initial.rho_amplitude, "solver.initial");
            read_opt(i, "u_amplitude", o.initial.u_amplitude, "solver.initial");
            read_opt(i, "u_mean", o.initial.u_mean, "solver.initial");
            read_opt(i, "file", o.initial.file, "solver.initial");
            require(o.initial.family == "cosine" || o.initial.family == "table",
                    "solver.initial.family: expected cosine | table");
            if (o.initial.family == "table") require(!o.initial.file.empty(), "solver.initial.file: required");
        }
    }

    if (j.contains("fuzz")) {
        const auto& f = j.at("fuzz");
        read_opt(f, "n_trials", cfg.fuzz.n_trials, "fuzz");
        read_opt(f, "seed", cfg.fuzz.seed, "fuzz");
        read_opt(f, "T", cfg.fuzz.T, "fuzz");
        read_opt(f, "dt", cfg.fuzz.dt, "fuzz");
        read_opt(f, "mean_switch", cfg.fuzz.mean_switch, "fuzz");
        read_opt(f, "threads", cfg.fuzz.threads, "fuzz");
        read_opt(f, "mode", cfg.fuzz.mode, "fuzz");
        require(cfg.fuzz.mode == "auto" || cfg.fuzz.mode == "invariance" || cfg.fuzz.mode == "supercritical",
                "fuzz.mode: expected auto | invariance | supercritical");
    }

    if (j.contains("classify")) read_opt(j.at("classify"), "file", cfg.classify_file, "classify");

    // defaults that depend on other fields
    if (!std::isfinite(cfg.solver.T)) cfg.solver.T = 50.0 / cfg.params.lambda();
    if (!std::isfinite(cfg.solver.output_interval)) cfg.solver.output_interval = cfg.solver.T / 50.0;
    if (!std::isfinite(cfg.fuzz.T)) cfg.fuzz.T = 50.0 / cfg.params.lambda();
    if (!std::isfinite(cfg.fuzz.mean_switch))
        cfg.fuzz.mean_switch = (2.0 * std::numbers::pi / cfg.params.lambda()) / 8.0;
    return cfg;
}

/// Loads a config file. Syntax errors report the line number.
inline RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();
    io::json j;
    try {
        j = io::json::parse(text);
    } catch (const io::json::parse_error& e) {
        const std::size_t line = 1 + static_cast<std::size_t>(std::count(
                                         text.begin(), text.begin() + std::min(e.byte, text.size()), '\n'));
        throw ConfigError(path + ":" + std::to_string(line) + ": " + e.what());
    }
    return parse_config(j, std::filesystem::path(path).parent_path());
}

inline io::json to_json(const RunConfig& c) {
    using io::num;
    io::json j;
    j["params"] = {{"k", c.params.k}, {"c", c.params.c}, {"lambda", c.params.lambda()}};
    io::json inf;
    inf["kind"] = c.influence.kind;
    if (c.influence.kind == "bounded") {
        inf["psi_min"] = c.influence.psi_min;
        inf["psi_max"] = c.influence.psi_max;
    } else if (c.influence.kind == "constant") {
        inf["psi"] = c.influence.psi;
    } else if (c.influence.kind == "weakly_singular") {
        inf["l1_norm"] = c.influence.l1_norm;
        inf["gamma"] = c.influence.gamma;
    }
    inf["kernel_file"] = c.influence.kernel_file.empty() ? io::json(nullptr) : io::json(c.influence.kernel_file);
    j["influence"] = inf;
    const auto b = c.resolved_bounds();
    j["bounds"] = {{"rho_min", b.rho_min}, {"rho_max", b.rho_max}};
    j["region"] = {{"select", c.region_select},
                   {"n_samples", c.region.n_samples},
                   {"q_cap_factor", c.region.q_cap_factor},
                   {"rho_cap_factor", c.region.rho_cap_factor},
                   {"eps_rel", c.region.eps_rel},
                   {"literal_paper_boundary", c.region.literal_paper_boundary}};
    const auto& s = c.solver;
    j["solver"] = {{"N", s.N},
                   {"cfl", s.cfl},
                   {"dt_max", s.dt_max},
                   {"T", num(s.T)},
                   {"output_interval", num(s.output_interval)},
                   {"blowup_ux", s.blowup_ux},
                   {"rho_cap_factor", s.rho_cap_factor},
                   {"tail_fraction_max", s.tail_fraction_max},
                   {"initial",
                    {{"family", s.initial.family},
                     {"rho_amplitude", s.initial.rho_amplitude},
                     {"u_amplitude", s.initial.u_amplitude},
                     {"u_mean", s.initial.u_mean},
                     {"file", s.initial.file.empty() ? io::json(nullptr) : io::json(s.initial.file)}}}};
    j["fuzz"] = {{"n_trials", c.fuzz.n_trials}, {"seed", c.fuzz.seed},       {"T", num(c.fuzz.T)},
                 {"dt", num(c.fuzz.dt)},        {"mean_switch", num(c.fuzz.mean_switch)},
                 {"threads", c.fuzz.threads},   {"mode", c.fuzz.mode}};
    j["classify"] = {{"file", c.classify_file.empty() ? io::json(nullptr) : io::json(c.classify_file)}};
    return j;
}

/// Influence model in the library's terms (tabulated kernels are read from disk).
inline InfluenceModel make_influence(const RunConfig& c) {
    const auto& s = c.influence;
    if (s.kind == "bounded") return InfluenceModel::bounded(s.psi_min, s.psi_max);
    if (s.kind == "constant") return InfluenceModel::constant(s.psi);
    if (s.kind == "weakly_singular" && s.kernel_file.empty()) return InfluenceModel::weakly_singular(s.l1_norm, s.gamma);
    const auto cols = io::read_csv_columns(c.resolve_path(s.kernel_file), {"psi"});
    return InfluenceModel::tabulated(cols[0]);
}

/// Cell averages on an N-cell grid for the solver and classifier.
inline std::vector<double> make_kernel_cells(const RunConfig& c, std::size_t n) {
    const auto& s = c.influence;
    if (s.kind == "bounded") return kernels::raised_cosine(n, s.psi_min, s.psi_max);
    if (s.kind == "constant") return kernels::constant(n, s.psi);
    if (s.kind == "weakly_singular" && s.kernel_file.empty()) {
        const auto co = kernels::inverse_sqrt_for(s.l1_norm, s.gamma);
        return kernels::inverse_sqrt(n, co.a, co.b);
    }
    auto cells = make_influence(c).samples;
    if (cells.size() != n)
        throw ConfigError("influence.kernel_file: has " + std::to_string(cells.size()) + " cells but solver.N = " +
                          std::to_string(n));
    return cells;
}

/// Alignment band: c [psi_min, psi_max] for bounded kernels, rearrangement bounds otherwise.
inline AlignmentBand make_band(const RunConfig& c) {
    const auto& s = c.influence;
    if (s.kind == "bounded" || s.kind == "constant") return band_from_bounded(c.params, make_influence(c));
    return band_for_weakly_singular(make_influence(c), c.resolved_bounds(), c.params.c);
}

}  // namespace epa
