#pragma once

// Command-line front end. Each command reads one JSON config, writes its reports
// into --out and echoes the resolved config there as resolved_config.json.
//
// Exit codes: 0 ok, 1 config error, 2 admissibility violation,
// 3 data constraint violation, 4 fuzz violation.

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "config.hpp"
#include "dynamics.hpp"
#include "io.hpp"
#include "rearrange.hpp"
#include "regions.hpp"
#include "solver.hpp"

namespace epa::cli {

enum ExitCode : int { Ok = 0, ConfigFailure = 1, Inadmissible = 2, DataViolation = 3, FuzzFailure = 4 };

struct Options {
    std::string config;
    std::string out = "out";
    std::optional<std::uint64_t> seed;
    std::string plane;  ///< empty = both planes
    bool literal_paper_boundary = false;
    std::string data;    ///< classify: field CSV override
    std::string kernel;  ///< rearrange: kernel CSV override
    bool oracle = false;
};

/// Thrown for violated data constraints (mean mismatch, bad field files).
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

inline std::filesystem::path out_file(const Options& o, const std::string& name) {
    return std::filesystem::path(o.out) / name;
}

inline RunConfig load(const Options& o) {
    RunConfig cfg = o.config.empty() ? parse_config(io::json::object()) : load_config(o.config);
    if (o.seed) cfg.fuzz.seed = *o.seed;
    if (o.literal_paper_boundary) cfg.region.literal_paper_boundary = true;
    if (!o.data.empty()) cfg.classify_file = std::filesystem::absolute(o.data).string();
    if (!o.kernel.empty()) {
        if (cfg.influence.kind != "tabulated" && cfg.influence.kind != "weakly_singular") cfg.influence.kind = "tabulated";
        cfg.influence.kernel_file = std::filesystem::absolute(o.kernel).string();
    }
    std::filesystem::create_directories(o.out);
    io::write_json(out_file(o, "resolved_config.json").string(), to_json(cfg));
    return cfg;
}

inline bool kernel_is_bounded(const RunConfig& cfg) {
    return cfg.influence.kind == "bounded" || cfg.influence.kind == "constant";
}

inline Region build_one(const RunConfig& cfg, const std::string& which) {
    const auto& P = cfg.params;
    const auto& opt = cfg.region;
    if (which == "sigma_L") return build_sigma_L(P, make_influence(cfg), cfg.resolved_bounds(), opt);
    const AlignmentBand band = make_band(cfg);
    if (which == "subcritical")
        return kernel_is_bounded(cfg) ? build_subcritical(P, band, opt)
                                      : build_sigma_L(P, make_influence(cfg), cfg.resolved_bounds(), opt);
    if (which == "supercritical") return build_supercritical(P, band, opt);
    if (which == "sigma1") return build_sigma1(P, band, opt);
    if (which == "sigma2") return build_sigma2(P, band, opt);
    if (which == "sigma3") return build_sigma3(P, band, opt);
    if (which == "delta1") return build_delta1(P, band, opt);
    if (which == "delta2") return build_delta2(P, band, opt);
    throw ConfigError("region.select: unknown region '" + which + "'");
}

/// Regions named by region.select; "auto" means the subcritical/supercritical pair.
inline std::vector<Region> build_selected(const RunConfig& cfg) {
    std::vector<Region> out;
    if (cfg.region_select == "auto") {
        out.push_back(build_one(cfg, "subcritical"));
        out.push_back(build_one(cfg, "supercritical"));
    } else {
        out.push_back(build_one(cfg, cfg.region_select));
    }
    return out;
}

inline std::string file_stem(const Region& r) {
    std::string s = r.name();
    for (auto& ch : s) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    return s;
}

inline std::pair<std::vector<double>, std::vector<double>> read_field(const std::string& path) {
    try {
        auto cols = io::read_csv_columns(path, {"rho", "u"});
        return {std::move(cols[0]), std::move(cols[1])};
    } catch (const std::exception& e) {
        throw DataError(e.what());
    }
}

}  // namespace detail

inline int cmd_region(const Options& o, std::ostream& log) {
    const RunConfig cfg = detail::load(o);
    io::json summary = io::json::array();
    for (const Region& r : detail::build_selected(cfg)) {
        const std::string stem = detail::file_stem(r);
        io::write_json(detail::out_file(o, stem + "_scaffold.json").string(), io::scaffold_json(r));
        if (o.plane.empty() || o.plane == "pq") {
            std::ostringstream os;
            io::write_boundary_csv(r, os);
            io::write_text(detail::out_file(o, stem + "_boundary_pq.csv").string(), os.str());
        }
        if (o.plane.empty() || o.plane == "grho") {
            std::ostringstream os;
            io::write_boundary_csv(to_grho(r), os);
            io::write_text(detail::out_file(o, stem + "_boundary_grho.csv").string(), os.str());
        }
        summary.push_back({{"region", r.name()}, {"scaffold", stem + "_scaffold.json"}});
        log << r.name() << ": p1=" << r.scaffold.p1 << " q*=" << r.scaffold.q_star
            << " closure=" << (r.closure == Closure::Bounded ? "bounded" : "unbounded") << '\n';
    }
    io::write_json(detail::out_file(o, "regions.json").string(), summary);
    return Ok;
}

inline int cmd_classify(const Options& o, std::ostream& log) {
    const RunConfig cfg = detail::load(o);
    if (cfg.classify_file.empty()) throw ConfigError("classify.file: required (or pass --data)");
    const auto [rho, u] = detail::read_field(cfg.resolve_path(cfg.classify_file));
    const std::size_t n = rho.size();
    if (n < 4 || (n & (n - 1)) != 0) throw DataError("classify: number of grid points must be a power of two >= 4");
    const Region sub = detail::build_one(cfg, "subcritical");
    const Region sup = detail::build_one(cfg, "supercritical");
    const auto kernel = make_kernel_cells(cfg, n);
    FieldClassification fc;
    try {
        fc = classify_field(rho, u, kernel, cfg.params, sub, &sup);
    } catch (const std::domain_error& e) {
        throw DataError(e.what());
    }
    io::json j;
    j["summary"] = to_string(fc.summary);
    j["subcritical_region"] = sub.name();
    j["supercritical_region"] = sup.name();
    j["region"] = fc.region.empty() ? io::json(nullptr) : io::json(fc.region);
    j["n_points"] = n;
    j["n_inside"] = fc.n_inside;
    j["n_outside"] = fc.n_outside;
    j["n_indeterminate"] = fc.n_indeterminate;
    j["n_supercritical"] = fc.n_supercritical;
    if (fc.witness) {
        const auto& w = fc.points[*fc.witness];
        j["witness"] = {{"index", *fc.witness}, {"x", w.x}, {"G", io::num(w.G)}, {"rho", w.rho}};
    } else {
        j["witness"] = nullptr;
    }
    io::write_json(detail::out_file(o, "classification.json").string(), j);

    const bool pq = o.plane == "pq";
    std::ostringstream os;
    os << (pq ? "x,p,q,subcritical,distance,supercritical\n" : "x,G,rho,subcritical,distance,supercritical\n");
    for (const auto& pt : fc.points) {
        const double a = pq ? (pt.rho > 0 ? pt.G / pt.rho : kNaN) : pt.G;
        const double b = pq ? (pt.rho > 0 ? 1.0 / pt.rho : kInf) : pt.rho;
        os << io::fmt(pt.x) << ',' << io::fmt(a) << ',' << io::fmt(b) << ',' << to_string(pt.sub.label) << ','
           << io::fmt(pt.sub.distance_estimate) << ',' << (pt.sup ? to_string(pt.sup->label) : "") << '\n';
    }
    io::write_text(detail::out_file(o, "classification_points.csv").string(), os.str());
    log << "classification: " << to_string(fc.summary) << " (" << fc.n_inside << "/" << n << " inside "
        << sub.name() << ")\n";
    return Ok;
}

inline int cmd_simulate(const Options& o, std::ostream& log) {
    const RunConfig cfg = detail::load(o);
    const auto& s = cfg.solver;
    SolverConfig sc;
    sc.cfl = s.cfl;
    sc.dt_max = s.dt_max;
    sc.blowup_ux = s.blowup_ux;
    sc.rho_cap_factor = s.rho_cap_factor;
    sc.tail_fraction_max = s.tail_fraction_max;

    Solver solver(cfg.params, make_kernel_cells(cfg, s.N), s.N, sc);
    GridState init;
    if (s.initial.family == "cosine") {
        init = cosine_initial(solver.grid(), cfg.params.c, s.initial.rho_amplitude, s.initial.u_amplitude,
                              s.initial.u_mean);
    } else {
        const auto [rho, u] = detail::read_field(cfg.resolve_path(s.initial.file));
        if (rho.size() != s.N) throw DataError("solver.initial.file: row count differs from solver.N");
        init = GridState::from_primitive(rho, u);
    }

    // census against the subcritical region when one can be built
    std::optional<Region> census;
    try {
        census = detail::build_one(cfg, "subcritical");
    } catch (const std::exception& e) {
        log << "no census region: " << e.what() << '\n';
    }

    RunReport rep;
    try {
        rep = solver.run(init, s.T, s.output_interval, census ? &*census : nullptr);
    } catch (const std::domain_error& e) {
        throw DataError(e.what());
    }
    std::ostringstream os;
    io::write_diagnostics_csv(rep.diagnostics, os);
    io::write_text(detail::out_file(o, "diagnostics.csv").string(), os.str());
    io::write_json(detail::out_file(o, "events.json").string(), io::events_json(rep.events));
    io::json summary;
    summary["reached_T"] = rep.reached_T;
    summary["t_final"] = rep.final_state.t;
    summary["steps"] = rep.steps;
    summary["census_region"] = census ? io::json(census->name()) : io::json(nullptr);
    summary["n_events"] = rep.events.size();
    io::write_json(detail::out_file(o, "summary.json").string(), summary);
    log << "simulate: t=" << rep.final_state.t << " steps=" << rep.steps
        << (rep.events.empty() ? "" : std::string(" event=") + to_string(rep.events.front().kind)) << '\n';
    return Ok;
}

inline int cmd_fuzz(const Options& o, std::ostream& log) {
    const RunConfig cfg = detail::load(o);
    int code = Ok;
    for (const Region& r : detail::build_selected(cfg)) {
        FuzzOptions fo;
        fo.n_trials = cfg.fuzz.n_trials;
        fo.seed = cfg.fuzz.seed;
        fo.T = cfg.fuzz.T;
        fo.dt = cfg.fuzz.dt;
        fo.mean_switch = cfg.fuzz.mean_switch;
        fo.threads = cfg.fuzz.threads;
        fo.mode = cfg.fuzz.mode == "invariance"      ? FuzzMode::Invariance
                  : cfg.fuzz.mode == "supercritical" ? FuzzMode::Supercritical
                                                     : FuzzMode::Auto;
        const FuzzReport rep = fuzz_invariance(r, cfg.params, fo);
        io::write_json(detail::out_file(o, "fuzz_" + detail::file_stem(r) + ".json").string(), io::fuzz_json(rep));
        log << r.name() << " [" << rep.mode << "]: " << rep.n_exits << " failures in " << rep.n_trials
            << " trials\n";
        if (rep.n_exits > 0) code = FuzzFailure;
    }
    return code;
}

inline int cmd_rearrange(const Options& o, std::ostream& log) {
    const RunConfig cfg = detail::load(o);
    const BoundsConfig bounds = cfg.resolved_bounds();
    std::vector<double> cells;
    try {
        cells = (cfg.influence.kind == "tabulated" || !cfg.influence.kernel_file.empty())
                    ? make_influence(cfg).samples
                    : make_kernel_cells(cfg, cfg.solver.N);
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw DataError(e.what());
    }
    const RearrangedKernel k(cells);
    const ConvolutionBounds b = improved_bounds(k, bounds, cfg.params.c);
    io::json j = io::bounds_json(k, b);
    j["n_cells"] = cells.size();
    j["rho_min"] = bounds.rho_min;
    j["rho_max"] = bounds.rho_max;
    j["regime"] = to_string(classify_band(cfg.params, band_from_bounds(b)));
    if (o.oracle) {
        const auto lo = bound_oracle(cells, bounds, cfg.params.c, OracleTarget::Min);
        const auto hi = bound_oracle(cells, bounds, cfg.params.c, OracleTarget::Max);
        j["oracle"] = {{"lower", lo.value},
                       {"upper", hi.value},
                       {"lower_gap", lo.value - b.lower},
                       {"upper_gap", b.upper - hi.value},
                       {"dx", 1.0 / static_cast<double>(cells.size())}};
    }
    io::write_json(detail::out_file(o, "bounds.json").string(), j);
    log << "bounds: [" << b.lower << ", " << b.upper << "]\n";
    return Ok;
}

/// Parses argv and runs one command. Never throws.
inline int run(int argc, const char* const* argv, std::ostream& log = std::cout, std::ostream& err = std::cerr) {
    CLI::App app{"Critical thresholds for Euler-Poisson-alignment systems"};
    app.require_subcommand(1);
    Options o;
    auto common = [&](CLI::App* sub) {
        sub->add_option("--config", o.config, "JSON config file");
        sub->add_option("--out", o.out, "output directory")->capture_default_str();
        sub->add_option("--seed", o.seed, "fuzz seed override");
        sub->add_option("--plane", o.plane, "restrict plane of exported curves")
            ->check(CLI::IsMember({"pq", "grho"}));
        sub->add_flag("--literal-paper-boundary", o.literal_paper_boundary,
                      "strong weakly-singular region floored at q = 0 with a vertical piece");
    };
    auto* region = app.add_subcommand("region", "build regions and export boundaries");
    auto* classify = app.add_subcommand("classify", "classify initial data");
    auto* simulate = app.add_subcommand("simulate", "run the PDE solver");
    auto* fuzz = app.add_subcommand("fuzz", "randomized invariance checks");
    auto* rearrange = app.add_subcommand("rearrange", "convolution bounds from the kernel rearrangement");
    for (auto* s : {region, classify, simulate, fuzz, rearrange}) common(s);
    classify->add_option("--data", o.data, "CSV with rho,u columns");
    rearrange->add_option("--kernel", o.kernel, "CSV with a psi column");
    rearrange->add_flag("--oracle", o.oracle, "cross-check with the greedy LP oracle");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e, log, err);
        return rc == 0 ? Ok : ConfigFailure;
    }

    try {
        if (*region) return cmd_region(o, log);
        if (*classify) return cmd_classify(o, log);
        if (*simulate) return cmd_simulate(o, log);
        if (*fuzz) return cmd_fuzz(o, log);
        if (*rearrange) return cmd_rearrange(o, log);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return ConfigFailure;
    } catch (const AdmissibilityViolated& e) {
        err << "admissibility violated: " << e.what() << " (margin = " << e.margin() << ")\n";
        return Inadmissible;
    } catch (const RegimeMismatch& e) {
        err << "config error: " << e.what() << '\n';
        return ConfigFailure;
    } catch (const DataError& e) {
        err << "data error: " << e.what() << '\n';
        return DataViolation;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return DataViolation;
    }
    return ConfigFailure;
}

}  // namespace epa::cli
