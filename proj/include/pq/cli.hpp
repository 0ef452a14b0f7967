#pragma once

// Subcommands of the `pq` tool. Each one validates the whole config, computes
// every output in memory, and only then hands the files to write_outputs.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "pq/foster.hpp"
#include "pq/io.hpp"
#include "pq/oracle.hpp"
#include "pq/physics_models.hpp"
#include "pq/quantize_bbq.hpp"
#include "pq/quantize_single.hpp"
#include "pq/rational_fit.hpp"

namespace pq::cli {

using io::json;
using io::Node;

struct OutputFile {
    std::string name;
    std::string content;
};

struct RunResult {
    std::vector<OutputFile> files;
    int exit_code = 0;
    std::vector<std::string> messages;  // printed to stderr
};

struct RunContext {
    std::string command;
    std::filesystem::path config_dir;
    unsigned threads = 0;
    io::Provenance provenance;

    std::filesystem::path resolve(const std::string& p) const {
        const std::filesystem::path path(p);
        return path.is_absolute() ? path : config_dir / path;
    }
};

namespace detail {

struct GridSpec {
    double min = 0.0, max = 0.0;
    std::size_t points = 0;
    numeric::Spacing spacing = numeric::Spacing::linear;
};

inline numeric::Spacing parse_spacing(const Node& n) {
    const auto s = n.string();
    if (s == "linear") return numeric::Spacing::linear;
    if (s == "log") return numeric::Spacing::log;
    n.fail("expected \"linear\" or \"log\"");
}

/// {min_key, max_key, points, spacing}; min may be negative for linear grids.
inline GridSpec parse_grid(const Node& n, const char* min_key, const char* max_key,
                           numeric::Spacing default_spacing = numeric::Spacing::linear) {
    GridSpec g;
    g.min = n.at(min_key).number();
    g.max = n.at(max_key).number();
    g.points = static_cast<std::size_t>(n.at("points").integer(2));
    g.spacing = n.has("spacing") ? parse_spacing(n.at("spacing")) : default_spacing;
    if (!(g.max > g.min)) n.at(max_key).fail(std::string("must exceed ") + min_key);
    if (g.spacing == numeric::Spacing::log && !(g.min > 0.0)) n.at(min_key).fail("must be > 0 for log spacing");
    return g;
}

inline std::vector<double> expand(const GridSpec& g) { return numeric::grid(g.min, g.max, g.points, g.spacing); }

inline std::string csv(const std::string& header, const std::vector<std::vector<double>>& rows,
                       const io::Provenance& p) {
    std::string out;
    for (const auto& c : p.csv_comments()) out += "# " + c + "\n";
    out += header + "\n";
    for (const auto& r : rows) {
        for (std::size_t i = 0; i < r.size(); ++i) {
            if (i) out += ',';
            out += format_double(r[i]);
        }
        out += '\n';
    }
    return out;
}

inline std::string json_file(json j, const io::Provenance& p) {
    j["provenance"] = p.to_json();
    return io::dump(j);
}

inline int cells(const Node& root) {
    return root.has("unit_cells") ? static_cast<int>(root.at("unit_cells").integer(1)) : 1;
}

inline RationalModel load_model(const Node& n, const RunContext& ctx) {
    const auto path = ctx.resolve(n.string());
    const auto doc = io::parse_json_text(io::read_file(path), path.string());
    return io::parse_model(Node(doc, path.filename().string()));
}

}  // namespace detail

// ---------------------------------------------------------------------------

inline RunResult run_fbar(const Node& root, const RunContext& ctx) {
    root.allow_only({"material", "geometry", "band", "n_pairs", "unit_cells"});
    const auto material = io::parse_material(root.at("material"));
    const auto geometry = io::parse_geometry(root.at("geometry"));
    const int n_pairs = root.has("n_pairs") ? static_cast<int>(root.at("n_pairs").integer(1)) : 3;
    const int n_cells = detail::cells(root);
    const auto band = root.at("band");
    band.allow_only({"min_hz", "max_hz", "min_over_omega", "max_over_omega", "points", "spacing"});
    const bool relative = band.has("min_over_omega");
    const auto grid = relative ? detail::parse_grid(band, "min_over_omega", "max_over_omega")
                               : detail::parse_grid(band, "min_hz", "max_hz");
    if (!(grid.min > 0.0)) band.at(relative ? "min_over_omega" : "min_hz").fail("must be > 0");
    try {
        material.validate();
        geometry.validate();
    } catch (const ConfigError& e) {
        root.fail(e.what());
    }

    const auto pz = fbar_pole_zero(material, geometry, n_pairs);
    const double omega_1 = pz.front().zero;
    auto omega = detail::expand(grid);
    for (double& w : omega) w = relative ? w * omega_1 : units::hz_to_rad_s(w);
    auto samples = sample_admittance([&](double w) { return fbar_admittance(material, geometry, w); }, omega);
    samples = scale_unit_cells(std::move(samples), n_cells);

    const double k2 = material.k2();
    const double c_g = geometry.gate_capacitance(material);
    json pairs = json::array();
    for (const auto& p : pz)
        pairs.push_back({{"pole_rad_s", p.pole},
                         {"zero_rad_s", p.zero},
                         {"pole_hz", units::rad_s_to_hz(p.pole)},
                         {"zero_hz", units::rad_s_to_hz(p.zero)}});
    json summary = {{"k2", k2},
                    {"v_bar_m_per_s", material.v_bar()},
                    {"c_bar_pa", material.c_bar()},
                    {"c_g_f", c_g},
                    {"unit_cells", n_cells},
                    {"first_zero_closed_form_rad_s", std::numbers::pi * material.v_bar() / geometry.thickness},
                    {"c0_closed_form_f", n_cells * c_g / (1.0 - k2)},
                    {"c1_closed_form_f", k2 > 0.0 ? json(n_cells * 0.5 * c_g * std::pow(std::numbers::pi / 2.0, 2) / k2)
                                                  : json(nullptr)},
                    {"pole_zero_pairs", pairs}};

    RunResult r;
    r.files.push_back({"admittance.csv", admittance_csv(samples, ctx.provenance.csv_comments())});
    r.files.push_back({"pole_zero.json", detail::json_file(summary, ctx.provenance)});
    return r;
}

inline RunResult run_fit(const Node& root, const RunContext& ctx) {
    root.allow_only({"input_csv", "fit", "lossless_tolerance"});
    const auto path = ctx.resolve(root.at("input_csv").string());
    if (!std::filesystem::exists(path)) root.at("input_csv").fail("file '" + path.string() + "' does not exist");
    FitOptions opts;
    if (auto f = root.find("fit")) {
        f->allow_only({"n_poles", "max_iterations", "tolerance", "pole_tolerance", "backtrack_allowance", "weighting",
                       "enforce_lossless", "initial_damping_ratio"});
        if (f->has("n_poles")) opts.n_poles = static_cast<int>(f->at("n_poles").integer(0));
        if (f->has("max_iterations")) opts.max_iterations = static_cast<int>(f->at("max_iterations").integer(0));
        if (f->has("tolerance")) opts.tolerance = f->at("tolerance").positive();
        if (f->has("pole_tolerance")) opts.pole_tolerance = f->at("pole_tolerance").positive();
        if (f->has("backtrack_allowance")) opts.backtrack_allowance = f->at("backtrack_allowance").non_negative();
        if (f->has("initial_damping_ratio")) opts.initial_damping_ratio = f->at("initial_damping_ratio").positive();
        if (f->has("enforce_lossless")) opts.enforce_lossless = f->at("enforce_lossless").boolean();
        if (f->has("weighting")) {
            const auto w = f->at("weighting");
            const auto s = w.string();
            if (s == "uniform") opts.weighting = Weighting::uniform;
            else if (s == "inverse_magnitude") opts.weighting = Weighting::inverse_magnitude;
            else w.fail("expected \"uniform\" or \"inverse_magnitude\"");
        }
        try {
            opts.validate();
        } catch (const ConfigError& e) {
            f->fail(e.what());
        }
    }
    const double lossless_tol = root.has("lossless_tolerance") ? root.at("lossless_tolerance").positive() : 1e-8;
    AdmittanceSamples samples;
    try {
        samples = load_admittance_csv(path, lossless_tol);
    } catch (const ConfigError& e) {
        root.at("input_csv").fail(e.what());
    }

    const auto report = vector_fit(samples, opts);
    json rep = io::to_json(report);
    RunResult r;
    r.files.push_back({"model.json", io::serialize_model_file(report.model, ctx.provenance)});
    if (opts.enforce_lossless) {
        try {
            const auto net = foster_from_model(report.model);
            r.files.push_back({"foster.json", detail::json_file(io::to_json(net), ctx.provenance)});
        } catch (const Error& e) {
            rep["foster"] = std::string("not synthesized: ") + e.what();
        }
    }
    r.files.push_back({"fit_report.json", detail::json_file(rep, ctx.provenance)});
    if (!report.model.converged) {
        r.exit_code = static_cast<int>(Error::Category::numerical);
        r.messages.push_back("fit: residual " + format_double(report.model.residual) + " above tolerance " +
                             format_double(opts.tolerance) + " (converged: false)");
    }
    return r;
}

namespace detail {

/// Single-mode network for `couple`: analytic film, explicit Foster network,
/// or a rational model file; scaled by unit_cells.
struct CoupleNetwork {
    FosterNetwork full;
    FosterNetwork single;
    double c_g = 0.0;  // reference gate capacitance used for sweep columns
};

inline CoupleNetwork couple_network(const Node& root, const RunContext& ctx) {
    const int sources = root.has("material") + root.has("foster") + root.has("admittance_model");
    if (sources != 1) root.fail("give exactly one of material+geometry, foster, or admittance_model");
    CoupleNetwork out;
    if (root.has("material")) {
        const auto material = io::parse_material(root.at("material"));
        const auto geometry = io::parse_geometry(root.at("geometry"));
        const int n_modes = root.has("n_modes") ? static_cast<int>(root.at("n_modes").integer(1)) : 1;
        try {
            material.validate();
            geometry.validate();
        } catch (const ConfigError& e) {
            root.fail(e.what());
        }
        if (!(material.k2() > 0.0)) root.at("material").fail("K^2 = 0 has no Foster mode; use a foster block with c0_f = 0 for a decoupled fixture");
        out.full = fbar_foster(material, geometry, n_modes);
        out.c_g = geometry.gate_capacitance(material);
    } else if (root.has("foster")) {
        out.full = io::parse_foster(root.at("foster"));
        out.c_g = out.full.c0;
    } else {
        out.full = foster_from_model(load_model(root.at("admittance_model"), ctx));
        out.c_g = out.full.c0;
    }
    const int n = cells(root);
    out.full = scale_unit_cells(out.full, static_cast<double>(n));
    out.c_g *= n;
    if (out.full.modes.empty()) root.fail("network has no Foster mode");
    std::size_t index = 0;
    if (root.has("mode_index")) {
        index = static_cast<std::size_t>(root.at("mode_index").integer(0));
        if (index >= out.full.modes.size()) root.at("mode_index").fail("out of range");
    }
    out.single = {out.full.c0, {out.full.modes[index]}};
    return out;
}

inline TransmonParams parse_transmon_single(const Node& n) {
    n.allow_only({"e_j_hz", "e_j_joules", "c_sigma_f", "n_g"});
    TransmonParams t;
    t.e_j = io::parse_e_j(n);
    t.c_sigma = n.at("c_sigma_f").positive();
    t.n_g = n.has("n_g") ? n.at("n_g").number() : 0.0;
    return t;
}

inline BbqTransmon parse_transmon_bbq(const Node& n) {
    n.allow_only({"e_j_hz", "e_j_joules", "c_j_f", "c_s_f"});
    return {io::parse_e_j(n), n.at("c_j_f").positive(), n.at("c_s_f").positive()};
}

}  // namespace detail

inline RunResult run_couple(const Node& root, const RunContext& ctx) {
    root.allow_only({"material", "geometry", "foster", "admittance_model", "n_modes", "unit_cells", "mode_index",
                     "transmon", "sweep"});
    const auto network = detail::couple_network(root, ctx);
    const auto transmon = detail::parse_transmon_single(root.at("transmon"));

    std::vector<double> multipliers;
    std::vector<TransmonParams> sweep_transmons;
    if (auto s = root.find("sweep")) {
        s->allow_only({"c_sigma_f", "e_j_hz", "e_j_joules", "area_multipliers"});
        const double e_j = s->has("e_j_hz") || s->has("e_j_joules") ? io::parse_e_j(*s) : transmon.e_j;
        for (double c : s->at("c_sigma_f").positive_list()) sweep_transmons.push_back({e_j, c, transmon.n_g});
        const auto m = s->at("area_multipliers");
        m.allow_only({"min", "max", "points", "spacing"});
        const auto g = detail::parse_grid(m, "min", "max", numeric::Spacing::log);
        if (!(g.min > 0.0)) m.at("min").fail("must be > 0");
        multipliers = detail::expand(g);
    }

    const auto report = quantize_single_mode(network.single, transmon);
    RunResult r;
    r.files.push_back({"foster.json", detail::json_file(io::to_json(network.full), ctx.provenance)});
    r.files.push_back({"coupling.json", detail::json_file(io::to_json(report), ctx.provenance)});
    if (report.transmon_limit_warning)
        r.messages.push_back("couple: E_J/E_C = " + format_double(report.ej_over_ec) + " is below the transmon-limit warning level");
    if (!multipliers.empty()) {
        const auto rows = sweep_coupling_network(network.single, network.c_g, multipliers, sweep_transmons, ctx.threads);
        std::vector<std::vector<double>> table;
        for (const auto& row : rows) table.push_back({row.c_g, row.c_sigma, row.g, row.omega_phi, row.omega_m});
        r.files.push_back({"sweep.csv", detail::csv("c_g_f,c_sigma_f,g_rad_s,omega_phi_rad_s,omega_m_rad_s", table,
                                                    ctx.provenance)});
    }
    return r;
}

namespace detail {

inline RationalModel bbq_admittance(const Node& root, const RunContext& ctx) {
    const int sources = root.has("foster") + root.has("admittance_model");
    if (sources > 1) root.fail("give at most one of foster or admittance_model");
    RationalModel ym;
    if (root.has("foster")) {
        const auto net = io::parse_foster(root.at("foster"));
        if (!net.has_c0()) root.at("foster").at("c0_f").fail("Y_m needs c0_f > 0");
        ym = network_to_model(net);
    } else if (root.has("admittance_model")) {
        ym = load_model(root.at("admittance_model"), ctx);
        if (!is_lossless(ym)) root.at("admittance_model").fail("model is not lossless");
    }
    return scale_unit_cells(std::move(ym), cells(root));
}

}  // namespace detail

inline RunResult run_bbq(const Node& root, const RunContext& ctx) {
    root.allow_only({"foster", "admittance_model", "unit_cells", "transmon", "kerr_limits", "detuning_sweep"});
    const auto ym = detail::bbq_admittance(root, ctx);
    const auto transmon = detail::parse_transmon_bbq(root.at("transmon"));
    KerrLimits limits;
    if (auto k = root.find("kerr_limits")) {
        k->allow_only({"warn_psi", "error_psi"});
        if (k->has("warn_psi")) limits.warn_psi = k->at("warn_psi").positive();
        if (k->has("error_psi")) limits.error_psi = k->at("error_psi").positive();
    }
    std::vector<double> deltas;
    if (auto s = root.find("detuning_sweep")) {
        s->allow_only({"min_hz", "max_hz", "points"});
        if (ym.poles.empty()) s->fail("a detuning sweep needs an admittance with a phonon mode");
        deltas = detail::expand(detail::parse_grid(*s, "min_hz", "max_hz"));
    }

    const auto report = black_box_quantize(ym, transmon, limits);
    RunResult r;
    r.files.push_back({"bbq.json", detail::json_file(io::to_json(report), ctx.provenance)});
    if (report.expansion_warning) r.messages.push_back("bbq: psi_zp above the warning level of the quartic expansion");
    if (!deltas.empty()) {
        const double omega_m = strongest_phonon_zero(ym);
        std::vector<double> e_j;
        for (double d : deltas) {
            const double w = units::hz_to_rad_s(d);
            if (!(omega_m + w > 0.0)) root.at("detuning_sweep").fail("detuning reaches a non-positive transmon frequency");
            e_j.push_back(e_j_for_detuning(transmon, omega_m, w));
        }
        const auto rows = detuning_sweep(ym, transmon, e_j, ctx.threads, limits);
        std::vector<std::vector<double>> table;
        for (const auto& row : rows)
            table.push_back({row.delta, row.e_j, row.chi_self_transmon, row.chi_self_phonon, row.chi_cross});
        r.files.push_back({"detuning.csv",
                           detail::csv("delta_rad_s,e_j_joules,chi_self_transmonlike,chi_self_phononlike,chi_cross",
                                       table, ctx.provenance)});
    }
    return r;
}

namespace detail {

inline HilbertSpec parse_hilbert(const Node& n) {
    n.allow_only({"charge_cutoff", "fock_cutoffs", "dimension_cap", "dense_limit", "levels"});
    HilbertSpec h;
    if (n.has("charge_cutoff")) h.charge_cutoff = static_cast<int>(n.at("charge_cutoff").integer(5));
    if (n.has("fock_cutoffs")) {
        const auto f = n.at("fock_cutoffs");
        h.fock_cutoffs.clear();
        for (std::size_t i = 0; i < f.array_size(); ++i) h.fock_cutoffs.push_back(static_cast<int>(f.index(i).integer(4)));
        if (h.fock_cutoffs.empty()) f.fail("must not be empty");
    }
    if (n.has("dimension_cap")) h.dimension_cap = static_cast<std::size_t>(n.at("dimension_cap").integer(1));
    if (n.has("dense_limit")) h.dense_limit = static_cast<std::size_t>(n.at("dense_limit").integer(1));
    if (n.has("levels")) h.levels = static_cast<std::size_t>(n.at("levels").integer(2));
    return h;
}

}  // namespace detail

inline RunResult run_oracle(const Node& root, const RunContext& ctx) {
    root.allow_only({"hilbert", "coupling_fixtures", "kerr_fixtures"});
    const HilbertSpec h = root.has("hilbert") ? detail::parse_hilbert(root.at("hilbert")) : HilbertSpec{};

    struct CouplingFixture {
        std::string name;
        FosterNetwork net;
        TransmonParams transmon;
    };
    struct KerrFixture {
        std::string name;
        std::vector<PolaritonMode> modes;
        double e_j = 0.0;
    };
    std::vector<CouplingFixture> couplings;
    std::vector<KerrFixture> kerrs;
    if (auto list = root.find("coupling_fixtures")) {
        for (std::size_t i = 0; i < list->array_size(); ++i) {
            const auto f = list->index(i);
            f.allow_only({"name", "foster", "transmon"});
            CouplingFixture c{f.at("name").string(), io::parse_foster(f.at("foster")),
                              detail::parse_transmon_single(f.at("transmon"))};
            if (c.net.modes.size() != 1) f.at("foster").fail("coupling fixtures need exactly one mode");
            try {
                h.validate_single();
            } catch (const ConfigError& e) {
                f.fail(e.what());
            }
            couplings.push_back(std::move(c));
        }
    }
    if (auto list = root.find("kerr_fixtures")) {
        for (std::size_t i = 0; i < list->array_size(); ++i) {
            const auto f = list->index(i);
            f.allow_only({"name", "e_j_hz", "e_j_joules", "modes", "transmon", "foster"});
            KerrFixture k{f.at("name").string(), {}, 0.0};
            if (f.has("modes")) {
                k.e_j = io::parse_e_j(f);
                const auto modes = f.at("modes");
                for (std::size_t j = 0; j < modes.array_size(); ++j) {
                    const auto m = modes.index(j);
                    m.allow_only({"freq_hz", "psi_zp"});
                    PolaritonMode pm;
                    pm.omega = units::hz_to_rad_s(m.at("freq_hz").positive());
                    pm.psi_zp = m.at("psi_zp").positive();
                    k.modes.push_back(pm);
                }
            } else {
                const auto t = detail::parse_transmon_bbq(f.at("transmon"));
                k.e_j = t.e_j;
                RationalModel ym;
                if (f.has("foster")) ym = network_to_model(io::parse_foster(f.at("foster")));
                k.modes = polariton_modes(dressed_admittance(ym, t));
            }
            if (k.modes.empty() || k.modes.size() > 3) f.fail("kerr fixtures need 1 to 3 modes");
            try {
                h.validate_multimode(k.modes.size());
            } catch (const ConfigError& e) {
                f.fail(e.what());
            }
            kerrs.push_back(std::move(k));
        }
    }
    if (couplings.empty() && kerrs.empty()) root.fail("no fixtures given");

    RunResult r;
    json doc = {{"coupling_fixtures", json::array()}, {"kerr_fixtures", json::array()}};
    bool clean = true;

    std::vector<SpectrumReport> g_reports(couplings.size());
    numeric::parallel_for(couplings.size(), numeric::thread_count(ctx.threads),
                          [&](std::size_t i) { g_reports[i] = extract_g(couplings[i].net, couplings[i].transmon, h); });
    std::string g_table = "name,g_oracle_rad_s,g_closed_form_rad_s,relative_difference,g_over_omega,converged,ambiguous\n";
    for (std::size_t i = 0; i < couplings.size(); ++i) {
        const auto& s = g_reports[i];
        const double rel = numeric::relative_difference(*s.g, *s.g_perturbative);
        json entry = io::to_json(s);
        entry["name"] = couplings[i].name;
        entry["relative_difference"] = rel;
        doc["coupling_fixtures"].push_back(entry);
        g_table += couplings[i].name + "," + format_double(*s.g) + "," + format_double(*s.g_perturbative) + "," +
                   format_double(rel) + "," + format_double(*s.g / couplings[i].net.modes[0].omega) + "," +
                   (s.converged ? "1" : "0") + "," + (s.ambiguous ? "1" : "0") + "\n";
        if (!s.converged || s.ambiguous) {
            clean = false;
            r.messages.push_back("oracle: coupling fixture '" + couplings[i].name + "' is unconverged or ambiguous");
        }
    }

    std::vector<SpectrumReport> k_reports(kerrs.size());
    numeric::parallel_for(kerrs.size(), numeric::thread_count(ctx.threads),
                          [&](std::size_t i) { k_reports[i] = multimode_kerr(kerrs[i].modes, kerrs[i].e_j, h); });
    std::string k_table = "name,quantity,oracle_rad_s,perturbative_rad_s,relative_difference,converged\n";
    for (std::size_t i = 0; i < kerrs.size(); ++i) {
        const auto& s = k_reports[i];
        const auto chi = kerr_matrix(kerrs[i].modes, kerrs[i].e_j, KerrLimits{1.0, 1.0});
        json entry = io::to_json(s);
        entry["name"] = kerrs[i].name;
        entry["chi_perturbative_rad_s"] = io::matrix_json(chi);
        doc["kerr_fixtures"].push_back(entry);
        for (Eigen::Index a = 0; a < chi.rows(); ++a)
            for (Eigen::Index b = a; b < chi.cols(); ++b) {
                const double exact = s.cross_kerr.size() ? s.cross_kerr(a, b) : std::numeric_limits<double>::quiet_NaN();
                k_table += kerrs[i].name + ",chi_" + std::to_string(a) + std::to_string(b) + "," + format_double(exact) +
                           "," + format_double(chi(a, b)) + "," + format_double(numeric::relative_difference(exact, chi(a, b))) +
                           "," + (s.converged ? "1" : "0") + "\n";
            }
        if (!s.converged || s.ambiguous) {
            clean = false;
            r.messages.push_back("oracle: kerr fixture '" + kerrs[i].name + "' is unconverged or ambiguous");
        }
    }

    std::string header;
    for (const auto& c : ctx.provenance.csv_comments()) header += "# " + c + "\n";
    r.files.push_back({"oracle.json", detail::json_file(doc, ctx.provenance)});
    if (!couplings.empty()) r.files.push_back({"g_comparison.csv", header + g_table});
    if (!kerrs.empty()) r.files.push_back({"kerr_comparison.csv", header + k_table});
    if (!clean) r.exit_code = static_cast<int>(Error::Category::numerical);
    return r;
}

// ---------------------------------------------------------------------------

inline RunResult run(const std::string& command, const std::filesystem::path& config_path, unsigned threads) {
    const std::string text = io::read_file(config_path);
    const auto doc = io::parse_json_text(text, config_path.string());
    RunContext ctx;
    ctx.command = command;
    ctx.config_dir = config_path.has_parent_path() ? config_path.parent_path() : std::filesystem::path(".");
    ctx.threads = threads;
    ctx.provenance = {io::fnv1a_hex(text), command};
    const Node root(doc, "");
    if (!doc.is_object()) root.fail("expected a JSON object");
    if (command == "fbar") return run_fbar(root, ctx);
    if (command == "fit") return run_fit(root, ctx);
    if (command == "couple") return run_couple(root, ctx);
    if (command == "bbq") return run_bbq(root, ctx);
    if (command == "oracle") return run_oracle(root, ctx);
    throw ConfigError("unknown subcommand '" + command + "'");
}

/// Writes each file to a temporary name in out_dir and renames it into place.
inline void write_outputs(const std::filesystem::path& out_dir, const std::vector<OutputFile>& files) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw ConfigError("cannot create output directory '" + out_dir.string() + "': " + ec.message());
    std::vector<std::filesystem::path> temps;
    try {
        for (const auto& f : files) {
            const auto tmp = out_dir / ("." + f.name + ".tmp");
            std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
            temps.push_back(tmp);
            out << f.content;
            out.close();
            if (!out) throw ConfigError("cannot write '" + tmp.string() + "'");
        }
        for (std::size_t i = 0; i < files.size(); ++i) std::filesystem::rename(temps[i], out_dir / files[i].name);
    } catch (...) {
        for (const auto& t : temps) std::filesystem::remove(t, ec);
        throw;
    }
}

}  // namespace pq::cli
