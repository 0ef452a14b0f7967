#pragma once

// JSON serialization of the result types, a fixed-precision JSON writer, and
// a config reader that reports errors with field paths.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "pq/constants.hpp"
#include "pq/error.hpp"
#include "pq/foster_network.hpp"
#include "pq/oracle.hpp"
#include "pq/physics_models.hpp"
#include "pq/quantize_bbq.hpp"
#include "pq/quantize_single.hpp"
#include "pq/rational_fit.hpp"
#include "pq/rational_model.hpp"

namespace pq::io {

using json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Writer: numbers at 17 significant digits, keys in insertion order.

namespace detail {

inline void write_value(const json& j, std::string& out, int indent, int depth) {
    const auto pad = [&](int d) { out.append(static_cast<std::size_t>(indent * d), ' '); };
    switch (j.type()) {
        case json::value_t::object: {
            if (j.empty()) {
                out += "{}";
                return;
            }
            out += "{\n";
            std::size_t i = 0;
            for (auto it = j.begin(); it != j.end(); ++it, ++i) {
                pad(depth + 1);
                out += json(it.key()).dump();
                out += ": ";
                write_value(it.value(), out, indent, depth + 1);
                out += i + 1 < j.size() ? ",\n" : "\n";
            }
            pad(depth);
            out += '}';
            return;
        }
        case json::value_t::array: {
            if (j.empty()) {
                out += "[]";
                return;
            }
            const bool flat = std::all_of(j.begin(), j.end(), [](const json& v) { return v.is_primitive(); });
            out += flat ? "[" : "[\n";
            for (std::size_t i = 0; i < j.size(); ++i) {
                if (!flat) pad(depth + 1);
                write_value(j[i], out, indent, depth + 1);
                if (i + 1 < j.size()) out += flat ? ", " : ",\n";
            }
            if (!flat) {
                out += '\n';
                pad(depth);
            }
            out += ']';
            return;
        }
        case json::value_t::number_float: {
            const double v = j.get<double>();
            out += std::isfinite(v) ? format_double(v) : "null";
            return;
        }
        default:
            out += j.dump();
    }
}

}  // namespace detail

inline std::string dump(const json& j, int indent = 2) {
    std::string out;
    detail::write_value(j, out, indent, 0);
    out += '\n';
    return out;
}

/// 64-bit FNV-1a, used as the config fingerprint in provenance records.
inline std::string fnv1a_hex(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

struct Provenance {
    std::string config_hash;
    std::string command;

    json to_json() const { return {{"config_fnv1a", config_hash}, {"version", kVersion}, {"command", command}}; }
    std::vector<std::string> csv_comments() const {
        return {"pq " + std::string(kVersion) + " " + command, "config_fnv1a " + config_hash};
    }
};

// ---------------------------------------------------------------------------
// Result types to JSON.

inline json to_json(const FosterNetwork& net) {
    json modes = json::array();
    for (const auto& m : net.modes)
        modes.push_back({{"omega_rad_s", m.omega}, {"freq_hz", units::rad_s_to_hz(m.omega)}, {"c_f", m.capacitance},
                         {"l_h", m.inductance}});
    return {{"c0_f", net.c0}, {"modes", modes}};
}

inline json to_json(const RationalModel& m) {
    json poles = json::array(), residues = json::array();
    for (std::size_t k = 0; k < m.poles.size(); ++k) {
        poles.push_back({m.poles[k].real(), m.poles[k].imag()});
        residues.push_back({m.residues[k].real(), m.residues[k].imag()});
    }
    return {{"poles_rad_s", poles},          {"residues", residues},
            {"prop_term_f", m.prop_term},    {"const_term_s", m.const_term},
            {"inductive_term_inv_h", m.inductive_term}, {"converged", m.converged},
            {"residual", m.residual}};
}

inline json to_json(const FitReport& r) {
    return {{"iterations", r.iterations},
            {"residual_history", r.residual_history},
            {"relocation_residual", r.relocation_residual},
            {"projection_residual", r.projection_residual},
            {"suggested_poles", r.suggested_poles},
            {"lossless",
             {{"clamped_residues", r.lossless.clamped_residues},
              {"merged_poles", r.lossless.merged_poles},
              {"max_pole_real_ratio", r.lossless.max_pole_real_ratio},
              {"max_residue_imag_ratio", r.lossless.max_residue_imag_ratio},
              {"removed_const_term", r.lossless.removed_const_term}}},
            {"converged", r.model.converged}};
}

inline json to_json(const CouplingReport& r) {
    const auto hz = units::rad_s_to_hz;
    return {{"c0_f", r.c0},
            {"c1_f", r.c1},
            {"l1_h", r.l1},
            {"c_sigma_f", r.c_sigma},
            {"e_j_joules", r.e_j},
            {"e_c_phi_joules", r.e_c_phi},
            {"e_c_theta_joules", r.e_c_theta},
            {"e_c_cross_joules", r.e_c_cross},
            {"e_l_joules", r.e_l},
            {"beta", r.beta},
            {"n_zp_theta", r.n_zp_theta},
            {"theta_zp", r.theta_zp},
            {"n_zp_phi", r.n_zp_phi},
            {"phi_zp", r.phi_zp},
            {"omega_phi_rad_s", r.omega_phi},
            {"omega_rad_s", r.omega},
            {"g_rad_s", r.g},
            {"omega_phi_hz", hz(r.omega_phi)},
            {"omega_hz", hz(r.omega)},
            {"g_hz", hz(r.g)},
            {"ej_over_ec", r.ej_over_ec},
            {"transmon_limit_warning", r.transmon_limit_warning}};
}

inline json matrix_json(const Eigen::MatrixXd& m, double scale = 1.0) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j) * scale);
        rows.push_back(row);
    }
    return rows;
}

inline json to_json(const BbqReport& r) {
    json omega = json::array(), c = json::array(), psi = json::array(), part = json::array(), labels = json::array(),
         prime = json::array(), omega_hz = json::array(), prime_hz = json::array();
    for (std::size_t k = 0; k < r.modes.size(); ++k) {
        omega.push_back(r.modes[k].omega);
        omega_hz.push_back(units::rad_s_to_hz(r.modes[k].omega));
        c.push_back(r.modes[k].c_eff);
        psi.push_back(r.modes[k].psi_zp);
        part.push_back(r.modes[k].participation);
        labels.push_back(r.labels[k] == ModeLabel::transmon_like ? "transmon_like" : "phonon_like");
        prime.push_back(r.omega_prime[k]);
        prime_hz.push_back(units::rad_s_to_hz(r.omega_prime[k]));
    }
    return {{"e_j_joules", r.e_j},
            {"omega_rad_s", omega},
            {"c_eff_f", c},
            {"psi_zp", psi},
            {"junction_participation", part},
            {"labels", labels},
            {"chi_rad_s", matrix_json(r.chi)},
            {"omega_prime_rad_s", prime},
            {"omega_hz", omega_hz},
            {"chi_hz", matrix_json(r.chi, 1.0 / units::two_pi)},
            {"omega_prime_hz", prime_hz},
            {"expansion_warning", r.expansion_warning}};
}

inline json to_json(const SpectrumReport& r) {
    json transitions = json::array();
    for (const auto& t : r.transitions)
        transitions.push_back({{"label", t.label}, {"freq_hz", t.energy / constants::h}});
    json out = {{"dimension", r.dimension}, {"eigenvalues_joules", r.eigenvalues}, {"transitions", transitions}};
    if (r.g) {
        out["g_rad_s"] = *r.g;
        out["g_hz"] = units::rad_s_to_hz(*r.g);
    }
    if (r.g_perturbative) out["g_closed_form_rad_s"] = *r.g_perturbative;
    if (r.e_j_at_minimum) out["e_j_at_minimum_joules"] = *r.e_j_at_minimum;
    if (!r.anharmonicities.empty()) {
        out["anharmonicity_rad_s"] = r.anharmonicities;
        out["cross_kerr_rad_s"] = matrix_json(r.cross_kerr);
    }
    out["converged"] = r.converged;
    out["max_relative_shift"] = r.max_relative_shift;
    out["ambiguous"] = r.ambiguous;
    out["notes"] = r.notes;
    return out;
}

// ---------------------------------------------------------------------------
// Config reader. Every accessor takes the JSON node and its dotted path so
// errors name the offending field.

class Node {
public:
    Node(const json& j, std::string path) : j_(&j), path_(std::move(path)) {}

    const std::string& path() const { return path_; }
    const json& raw() const { return *j_; }

    [[noreturn]] void fail(const std::string& msg) const {
        throw ConfigError("config: " + (path_.empty() ? std::string("<root>") : path_) + ": " + msg);
    }

    bool has(const std::string& key) const { return j_->is_object() && j_->contains(key); }

    Node at(const std::string& key) const {
        if (!j_->is_object()) fail("expected an object");
        if (!j_->contains(key)) Node(*j_, child_path(key)).fail("missing required field");
        return Node((*j_)[key], child_path(key));
    }

    std::optional<Node> find(const std::string& key) const {
        if (!has(key)) return std::nullopt;
        return at(key);
    }

    Node index(std::size_t i) const { return Node((*j_)[i], path_ + "[" + std::to_string(i) + "]"); }

    std::size_t array_size() const {
        if (!j_->is_array()) fail("expected an array");
        return j_->size();
    }

    /// Rejects keys outside `allowed`, catching misspelled fields.
    void allow_only(std::initializer_list<const char*> allowed) const {
        if (!j_->is_object()) fail("expected an object");
        const std::set<std::string> ok(allowed.begin(), allowed.end());
        for (auto it = j_->begin(); it != j_->end(); ++it)
            if (!ok.count(it.key())) Node(it.value(), child_path(it.key())).fail("unknown field");
    }

    double number() const {
        if (!j_->is_number()) fail("expected a number");
        const double v = j_->get<double>();
        if (!std::isfinite(v)) fail("must be finite");
        return v;
    }

    double positive() const {
        const double v = number();
        if (!(v > 0.0)) fail("must be > 0");
        return v;
    }

    double non_negative() const {
        const double v = number();
        if (!(v >= 0.0)) fail("must be >= 0");
        return v;
    }

    long integer(long min_value) const {
        if (!j_->is_number_integer()) fail("expected an integer");
        const long v = j_->get<long>();
        if (v < min_value) fail("must be >= " + std::to_string(min_value));
        return v;
    }

    bool boolean() const {
        if (!j_->is_boolean()) fail("expected true or false");
        return j_->get<bool>();
    }

    std::string string() const {
        if (!j_->is_string()) fail("expected a string");
        return j_->get<std::string>();
    }

    std::vector<double> positive_list() const {
        std::vector<double> out;
        const auto n = array_size();
        if (n == 0) fail("must not be empty");
        for (std::size_t i = 0; i < n; ++i) out.push_back(index(i).positive());
        return out;
    }

private:
    std::string child_path(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

    const json* j_;
    std::string path_;
};

inline json parse_json_text(const std::string& text, const std::string& what) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(what + ": invalid JSON: " + e.what());
    }
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline MaterialParams parse_material(const Node& n) {
    n.allow_only({"e_pz_c_per_m2", "c_pa", "epsilon_f_per_m", "rho_kg_per_m3"});
    MaterialParams m;
    m.e_pz = n.at("e_pz_c_per_m2").non_negative();
    m.c = n.at("c_pa").positive();
    m.epsilon = n.at("epsilon_f_per_m").positive();
    m.rho = n.at("rho_kg_per_m3").positive();
    return m;
}

inline FbarGeometry parse_geometry(const Node& n) {
    n.allow_only({"thickness_m", "area_m2"});
    return {n.at("thickness_m").positive(), n.at("area_m2").positive()};
}

inline FosterNetwork parse_foster(const Node& n) {
    n.allow_only({"c0_f", "modes"});
    FosterNetwork net;
    net.c0 = n.has("c0_f") ? n.at("c0_f").non_negative() : 0.0;
    const auto modes = n.at("modes");
    for (std::size_t i = 0; i < modes.array_size(); ++i) {
        const auto m = modes.index(i);
        m.allow_only({"omega_rad_s", "freq_hz", "c_f", "l_h"});
        const bool rad = m.has("omega_rad_s"), hz = m.has("freq_hz");
        if (!rad && !hz) m.fail("give omega_rad_s or freq_hz");
        // both are written on output; they must then agree
        const double omega = rad ? m.at("omega_rad_s").positive() : units::hz_to_rad_s(m.at("freq_hz").positive());
        if (rad && hz && numeric::relative_difference(units::hz_to_rad_s(m.at("freq_hz").positive()), omega) > 1e-12)
            m.fail("omega_rad_s and freq_hz disagree");
        const double c = m.at("c_f").positive();
        if (m.has("l_h")) {
            const double l = m.at("l_h").positive();
            if (numeric::relative_difference(l, 1.0 / (omega * omega * c)) > 1e-9)
                m.fail("l_h is inconsistent with omega and c_f");
        }
        net.modes.push_back(FosterMode::from_omega_c(omega, c));
    }
    try {
        net.validate();
    } catch (const ConfigError& e) {
        n.fail(e.what());
    }
    return net;
}

inline RationalModel parse_model(const Node& n) {
    n.allow_only({"poles_rad_s", "residues", "prop_term_f", "const_term_s", "inductive_term_inv_h", "converged",
                  "residual", "provenance"});
    RationalModel m;
    const auto poles = n.at("poles_rad_s"), res = n.at("residues");
    if (poles.array_size() != res.array_size()) n.fail("poles_rad_s and residues differ in length");
    const auto pair = [](const Node& v) {
        if (v.array_size() != 2) v.fail("expected [re, im]");
        return cdouble(v.index(0).number(), v.index(1).number());
    };
    for (std::size_t i = 0; i < poles.array_size(); ++i) {
        m.poles.push_back(pair(poles.index(i)));
        m.residues.push_back(pair(res.index(i)));
    }
    m.prop_term = n.has("prop_term_f") ? n.at("prop_term_f").non_negative() : 0.0;
    m.const_term = n.has("const_term_s") ? n.at("const_term_s").number() : 0.0;
    m.inductive_term = n.has("inductive_term_inv_h") ? n.at("inductive_term_inv_h").non_negative() : 0.0;
    m.converged = n.has("converged") ? n.at("converged").boolean() : true;
    m.residual = n.has("residual") ? n.at("residual").non_negative() : 0.0;
    return m;
}

/// E_J from `e_j_hz` (E_J / h) or `e_j_joules`, exactly one present.
inline double parse_e_j(const Node& n) {
    const bool hz = n.has("e_j_hz"), j = n.has("e_j_joules");
    if (hz == j) n.fail("give exactly one of e_j_hz or e_j_joules");
    return hz ? units::hz_to_joules(n.at("e_j_hz").positive()) : n.at("e_j_joules").positive();
}

inline std::string serialize_model_file(const RationalModel& m, const Provenance& p) {
    json j = to_json(m);
    j["provenance"] = p.to_json();
    return dump(j);
}

}  // namespace pq::io
