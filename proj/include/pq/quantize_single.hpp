#pragma once

// Transmon shunted by a single-mode Foster network (C_0 in series with one
// parallel L_1 C_1 block): charging energies, zero-point fluctuations and the
// phonon-transmon coupling rate.

#include <cmath>
#include <string>
#include <vector>

#include "pq/constants.hpp"
#include "pq/error.hpp"
#include "pq/foster.hpp"
#include "pq/foster_network.hpp"
#include "pq/numeric.hpp"
#include "pq/physics_models.hpp"

namespace pq {

struct TransmonParams {
    double e_j = 0.0;      // J
    double c_sigma = 0.0;  // F
    double n_g = 0.0;

    void validate() const {
        if (!(e_j > 0.0) || !(c_sigma > 0.0)) throw ConfigError("TransmonParams: E_J and C_sigma must be > 0");
    }
};

/// Transmon-limit policy for E_J / E_C^(phi).
struct TransmonGuard {
    double warn_below = 20.0;
    double error_below = 5.0;
    bool enforce = true;
};

struct CouplingReport {
    // network and transmon inputs
    double c0 = 0.0, c1 = 0.0, l1 = 0.0, c_sigma = 0.0, e_j = 0.0;
    // charging and inductive energies, J
    double e_c_phi = 0.0;
    double e_c_theta = 0.0;
    double e_c_cross = 0.0;
    double e_l = 0.0;
    double beta = 0.0;
    // zero-point fluctuations
    double n_zp_theta = 0.0, theta_zp = 0.0;
    double n_zp_phi = 0.0, phi_zp = 0.0;
    // rates, rad/s
    double omega_phi = 0.0;
    double omega = 0.0;  // phonon frequency 1/sqrt(L_1 C^1_{0 Sigma})
    double g = 0.0;
    double ej_over_ec = 0.0;
    bool transmon_limit_warning = false;
};

/// C_i + (C_j^-1 + C_k^-1)^-1: j and k in series, in parallel with i. A zero
/// capacitance in the series pair opens it.
inline double series_parallel(double ci, double cj, double ck) {
    if (cj == 0.0 || ck == 0.0) return ci;
    return ci + cj * ck / (cj + ck);
}

/// Energy fields of the report from the Legendre transform of the circuit
/// Lagrangian.
inline CouplingReport capacitance_energies(const FosterNetwork& net, const TransmonParams& t) {
    using constants::e;
    t.validate();
    if (net.modes.size() != 1) throw ContractError("capacitance_energies: network must have exactly one mode");
    const double c0 = net.c0;
    const double c1 = net.modes[0].capacitance;
    const double l1 = net.modes[0].inductance;
    const double cs = t.c_sigma;
    if (!(c0 >= 0.0) || !(c1 > 0.0) || !(l1 > 0.0)) throw ContractError("capacitance_energies: capacitances must be positive");

    CouplingReport r;
    r.c0 = c0;
    r.c1 = c1;
    r.l1 = l1;
    r.c_sigma = cs;
    r.e_j = t.e_j;
    const double c_phi = series_parallel(cs, c0, c1);    // C^Sigma_{01}
    const double c_theta = series_parallel(c1, c0, cs);  // C^1_{0 Sigma}
    const double c_cross = series_parallel(c0, c1, cs);  // C^0_{1 Sigma}
    r.beta = c0 / (c1 + cs);
    r.e_c_phi = e * e / (2.0 * c_phi);
    r.e_c_theta = e * e / (2.0 * c_theta);
    r.e_c_cross = c0 == 0.0 ? 0.0 : r.beta * e * e / (2.0 * c_cross);
    r.e_l = constants::phi0 * constants::phi0 / l1;
    r.omega = 1.0 / std::sqrt(l1 * c_theta);
    return r;
}

/// Completes the report: oscillator quadratures of both degrees of freedom,
/// transmon frequency and hbar g = 8 E_C^(phi,theta) n_zp^theta n_zp^phi.
inline CouplingReport coupling_rate(CouplingReport r, const TransmonGuard& guard = {}) {
    if (!(r.e_c_phi > 0.0) || !(r.e_c_theta > 0.0) || !(r.e_l > 0.0) || !(r.e_j > 0.0))
        throw ContractError("coupling_rate: energy fields are not populated");
    r.ej_over_ec = r.e_j / r.e_c_phi;
    if (guard.enforce && r.ej_over_ec < guard.error_below)
        throw ContractError("coupling_rate: E_J/E_C = " + std::to_string(r.ej_over_ec) +
                            " violates the transmon limit (needs >= " + std::to_string(guard.error_below) + ")");
    r.transmon_limit_warning = r.ej_over_ec < guard.warn_below;
    r.n_zp_theta = 0.5 * std::pow(r.e_l / (2.0 * r.e_c_theta), 0.25);
    r.theta_zp = std::pow(2.0 * r.e_c_theta / r.e_l, 0.25);
    r.n_zp_phi = 0.5 * std::pow(r.e_j / (2.0 * r.e_c_phi), 0.25);
    r.phi_zp = std::pow(2.0 * r.e_c_phi / r.e_j, 0.25);
    r.omega_phi = std::sqrt(8.0 * r.e_j * r.e_c_phi) / constants::hbar;
    r.g = 8.0 * r.e_c_cross * r.n_zp_theta * r.n_zp_phi / constants::hbar;
    return r;
}

inline CouplingReport quantize_single_mode(const FosterNetwork& net, const TransmonParams& t,
                                           const TransmonGuard& guard = {}) {
    return coupling_rate(capacitance_energies(net, t), guard);
}

struct SweepRow {
    double c_g = 0.0;
    double c_sigma = 0.0;
    double g = 0.0;
    double omega_phi = 0.0;
    double omega_m = 0.0;
    double ej_over_ec = 0.0;
    bool transmon_limit_warning = false;
};

/// Coupling versus gate capacitance: the single-mode network is rescaled with
/// the electrode area (C_0, C_1 proportional, L_1 inverse, mechanical frequency
/// fixed). Rows are ordered transmon-major, then by multiplier. The transmon
/// guard is reported per row rather than enforced.
inline std::vector<SweepRow> sweep_coupling_network(const FosterNetwork& base, double c_g_base,
                                                    const std::vector<double>& multipliers,
                                                    const std::vector<TransmonParams>& transmons,
                                                    unsigned threads = 0) {
    if (base.modes.size() != 1) throw ContractError("sweep_coupling: base network must be single-mode");
    for (double m : multipliers)
        if (!(m > 0.0)) throw ConfigError("sweep_coupling: area multipliers must be > 0");
    for (const auto& t : transmons) t.validate();
    std::vector<SweepRow> rows(multipliers.size() * transmons.size());
    TransmonGuard guard;
    guard.enforce = false;
    numeric::parallel_for(rows.size(), numeric::thread_count(threads), [&](std::size_t i) {
        const auto& t = transmons[i / multipliers.size()];
        const double m = multipliers[i % multipliers.size()];
        const auto r = quantize_single_mode(scale_unit_cells(base, m), t, guard);
        rows[i] = {c_g_base * m, t.c_sigma, r.g, r.omega_phi, r.omega, r.ej_over_ec, r.transmon_limit_warning};
    });
    return rows;
}

inline std::vector<SweepRow> sweep_coupling(const MaterialParams& material, const FbarGeometry& base,
                                            const std::vector<double>& area_multipliers,
                                            const std::vector<TransmonParams>& transmons, unsigned threads = 0) {
    const auto net = fbar_foster(material, base, 1);
    return sweep_coupling_network(net, base.gate_capacitance(material), area_multipliers, transmons, threads);
}

}  // namespace pq
