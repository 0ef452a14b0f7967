#pragma once

// Black-box quantization: the transmon's linear part (C_Sigma, L_J) is lumped
// into the admittance, the zeros of the total admittance are the polariton
// modes, and the quartic term of the junction cosine gives Kerr shifts.

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "pq/constants.hpp"
#include "pq/error.hpp"
#include "pq/foster.hpp"
#include "pq/numeric.hpp"
#include "pq/rational_fit.hpp"
#include "pq/rational_model.hpp"

namespace pq {

struct BbqTransmon {
    double e_j = 0.0;  // J
    double c_j = 0.0;  // F
    double c_s = 0.0;  // F

    double c_sigma() const { return c_j + c_s; }
    double l_j() const { return constants::phi0 * constants::phi0 / e_j; }
    /// e^2 / (2 C_Sigma)
    double e_c() const { return constants::e * constants::e / (2.0 * c_sigma()); }
    /// Linearized transmon frequency 1/sqrt(L_J C_Sigma) = sqrt(8 E_J E_C)/hbar.
    double omega_linear() const { return 1.0 / std::sqrt(l_j() * c_sigma()); }

    void validate() const {
        if (!(e_j > 0.0) || !(c_j > 0.0) || !(c_s > 0.0))
            throw ConfigError("BbqTransmon: E_J, C_J and C_S must be > 0");
    }
};

/// Y_11(s) = Y_m(s) + s C_Sigma + 1/(s L_J).
inline RationalModel dressed_admittance(const RationalModel& ym, const BbqTransmon& t) {
    t.validate();
    if (!is_lossless(ym)) throw ContractError("dressed_admittance: Y_m must be lossless");
    RationalModel y11 = ym;
    y11.prop_term += t.c_sigma();
    y11.inductive_term += 1.0 / t.l_j();
    return y11;
}

struct PolaritonMode {
    double omega = 0.0;        // rad/s
    double c_eff = 0.0;        // F
    double psi_zp = 0.0;       // junction phase zero-point fluctuation
    double participation = 0.0;  // fraction of the junction inductance, L_k / L_J
};

/// Zeros of Y_11 with their Foster capacitances (no C_0 block) and
/// psi_zp = sqrt(2 e^2 / (hbar omega_k C_k)).
inline std::vector<PolaritonMode> polariton_modes(const RationalModel& y11) {
    if (!(y11.inductive_term > 0.0)) throw ContractError("polariton_modes: Y_11 needs the junction inductive term");
    const auto zeros = model_zeros(y11);
    std::vector<PolaritonMode> out;
    out.reserve(zeros.size());
    const double l_j = 1.0 / y11.inductive_term;
    for (double w : zeros) {
        PolaritonMode m;
        m.omega = w;
        m.c_eff = 0.5 * y11.susceptance_slope(w);
        if (!(m.c_eff > 0.0)) throw ContractError("polariton_modes: non-positive mode capacitance");
        m.psi_zp = std::sqrt(2.0 * constants::e * constants::e / (constants::hbar * w * m.c_eff));
        m.participation = 1.0 / (w * w * m.c_eff) / l_j;
        out.push_back(m);
    }
    return out;
}

struct KerrLimits {
    double warn_psi = 0.3;
    double error_psi = 0.5;
};

/// chi_kk = -(E_J / 2 hbar) psi_k^4, chi_kj = -(E_J / hbar) psi_k^2 psi_j^2.
inline Eigen::MatrixXd kerr_matrix(const std::vector<PolaritonMode>& modes, double e_j, const KerrLimits& limits = {},
                                   bool* warned = nullptr) {
    if (modes.empty()) throw ContractError("kerr_matrix: no modes");
    if (!(e_j > 0.0)) throw ConfigError("kerr_matrix: E_J must be > 0");
    bool warn = false;
    for (std::size_t k = 0; k < modes.size(); ++k) {
        if (modes[k].psi_zp >= limits.error_psi)
            throw ContractError("kerr_matrix: psi_zp = " + std::to_string(modes[k].psi_zp) + " of mode " +
                                std::to_string(k) + " is outside the quartic-expansion range (< " +
                                std::to_string(limits.error_psi) + ")");
        warn = warn || modes[k].psi_zp > limits.warn_psi;
    }
    if (warned) *warned = warn;
    const auto n = static_cast<Eigen::Index>(modes.size());
    Eigen::MatrixXd chi(n, n);
    for (Eigen::Index k = 0; k < n; ++k) {
        const double pk2 = modes[static_cast<std::size_t>(k)].psi_zp * modes[static_cast<std::size_t>(k)].psi_zp;
        for (Eigen::Index j = 0; j < n; ++j) {
            const double pj2 = modes[static_cast<std::size_t>(j)].psi_zp * modes[static_cast<std::size_t>(j)].psi_zp;
            chi(k, j) = k == j ? -e_j * pk2 * pk2 / (2.0 * constants::hbar) : -e_j * pk2 * pj2 / constants::hbar;
        }
    }
    return chi;
}

/// First-order shift of the 0 -> 1 transition of each mode,
/// omega'_k = omega_k + self * chi_kk + cross * sum_{j != k} chi_kj.
/// Pinned against exact diagonalization of the cosine Hamiltonian.
struct LambShiftCoefficients {
    static constexpr double self = 1.0;
    static constexpr double cross = 0.5;
};

inline std::vector<double> lamb_shift(const std::vector<PolaritonMode>& modes, const Eigen::MatrixXd& chi) {
    if (chi.rows() != static_cast<Eigen::Index>(modes.size()) || chi.cols() != chi.rows())
        throw ConfigError("lamb_shift: chi shape does not match the mode list");
    std::vector<double> out(modes.size());
    for (std::size_t k = 0; k < modes.size(); ++k) {
        const auto kk = static_cast<Eigen::Index>(k);
        double cross = 0.0;
        for (Eigen::Index j = 0; j < chi.cols(); ++j)
            if (j != kk) cross += chi(kk, j);
        out[k] = modes[k].omega + LambShiftCoefficients::self * chi(kk, kk) + LambShiftCoefficients::cross * cross;
    }
    return out;
}

enum class ModeLabel { transmon_like, phonon_like };

struct BbqReport {
    std::vector<PolaritonMode> modes;
    Eigen::MatrixXd chi;
    std::vector<double> omega_prime;
    std::vector<ModeLabel> labels;
    std::size_t transmon_index = 0;
    bool expansion_warning = false;
    double e_j = 0.0;
};

inline BbqReport black_box_quantize(const RationalModel& ym, const BbqTransmon& t, const KerrLimits& limits = {}) {
    BbqReport r;
    r.e_j = t.e_j;
    r.modes = polariton_modes(dressed_admittance(ym, t));
    r.chi = kerr_matrix(r.modes, t.e_j, limits, &r.expansion_warning);
    r.omega_prime = lamb_shift(r.modes, r.chi);
    const auto it = std::max_element(r.modes.begin(), r.modes.end(),
                                     [](const auto& a, const auto& b) { return a.participation < b.participation; });
    r.transmon_index = static_cast<std::size_t>(it - r.modes.begin());
    r.labels.assign(r.modes.size(), ModeLabel::phonon_like);
    r.labels[r.transmon_index] = ModeLabel::transmon_like;
    return r;
}

struct DetuningSweepRow {
    double delta = 0.0;  // bare omega_phi - Omega, rad/s
    double e_j = 0.0;
    double chi_self_transmon = 0.0;
    double chi_self_phonon = 0.0;
    double chi_cross = 0.0;
    std::size_t transmon_index = 0;
    std::size_t phonon_index = 0;
};

/// Phonon frequency used for the detuning: the zero of Y_m whose Foster block
/// has the smallest capacitance (the most strongly coupled mode).
inline double strongest_phonon_zero(const RationalModel& ym) {
    const auto net = foster_from_model(ym);
    if (net.modes.empty()) throw ContractError("detuning_sweep: Y_m has no zeros");
    const auto it = std::min_element(net.modes.begin(), net.modes.end(),
                                     [](const auto& a, const auto& b) { return a.capacitance < b.capacitance; });
    return it->omega;
}

/// E_J that puts the bare transmon at omega_phi = Omega + delta.
inline double e_j_for_detuning(const BbqTransmon& t, double omega_phonon, double delta) {
    const double w = omega_phonon + delta;
    return std::pow(constants::hbar * w, 2) / (8.0 * t.e_c());
}

/// Kerr coefficients of the transmon-like and phonon-like polaritons versus
/// detuning. At every point the transmon-like polariton is the one with the
/// largest junction participation. The phonon-like one is the partner with the
/// largest remaining participation; ties between spectators are broken by
/// continuity in frequency with the previous row.
inline std::vector<DetuningSweepRow> detuning_sweep(const RationalModel& ym, const BbqTransmon& t,
                                                    const std::vector<double>& e_j_values, unsigned threads = 0,
                                                    const KerrLimits& limits = {}) {
    for (double ej : e_j_values)
        if (!(ej > 0.0)) throw ConfigError("detuning_sweep: E_J values must be > 0");
    const double omega_m = strongest_phonon_zero(ym);
    std::vector<BbqReport> reports(e_j_values.size());
    numeric::parallel_for(reports.size(), numeric::thread_count(threads), [&](std::size_t i) {
        BbqTransmon ti = t;
        ti.e_j = e_j_values[i];
        reports[i] = black_box_quantize(ym, ti, limits);
    });

    std::vector<std::size_t> order(reports.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::vector<double> deltas(reports.size());
    for (std::size_t i = 0; i < reports.size(); ++i) {
        BbqTransmon ti = t;
        ti.e_j = e_j_values[i];
        deltas[i] = ti.omega_linear() - omega_m;
    }
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return deltas[a] < deltas[b]; });

    std::vector<DetuningSweepRow> rows;
    double previous_phonon_omega = omega_m;
    for (auto i : order) {
        const auto& r = reports[i];
        DetuningSweepRow row;
        row.delta = deltas[i];
        row.e_j = e_j_values[i];
        row.transmon_index = r.transmon_index;
        std::size_t best = r.modes.size();
        for (std::size_t k = 0; k < r.modes.size(); ++k) {
            if (k == r.transmon_index) continue;
            if (best == r.modes.size()) {
                best = k;
                continue;
            }
            const double pk = r.modes[k].participation, pb = r.modes[best].participation;
            const bool tie = numeric::relative_difference(pk, pb) < 1e-6;
            if ((!tie && pk > pb) ||
                (tie && std::abs(r.modes[k].omega - previous_phonon_omega) < std::abs(r.modes[best].omega - previous_phonon_omega)))
                best = k;
        }
        if (best == r.modes.size()) throw ContractError("detuning_sweep: Y_11 has a single mode, nothing phonon-like");
        row.phonon_index = best;
        previous_phonon_omega = r.modes[best].omega;
        const auto ti = static_cast<Eigen::Index>(row.transmon_index), pi = static_cast<Eigen::Index>(best);
        row.chi_self_transmon = r.chi(ti, ti);
        row.chi_self_phonon = r.chi(pi, pi);
        row.chi_cross = r.chi(ti, pi);
        rows.push_back(row);
    }
    return rows;
}

}  // namespace pq
