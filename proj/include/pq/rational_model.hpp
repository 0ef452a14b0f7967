#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "pq/error.hpp"

namespace pq {

using cdouble = std::complex<double>;

/// Pole-residue representation of a one-port admittance,
///
///     Y(s) = sum_k R_k / (s - s_k) + C s + D + G / s,
///
/// with s in rad/s. `poles` is conjugate-closed; `residues[k]` belongs to
/// `poles[k]`. The optional G / s term is the explicit inductive branch used by
/// black-box dressing (a pole pair collapsed onto s = 0).
struct RationalModel {
    std::vector<cdouble> poles;
    std::vector<cdouble> residues;
    double prop_term = 0.0;       // C, farads
    double const_term = 0.0;      // D, siemens
    double inductive_term = 0.0;  // G = 1/L, inverse henries
    bool converged = true;
    double residual = 0.0;

    cdouble evaluate(cdouble s) const {
        cdouble acc = prop_term * s + const_term;
        if (inductive_term != 0.0) acc += inductive_term / s;
        for (std::size_t k = 0; k < poles.size(); ++k) acc += residues[k] / (s - poles[k]);
        return acc;
    }

    cdouble at_omega(double omega) const { return evaluate({0.0, omega}); }

    /// dY/ds.
    cdouble derivative(cdouble s) const {
        cdouble acc = prop_term;
        if (inductive_term != 0.0) acc -= inductive_term / (s * s);
        for (std::size_t k = 0; k < poles.size(); ++k) acc -= residues[k] / ((s - poles[k]) * (s - poles[k]));
        return acc;
    }

    /// Im[dY/d omega] on the real-frequency axis. Since dY/d omega = i dY/ds
    /// this is Re[dY/ds].
    double susceptance_slope(double omega) const { return derivative({0.0, omega}).real(); }
};

/// One conjugate pole pair of a lossless model: poles at +-i omega with equal
/// real residue, contributing 2 R s / (s^2 + omega^2).
struct LosslessPair {
    double omega = 0.0;
    double residue = 0.0;
};

inline bool is_conjugate_closed(const RationalModel& m, double rel_tol = 1e-9) {
    if (m.poles.size() != m.residues.size()) return false;
    std::vector<bool> used(m.poles.size(), false);
    for (std::size_t i = 0; i < m.poles.size(); ++i) {
        if (used[i]) continue;
        const double scale = std::max(std::abs(m.poles[i]), 1e-300);
        if (std::abs(m.poles[i].imag()) <= rel_tol * scale) {
            if (std::abs(m.residues[i].imag()) > rel_tol * std::max(std::abs(m.residues[i]), 1e-300)) return false;
            used[i] = true;
            continue;
        }
        bool found = false;
        for (std::size_t j = i + 1; j < m.poles.size(); ++j) {
            if (used[j]) continue;
            if (std::abs(m.poles[j] - std::conj(m.poles[i])) <= rel_tol * scale &&
                std::abs(m.residues[j] - std::conj(m.residues[i])) <=
                    rel_tol * std::max(std::abs(m.residues[i]), 1e-300)) {
                used[i] = used[j] = true;
                found = true;
                break;
            }
        }
        if (!found) return false;
    }
    return true;
}

/// True when every pole is purely imaginary with a real non-negative residue,
/// D = 0, C >= 0 and G >= 0.
inline bool is_lossless(const RationalModel& m) {
    if (m.const_term != 0.0 || m.prop_term < 0.0 || m.inductive_term < 0.0) return false;
    if (!is_conjugate_closed(m, 0.0)) return false;
    for (std::size_t k = 0; k < m.poles.size(); ++k) {
        if (m.poles[k].real() != 0.0 || m.poles[k].imag() == 0.0) return false;
        if (m.residues[k].imag() != 0.0 || m.residues[k].real() < 0.0) return false;
    }
    return true;
}

/// Positive-frequency pole pairs of a lossless model, ascending in omega.
inline std::vector<LosslessPair> lossless_pairs(const RationalModel& m) {
    if (!is_lossless(m)) throw ContractError("lossless_pairs: model is not lossless");
    std::vector<LosslessPair> out;
    for (std::size_t k = 0; k < m.poles.size(); ++k)
        if (m.poles[k].imag() > 0.0) out.push_back({m.poles[k].imag(), m.residues[k].real()});
    std::sort(out.begin(), out.end(), [](auto a, auto b) { return a.omega < b.omega; });
    return out;
}

/// Builds a lossless model from positive-frequency pairs.
inline RationalModel make_lossless_model(const std::vector<LosslessPair>& pairs, double prop_term,
                                         double inductive_term = 0.0) {
    RationalModel m;
    m.prop_term = prop_term;
    m.inductive_term = inductive_term;
    for (const auto& p : pairs) {
        m.poles.emplace_back(0.0, p.omega);
        m.residues.emplace_back(p.residue, 0.0);
        m.poles.emplace_back(0.0, -p.omega);
        m.residues.emplace_back(p.residue, 0.0);
    }
    return m;
}

}  // namespace pq
