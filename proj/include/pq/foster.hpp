#pragma once

// First-form Foster synthesis: C_0 in series with parallel-LC blocks whose
// self-resonances are the admittance zeros.

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <vector>

#include "pq/detail/secular.hpp"
#include "pq/error.hpp"
#include "pq/foster_network.hpp"
#include "pq/numeric.hpp"
#include "pq/physics_models.hpp"
#include "pq/rational_fit.hpp"
#include "pq/rational_model.hpp"

namespace pq {

using AdmittanceFn = std::function<cdouble(double)>;

struct FosterOptions {
    /// |Y(w_k)| / |Y(1.01 w_k)| below this accepts w_k as a zero as given.
    double zero_tolerance = 1e-6;
    /// Relative half-width of the window searched when polishing a zero.
    double polish_window = 1e-2;
    /// DC slope window is [ref / 1000, ref / 100]; ref defaults to the first zero.
    std::optional<double> dc_reference;
    std::size_t dc_points = 21;
    double derivative_step = 1e-6;
    /// Skip the C_0 extraction (black-box form).
    bool include_c0 = true;
};

namespace detail {

inline double polish_zero(const AdmittanceFn& y, double omega, const FosterOptions& opts) {
    const auto susceptance = [&](double w) { return y(w).imag(); };
    // Im Y rises through every zero; look for a - to + crossing around omega.
    for (double half = 1e-6; half <= opts.polish_window * 1.0000001; half *= 4.0) {
        const double lo = omega * (1.0 - half), hi = omega * (1.0 + half);
        double flo, fhi;
        try {
            flo = susceptance(lo);
            fhi = susceptance(hi);
        } catch (const PoleProximityError&) {
            continue;
        }
        if (flo < 0.0 && fhi > 0.0) return numeric::find_root(susceptance, lo, hi);
    }
    throw ContractError("foster: " + std::to_string(omega) + " rad/s is not a zero of the admittance");
}

inline bool is_zero_of(const AdmittanceFn& y, double omega, double tol) {
    const double at = std::abs(y(omega));
    const double off = std::abs(y(1.01 * omega));
    return off > 0.0 && at / off < tol;
}

// Im[dY/dw] at a zero. The step starts at w * rel_step and shrinks tenfold
// until two successive estimates agree, so a pole sitting closer than the
// initial step does not spoil the difference.
inline double zero_slope(const AdmittanceFn& y, double omega, double rel_step) {
    const auto b = [&](double v) { return y(v).imag(); };
    double previous = numeric::derivative(b, omega, rel_step);
    for (double step = rel_step / 10.0; step >= rel_step * 1e-4; step /= 10.0) {
        const double d = numeric::derivative(b, omega, step);
        if (std::abs(d - previous) <= 1e-7 * std::abs(d)) return d;
        previous = d;
    }
    return previous;
}

}  // namespace detail

/// DC slope lim_{w->0} Im[dY/dw], by linear regression on [ref / 1000, ref / 100].
/// Im[Y]/w is regressed against w^2 so the leading curvature term of the
/// admittance does not bias the intercept.
inline double dc_capacitance(const AdmittanceFn& y, double reference, std::size_t points = 21) {
    if (!(reference > 0.0)) throw ConfigError("dc_capacitance: reference frequency must be > 0");
    const auto w = numeric::grid(reference / 1000.0, reference / 100.0, points, numeric::Spacing::linear);
    std::vector<double> x(w.size()), b(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) {
        x[i] = w[i] * w[i];
        b[i] = y(w[i]).imag() / w[i];
    }
    return numeric::fit_line(x, b).intercept;
}

/// Foster synthesis from any evaluable admittance. Each listed zero is
/// verified (and polished if needed); C_k = 1/2 Im[dY/dw] at the zero by
/// Richardson-extrapolated central differences, L_k = 1/(w_k^2 C_k).
inline FosterNetwork foster_from_admittance(const AdmittanceFn& y, std::vector<double> zeros,
                                            const FosterOptions& opts = {}) {
    std::sort(zeros.begin(), zeros.end());
    FosterNetwork net;
    if (opts.include_c0) {
        const std::optional<double> ref = opts.dc_reference ? opts.dc_reference
                                          : zeros.empty()   ? std::nullopt
                                                            : std::optional<double>(zeros.front());
        if (!ref) throw ConfigError("foster_from_admittance: no zeros given, a DC reference frequency is required");
        net.c0 = dc_capacitance(y, *ref, opts.dc_points);
        if (!(net.c0 > 0.0)) throw ContractError("foster_from_admittance: DC slope is not positive");
    }
    for (double w : zeros) {
        if (!(w > 0.0)) throw ConfigError("foster_from_admittance: zeros must be positive");
        double zero = w;
        if (!detail::is_zero_of(y, zero, opts.zero_tolerance)) {
            zero = detail::polish_zero(y, w, opts);
            if (!detail::is_zero_of(y, zero, opts.zero_tolerance))
                throw ContractError("foster_from_admittance: " + std::to_string(w) + " rad/s is not a zero of Y");
        }
        const double slope = detail::zero_slope(y, zero, opts.derivative_step);
        const double ck = 0.5 * slope;
        if (!(ck > 0.0)) throw ContractError("foster_from_admittance: non-positive mode capacitance (Foster positivity)");
        net.modes.push_back(FosterMode::from_omega_c(zero, ck));
    }
    return net;
}

/// Foster synthesis of a lossless rational model with exact derivatives.
/// Models carrying an inductive term yield the black-box form (no C_0).
inline FosterNetwork foster_from_model(const RationalModel& model) {
    if (!is_lossless(model)) throw ContractError("foster_from_model: model is not lossless");
    if (model.prop_term == 0.0 && !model.poles.empty())
        throw ContractError("foster_from_model: C = 0 needs a series inductor, not representable in first form");
    const auto zeros = model_zeros(model);
    FosterNetwork net;
    if (model.inductive_term == 0.0) net.c0 = model.susceptance_slope(0.0);  // C + sum 2R / p^2
    for (double w : zeros) {
        const double ck = 0.5 * model.susceptance_slope(w);
        if (!(ck > 0.0)) throw ContractError("foster_from_model: non-positive mode capacitance");
        net.modes.push_back(FosterMode::from_omega_c(w, ck));
    }
    return net;
}

/// Same network through the numeric-derivative path, used to cross-check the
/// analytic one.
inline FosterNetwork foster_from_model_numeric(const RationalModel& model, const FosterOptions& opts = {}) {
    auto o = opts;
    o.include_c0 = model.inductive_term == 0.0;
    return foster_from_admittance([&](double w) { return model.at_omega(w); }, model_zeros(model), o);
}

/// Keeps C_0 and the mode nearest omega_target.
inline FosterNetwork single_mode_truncation(const FosterNetwork& net, double omega_target) {
    if (net.modes.empty()) throw ContractError("single_mode_truncation: network has no modes");
    const auto it = std::min_element(net.modes.begin(), net.modes.end(), [&](const auto& a, const auto& b) {
        return std::abs(a.omega - omega_target) < std::abs(b.omega - omega_target);
    });
    return {net.c0, {*it}};
}

/// Exact pole-residue form of a Foster network's admittance. Poles are the
/// zeros of the network impedance; each residue is 1 / Z'(i p).
inline RationalModel network_to_model(const FosterNetwork& net) {
    net.validate();
    // omega * X(omega) in u = omega^2:  -1/C0 - sum 1/C_k + sum (w_k^2/C_k)/(w_k^2 - u)
    detail::SecularTerms t;
    t.offset = net.has_c0() ? -1.0 / net.c0 : 0.0;
    double inv_series = net.has_c0() ? 1.0 / net.c0 : 0.0;
    for (const auto& m : net.modes) {
        t.offset -= 1.0 / m.capacitance;
        inv_series += 1.0 / m.capacitance;
        t.poles.push_back(m.omega * m.omega);
        t.weights.push_back(m.omega * m.omega / m.capacitance);
    }
    std::vector<LosslessPair> pairs;
    double inductive = 0.0;
    if (!t.poles.empty()) {
        const auto roots = detail::secular_roots(t, !net.has_c0());
        const auto z_prime = [&](double p) {  // dZ/ds at s = i p, real and positive
            double acc = net.has_c0() ? 1.0 / (p * p * net.c0) : 0.0;
            for (const auto& m : net.modes) {
                const double den = m.omega * m.omega - p * p;
                acc += (m.omega * m.omega + p * p) / (m.capacitance * den * den);
            }
            return acc;
        };
        for (double u : roots) {
            if (!(u > 0.0)) throw NumericalError("network_to_model: non-positive pole");
            const double p = std::sqrt(u);
            pairs.push_back({p, 1.0 / z_prime(p)});
        }
        if (!net.has_c0()) {
            double l_sum = 0.0;
            for (const auto& m : net.modes) l_sum += m.inductance;
            inductive = 1.0 / l_sum;
        }
    }
    return make_lossless_model(pairs, 1.0 / inv_series, inductive);
}

/// Foster network of the analytic film admittance over its first `n_modes`
/// zeros.
inline FosterNetwork fbar_foster(const MaterialParams& m, const FbarGeometry& g, int n_modes = 1) {
    m.validate();
    g.validate();
    const auto pz = fbar_pole_zero(m, g, n_modes);
    std::vector<double> zeros;
    for (const auto& p : pz) zeros.push_back(p.zero);
    FosterOptions opts;
    opts.dc_reference = pz.front().zero;
    return foster_from_admittance([&](double w) { return fbar_admittance(m, g, w); }, zeros, opts);
}

}  // namespace pq
