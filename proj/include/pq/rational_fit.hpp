#pragma once

// Rational fitting of sampled one-port admittances by iterative pole
// relocation, lossless projection of the result and extraction of its zeros.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <vector>

#include <Eigen/Dense>

#include "pq/detail/secular.hpp"
#include "pq/error.hpp"
#include "pq/physics_models.hpp"
#include "pq/rational_model.hpp"

namespace pq {

enum class Weighting { uniform, inverse_magnitude };

struct FitOptions {
    int n_poles = 2;
    int max_iterations = 50;
    double tolerance = 1e-10;           // relative residual target
    double pole_tolerance = 1e-12;      // relative pole movement that stops relocation
    double backtrack_allowance = 0.0;   // tolerated relative residual increase per iteration
    Weighting weighting = Weighting::inverse_magnitude;
    bool enforce_lossless = true;
    double initial_damping_ratio = 100.0;  // Im / |Re| of the starting poles

    void validate() const {
        if (n_poles < 0 || n_poles % 2 != 0) throw ConfigError("FitOptions: n_poles must be even and >= 0");
        if (max_iterations < 1) throw ConfigError("FitOptions: max_iterations must be >= 1");
        if (!(tolerance > 0.0) || !(pole_tolerance > 0.0)) throw ConfigError("FitOptions: tolerances must be > 0");
        if (!(backtrack_allowance >= 0.0)) throw ConfigError("FitOptions: backtrack_allowance must be >= 0");
    }
};

struct LosslessDiagnostics {
    int clamped_residues = 0;
    int merged_poles = 0;
    double max_pole_real_ratio = 0.0;       // largest |Re s_k| / |s_k| removed
    double max_residue_imag_ratio = 0.0;    // largest |Im R_k| / |R_k| removed
    double removed_const_term = 0.0;
};

struct FitReport {
    RationalModel model;
    int iterations = 0;
    std::vector<double> residual_history;  // one entry per relocation pass
    double relocation_residual = 0.0;      // before lossless projection
    double projection_residual = 0.0;      // after projection (== model.residual when enforced)
    int suggested_poles = 0;
    LosslessDiagnostics lossless;
};

/// Relative residual max_i |Y_model(i w_i) - Y_i| / max_i |Y_i|.
inline double relative_residual(const RationalModel& m, const AdmittanceSamples& s) {
    double err = 0.0, mag = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        err = std::max(err, std::abs(m.at_omega(s.omega[i]) - s.values[i]));
        mag = std::max(mag, std::abs(s.values[i]));
    }
    return mag == 0.0 ? err : err / mag;
}

/// Order hint: every pole of a lossless admittance shows up as a +/- sign flip
/// of Im[Y] across the grid.
inline int suggest_pole_count(const AdmittanceSamples& s) {
    int flips = 0;
    for (std::size_t i = 1; i < s.size(); ++i)
        if (s.values[i - 1].imag() > 0.0 && s.values[i].imag() < 0.0) ++flips;
    return 2 * flips;
}

namespace detail {

// A real pole or a complex-conjugate pair, in normalized frequency units.
struct PoleSlot {
    cdouble pole;
    bool complex_pair;
};

inline std::vector<PoleSlot> slots_from_eigenvalues(const Eigen::VectorXcd& ev, double real_tol = 1e-12) {
    std::vector<cdouble> upper;
    std::vector<double> reals;
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
        cdouble p = ev(i);
        if (p.real() > 0.0) p = {-p.real(), p.imag()};  // flip unstable poles
        if (std::abs(p.imag()) <= real_tol * std::max(std::abs(p), 1e-300))
            reals.push_back(p.real());
        else if (p.imag() > 0.0)
            upper.push_back(p);
    }
    std::sort(upper.begin(), upper.end(), [](auto a, auto b) { return a.imag() < b.imag(); });
    std::sort(reals.begin(), reals.end());
    std::vector<PoleSlot> out;
    for (double r : reals) out.push_back({{r, 0.0}, false});
    for (auto p : upper) out.push_back({p, true});
    return out;
}

inline int slot_width(const std::vector<PoleSlot>& slots) {
    int n = 0;
    for (const auto& s : slots) n += s.complex_pair ? 2 : 1;
    return n;
}

// Writes the real-valued basis functions of every slot at s into row r of
// `re` and `im` (real and imaginary parts), starting at column `col`.
inline void fill_basis(const std::vector<PoleSlot>& slots, cdouble s, cdouble factor, Eigen::MatrixXd& a,
                       Eigen::Index row_re, Eigen::Index row_im, Eigen::Index col, double weight) {
    for (const auto& slot : slots) {
        if (!slot.complex_pair) {
            const cdouble v = factor / (s - slot.pole);
            a(row_re, col) = weight * v.real();
            a(row_im, col) = weight * v.imag();
            ++col;
        } else {
            const cdouble d1 = 1.0 / (s - slot.pole);
            const cdouble d2 = 1.0 / (s - std::conj(slot.pole));
            const cdouble v1 = factor * (d1 + d2);
            const cdouble v2 = factor * cdouble(0.0, 1.0) * (d1 - d2);
            a(row_re, col) = weight * v1.real();
            a(row_im, col) = weight * v1.imag();
            a(row_re, col + 1) = weight * v2.real();
            a(row_im, col + 1) = weight * v2.imag();
            col += 2;
        }
    }
}

// Column-normalized least squares. Numerically rank-deficient systems (more
// poles than the data supports) get the minimum-norm solution.
inline Eigen::VectorXd solve_least_squares(Eigen::MatrixXd a, const Eigen::VectorXd& b, const char* what) {
    if (a.rows() < a.cols()) throw NumericalError(std::string(what) + ": fewer equations than unknowns");
    Eigen::VectorXd norms(a.cols());
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
        norms(j) = a.col(j).norm();
        if (norms(j) == 0.0) norms(j) = 1.0;
        a.col(j) /= norms(j);
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
    qr.setThreshold(1e-13);
    Eigen::VectorXd x;
    if (qr.rank() < a.cols()) {
        Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(a);
        cod.setThreshold(1e-13);
        x = cod.solve(b);
    } else {
        x = qr.solve(b);
    }
    if (!x.allFinite()) throw NumericalError(std::string(what) + ": non-finite least-squares solution");
    return x.cwiseQuotient(norms);
}

struct NormalizedData {
    std::vector<cdouble> s;  // i omega / omega_scale
    std::vector<cdouble> y;  // Y / y_scale
    std::vector<double> w;   // row weights
    double omega_scale = 1.0;
    double y_scale = 1.0;
};

inline NormalizedData normalize(const AdmittanceSamples& samples, Weighting weighting) {
    NormalizedData d;
    d.omega_scale = samples.omega.back();
    double ymax = 0.0;
    for (const auto& y : samples.values) ymax = std::max(ymax, std::abs(y));
    d.y_scale = ymax > 0.0 ? ymax : 1.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        d.s.emplace_back(0.0, samples.omega[i] / d.omega_scale);
        d.y.push_back(samples.values[i] / d.y_scale);
        double w = 1.0;
        if (weighting == Weighting::inverse_magnitude) {
            const double mag = std::abs(d.y.back());
            w = 1.0 / std::max(mag, 1e-12);
        }
        d.w.push_back(w);
    }
    return d;
}

struct ResidueFit {
    std::vector<cdouble> poles, residues;
    double prop = 0.0, constant = 0.0;
};

// Residues, D and C for fixed poles (normalized units).
inline ResidueFit fit_residues(const NormalizedData& d, const std::vector<PoleSlot>& slots) {
    const auto n = static_cast<Eigen::Index>(slot_width(slots));
    const auto rows = static_cast<Eigen::Index>(2 * d.s.size());
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(rows, n + 2);
    Eigen::VectorXd b(rows);
    for (std::size_t i = 0; i < d.s.size(); ++i) {
        const auto r = static_cast<Eigen::Index>(2 * i);
        fill_basis(slots, d.s[i], 1.0, a, r, r + 1, 0, d.w[i]);
        a(r, n) = d.w[i];
        a(r + 1, n) = 0.0;
        a(r, n + 1) = d.w[i] * d.s[i].real();
        a(r + 1, n + 1) = d.w[i] * d.s[i].imag();
        b(r) = d.w[i] * d.y[i].real();
        b(r + 1) = d.w[i] * d.y[i].imag();
    }
    const Eigen::VectorXd x = solve_least_squares(a, b, "vector_fit residue identification");
    ResidueFit out;
    Eigen::Index col = 0;
    for (const auto& slot : slots) {
        if (!slot.complex_pair) {
            out.poles.push_back(slot.pole);
            out.residues.emplace_back(x(col), 0.0);
            ++col;
        } else {
            const cdouble r(x(col), x(col + 1));
            out.poles.push_back(slot.pole);
            out.residues.push_back(r);
            out.poles.push_back(std::conj(slot.pole));
            out.residues.push_back(std::conj(r));
            col += 2;
        }
    }
    out.constant = x(n);
    out.prop = x(n + 1);
    return out;
}

// One pole-relocation pass: fit sigma(s) f(s) and return the zeros of sigma.
inline std::vector<PoleSlot> relocate(const NormalizedData& d, const std::vector<PoleSlot>& slots) {
    const auto n = static_cast<Eigen::Index>(slot_width(slots));
    const auto rows = static_cast<Eigen::Index>(2 * d.s.size());
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(rows, 2 * n + 2);
    Eigen::VectorXd b(rows);
    for (std::size_t i = 0; i < d.s.size(); ++i) {
        const auto r = static_cast<Eigen::Index>(2 * i);
        fill_basis(slots, d.s[i], 1.0, a, r, r + 1, 0, d.w[i]);
        a(r, n) = d.w[i];
        a(r, n + 1) = d.w[i] * d.s[i].real();
        a(r + 1, n + 1) = d.w[i] * d.s[i].imag();
        fill_basis(slots, d.s[i], -d.y[i], a, r, r + 1, n + 2, d.w[i]);
        b(r) = d.w[i] * d.y[i].real();
        b(r + 1) = d.w[i] * d.y[i].imag();
    }
    const Eigen::VectorXd x = solve_least_squares(a, b, "vector_fit pole relocation");
    const Eigen::VectorXd sigma_c = x.tail(n);

    // zeros of sigma(s) = 1 + c~^T (sI - A)^-1 b  ->  eig(A - b c~^T)
    Eigen::MatrixXd amat = Eigen::MatrixXd::Zero(n, n);
    Eigen::VectorXd bvec = Eigen::VectorXd::Zero(n);
    Eigen::Index k = 0;
    for (const auto& slot : slots) {
        if (!slot.complex_pair) {
            amat(k, k) = slot.pole.real();
            bvec(k) = 1.0;
            ++k;
        } else {
            const double re = slot.pole.real(), im = slot.pole.imag();
            amat(k, k) = re;
            amat(k, k + 1) = im;
            amat(k + 1, k) = -im;
            amat(k + 1, k + 1) = re;
            bvec(k) = 2.0;
            k += 2;
        }
    }
    const Eigen::MatrixXd h = amat - bvec * sigma_c.transpose();
    Eigen::EigenSolver<Eigen::MatrixXd> es(h, false);
    if (es.info() != Eigen::Success) throw NumericalError("vector_fit: eigenvalue solve failed during relocation");
    return slots_from_eigenvalues(es.eigenvalues());
}

inline double pole_movement(const std::vector<PoleSlot>& a, const std::vector<PoleSlot>& b) {
    if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
    double move = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i].complex_pair != b[i].complex_pair) return std::numeric_limits<double>::infinity();
        move = std::max(move, std::abs(a[i].pole - b[i].pole) / std::max(std::abs(a[i].pole), 1e-300));
    }
    return move;
}

inline RationalModel denormalize(const ResidueFit& fit, const NormalizedData& d) {
    RationalModel m;
    for (std::size_t k = 0; k < fit.poles.size(); ++k) {
        m.poles.push_back(fit.poles[k] * d.omega_scale);
        m.residues.push_back(fit.residues[k] * d.omega_scale * d.y_scale);
    }
    m.prop_term = fit.prop * d.y_scale / d.omega_scale;
    m.const_term = fit.constant * d.y_scale;
    return m;
}

// Refit C and the real residues of an already-projected lossless model so that
// only the susceptance Im[Y] is matched: Im Y = w C + sum 2 R w / (p^2 - w^2) - G / w.
inline RationalModel refit_lossless_residues(const RationalModel& projected, const NormalizedData& d) {
    const auto pairs = lossless_pairs(projected);
    const bool has_g = projected.inductive_term > 0.0;
    const auto n = static_cast<Eigen::Index>(pairs.size());
    const Eigen::Index cols = n + 1 + (has_g ? 1 : 0);
    const auto rows = static_cast<Eigen::Index>(d.s.size());
    Eigen::MatrixXd a(rows, cols);
    Eigen::VectorXd b(rows);
    for (Eigen::Index i = 0; i < rows; ++i) {
        const double w = d.s[static_cast<std::size_t>(i)].imag();
        const double wt = d.w[static_cast<std::size_t>(i)];
        for (Eigen::Index k = 0; k < n; ++k) {
            const double p = pairs[static_cast<std::size_t>(k)].omega / d.omega_scale;
            a(i, k) = wt * 2.0 * w / (p * p - w * w);
        }
        a(i, n) = wt * w;
        if (has_g) a(i, n + 1) = -wt / w;
        b(i) = wt * d.y[static_cast<std::size_t>(i)].imag();
    }
    const Eigen::VectorXd x = solve_least_squares(a, b, "vector_fit lossless residue refit");
    std::vector<LosslessPair> out(pairs.size());
    for (Eigen::Index k = 0; k < n; ++k)
        out[static_cast<std::size_t>(k)] = {pairs[static_cast<std::size_t>(k)].omega,
                                            x(k) * d.omega_scale * d.y_scale};
    auto m = make_lossless_model(out, x(n) * d.y_scale / d.omega_scale,
                                 has_g ? x(n + 1) * d.y_scale * d.omega_scale : 0.0);
    return m;
}

}  // namespace detail

/// Projects a conjugate-closed model onto the lossless set: poles moved onto
/// the imaginary axis, residues replaced by their real parts with negatives
/// clamped to zero, D dropped and C, G clamped at zero. Real poles collapse
/// onto s = 0 and are folded into the inductive term.
inline RationalModel enforce_lossless(const RationalModel& model, LosslessDiagnostics* diag = nullptr,
                                      double merge_tol = 1e-9) {
    LosslessDiagnostics dg;
    std::vector<LosslessPair> pairs;
    double inductive = model.inductive_term;
    for (std::size_t k = 0; k < model.poles.size(); ++k) {
        const cdouble p = model.poles[k];
        const cdouble r = model.residues[k];
        const double pmag = std::abs(p);
        if (pmag > 0.0) dg.max_pole_real_ratio = std::max(dg.max_pole_real_ratio, std::abs(p.real()) / pmag);
        if (std::abs(r) > 0.0)
            dg.max_residue_imag_ratio = std::max(dg.max_residue_imag_ratio, std::abs(r.imag()) / std::abs(r));
        if (p.imag() == 0.0) {
            inductive += r.real();
            continue;
        }
        if (p.imag() < 0.0) continue;  // conjugate partner handled with the upper pole
        double res = r.real();
        if (res < 0.0) {
            ++dg.clamped_residues;
            res = 0.0;
        }
        pairs.push_back({p.imag(), res});
    }
    std::sort(pairs.begin(), pairs.end(), [](auto a, auto b) { return a.omega < b.omega; });
    std::vector<LosslessPair> merged;
    for (const auto& pr : pairs) {
        if (!merged.empty() && pr.omega - merged.back().omega <= merge_tol * pr.omega) {
            merged.back().residue += pr.residue;
            ++dg.merged_poles;
        } else {
            merged.push_back(pr);
        }
    }
    std::erase_if(merged, [](const LosslessPair& pr) { return pr.residue == 0.0; });
    if (inductive < 0.0) {
        ++dg.clamped_residues;
        inductive = 0.0;
    }
    dg.removed_const_term = model.const_term;
    auto out = make_lossless_model(merged, std::max(model.prop_term, 0.0), inductive);
    out.converged = model.converged;
    out.residual = model.residual;
    if (diag) *diag = dg;
    return out;
}

/// Fits samples to sum_k R_k/(s - s_k) + C s + D by iterative pole relocation.
/// Starting poles are lightly damped conjugate pairs log-spaced over the band.
/// The returned model is the best one seen; `converged` is false when the
/// residual target was missed.
inline FitReport vector_fit(const AdmittanceSamples& samples, const FitOptions& opts) {
    opts.validate();
    samples.validate();
    if (samples.size() < static_cast<std::size_t>(2 * opts.n_poles + 2))
        throw ConfigError("vector_fit: need at least 2 * n_poles + 2 samples");

    const auto d = detail::normalize(samples, opts.weighting);
    FitReport report;
    report.suggested_poles = suggest_pole_count(samples);

    std::vector<detail::PoleSlot> slots;
    const int n_pairs = opts.n_poles / 2;
    if (n_pairs > 0) {
        const double lo = samples.omega.front() / d.omega_scale;
        const double hi = samples.omega.back() / d.omega_scale;
        const auto beta = n_pairs == 1 ? std::vector<double>{std::sqrt(lo * hi)}
                                       : numeric::grid(lo, hi, static_cast<std::size_t>(n_pairs), numeric::Spacing::log);
        for (double bval : beta) slots.push_back({{-bval / opts.initial_damping_ratio, bval}, true});
    }

    auto evaluate_fit = [&](const std::vector<detail::PoleSlot>& s) {
        const auto fit = detail::fit_residues(d, s);
        auto model = detail::denormalize(fit, d);
        model.residual = relative_residual(model, samples);
        return model;
    };

    RationalModel best = evaluate_fit(slots);
    std::vector<detail::PoleSlot> best_slots = slots;
    report.residual_history.push_back(best.residual);

    if (n_pairs > 0) {
        double last = best.residual;
        for (int it = 1; it <= opts.max_iterations; ++it) {
            auto next = detail::relocate(d, slots);
            if (detail::slot_width(next) != opts.n_poles) throw NumericalError("vector_fit: relocation changed the pole count");
            const double move = detail::pole_movement(slots, next);
            RationalModel candidate = evaluate_fit(next);
            report.iterations = it;
            if (candidate.residual > last * (1.0 + opts.backtrack_allowance) && candidate.residual > opts.tolerance * 1e-3) {
                // the relocation made things worse: keep the previous poles
                break;
            }
            slots = std::move(next);
            last = candidate.residual;
            report.residual_history.push_back(candidate.residual);
            if (candidate.residual <= best.residual) {
                best = candidate;
                best_slots = slots;
            }
            if (move < opts.pole_tolerance) break;
        }
    }

    report.relocation_residual = best.residual;
    if (opts.enforce_lossless) {
        RationalModel projected = enforce_lossless(best, &report.lossless);
        if (!projected.poles.empty() || projected.prop_term > 0.0 || projected.inductive_term > 0.0) {
            projected = detail::refit_lossless_residues(projected, d);
            LosslessDiagnostics second;
            projected = enforce_lossless(projected, &second);
            report.lossless.clamped_residues += second.clamped_residues;
        }
        projected.residual = relative_residual(projected, samples);
        report.projection_residual = projected.residual;
        best = std::move(projected);
    } else {
        report.projection_residual = best.residual;
    }
    best.converged = best.residual <= opts.tolerance;
    report.model = std::move(best);
    return report;
}

/// Positive-frequency zeros of a lossless model, ascending.
///
/// In u = omega^2 the susceptance condition Im Y(i omega) = 0 becomes the
/// secular equation C u - G - sum 2R_k - sum (-2 R_k p_k^2)/(u - p_k^2) = 0,
/// solved as the eigenvalues of a symmetric arrowhead (bordered diagonal)
/// state matrix. The roots interlace the squared pole frequencies.
inline std::vector<double> model_zeros(const RationalModel& model) {
    const auto pairs = lossless_pairs(model);
    detail::SecularTerms t;
    t.slope = model.prop_term;
    t.offset = -model.inductive_term;
    for (const auto& p : pairs) {
        if (p.residue == 0.0) continue;
        t.offset -= 2.0 * p.residue;
        t.poles.push_back(p.omega * p.omega);
        t.weights.push_back(2.0 * p.residue * p.omega * p.omega);
    }
    if (t.poles.empty() && t.slope == 0.0) throw ContractError("model_zeros: degenerate all-zero model");
    if (t.poles.empty() && model.inductive_term == 0.0) return {};  // Y = sC: only the zero at s = 0
    const auto roots = detail::secular_roots(t, model.inductive_term == 0.0);
    std::vector<double> out;
    out.reserve(roots.size());
    for (double u : roots) {
        if (!(u > 0.0)) throw NumericalError("model_zeros: non-positive squared zero frequency");
        out.push_back(std::sqrt(u));
    }
    return out;
}

}  // namespace pq
