#pragma once

// Exact diagonalization of the single-mode (charge basis x Fock) and the
// multimode (polariton Fock product) Hamiltonians at finite cutoffs.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <boost/math/tools/minima.hpp>

#include "pq/constants.hpp"
#include "pq/detail/eigensolve.hpp"
#include "pq/error.hpp"
#include "pq/foster_network.hpp"
#include "pq/quantize_bbq.hpp"
#include "pq/quantize_single.hpp"

namespace pq {

struct HilbertSpec {
    int charge_cutoff = 20;               // n in [-N, N]
    std::vector<int> fock_cutoffs{12};    // per bosonic mode; a single entry is broadcast
    std::size_t dimension_cap = 20000;
    std::size_t dense_limit = 4000;       // dense solver at or below, Lanczos above
    std::size_t levels = 20;              // lowest levels computed

    int fock(std::size_t k) const {
        return fock_cutoffs.size() == 1 ? fock_cutoffs.front() : fock_cutoffs.at(k);
    }

    std::size_t single_mode_dimension() const {
        return static_cast<std::size_t>(2 * charge_cutoff + 1) * static_cast<std::size_t>(fock(0));
    }

    std::size_t multimode_dimension(std::size_t modes) const {
        std::size_t d = 1;
        for (std::size_t k = 0; k < modes; ++k) d *= static_cast<std::size_t>(fock(k));
        return d;
    }

    void validate_cutoffs(std::size_t modes) const {
        if (fock_cutoffs.empty()) throw ConfigError("HilbertSpec: fock_cutoffs is empty");
        if (fock_cutoffs.size() != 1 && fock_cutoffs.size() != modes)
            throw ConfigError("HilbertSpec: need one Fock cutoff or one per mode");
        for (int f : fock_cutoffs)
            if (f < 4) throw ConfigError("HilbertSpec: Fock cutoffs must be >= 4");
        if (levels < 2) throw ConfigError("HilbertSpec: levels must be >= 2");
    }

    void validate_single() const {
        validate_cutoffs(1);
        if (charge_cutoff < 5) throw ConfigError("HilbertSpec: charge cutoff must be >= 5");
        if (single_mode_dimension() > dimension_cap)
            throw ConfigError("HilbertSpec: dimension " + std::to_string(single_mode_dimension()) +
                              " exceeds the cap " + std::to_string(dimension_cap));
    }

    void validate_multimode(std::size_t modes) const {
        validate_cutoffs(modes);
        if (multimode_dimension(modes) > dimension_cap)
            throw ConfigError("HilbertSpec: dimension " + std::to_string(multimode_dimension(modes)) +
                              " exceeds the cap " + std::to_string(dimension_cap));
    }

    HilbertSpec doubled() const {
        HilbertSpec d = *this;
        d.charge_cutoff *= 2;
        for (int& f : d.fock_cutoffs) f *= 2;
        return d;
    }
};

struct LevelLabel {
    std::vector<int> quanta;  // single mode: {transmon level, phonon number}
    double overlap = 0.0;     // squared overlap with that decoupled state
};

inline std::string label_string(const std::vector<int>& quanta) {
    std::string s = "|";
    for (std::size_t i = 0; i < quanta.size(); ++i) s += (i ? "," : "") + std::to_string(quanta[i]);
    return s + ">";
}

struct LabeledTransition {
    std::string label;
    double energy = 0.0;  // J, above the ground level
};

struct SpectrumReport {
    std::vector<double> eigenvalues;  // J, ascending
    std::vector<LevelLabel> labels;
    std::vector<LabeledTransition> transitions;
    std::size_t dimension = 0;

    // g extraction
    std::optional<double> g;               // rad/s, half the minimum doublet splitting
    std::optional<double> g_perturbative;  // rad/s, closed form at the same E_J
    std::optional<double> e_j_at_minimum;  // J

    // Kerr extraction, rad/s
    std::vector<double> anharmonicities;
    Eigen::MatrixXd cross_kerr;

    bool converged = false;
    double max_relative_shift = std::numeric_limits<double>::quiet_NaN();
    bool ambiguous = false;
    std::vector<std::string> notes;
};

/// Squared overlap below which a level is not assigned to a decoupled state.
inline constexpr double kAmbiguousOverlap = 0.6;
/// Relative shift of used transitions under cutoff doubling tolerated as converged.
inline constexpr double kConvergenceShift = 1e-3;

namespace detail {

inline Eigen::MatrixXd fock_quadrature(int f) {
    Eigen::MatrixXd x = Eigen::MatrixXd::Zero(f, f);
    for (int n = 0; n + 1 < f; ++n) x(n, n + 1) = x(n + 1, n) = std::sqrt(static_cast<double>(n + 1));
    return x;
}

inline Eigen::MatrixXd transmon_charge_hamiltonian(double e_c, double e_j, double n_g, int n_cut) {
    const int d = 2 * n_cut + 1;
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(d, d);
    for (int i = 0; i < d; ++i) {
        const double n = i - n_cut - n_g;
        h(i, i) = 4.0 * e_c * n * n;
        if (i + 1 < d) h(i, i + 1) = h(i + 1, i) = -0.5 * e_j;
    }
    return h;
}

template <typename Apply>
Eigenpairs solve_lowest(Apply&& apply, Eigen::Index dim, const HilbertSpec& h, bool want_vectors,
                        const std::function<Eigen::MatrixXd()>& dense) {
    const auto count = static_cast<Eigen::Index>(h.levels);
    if (static_cast<std::size_t>(dim) <= h.dense_limit) return dense_lowest(dense(), count, want_vectors);
    return lanczos_lowest(apply, dim, count, want_vectors);
}

inline void fill_transitions(SpectrumReport& r) {
    r.transitions.clear();
    for (std::size_t i = 1; i < r.eigenvalues.size(); ++i) {
        const std::string label = i < r.labels.size() ? label_string(r.labels[i].quanta) : "#" + std::to_string(i);
        r.transitions.push_back({label, r.eigenvalues[i] - r.eigenvalues[0]});
    }
}

inline double max_shift(const std::vector<double>& coarse, const std::vector<double>& fine) {
    double worst = 0.0;
    for (std::size_t i = 0; i < coarse.size(); ++i) {
        if (!std::isfinite(coarse[i]) || !std::isfinite(fine[i])) return std::numeric_limits<double>::infinity();
        worst = std::max(worst, numeric::relative_difference(coarse[i], fine[i]));
    }
    return worst;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Single mode: 4 E_C (n - n_g)^2 - E_J cos(phi) + hbar Omega a^dag a
//              + 8 E_C^(phi,theta) n_zp^theta (a + a^dag)(n - n_g)
// Basis index (n + N) * F + m.

inline Eigen::SparseMatrix<double> build_single_mode_hamiltonian(const CouplingReport& rep, const TransmonParams& t,
                                                                 const HilbertSpec& h) {
    h.validate_single();
    t.validate();
    if (!(rep.e_c_phi > 0.0) || !(rep.omega > 0.0))
        throw ContractError("build_single_mode_hamiltonian: report lacks charging energy or phonon frequency");
    if (rep.e_c_cross != 0.0 && !(rep.n_zp_theta > 0.0))
        throw ContractError("build_single_mode_hamiltonian: report lacks zero-point fields");
    const int nc = h.charge_cutoff, f = h.fock(0);
    const int dim = (2 * nc + 1) * f;
    const double coupling = 8.0 * rep.e_c_cross * rep.n_zp_theta;
    const double hw = constants::hbar * rep.omega;
    std::vector<Eigen::Triplet<double>> entries;
    entries.reserve(static_cast<std::size_t>(dim) * 5);
    const auto idx = [&](int i, int m) { return i * f + m; };
    for (int i = 0; i <= 2 * nc; ++i) {
        const double n = i - nc - t.n_g;
        for (int m = 0; m < f; ++m) {
            entries.emplace_back(idx(i, m), idx(i, m), 4.0 * rep.e_c_phi * n * n + hw * m);
            if (i + 1 <= 2 * nc) {
                entries.emplace_back(idx(i, m), idx(i + 1, m), -0.5 * t.e_j);
                entries.emplace_back(idx(i + 1, m), idx(i, m), -0.5 * t.e_j);
            }
            if (m + 1 < f && coupling != 0.0) {
                const double v = coupling * n * std::sqrt(static_cast<double>(m + 1));
                entries.emplace_back(idx(i, m), idx(i, m + 1), v);
                entries.emplace_back(idx(i, m + 1), idx(i, m), v);
            }
        }
    }
    Eigen::SparseMatrix<double> hm(dim, dim);
    hm.setFromTriplets(entries.begin(), entries.end());
    return hm;
}

inline detail::Eigenpairs solve_sparse(const Eigen::SparseMatrix<double>& hm, const HilbertSpec& h, bool want_vectors) {
    return detail::solve_lowest(
        [&](const Eigen::Ref<const Eigen::VectorXd>& x, Eigen::VectorXd& y) { y.noalias() = hm * x; }, hm.rows(), h,
        want_vectors, [&] { return Eigen::MatrixXd(hm); });
}

/// Levels of the single-mode Hamiltonian, labeled by overlap with products of
/// bare transmon eigenstates and phonon Fock states.
inline SpectrumReport single_mode_spectrum(const CouplingReport& rep, const TransmonParams& t, const HilbertSpec& h) {
    const auto hm = build_single_mode_hamiltonian(rep, t, h);
    const auto pairs = solve_sparse(hm, h, true);
    SpectrumReport r;
    r.dimension = static_cast<std::size_t>(hm.rows());
    r.eigenvalues.assign(pairs.values.data(), pairs.values.data() + pairs.values.size());

    const int nc = h.charge_cutoff, f = h.fock(0), d = 2 * nc + 1;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> bare(detail::transmon_charge_hamiltonian(rep.e_c_phi, t.e_j, t.n_g, nc));
    for (Eigen::Index c = 0; c < pairs.vectors.cols(); ++c) {
        // psi as a (charge x Fock) matrix, row-major in the basis index
        Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> psi(
            pairs.vectors.col(c).data(), d, f);
        const Eigen::MatrixXd amp = bare.eigenvectors().transpose() * psi;
        Eigen::Index j = 0, m = 0;
        const double best = amp.cwiseAbs2().maxCoeff(&j, &m);
        r.labels.push_back({{static_cast<int>(j), static_cast<int>(m)}, best});
    }
    detail::fill_transitions(r);
    return r;
}

struct GExtractionOptions {
    double bracket_halfwidth = 8.0;  // in units of the closed-form g, as a frequency detuning
    int bits = 26;  // at most half the mantissa for brent_find_minima
    std::uintmax_t max_iterations = 200;
};

/// Avoided-crossing extraction of the phonon-transmon coupling: E_J is tuned
/// through resonance with the single Foster mode and g is half the minimum
/// splitting of the one-excitation doublet. The closed-form g is evaluated at
/// the same E_J for comparison.
inline SpectrumReport extract_g(const FosterNetwork& net, const TransmonParams& t, const HilbertSpec& h,
                                const GExtractionOptions& opts = {}) {
    h.validate_single();
    TransmonGuard guard;
    guard.enforce = false;
    const auto base = capacitance_energies(net, t);
    const double e_c = base.e_c_phi;
    const double hw = constants::hbar * base.omega;
    const double ej0 = std::pow(hw + e_c, 2) / (8.0 * e_c);

    const auto report_at = [&](double ej) {
        TransmonParams ti = t;
        ti.e_j = ej;
        auto r = base;
        r.e_j = ej;
        return std::make_pair(coupling_rate(r, guard), ti);
    };
    const auto splitting = [&](double ej) {
        const auto [rep, ti] = report_at(ej);
        const auto pairs = solve_sparse(build_single_mode_hamiltonian(rep, ti, h), h, false);
        return pairs.values(2) - pairs.values(1);
    };

    const double g0 = report_at(ej0).first.g;
    // detuning delta_omega maps to a relative E_J change of about 2 delta_omega / omega
    double half = std::clamp(2.0 * opts.bracket_halfwidth * g0 / base.omega, 1e-4, 0.75);
    double ej_min = ej0;
    for (int attempt = 0;; ++attempt) {
        // minimize over E_J / E_J0: the minimizer's tolerance has an absolute floor
        const double lo = 1.0 - half, hi = 1.0 + half;
        std::uintmax_t it = opts.max_iterations;
        const auto [x, fx] = boost::math::tools::brent_find_minima(
            [&](double u) { return splitting(u * ej0); }, lo, hi, opts.bits, it);
        (void)fx;
        ej_min = x * ej0;
        const double edge = std::min(x - lo, hi - x) / (hi - lo);
        if (edge > 0.02) break;
        if (attempt == 3) throw NumericalError("extract_g: avoided crossing not bracketed");
        half = std::min(4.0 * half, 0.75);
    }

    const auto [rep, ti] = report_at(ej_min);
    SpectrumReport r = single_mode_spectrum(rep, ti, h);
    r.e_j_at_minimum = ej_min;
    r.g = 0.5 * (r.eigenvalues[2] - r.eigenvalues[1]) / constants::hbar;
    r.g_perturbative = rep.g;
    if (rep.transmon_limit_warning)
        r.notes.push_back("E_J/E_C = " + std::to_string(rep.ej_over_ec) + " at the crossing is below the transmon limit");

    // both doublet levels should live in span{|1,0>, |0,1>}
    {
        const auto hm = build_single_mode_hamiltonian(rep, ti, h);
        const auto pairs = solve_sparse(hm, h, true);
        const int nc = h.charge_cutoff, f = h.fock(0), d = 2 * nc + 1;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> bare(
            detail::transmon_charge_hamiltonian(rep.e_c_phi, ti.e_j, ti.n_g, nc));
        for (Eigen::Index c = 1; c <= 2; ++c) {
            Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> psi(
                pairs.vectors.col(c).data(), d, f);
            const Eigen::MatrixXd amp = bare.eigenvectors().transpose() * psi;
            const double weight = amp(1, 0) * amp(1, 0) + amp(0, 1) * amp(0, 1);
            if (weight < kAmbiguousOverlap) {
                r.ambiguous = true;
                r.notes.push_back("doublet level " + std::to_string(c) + " has weight " + std::to_string(weight) +
                                  " in the one-excitation subspace");
            }
        }
    }

    const HilbertSpec fine = h.doubled();
    if (fine.single_mode_dimension() > fine.dimension_cap) {
        r.notes.push_back("cutoff doubling exceeds the dimension cap; convergence not verified");
    } else {
        const auto fp = solve_sparse(build_single_mode_hamiltonian(rep, ti, fine), fine, false);
        const std::vector<double> coarse{r.eigenvalues[1] - r.eigenvalues[0], r.eigenvalues[2] - r.eigenvalues[0]};
        const std::vector<double> refined{fp.values(1) - fp.values(0), fp.values(2) - fp.values(0)};
        r.max_relative_shift = detail::max_shift(coarse, refined);
        r.converged = r.max_relative_shift < kConvergenceShift;
    }
    return r;
}

// ---------------------------------------------------------------------------
// Multimode: H = hbar sum omega_k a_k^dag a_k - E_J [cos(Phi) + Phi^2 / 2],
// Phi = sum psi_k (a_k + a_k^dag). The omega_k already contain the junction's
// linear inductance, so only the nonlinear remainder of the cosine is added.
// Basis index sum n_k * stride_k with the last mode fastest.

enum class CosineMethod { matrix_function, taylor8 };

class MultimodeHamiltonian {
public:
    MultimodeHamiltonian(const std::vector<PolaritonMode>& modes, double e_j, std::vector<int> cutoffs,
                         CosineMethod method)
        : e_j_(e_j), cutoffs_(std::move(cutoffs)), method_(method) {
        const std::size_t n = modes.size();
        strides_.assign(n, 1);
        for (std::size_t k = n; k-- > 1;) strides_[k - 1] = strides_[k] * cutoffs_[k];
        dim_ = strides_.front() * cutoffs_.front();
        diagonal_ = Eigen::VectorXd::Zero(dim_);
        for (std::size_t k = 0; k < n; ++k) {
            const int f = cutoffs_[k];
            const Eigen::MatrixXd x = detail::fock_quadrature(f);
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(x);
            const Eigen::ArrayXd theta = modes[k].psi_zp * es.eigenvalues().array();
            const Eigen::MatrixXd& v = es.eigenvectors();
            psi_.push_back(modes[k].psi_zp);
            quadrature_.push_back(x);
            cos_.push_back(v * theta.cos().matrix().asDiagonal() * v.transpose());
            sin_.push_back(v * theta.sin().matrix().asDiagonal() * v.transpose());
            for (Eigen::Index i = 0; i < dim_; ++i)
                diagonal_(i) += constants::hbar * modes[k].omega * static_cast<double>((i / strides_[k]) % f);
        }
    }

    Eigen::Index dimension() const { return dim_; }
    const std::vector<int>& cutoffs() const { return cutoffs_; }

    /// Quanta of each mode in basis state i.
    std::vector<int> quanta(Eigen::Index i) const {
        std::vector<int> q(cutoffs_.size());
        for (std::size_t k = 0; k < q.size(); ++k) q[k] = static_cast<int>((i / strides_[k]) % cutoffs_[k]);
        return q;
    }

    void apply(const Eigen::Ref<const Eigen::VectorXd>& x, Eigen::VectorXd& y) const {
        Eigen::VectorXd c = cosine(x);
        Eigen::VectorXd phi2 = phi(phi(x));
        y = diagonal_.cwiseProduct(x) - e_j_ * (c + 0.5 * phi2);
    }

    Eigen::MatrixXd dense() const {
        Eigen::MatrixXd h(dim_, dim_);
        Eigen::VectorXd e = Eigen::VectorXd::Zero(dim_), col;
        for (Eigen::Index i = 0; i < dim_; ++i) {
            e(i) = 1.0;
            apply(e, col);
            h.col(i) = col;
            e(i) = 0.0;
        }
        return 0.5 * (h + h.transpose());
    }

private:
    /// y = (A acting on mode k) x
    Eigen::VectorXd on_mode(const Eigen::MatrixXd& a, std::size_t k, const Eigen::Ref<const Eigen::VectorXd>& x) const {
        using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
        const Eigen::Index f = cutoffs_[k], s = strides_[k], block = f * s;
        Eigen::VectorXd y(dim_);
        for (Eigen::Index o = 0; o < dim_; o += block) {
            Eigen::Map<const RowMajor> in(x.data() + o, f, s);
            Eigen::Map<RowMajor> out(y.data() + o, f, s);
            out.noalias() = a * in;
        }
        return y;
    }

    Eigen::VectorXd phi(const Eigen::Ref<const Eigen::VectorXd>& x) const {
        Eigen::VectorXd y = Eigen::VectorXd::Zero(dim_);
        for (std::size_t k = 0; k < psi_.size(); ++k) y += psi_[k] * on_mode(quadrature_[k], k, x);
        return y;
    }

    Eigen::VectorXd cosine(const Eigen::Ref<const Eigen::VectorXd>& x) const {
        if (method_ == CosineMethod::taylor8) {
            Eigen::VectorXd term = x, acc = x;
            double factorial = 1.0;
            for (int m = 1; m <= 4; ++m) {
                term = phi(phi(term));
                factorial *= static_cast<double>((2 * m - 1) * (2 * m));
                acc += (m % 2 ? -1.0 : 1.0) / factorial * term;
            }
            return acc;
        }
        // Re prod_k (C_k + i S_k): subsets with an even number of sine factors
        const std::size_t n = psi_.size();
        Eigen::VectorXd acc = Eigen::VectorXd::Zero(dim_);
        for (unsigned mask = 0; mask < (1u << n); ++mask) {
            const int sines = __builtin_popcount(mask);
            if (sines % 2) continue;
            Eigen::VectorXd v = x;
            for (std::size_t k = 0; k < n; ++k) v = on_mode((mask >> k) & 1u ? sin_[k] : cos_[k], k, v);
            acc += (sines / 2 % 2 ? -1.0 : 1.0) * v;
        }
        return acc;
    }

    double e_j_;
    std::vector<int> cutoffs_;
    CosineMethod method_;
    std::vector<Eigen::Index> strides_;
    Eigen::Index dim_ = 0;
    Eigen::VectorXd diagonal_;
    std::vector<double> psi_;
    std::vector<Eigen::MatrixXd> quadrature_, cos_, sin_;
};

inline MultimodeHamiltonian build_multimode_hamiltonian(const std::vector<PolaritonMode>& modes, double e_j,
                                                        const HilbertSpec& h,
                                                        CosineMethod method = CosineMethod::matrix_function) {
    if (modes.empty() || modes.size() > 3) throw ContractError("build_multimode_hamiltonian: supports 1 to 3 modes");
    if (!(e_j > 0.0)) throw ConfigError("build_multimode_hamiltonian: E_J must be > 0");
    for (const auto& m : modes)
        if (!(m.omega > 0.0) || !(m.psi_zp > 0.0))
            throw ContractError("build_multimode_hamiltonian: modes need positive omega and psi_zp");
    h.validate_multimode(modes.size());
    std::vector<int> cut(modes.size());
    for (std::size_t k = 0; k < modes.size(); ++k) cut[k] = h.fock(k);
    return MultimodeHamiltonian(modes, e_j, cut, method);
}

inline SpectrumReport multimode_spectrum(const MultimodeHamiltonian& hm, const HilbertSpec& h) {
    const auto pairs = detail::solve_lowest(
        [&](const Eigen::Ref<const Eigen::VectorXd>& x, Eigen::VectorXd& y) { hm.apply(x, y); }, hm.dimension(), h,
        true, [&] { return hm.dense(); });
    SpectrumReport r;
    r.dimension = static_cast<std::size_t>(hm.dimension());
    r.eigenvalues.assign(pairs.values.data(), pairs.values.data() + pairs.values.size());
    for (Eigen::Index c = 0; c < pairs.vectors.cols(); ++c) {
        Eigen::Index i = 0;
        const double best = pairs.vectors.col(c).cwiseAbs2().maxCoeff(&i);
        r.labels.push_back({hm.quanta(i), best});
    }
    detail::fill_transitions(r);
    return r;
}

namespace detail {

/// Energy of the level labeled by `quanta`, or nullopt with a note.
inline std::optional<double> labeled_energy(SpectrumReport& r, const std::vector<int>& quanta) {
    for (std::size_t i = 0; i < r.labels.size(); ++i) {
        if (r.labels[i].quanta != quanta) continue;
        if (r.labels[i].overlap < kAmbiguousOverlap) {
            r.ambiguous = true;
            r.notes.push_back("level " + label_string(quanta) + " has overlap " + std::to_string(r.labels[i].overlap));
            return std::nullopt;
        }
        return r.eigenvalues[i];
    }
    r.ambiguous = true;
    r.notes.push_back("level " + label_string(quanta) + " not found among the computed levels");
    return std::nullopt;
}

/// Fills anharmonicities and cross-Kerr (rad/s); returns the transition
/// energies used, in a fixed order, for the convergence comparison.
inline std::vector<double> kerr_from_levels(SpectrumReport& r, std::size_t n) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    const auto state = [&](std::initializer_list<std::pair<std::size_t, int>> q) {
        std::vector<int> v(n, 0);
        for (auto [k, c] : q) v[k] += c;
        return v;
    };
    std::vector<double> used;
    const auto e0 = labeled_energy(r, state({}));
    std::vector<std::optional<double>> e1(n), e2(n);
    for (std::size_t k = 0; k < n; ++k) {
        e1[k] = labeled_energy(r, state({{k, 1}}));
        e2[k] = labeled_energy(r, state({{k, 2}}));
    }
    r.anharmonicities.assign(n, nan);
    r.cross_kerr = Eigen::MatrixXd::Constant(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n), nan);
    const double hb = constants::hbar;
    for (std::size_t k = 0; k < n; ++k) {
        const auto kk = static_cast<Eigen::Index>(k);
        if (e0 && e1[k] && e2[k]) {
            r.anharmonicities[k] = (*e2[k] - 2.0 * *e1[k] + *e0) / hb;
            r.cross_kerr(kk, kk) = r.anharmonicities[k];
            used.push_back(*e1[k] - *e0);
            used.push_back(*e2[k] - *e0);
        } else {
            used.push_back(nan);
            used.push_back(nan);
        }
        for (std::size_t j = k + 1; j < n; ++j) {
            const auto jj = static_cast<Eigen::Index>(j);
            const auto e11 = labeled_energy(r, state({{k, 1}, {j, 1}}));
            if (e0 && e1[k] && e1[j] && e11) {
                r.cross_kerr(kk, jj) = r.cross_kerr(jj, kk) = (*e11 - *e1[k] - *e1[j] + *e0) / hb;
                used.push_back(*e11 - *e0);
            } else {
                used.push_back(nan);
            }
        }
    }
    return used;
}

}  // namespace detail

/// Exact self- and cross-Kerr of polariton modes: alpha_k = E(2_k) - 2E(1_k) + E(0),
/// chi_kj = E(1_k 1_j) - E(1_k) - E(1_j) + E(0), with a cutoff-doubling check.
inline SpectrumReport multimode_kerr(const std::vector<PolaritonMode>& modes, double e_j, const HilbertSpec& h,
                                     CosineMethod method = CosineMethod::matrix_function) {
    auto r = multimode_spectrum(build_multimode_hamiltonian(modes, e_j, h, method), h);
    const auto coarse = detail::kerr_from_levels(r, modes.size());
    const HilbertSpec fine = h.doubled();
    if (fine.multimode_dimension(modes.size()) > fine.dimension_cap) {
        r.notes.push_back("cutoff doubling exceeds the dimension cap; convergence not verified");
        return r;
    }
    auto rf = multimode_spectrum(build_multimode_hamiltonian(modes, e_j, fine, method), fine);
    const auto refined = detail::kerr_from_levels(rf, modes.size());
    r.max_relative_shift = detail::max_shift(coarse, refined);
    r.converged = !r.ambiguous && !rf.ambiguous && r.max_relative_shift < kConvergenceShift;
    return r;
}

}  // namespace pq
