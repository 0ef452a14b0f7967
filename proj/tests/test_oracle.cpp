#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "pq/oracle.hpp"

using namespace pq;
using constants::hbar;

namespace {

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

TransmonParams transmon(double e_j_hz, double c_sigma, double n_g = 0.0) {
    return {units::hz_to_joules(e_j_hz), c_sigma, n_g};
}

double e_c_of(double c_sigma) { return constants::e * constants::e / (2.0 * c_sigma); }

// Single Foster mode of the 750 nm LiNbO3-like film.
const FosterNetwork kFbar{3.4844692030314663e-14, {FosterMode::from_omega_c(30867133111.999386, 1.5130031000659267e-12)}};

HilbertSpec small_spec(int n, int f) {
    HilbertSpec h;
    h.charge_cutoff = n;
    h.fock_cutoffs = {f};
    return h;
}

// Transmon alone: decoupled network with the phonon far above.
SpectrumReport bare_spectrum(double ej_over_ec, double n_g = 0.0) {
    const double cs = 100e-15;
    const double ej = ej_over_ec * e_c_of(cs);
    const FosterNetwork net{0.0, {FosterMode::from_omega_c(units::hz_to_rad_s(400e9), 1e-12)}};
    const TransmonParams t{ej, cs, n_g};
    TransmonGuard guard;
    guard.enforce = false;
    return single_mode_spectrum(quantize_single_mode(net, t, guard), t, small_spec(20, 4));
}

}  // namespace

TEST(SingleModeHamiltonian, SymmetricAndSized) {
    const auto t = transmon(10e9, 100e-15, 0.3);
    const auto rep = quantize_single_mode(kFbar, t);
    const auto h = small_spec(8, 6);
    const auto hm = build_single_mode_hamiltonian(rep, t, h);
    EXPECT_EQ(static_cast<std::size_t>(hm.rows()), h.single_mode_dimension());
    const Eigen::SparseMatrix<double> diff = hm - Eigen::SparseMatrix<double>(hm.transpose());
    EXPECT_EQ(diff.norm(), 0.0);
}

TEST(SingleModeHamiltonian, DecoupledIsTensorSum) {
    const FosterNetwork net{0.0, {FosterMode::from_omega_c(units::hz_to_rad_s(4.3e9), 1e-12)}};
    const auto t = transmon(20e9, 100e-15, 0.2);
    const auto rep = quantize_single_mode(net, t);
    ASSERT_EQ(rep.g, 0.0);
    const auto h = small_spec(15, 8);
    const auto s = single_mode_spectrum(rep, t, h);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> bare(
        detail::transmon_charge_hamiltonian(rep.e_c_phi, t.e_j, t.n_g, h.charge_cutoff));
    std::vector<double> sums;
    for (Eigen::Index j = 0; j < bare.eigenvalues().size(); ++j)
        for (int m = 0; m < h.fock(0); ++m) sums.push_back(bare.eigenvalues()(j) + hbar * rep.omega * m);
    std::sort(sums.begin(), sums.end());
    ASSERT_EQ(s.eigenvalues.size(), h.levels);
    const double scale = hbar * rep.omega;
    for (std::size_t i = 0; i < s.eigenvalues.size(); ++i) EXPECT_NEAR(s.eigenvalues[i], sums[i], 1e-10 * scale);
    for (std::size_t i = 1; i < s.eigenvalues.size(); ++i) EXPECT_GE(s.eigenvalues[i], s.eigenvalues[i - 1]);
}

TEST(SingleModeHamiltonian, DecoupledExtractionGivesZeroG) {
    const FosterNetwork net{0.0, {FosterMode::from_omega_c(units::hz_to_rad_s(4.3e9), 1e-12)}};
    const auto r = extract_g(net, transmon(20e9, 100e-15), small_spec(10, 6));
    ASSERT_TRUE(r.g.has_value());
    EXPECT_EQ(*r.g_perturbative, 0.0);
    EXPECT_LT(*r.g, 1e-6 * units::hz_to_rad_s(4.3e9));
}

TEST(TransmonLimit, AnharmonicityAtRatio50) {
    // charge-basis value, independent high-precision oracle
    const auto s = bare_spectrum(50.0);
    const double alpha = (s.eigenvalues[2] - 2.0 * s.eigenvalues[1] + s.eigenvalues[0]) / e_c_of(100e-15);
    EXPECT_NEAR(alpha, -1.1492230292253815, 1e-9);
    EXPECT_EQ(s.labels[1].quanta, (std::vector<int>{1, 0}));
    EXPECT_EQ(s.labels[2].quanta, (std::vector<int>{2, 0}));
}

TEST(TransmonLimit, AnharmonicityApproachesMinusEc) {
    const auto s = bare_spectrum(1250.0);
    const double alpha = (s.eigenvalues[2] - 2.0 * s.eigenvalues[1] + s.eigenvalues[0]) / e_c_of(100e-15);
    EXPECT_NEAR(alpha, -1.0235733983193308, 1e-8);
    EXPECT_LT(rel(alpha, -1.0), 0.03);
}

TEST(TransmonLimit, GaugeInvariance) {
    const auto t0 = transmon(10e9, 100e-15, 0.0);
    const auto rep = quantize_single_mode(kFbar, t0);
    ASSERT_GE(rep.ej_over_ec, 50.0);
    const auto h = small_spec(15, 6);
    const auto ref = single_mode_spectrum(rep, t0, h);
    for (double ng : {0.1, 0.25, 0.5}) {
        const auto s = single_mode_spectrum(rep, transmon(10e9, 100e-15, ng), h);
        // levels with three transmon quanta already show charge dispersion
        for (std::size_t i = 0; i < 6; ++i)
            EXPECT_LT(rel(s.transitions[i].energy, ref.transitions[i].energy), 1e-4) << ng << " " << i;
    }
}

TEST(GExtraction, FbarFixtureWithinFivePercent) {
    const auto r = extract_g(kFbar, transmon(10e9, 100e-15), small_spec(10, 8));
    ASSERT_TRUE(r.g && r.g_perturbative);
    EXPECT_LT(*r.g_perturbative / quantize_single_mode(kFbar, transmon(10e9, 100e-15)).omega, 0.05);
    EXPECT_LT(rel(*r.g, *r.g_perturbative), 0.05);
    EXPECT_TRUE(r.converged) << r.max_relative_shift;
    EXPECT_FALSE(r.ambiguous);
}

TEST(GExtraction, StrongCouplingDeviates) {
    const double c = 200e-15;
    const FosterNetwork net{c, {FosterMode::from_omega_c(units::hz_to_rad_s(5e9), c)}};
    const auto t = transmon(15e9, c);
    const auto r = extract_g(net, t, small_spec(12, 16));
    ASSERT_TRUE(r.g && r.g_perturbative);
    const double g_over_omega = *r.g_perturbative / quantize_single_mode(net, t).omega;
    EXPECT_GT(g_over_omega, 0.15);
    EXPECT_LT(g_over_omega, 0.3);
    EXPECT_GT(rel(*r.g, *r.g_perturbative), 0.05);
    EXPECT_TRUE(r.converged);
}

TEST(MultimodeHamiltonian, Symmetric) {
    const std::vector<PolaritonMode> modes{{3e10, 0, 0.25, 0}, {2.2e10, 0, 0.15, 0}};
    const auto hm = build_multimode_hamiltonian(modes, units::hz_to_joules(20e9), small_spec(5, 7));
    std::mt19937_64 rng(2);
    std::normal_distribution<double> n;
    for (int trial = 0; trial < 5; ++trial) {
        Eigen::VectorXd x(hm.dimension()), y(hm.dimension()), hx, hy;
        for (Eigen::Index i = 0; i < x.size(); ++i) {
            x(i) = n(rng);
            y(i) = n(rng);
        }
        hm.apply(x, hx);
        hm.apply(y, hy);
        EXPECT_NEAR(y.dot(hx), x.dot(hy), 1e-12 * hx.norm() * y.norm());
    }
}

TEST(MultimodeHamiltonian, HarmonicLimit) {
    const double w = units::hz_to_rad_s(5e9), ej = units::hz_to_joules(20e9);
    const auto s = multimode_spectrum(build_multimode_hamiltonian({{w, 0, 1e-3, 0}}, ej, small_spec(5, 8)),
                                      small_spec(5, 8));
    EXPECT_NEAR(s.eigenvalues[0], -ej, 1e-9 * hbar * w);
    for (std::size_t m = 1; m < 6; ++m) EXPECT_NEAR(s.eigenvalues[m] - s.eigenvalues[0], m * hbar * w, 1e-6 * hbar * w);
}

TEST(MultimodeHamiltonian, QuarticLimitOfSingleMode) {
    // psi_zp = (2 E_C / E_J)^(1/4) = 0.2
    const double cs = 100e-15, ec = e_c_of(cs), ej = 1250.0 * ec;
    const double w = std::sqrt(8.0 * ej * ec) / hbar;
    const double psi = std::pow(2.0 * ec / ej, 0.25);
    const auto r = multimode_kerr({{w, cs, psi, 1.0}}, ej, small_spec(5, 12));
    EXPECT_TRUE(r.converged);
    EXPECT_LT(rel(r.anharmonicities[0], -ec / hbar), 0.03);
}

TEST(MultimodeHamiltonian, TaylorAgreesWithMatrixCosine) {
    const double ej = units::hz_to_joules(20e9);
    const std::vector<std::vector<PolaritonMode>> cases{
        {{units::hz_to_rad_s(5e9), 0, 0.3, 0}},
        {{units::hz_to_rad_s(5e9), 0, 0.2, 0}, {units::hz_to_rad_s(3.7e9), 0, 0.15, 0}},
    };
    for (const auto& modes : cases) {
        const auto h = small_spec(5, 10);
        const auto a = multimode_spectrum(build_multimode_hamiltonian(modes, ej, h, CosineMethod::matrix_function), h);
        const auto b = multimode_spectrum(build_multimode_hamiltonian(modes, ej, h, CosineMethod::taylor8), h);
        for (std::size_t i = 0; i < 2; ++i) EXPECT_LT(rel(b.transitions[i].energy, a.transitions[i].energy), 1e-3);
    }
}

TEST(MultimodeHamiltonian, ResonantPolaritonsShareAnharmonicity) {
    // C_1 = C_Sigma with e^2 / (hbar Omega C_0) small, so the polariton
    // splitting dwarfs the Kerr terms
    const double omega = units::hz_to_rad_s(20e9), c = 2e-12;
    const FosterNetwork net{200e-15, {FosterMode::from_omega_c(omega, c)}};
    BbqTransmon t{0.0, 2.5e-15, c - 2.5e-15};
    t.e_j = e_j_for_detuning(t, omega, 0.0);
    const auto bbq = black_box_quantize(network_to_model(net), t);
    ASSERT_EQ(bbq.modes.size(), 2u);
    const auto exact = multimode_kerr(bbq.modes, t.e_j, small_spec(5, 10));
    ASSERT_TRUE(exact.converged) << exact.max_relative_shift;
    // at zero detuning the phonon frequency itself is a polariton
    const std::size_t phonon = std::abs(bbq.modes[0].omega - omega) < std::abs(bbq.modes[1].omega - omega) ? 0 : 1;
    EXPECT_LT(rel(bbq.modes[phonon].omega, omega), 1e-9);
    const auto bare = multimode_kerr({{t.omega_linear(), t.c_sigma(), std::pow(2.0 * t.e_c() / t.e_j, 0.25), 1.0}},
                                     t.e_j, small_spec(5, 12));
    EXPECT_LT(rel(exact.anharmonicities[phonon] / bare.anharmonicities[0], 0.25), 0.05);
}

TEST(MultimodeKerr, MatchesPerturbativeCrossKerr) {
    const std::vector<PolaritonMode> modes{{units::hz_to_rad_s(5e9), 0, 0.15, 0}, {units::hz_to_rad_s(3.7e9), 0, 0.08, 0}};
    const double ej = units::hz_to_joules(20e9);
    const auto chi = kerr_matrix(modes, ej);
    const auto r = multimode_kerr(modes, ej, small_spec(5, 10));
    EXPECT_TRUE(r.converged);
    EXPECT_LT(rel(r.cross_kerr(0, 1), chi(0, 1)), 0.05);
    EXPECT_LT(rel(r.anharmonicities[0], chi(0, 0)), 0.05);
    EXPECT_LT(rel(r.anharmonicities[1], chi(1, 1)), 0.05);
}

TEST(MultimodeKerr, LambShiftMatchesOracle) {
    const std::vector<PolaritonMode> modes{{units::hz_to_rad_s(5e9), 0, 0.15, 0}, {units::hz_to_rad_s(3.7e9), 0, 0.08, 0}};
    const double ej = units::hz_to_joules(20e9);
    const auto shifted = lamb_shift(modes, kerr_matrix(modes, ej));
    auto r = multimode_kerr(modes, ej, small_spec(5, 10));
    for (std::size_t k = 0; k < 2; ++k) {
        std::vector<int> q(2, 0);
        q[k] = 1;
        const auto e1 = detail::labeled_energy(r, q), e0 = detail::labeled_energy(r, {0, 0});
        ASSERT_TRUE(e1 && e0);
        const double exact = (*e1 - *e0) / hbar;
        // compare the shifts themselves, not the frequencies
        EXPECT_LT(rel(shifted[k] - modes[k].omega, exact - modes[k].omega), 0.02) << k;
    }
}

TEST(MultimodeKerr, UnconvergedIsFlagged) {
    const auto r = multimode_kerr({{units::hz_to_rad_s(5e9), 0, 0.45, 0}}, units::hz_to_joules(20e9), small_spec(5, 4));
    EXPECT_FALSE(r.converged);
    EXPECT_GT(r.max_relative_shift, kConvergenceShift);
}

TEST(Eigensolve, LanczosMatchesDense) {
    const auto t = transmon(10e9, 100e-15);
    const auto rep = quantize_single_mode(kFbar, t);
    auto h = small_spec(12, 10);
    const auto hm = build_single_mode_hamiltonian(rep, t, h);
    h.levels = 12;
    const auto dense = solve_sparse(hm, h, false);
    h.dense_limit = 0;
    const auto lanczos = solve_sparse(hm, h, false);
    ASSERT_EQ(dense.values.size(), lanczos.values.size());
    const double scale = hbar * rep.omega;
    for (Eigen::Index i = 0; i < dense.values.size(); ++i) EXPECT_NEAR(lanczos.values(i), dense.values(i), 1e-9 * scale);

    const std::vector<PolaritonMode> modes{{3e10, 0, 0.25, 0}, {2.2e10, 0, 0.15, 0}};
    auto hs = small_spec(5, 12);
    const auto mm = build_multimode_hamiltonian(modes, units::hz_to_joules(20e9), hs);
    const auto a = multimode_spectrum(mm, hs);
    hs.dense_limit = 0;
    const auto b = multimode_spectrum(mm, hs);
    for (std::size_t i = 0; i < 10; ++i) EXPECT_NEAR(a.eigenvalues[i], b.eigenvalues[i], 1e-9 * hbar * 3e10);
}

TEST(HilbertSpecTest, Validation) {
    const auto t = transmon(10e9, 100e-15);
    const auto rep = quantize_single_mode(kFbar, t);
    EXPECT_THROW(build_single_mode_hamiltonian(rep, t, small_spec(4, 8)), ConfigError);
    EXPECT_THROW(build_single_mode_hamiltonian(rep, t, small_spec(8, 3)), ConfigError);
    auto big = small_spec(200, 100);
    EXPECT_THROW(build_single_mode_hamiltonian(rep, t, big), ConfigError);
    const std::vector<PolaritonMode> four(4, PolaritonMode{1e10, 0, 0.1, 0});
    EXPECT_THROW(build_multimode_hamiltonian(four, 1e-23, small_spec(5, 4)), ContractError);
    HilbertSpec mixed = small_spec(5, 4);
    mixed.fock_cutoffs = {4, 5, 6};
    EXPECT_THROW(build_multimode_hamiltonian({four[0], four[1]}, 1e-23, mixed), ConfigError);
    EXPECT_EQ(small_spec(5, 6).doubled().charge_cutoff, 10);
    EXPECT_EQ(small_spec(5, 6).doubled().fock(0), 12);
}
