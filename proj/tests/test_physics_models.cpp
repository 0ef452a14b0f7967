#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "pq/foster.hpp"
#include "pq/physics_models.hpp"

using namespace pq;

namespace {

FbarGeometry film() { return {750e-9, 1e-10}; }

MaterialParams with_k2(double k2) {
    // K^2 = e^2 / (c eps + e^2)
    const double c = 2e11, eps = 1e-10;
    return {std::sqrt(k2 * c * eps / (1.0 - k2)), c, eps, 4000.0};
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

}  // namespace

// Frozen with tests/oracles/frozen_values.py (mpmath, 50 digits).
TEST(FbarAdmittance, FrozenLinbo3Values) {
    const auto m = linbo3_like();
    EXPECT_LT(rel(m.k2(), 0.027627354715293583814), 1e-14);
    EXPECT_LT(rel(m.v_bar(), 7368.9852207753318761), 1e-14);
    const double omega1 = std::numbers::pi * m.v_bar() / film().thickness;
    EXPECT_LT(rel(omega1, 30867133111.999390991), 1e-14);
    const auto y = fbar_admittance(m, film(), 0.5 * omega1);
    EXPECT_EQ(y.real(), 0.0);
    EXPECT_LT(rel(y.imag(), 0.00054198550603124591262), 1e-12);
}

TEST(FbarAdmittance, ZeroCouplingIsBareCapacitor) {
    auto m = linbo3_like();
    m.e_pz = 0.0;
    const double cg = film().gate_capacitance(m);
    for (double w : {1e8, 3e10, 1.7e11}) {
        const auto y = fbar_admittance(m, film(), w);
        EXPECT_EQ(y.imag(), w * cg);
    }
}

TEST(FbarAdmittance, VanishesApproachingFirstZero) {
    const auto m = linbo3_like();
    const double omega1 = std::numbers::pi * m.v_bar() / film().thickness;
    const double far = std::abs(fbar_admittance(m, film(), 0.99 * omega1));
    double last = far;
    for (double eps : {1e-3, 1e-5, 1e-7, 1e-9}) {
        const double mag = std::abs(fbar_admittance(m, film(), omega1 * (1.0 - eps)));
        EXPECT_LT(mag, last);
        last = mag;
    }
    EXPECT_LT(last, 1e-6 * far);
}

TEST(FbarAdmittance, PoleProximityThrows) {
    const auto m = linbo3_like();
    const auto pz = fbar_pole_zero(m, film(), 1);
    // the located pole is accurate to a few ulps of x, so probe with a looser floor
    EXPECT_THROW(fbar_admittance(m, film(), pz[0].pole, 1e-10), PoleProximityError);
    EXPECT_NO_THROW(fbar_admittance(m, film(), pz[0].pole * (1.0 - 1e-6)));
    EXPECT_THROW(fbar_admittance(m, film(), -1.0), ConfigError);
}

TEST(FbarAdmittance, PurelyImaginaryAndMonotoneBetweenPoles) {
    const auto m = linbo3_like();
    const auto pz = fbar_pole_zero(m, film(), 2);
    const auto grid = numeric::grid(pz[0].pole * 1.0001, pz[1].pole * 0.9999, 4000, numeric::Spacing::linear);
    double prev = -std::numeric_limits<double>::infinity();
    for (double w : grid) {
        const auto y = fbar_admittance(m, film(), w);
        EXPECT_LT(std::abs(y.real()), 1e-12 * std::abs(y));
        EXPECT_GT(y.imag(), prev);
        prev = y.imag();
    }
}

TEST(FbarPoleZero, ZerosIndependentOfCoupling) {
    for (double k2 : {0.001, 0.04, 0.3}) {
        const auto m = with_k2(k2);
        const auto pz = fbar_pole_zero(m, film(), 4);
        for (int n = 1; n <= 4; ++n) {
            const double expected = (2.0 * n - 1.0) * std::numbers::pi * m.v_bar() / film().thickness;
            EXPECT_LT(rel(pz[n - 1].zero, expected), 1e-15);
            EXPECT_LT(pz[n - 1].pole, pz[n - 1].zero);
            if (n > 1) {
                EXPECT_GT(pz[n - 1].pole, pz[n - 2].zero);
            }
        }
    }
}

TEST(FbarPoleZero, FrozenPoleRatio) {
    const auto pz = fbar_pole_zero(with_k2(0.1), film(), 1);
    EXPECT_NEAR(pz[0].pole / pz[0].zero, 0.9577456263389203833, 1e-12);
    const auto lin = fbar_pole_zero(linbo3_like(), film(), 1);
    EXPECT_NEAR(lin[0].pole / lin[0].zero, 0.9886760029040730007, 1e-12);
}

TEST(FbarPoleZero, PoleMergesOntoZeroAsCouplingVanishes) {
    double previous_gap = 1.0;
    for (double k2 : {1e-2, 1e-4, 1e-6, 1e-8}) {
        const auto pz = fbar_pole_zero(with_k2(k2), film(), 1);
        const double gap = 1.0 - pz[0].pole / pz[0].zero;
        EXPECT_LT(gap, previous_gap);
        previous_gap = gap;
    }
    EXPECT_LT(previous_gap, 1e-8);
    auto off = linbo3_like();
    off.e_pz = 0.0;
    const auto pz = fbar_pole_zero(off, film(), 1);
    EXPECT_EQ(pz[0].pole, pz[0].zero);
}

TEST(FbarPoleZero, RejectsZeroPairs) { EXPECT_THROW(fbar_pole_zero(linbo3_like(), film(), 0), ConfigError); }

TEST(Material, Validation) {
    EXPECT_THROW((MaterialParams{1.0, -1.0, 1e-10, 4000}).validate(), ConfigError);
    EXPECT_THROW((MaterialParams{1.0, 1e11, 0.0, 4000}).validate(), ConfigError);
    EXPECT_THROW((FbarGeometry{0.0, 1e-10}).validate(), ConfigError);
    const auto m = linbo3_like();
    EXPECT_GE(m.c_bar(), m.c);
    EXPECT_GE(m.k2(), 0.0);
    EXPECT_LT(m.k2(), 1.0);
}

TEST(AdmittanceCsv, ParsesWellFormedFile) {
    std::istringstream in("# comment\nfreq_hz,re_y_siemens,im_y_siemens\n1e9,0,1e-3\n2e9,0,2e-3\n3.5e9, 0 ,4e-3\n");
    const auto s = parse_admittance_csv(in);
    ASSERT_EQ(s.size(), 3u);
    EXPECT_DOUBLE_EQ(s.omega[0], units::two_pi * 1e9);
    EXPECT_DOUBLE_EQ(s.omega[2], units::two_pi * 3.5e9);
    EXPECT_DOUBLE_EQ(s.values[1].imag(), 2e-3);
    EXPECT_TRUE(s.lossless);
}

TEST(AdmittanceCsv, DuplicateFrequencyNamesTheLine) {
    std::istringstream in("freq_hz,re_y_siemens,im_y_siemens\n1e9,0,1\n2e9,0,2\n2e9,0,3\n");
    try {
        parse_admittance_csv(in);
        FAIL() << "expected a monotonicity error";
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("line 4"), std::string::npos);
        EXPECT_NE(std::string(e.what()).find("increasing"), std::string::npos);
    }
}

TEST(AdmittanceCsv, MalformedRows) {
    const char* bad[] = {
        "freq_hz,re_y_siemens,im_y_siemens\n1e9,0\n",
        "freq_hz,re_y_siemens,im_y_siemens\n1e9,0,abc\n",
        "freq_hz,re_y_siemens,im_y_siemens\n1e9,0,inf\n",
        "freq_hz,re_y_siemens,im_y_siemens\n-1e9,0,1\n",
        "f,re,im\n1e9,0,1\n",
        "freq_hz,re_y_siemens,im_y_siemens\n",
    };
    for (const char* text : bad) {
        std::istringstream in(text);
        EXPECT_THROW(parse_admittance_csv(in), ConfigError) << text;
    }
}

TEST(AdmittanceCsv, RoundTripThroughText) {
    const FosterNetwork net{40e-15, {FosterMode::from_omega_c(2e10, 1e-12), FosterMode::from_omega_c(4e10, 3e-12)}};
    const auto s = synth_samples({net, 1e9, 6e10, 301, numeric::Spacing::log});
    std::istringstream in(admittance_csv(s, {"synthetic"}));
    const auto back = parse_admittance_csv(in);
    ASSERT_EQ(back.size(), s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        EXPECT_LE(std::abs(back.omega[i] - s.omega[i]), 2e-16 * s.omega[i]);
        EXPECT_EQ(back.values[i], s.values[i]);
    }
}

TEST(AdmittanceSamples, LossFlag) {
    const auto s = AdmittanceSamples::make({1.0, 2.0}, {{1e-3, 1.0}, {0.0, 2.0}});
    EXPECT_FALSE(s.lossless);
    AdmittanceSamples flagged = s;
    flagged.lossless = true;
    EXPECT_THROW(flagged.validate(), ConfigError);
}

TEST(SynthAdmittance, CapacitorOnly) {
    const FosterNetwork net{5e-13, {}};
    for (double w : {1e6, 1e9, 1e12}) EXPECT_DOUBLE_EQ(synth_admittance(net, w).imag(), w * 5e-13);
}

TEST(SynthAdmittance, ExactZerosAtModeFrequencies) {
    const FosterNetwork net{40e-15, {FosterMode::from_omega_c(2e10, 1e-12), FosterMode::from_omega_c(4e10, 3e-12)}};
    for (const auto& m : net.modes) EXPECT_EQ(std::abs(synth_admittance(net, m.omega)), 0.0);
    // |Y| ~ 2 C_k |delta omega| next to a zero
    const double near = std::abs(synth_admittance(net, 2e10 * (1.0 + 1e-12)));
    EXPECT_NEAR(near, 2.0 * 1e-12 * 2e10 * 1e-12, 1e-3 * near);
}

TEST(SynthAdmittance, DegenerateNetwork) { EXPECT_THROW(synth_admittance(FosterNetwork{}, 1e9), ConfigError); }

TEST(SynthAdmittance, SingleModeMatchesFbarNearFundamental) {
    const auto m = linbo3_like();
    const auto net = fbar_foster(m, film(), 1);
    const double omega1 = net.modes[0].omega;
    // close to the zero the single block dominates; the budget grows with distance
    for (double x : {0.999, 1.001, 1.01}) {
        const auto ya = fbar_admittance(m, film(), x * omega1);
        const auto ys = synth_admittance(net, x * omega1);
        EXPECT_LT(rel(ys.imag(), ya.imag()), 0.02) << x;
    }
}

TEST(UnitCells, ScalingSamples) {
    const FosterNetwork net{40e-15, {FosterMode::from_omega_c(2e10, 1e-12)}};
    const auto s = synth_samples({net, 1e9, 6e10, 101, numeric::Spacing::log});
    const auto one = scale_unit_cells(s, 1);
    EXPECT_EQ(one.values, s.values);
    const auto two = scale_unit_cells(s, 2);
    for (std::size_t i = 0; i < s.size(); ++i) EXPECT_EQ(two.values[i].imag(), 2.0 * s.values[i].imag());
    EXPECT_THROW(scale_unit_cells(s, 0), ConfigError);
}

TEST(UnitCells, ScalingCommutesWithSynthesis) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        FosterNetwork net{1e-14 * (1 + 9 * u(rng)), {}};
        double w = 1e10;
        for (int k = 0; k < 3; ++k) {
            w *= 1.2 + u(rng);
            net.modes.push_back(FosterMode::from_omega_c(w, 1e-13 * (1 + 50 * u(rng))));
        }
        const int n = 1 + static_cast<int>(9 * u(rng));
        const auto scaled = scale_unit_cells(net, static_cast<double>(n));
        for (double probe : numeric::grid(5e9, 1e11, 97, numeric::Spacing::log)) {
            const auto a = synth_admittance(scaled, probe).imag();
            const auto b = static_cast<double>(n) * synth_admittance(net, probe).imag();
            EXPECT_LE(std::abs(a - b), 1e-12 * std::abs(b));
        }
    }
}

TEST(UnitCells, ModelScalingScalesFoster) {
    const FosterNetwork net{40e-15, {FosterMode::from_omega_c(2e10, 1e-12), FosterMode::from_omega_c(4e10, 3e-12)}};
    const auto model = network_to_model(net);
    const auto f1 = foster_from_model(model);
    const auto f5 = foster_from_model(scale_unit_cells(model, 5));
    EXPECT_LT(rel(f5.c0, 5.0 * f1.c0), 1e-12);
    for (std::size_t k = 0; k < f1.modes.size(); ++k) {
        EXPECT_LT(rel(f5.modes[k].omega, f1.modes[k].omega), 1e-12);
        EXPECT_LT(rel(f5.modes[k].capacitance, 5.0 * f1.modes[k].capacitance), 1e-10);
        EXPECT_LT(rel(f5.modes[k].inductance, f1.modes[k].inductance / 5.0), 1e-10);
    }
}

TEST(UnitCells, SampledFosterScales) {
    const FosterNetwork net{40e-15, {FosterMode::from_omega_c(2e10, 1e-12)}};
    const auto y1 = [&](double w) { return synth_admittance(net, w); };
    const auto y3 = [&](double w) { return 3.0 * synth_admittance(net, w); };
    const auto f1 = foster_from_admittance(y1, {2e10});
    const auto f3 = foster_from_admittance(y3, {2e10});
    EXPECT_LT(rel(f3.c0, 3.0 * f1.c0), 1e-9);
    EXPECT_LT(rel(f3.modes[0].capacitance, 3.0 * f1.modes[0].capacitance), 1e-9);
    EXPECT_LT(rel(f3.modes[0].inductance, f1.modes[0].inductance / 3.0), 1e-9);
}
