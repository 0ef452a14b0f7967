// Acceptance run: one PASS/FAIL line per criterion, non-zero exit on any failure.
#include <chrono>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>

#include "pq/foster.hpp"
#include "pq/oracle.hpp"
#include "pq/quantize_bbq.hpp"
#include "pq/quantize_single.hpp"
#include "pq/rational_fit.hpp"

using namespace pq;
using constants::hbar;

namespace {

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c);
    return buf;
}

MaterialParams with_k2(double k2, double c, double eps, double rho) {
    return {std::sqrt(k2 * c * eps / (1.0 - k2)), c, eps, rho};
}

const FbarGeometry kFilm{750e-9, 1e-10};

HilbertSpec spec(int n, int f) {
    HilbertSpec h;
    h.charge_cutoff = n;
    h.fock_cutoffs = {f};
    return h;
}

// Least-squares slope of log g against log x.
double log_slope(const std::vector<double>& x, const std::vector<double>& g) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double lx = std::log(x[i]), ly = std::log(g[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

std::vector<double> log_grid(double lo, double hi, std::size_t n) { return numeric::grid(lo, hi, n, numeric::Spacing::log); }

Outcome zero_placement() {
    std::mt19937_64 rng(101);
    std::uniform_real_distribution<double> k2d(0.001, 0.3), cd(1e11, 4e11), epsd(5.0, 50.0), rhod(2000.0, 8000.0),
        bd(0.3e-6, 3e-6), ad(1e-11, 1e-8);
    double worst = 0.0;
    for (int i = 0; i < 10; ++i) {
        const auto m = with_k2(k2d(rng), cd(rng), epsd(rng) * constants::epsilon0, rhod(rng));
        const FbarGeometry g{bd(rng), ad(rng)};
        const double expected = std::numbers::pi * m.v_bar() / g.thickness;
        const auto pz = fbar_pole_zero(m, g, 1);
        // root of Im Y between the pole and the next pole
        const auto im_y = [&](double w) { return fbar_admittance(m, g, w).imag(); };
        const double lo = 0.5 * (pz[0].pole + pz[0].zero), hi = 1.5 * pz[0].zero;
        const double found = numeric::find_root(im_y, lo, hi);
        worst = std::max({worst, rel(found, expected), rel(pz[0].zero, expected)});
    }
    return {worst <= 1e-9, fmt("max relative error %.2e", worst)};
}

Outcome foster_closed_forms() {
    const double eps = 28.7 * constants::epsilon0;
    double worst = 0.0;
    for (double k2 : {0.01, 0.04, 0.1}) {
        const auto m = with_k2(k2, 2.45e11, eps, 4640.0);
        const auto net = fbar_foster(m, kFilm, 1);
        const double cg = kFilm.gate_capacitance(m);
        const double c1 = 0.5 * cg * std::pow(std::numbers::pi, 2) / (4.0 * k2);
        worst = std::max({worst, rel(net.modes.at(0).capacitance, c1), rel(net.c0, cg / (1.0 - k2))});
    }
    return {worst <= 1e-4, fmt("max relative error %.2e", worst)};
}

Outcome fit_round_trip() {
    FosterNetwork net{50e-15, {}};
    const double f[] = {1.1e9, 2.3e9, 3.2e9, 4.7e9, 6.1e9};
    const double c[] = {2e-12, 0.8e-12, 5e-12, 1.2e-12, 3e-12};
    for (int k = 0; k < 5; ++k) net.modes.push_back(FosterMode::from_omega_c(units::hz_to_rad_s(f[k]), c[k]));
    const auto s = synth_samples({net, units::hz_to_rad_s(0.5e9), units::hz_to_rad_s(8e9), 2000, numeric::Spacing::log});
    FitOptions o;
    o.n_poles = 10;
    const auto fit = vector_fit(s, o);
    const auto back = foster_from_model(fit.model);
    if (back.modes.size() != 5) return {false, "recovered " + std::to_string(back.modes.size()) + " modes"};
    double ew = 0.0, ec = rel(back.c0, net.c0);
    for (std::size_t k = 0; k < 5; ++k) {
        ew = std::max(ew, rel(back.modes[k].omega, net.modes[k].omega));
        ec = std::max(ec, rel(back.modes[k].capacitance, net.modes[k].capacitance));
    }
    return {ew <= 1e-6 && ec <= 1e-4, fmt("omega err %.2e, capacitance err %.2e", ew, ec)};
}

const double kSigmas[] = {1e-15, 10e-15, 100e-15, 1000e-15};

Outcome coupling_maximum() {
    const auto m = linbo3_like();
    const double cg = kFilm.gate_capacitance(m), k2 = m.k2();
    double worst = 0.0;
    for (double cs : kSigmas) {
        // 4 decades of C_g centred on 2 C_Sigma
        const double centre = 2.0 * cs / cg;
        const auto mult = log_grid(centre / 100.0, centre * 100.0, 200);
        const auto rows = sweep_coupling(m, kFilm, mult, {{units::hz_to_joules(10e9), cs, 0.0}}, 0);
        std::size_t best = 0;
        for (std::size_t i = 1; i < rows.size(); ++i)
            if (rows[i].g > rows[best].g) best = i;
        const double c0 = fbar_foster(m, kFilm, 1).c0 * mult[best];
        worst = std::max(worst, std::abs(c0 - 2.0 * cs) / (5.0 * k2 * 2.0 * cs));
    }
    return {worst <= 1.0, fmt("max |C0 - 2 C_Sigma| / (5 K^2 2 C_Sigma) = %.3f", worst)};
}

Outcome asymptotic_slopes() {
    const auto m = linbo3_like();
    const double cg = kFilm.gate_capacitance(m);
    double worst_lo = 0.0, worst_hi = 0.0, lo_s = 0.0, hi_s = 0.0;
    for (double cs : kSigmas) {
        const TransmonParams t{units::hz_to_joules(10e9), cs, 0.0};
        const auto lo = sweep_coupling(m, kFilm, log_grid(1e-4 * cs / cg, 1e-2 * cs / cg, 50), {t}, 0);
        const auto hi = sweep_coupling(m, kFilm, log_grid(1e2 * cs / cg, 1e4 * cs / cg, 50), {t}, 0);
        std::vector<double> x, y;
        for (const auto& r : lo) x.push_back(r.c_g), y.push_back(r.g);
        const double sl = log_slope(x, y);
        x.clear();
        y.clear();
        for (const auto& r : hi) x.push_back(r.c_g), y.push_back(r.g);
        const double sh = log_slope(x, y);
        if (std::abs(sl - 0.5) >= worst_lo) worst_lo = std::abs(sl - 0.5), lo_s = sl;
        if (std::abs(sh + 0.25) >= worst_hi) worst_hi = std::abs(sh + 0.25), hi_s = sh;
    }
    return {worst_lo <= 0.02 && worst_hi <= 0.02, fmt("worst slopes %+.4f (small C_g), %+.4f (large C_g)", lo_s, hi_s)};
}

struct GFixture {
    FosterNetwork net;
    TransmonParams t;
};

Outcome oracle_g() {
    const auto m = linbo3_like();
    std::vector<GFixture> fx;
    for (auto [area, cs, ej] : {std::tuple{1.0, 100e-15, 10e9}, {0.3, 100e-15, 10e9}, {0.1, 50e-15, 12e9},
                                {3.0, 200e-15, 15e9}})
        fx.push_back({fbar_foster(m, {kFilm.thickness, kFilm.area * area}, 1), {units::hz_to_joules(ej), cs, 0.0}});
    // one lumped mode in the GHz band
    fx.push_back({{1e-15, {FosterMode::from_omega_c(units::hz_to_rad_s(5.645e9), 24.6e-15)}},
                  {units::hz_to_joules(20e9), 100e-15, 0.0}});
    double worst = 0.0, worst_ratio = 0.0;
    for (const auto& f : fx) {
        const auto r = extract_g(f.net, f.t, spec(10, 8));
        if (!r.g || !r.g_perturbative || !r.converged || r.ambiguous) return {false, "oracle did not converge"};
        const double ratio = *r.g_perturbative / capacitance_energies(f.net, f.t).omega;
        worst_ratio = std::max(worst_ratio, ratio);
        worst = std::max(worst, rel(*r.g, *r.g_perturbative));
    }
    return {worst <= 0.05 && worst_ratio <= 0.05,
            fmt("5 fixtures, max g/Omega %.4f, max relative deviation %.4f", worst_ratio, worst)};
}

Outcome kerr_vs_oracle() {
    // bare transmon at psi = 0.2: E_J / E_C = 1250
    const double cs = 300e-15;
    const BbqTransmon bt{0.0, 2.5e-15, cs - 2.5e-15};
    BbqTransmon t = bt;
    t.e_j = 1250.0 * bt.e_c();
    const auto bare = black_box_quantize(RationalModel{}, t);
    double psi = bare.modes[0].psi_zp;
    const TransmonParams tp{t.e_j, cs, 0.0};
    TransmonGuard guard;
    guard.enforce = false;
    const FosterNetwork far{0.0, {FosterMode::from_omega_c(units::hz_to_rad_s(400e9), 1e-12)}};
    const auto s = single_mode_spectrum(quantize_single_mode(far, tp, guard), tp, spec(20, 4));
    const double exact = (s.eigenvalues[2] - 2.0 * s.eigenvalues[1] + s.eigenvalues[0]) / hbar;
    const double self_err = rel(bare.chi(0, 0), exact);

    // two dispersive polaritons: transmon near 5.9 GHz, mechanical mode near 8.8 GHz
    BbqTransmon t2{units::hz_to_joules(80e9), 2.5e-15, 297.5e-15};
    const FosterNetwork net{50e-15, {FosterMode::from_omega_c(units::hz_to_rad_s(9e9), 1e-12)}};
    const auto two = black_box_quantize(network_to_model(net), t2);
    const auto oracle = multimode_kerr(two.modes, t2.e_j, spec(5, 10));
    const double cross_err = rel(oracle.cross_kerr(0, 1), two.chi(0, 1));
    for (const auto& m : two.modes) psi = std::max(psi, m.psi_zp);
    const bool ok = psi <= 0.2 + 1e-12 && self_err <= 0.03 && oracle.converged && cross_err <= 0.05;
    return {ok, fmt("psi_zp %.3f, self-Kerr error %.4f, cross-Kerr error %.4f", psi, self_err, cross_err)};
}

Outcome hybridization() {
    const double omega = units::hz_to_rad_s(2.089e9);
    const FosterNetwork net{10e-15, {FosterMode::from_omega_c(omega, 200e-15)}};
    const BbqTransmon t{0.0, 2.5e-15, 197.5e-15};
    const auto ym = network_to_model(net);
    const double step = units::hz_to_rad_s(5e6);
    std::vector<double> ejs;
    for (int i = -80; i <= 80; ++i) ejs.push_back(e_j_for_detuning(t, strongest_phonon_zero(ym), i * step));
    const auto rows = detuning_sweep(ym, t, ejs, 0);
    const double alpha = t.e_c() / hbar;
    double best = 0.0, peak = 0.0, peak_delta = 0.0;
    for (const auto& r : rows) {
        best = std::max(best, std::abs(r.chi_self_phonon) / alpha);
        if (std::abs(r.chi_cross) > peak) peak = std::abs(r.chi_cross), peak_delta = r.delta;
    }
    const bool ok = std::abs(best - 0.25) <= 0.03 && std::abs(peak_delta) <= step;
    return {ok, fmt("max phonon self-Kerr / bare = %.4f, cross-Kerr peak at %.3g MHz", best, peak_delta / (2e6 * std::numbers::pi))};
}

Outcome unit_cell_scaling() {
    // one cell: a weakly coupled lumped mode
    const FosterNetwork cell{0.1e-15, {FosterMode::from_omega_c(units::hz_to_rad_s(5.645e9), 2.46e-15)}};
    const auto s1 = synth_samples({cell, units::hz_to_rad_s(1e9), units::hz_to_rad_s(20e9), 400, numeric::Spacing::log});
    double cap_err = 0.0;
    for (int n : {1, 7, 50, 300}) {
        FitOptions o;
        o.n_poles = 2;
        const auto net = foster_from_model(vector_fit(scale_unit_cells(s1, n), o).model);
        if (net.modes.size() != 1) return {false, "fit of N cells lost the mode"};
        cap_err = std::max({cap_err, rel(net.c0, n * cell.c0), rel(net.modes[0].capacitance, n * cell.modes[0].capacitance),
                            rel(net.modes[0].omega, cell.modes[0].omega)});
    }
    // C_g = N C_0 stays below C_Sigma / 100 for N <= 100
    const TransmonParams t{units::hz_to_joules(20e9), 1e-12, 0.0};
    std::vector<double> ns, gs;
    for (int n = 1; n <= 100; ++n) {
        ns.push_back(n);
        gs.push_back(quantize_single_mode(scale_unit_cells(cell, n), t).g);
    }
    const double slope = log_slope(ns, gs);
    return {cap_err <= 1e-6 && std::abs(slope - 0.5) <= 0.02,
            fmt("capacitance scaling error %.2e, g(N) slope %.4f", cap_err, slope)};
}

Outcome kerr_identity() {
    std::mt19937_64 rng(110);
    std::uniform_real_distribution<double> psi(0.01, 0.45), w(1e9, 5e10), ej(5e9, 50e9);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<PolaritonMode> modes(2 + trial % 5);
        for (auto& m : modes) m = {w(rng), 1e-13, psi(rng), 0.0};
        const auto chi = kerr_matrix(modes, units::hz_to_joules(ej(rng)));
        for (Eigen::Index k = 0; k < chi.rows(); ++k)
            for (Eigen::Index j = 0; j < chi.cols(); ++j)
                if (j != k) worst = std::max(worst, rel(chi(k, j) * chi(k, j), 4.0 * chi(k, k) * chi(j, j)));
    }
    return {worst <= 1e-12, fmt("max relative violation %.2e", worst)};
}

struct Criterion {
    const char* name;
    double limit_s;  // 0: no runtime bound
    std::function<Outcome()> run;
};

}  // namespace

int main() {
    const Criterion criteria[] = {
        {"fbar zero placement", 1.0, zero_placement},
        {"foster closed forms", 5.0, foster_closed_forms},
        {"five-mode fit round trip", 10.0, fit_round_trip},
        {"coupling maximum at 2 C_Sigma", 30.0, coupling_maximum},
        {"asymptotic g slopes", 0.0, asymptotic_slopes},
        {"oracle g agreement", 300.0, oracle_g},
        {"bbq Kerr vs oracle", 0.0, kerr_vs_oracle},
        {"hybridization quarter", 0.0, hybridization},
        {"unit-cell scaling", 0.0, unit_cell_scaling},
        {"cross-Kerr identity", 1.0, kerr_identity},
    };
    int failures = 0;
    int index = 0;
    for (const auto& c : criteria) {
        ++index;
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (c.limit_s > 0.0 && secs > c.limit_s) {
            o.pass = false;
            o.detail += fmt(" [over the %.0f s limit]", c.limit_s);
        }
        std::printf("%s criterion %2d  %-30s %s (%.3f s)\n", o.pass ? "PASS" : "FAIL", index, c.name, o.detail.c_str(), secs);
        if (!o.pass) ++failures;
    }
    std::printf("%d of %d criteria passed\n", index - failures, index);
    return failures == 0 ? 0 : 1;
}
