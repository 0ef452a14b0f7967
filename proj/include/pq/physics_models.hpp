#pragma once

// Admittance sources: the analytic thin-film bulk acoustic resonator, synthetic
// Foster networks, tabulated data and unit-cell scaling.

#include <charconv>
#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "pq/constants.hpp"
#include "pq/error.hpp"
#include "pq/foster_network.hpp"
#include "pq/numeric.hpp"
#include "pq/rational_model.hpp"

namespace pq {

/// Piezoelectric film constants in stress-charge form (SI).
struct MaterialParams {
    double e_pz = 0.0;     // C/m^2
    double c = 0.0;        // Pa
    double epsilon = 0.0;  // F/m
    double rho = 0.0;      // kg/m^3

    /// Piezoelectrically stiffened elasticity c + e^2/epsilon.
    double c_bar() const { return c + e_pz * e_pz / epsilon; }
    /// Electromechanical coupling K^2 = e^2 / (c_bar epsilon).
    double k2() const { return e_pz * e_pz / (c_bar() * epsilon); }
    double v_bar() const { return std::sqrt(c_bar() / rho); }

    void validate() const {
        // e_pz = 0 is admitted: it switches the piezoelectric coupling off.
        if (!(e_pz >= 0.0) || !(c > 0.0) || !(epsilon > 0.0) || !(rho > 0.0) || !std::isfinite(e_pz) ||
            !std::isfinite(c) || !std::isfinite(epsilon) || !std::isfinite(rho))
            throw ConfigError("MaterialParams: c, epsilon, rho must be positive and e_pz non-negative");
    }
};

/// Illustrative LiNbO3-like thickness-mode constants (e33, c33, eps33, rho).
/// Not reference data; every quantitative check holds for any 0 < K^2 < 1.
inline MaterialParams linbo3_like() { return {1.33, 2.45e11, 28.7 * constants::epsilon0, 4640.0}; }

struct FbarGeometry {
    double thickness = 0.0;  // b, m
    double area = 0.0;       // m^2

    double gate_capacitance(const MaterialParams& m) const { return m.epsilon * area / thickness; }

    void validate() const {
        if (!(thickness > 0.0) || !(area > 0.0) || !std::isfinite(thickness) || !std::isfinite(area))
            throw ConfigError("FbarGeometry: thickness and area must be positive");
    }
};

inline constexpr double kPoleProximityFloor = 1e-14;

/// Exact one-dimensional admittance of a piezoelectric film between electrodes,
///
///     Y(omega) = i omega C_g / (1 - K^2 tan(x) / x),   x = omega b / (2 v_bar).
///
/// Throws PoleProximityError when the bracket is within `floor` (relative) of
/// vanishing.
inline cdouble fbar_admittance(const MaterialParams& m, const FbarGeometry& g, double omega,
                               double floor = kPoleProximityFloor) {
    if (!(omega > 0.0)) throw ConfigError("fbar_admittance: omega must be > 0");
    const double x = omega * g.thickness / (2.0 * m.v_bar());
    const double k2 = m.k2();
    const double tan_term = x < 1e-8 ? 1.0 + x * x / 3.0 : std::tan(x) / x;
    const double denom = 1.0 - k2 * tan_term;
    if (std::abs(denom) < floor * std::max(1.0, std::abs(k2 * tan_term)))
        throw PoleProximityError("fbar_admittance: sample at omega = " + std::to_string(omega) +
                                     " rad/s sits on an admittance pole",
                                 omega);
    return {0.0, omega * g.gate_capacitance(m) / denom};
}

struct PoleZeroPair {
    double pole = 0.0;  // Omega_p,n, rad/s
    double zero = 0.0;  // Omega_n, rad/s
};

/// First `n_pairs` pole/zero pairs. Zeros sit where tan(x) diverges,
/// x = (2n - 1) pi / 2; poles solve K^2 sin(x) = x cos(x) in
/// ((n - 1) pi, (n - 1/2) pi). With K^2 = 0 the pole merges onto the zero.
inline std::vector<PoleZeroPair> fbar_pole_zero(const MaterialParams& m, const FbarGeometry& g, int n_pairs,
                                                std::uintmax_t max_iterations = 200) {
    if (n_pairs < 1) throw ConfigError("fbar_pole_zero: n_pairs must be >= 1");
    const double k2 = m.k2();
    const double to_omega = 2.0 * m.v_bar() / g.thickness;
    std::vector<PoleZeroPair> out;
    out.reserve(static_cast<std::size_t>(n_pairs));
    const auto f = [k2](double x) { return k2 * std::sin(x) / x - std::cos(x); };
    for (int n = 1; n <= n_pairs; ++n) {
        const double x_zero = (2.0 * n - 1.0) * std::numbers::pi / 2.0;
        double x_pole = x_zero;
        if (k2 > 0.0) {
            const double lo = n == 1 ? 1e-12 : (n - 1.0) * std::numbers::pi;
            x_pole = numeric::find_root(f, lo, x_zero, max_iterations);
        }
        out.push_back({x_pole * to_omega, x_zero * to_omega});
    }
    return out;
}

/// Tabulated one-port response. Frequencies in rad/s, strictly ascending.
struct AdmittanceSamples {
    std::vector<double> omega;
    std::vector<cdouble> values;
    bool lossless = false;

    std::size_t size() const { return omega.size(); }

    /// Largest |Re Y| relative to the largest |Y|.
    double loss_ratio() const {
        double re = 0.0, mag = 0.0;
        for (const auto& y : values) {
            re = std::max(re, std::abs(y.real()));
            mag = std::max(mag, std::abs(y));
        }
        return mag == 0.0 ? 0.0 : re / mag;
    }

    void validate(double lossless_tol = 1e-8) const {
        if (omega.size() != values.size()) throw ConfigError("AdmittanceSamples: frequency/value count mismatch");
        for (std::size_t i = 0; i < omega.size(); ++i) {
            if (!(omega[i] > 0.0) || !std::isfinite(omega[i]))
                throw ConfigError("AdmittanceSamples: sample " + std::to_string(i) + " has non-positive frequency");
            if (i > 0 && !(omega[i] > omega[i - 1]))
                throw ConfigError("AdmittanceSamples: frequencies not strictly increasing at sample " +
                                  std::to_string(i));
            if (!std::isfinite(values[i].real()) || !std::isfinite(values[i].imag()))
                throw ConfigError("AdmittanceSamples: sample " + std::to_string(i) + " is not finite");
        }
        if (lossless && !(loss_ratio() < lossless_tol))
            throw ConfigError("AdmittanceSamples: flagged lossless but Re[Y] is not negligible");
    }

    static AdmittanceSamples make(std::vector<double> omega, std::vector<cdouble> values,
                                  double lossless_tol = 1e-8) {
        AdmittanceSamples s{std::move(omega), std::move(values), false};
        s.lossless = s.loss_ratio() < lossless_tol;
        s.validate(lossless_tol);
        return s;
    }
};

/// Samples any admittance callable on a frequency grid.
template <typename F>
AdmittanceSamples sample_admittance(F&& y, const std::vector<double>& omega, double lossless_tol = 1e-8) {
    std::vector<cdouble> values;
    values.reserve(omega.size());
    for (double w : omega) values.push_back(y(w));
    return AdmittanceSamples::make(omega, std::move(values), lossless_tol);
}

// ---------------------------------------------------------------------------
// Foster network evaluation

/// Reactance X of the network impedance Z(i omega) = i X.
inline double foster_reactance(const FosterNetwork& net, double omega) {
    double x = 0.0;
    if (net.has_c0()) x -= 1.0 / (omega * net.c0);
    for (const auto& m : net.modes) x += omega / (m.capacitance * (m.omega * m.omega - omega * omega));
    return x;
}

/// Admittance of C_0 in series with parallel-LC blocks,
/// Y(s) = [1/(s C_0) + sum_k (s / C_k) / (s^2 + omega_k^2)]^-1 at s = i omega.
inline cdouble synth_admittance(const FosterNetwork& net, double omega, double floor = kPoleProximityFloor) {
    if (!(omega > 0.0)) throw ConfigError("synth_admittance: omega must be > 0");
    if (!net.has_c0() && net.modes.empty()) throw ConfigError("synth_admittance: degenerate network");
    for (const auto& m : net.modes)
        if (omega == m.omega) return {0.0, 0.0};
    const double x = foster_reactance(net, omega);
    double scale = net.has_c0() ? 1.0 / (omega * net.c0) : 0.0;
    for (const auto& m : net.modes)
        scale = std::max(scale, std::abs(omega / (m.capacitance * (m.omega * m.omega - omega * omega))));
    if (std::abs(x) < floor * scale)
        throw PoleProximityError("synth_admittance: omega = " + std::to_string(omega) + " rad/s is on a pole", omega);
    return {0.0, -1.0 / x};
}

/// A known network plus the grid it is sampled on; the standard fixture for
/// fit round-trips.
struct SyntheticFosterSpec {
    FosterNetwork network;
    double omega_min = 0.0;
    double omega_max = 0.0;
    std::size_t count = 0;
    numeric::Spacing spacing = numeric::Spacing::log;
};

inline AdmittanceSamples synth_samples(const SyntheticFosterSpec& spec) {
    spec.network.validate();
    if (spec.count < 2) throw ConfigError("SyntheticFosterSpec: grid count must be >= 2");
    const auto omega = numeric::grid(spec.omega_min, spec.omega_max, spec.count, spec.spacing);
    return sample_admittance([&](double w) { return synth_admittance(spec.network, w); }, omega);
}

// ---------------------------------------------------------------------------
// Unit-cell scaling: N identical cells in parallel, Y^(N) = N Y^(1).

inline void check_cells(int n_cells) {
    if (n_cells < 1) throw ConfigError("scale_unit_cells: n_cells must be >= 1");
}

inline AdmittanceSamples scale_unit_cells(AdmittanceSamples base, int n_cells) {
    check_cells(n_cells);
    for (auto& y : base.values) y *= static_cast<double>(n_cells);
    return base;
}

inline RationalModel scale_unit_cells(RationalModel base, int n_cells) {
    check_cells(n_cells);
    const double n = n_cells;
    for (auto& r : base.residues) r *= n;
    base.prop_term *= n;
    base.const_term *= n;
    base.inductive_term *= n;
    return base;
}

inline FosterNetwork scale_unit_cells(FosterNetwork base, double factor) {
    if (!(factor > 0.0)) throw ConfigError("scale_unit_cells: factor must be > 0");
    base.c0 *= factor;
    for (auto& m : base.modes) {
        m.capacitance *= factor;
        m.inductance /= factor;
    }
    return base;
}

// ---------------------------------------------------------------------------
// CSV exchange format: `freq_hz,re_y_siemens,im_y_siemens`. Lines starting with
// '#' carry provenance and are skipped on read.

inline constexpr std::string_view kAdmittanceCsvHeader = "freq_hz,re_y_siemens,im_y_siemens";

inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string admittance_csv(const AdmittanceSamples& samples, const std::vector<std::string>& comments = {}) {
    std::string out;
    for (const auto& c : comments) out += "# " + c + "\n";
    out += kAdmittanceCsvHeader;
    out += '\n';
    for (std::size_t i = 0; i < samples.size(); ++i) {
        out += format_double(units::rad_s_to_hz(samples.omega[i]));
        out += ',';
        out += format_double(samples.values[i].real());
        out += ',';
        out += format_double(samples.values[i].imag());
        out += '\n';
    }
    return out;
}

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

inline double parse_field(std::string_view field, std::size_t line, const char* name) {
    field = trim(field);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (ec != std::errc() || ptr != field.data() + field.size())
        throw ConfigError("line " + std::to_string(line) + ": malformed " + name + " '" + std::string(field) + "'");
    if (!std::isfinite(v)) throw ConfigError("line " + std::to_string(line) + ": non-finite " + name);
    return v;
}

}  // namespace detail

inline AdmittanceSamples parse_admittance_csv(std::istream& in, double lossless_tol = 1e-8) {
    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;
    std::vector<double> omega;
    std::vector<cdouble> values;
    double previous_hz = 0.0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto view = detail::trim(line);
        if (view.empty() || view.front() == '#') continue;
        if (!header_seen) {
            if (view != kAdmittanceCsvHeader)
                throw ConfigError("line " + std::to_string(line_no) + ": expected header '" +
                                  std::string(kAdmittanceCsvHeader) + "'");
            header_seen = true;
            continue;
        }
        const auto c1 = view.find(',');
        const auto c2 = c1 == std::string_view::npos ? c1 : view.find(',', c1 + 1);
        if (c2 == std::string_view::npos || view.find(',', c2 + 1) != std::string_view::npos)
            throw ConfigError("line " + std::to_string(line_no) + ": expected 3 comma-separated fields");
        const double f = detail::parse_field(view.substr(0, c1), line_no, "frequency");
        const double re = detail::parse_field(view.substr(c1 + 1, c2 - c1 - 1), line_no, "Re[Y]");
        const double im = detail::parse_field(view.substr(c2 + 1), line_no, "Im[Y]");
        if (!(f > 0.0)) throw ConfigError("line " + std::to_string(line_no) + ": frequency must be > 0");
        if (!omega.empty() && !(f > previous_hz))
            throw ConfigError("line " + std::to_string(line_no) + ": frequency not strictly increasing");
        previous_hz = f;
        omega.push_back(units::hz_to_rad_s(f));
        values.emplace_back(re, im);
    }
    if (!header_seen) throw ConfigError("admittance CSV: missing header");
    if (omega.empty()) throw ConfigError("admittance CSV: no samples");
    return AdmittanceSamples::make(std::move(omega), std::move(values), lossless_tol);
}

inline AdmittanceSamples load_admittance_csv(const std::filesystem::path& path, double lossless_tol = 1e-8) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open admittance CSV '" + path.string() + "'");
    try {
        return parse_admittance_csv(in, lossless_tol);
    } catch (const ConfigError& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

}  // namespace pq
