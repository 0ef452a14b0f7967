#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/Dense>

#include "pq/error.hpp"
#include "pq/numeric.hpp"

namespace pq::detail {

// Secular function
//
//     f(u) = slope * u + offset - sum_k weight_k / (u - pole_k)
//
// with weight_k > 0 and distinct positive poles. f is strictly increasing on
// every interval between poles, so its roots interlace the poles. This is the
// form taken by a lossless one-port admittance (or impedance) written in the
// squared frequency u = omega^2.
struct SecularTerms {
    std::vector<double> poles;
    std::vector<double> weights;
    double slope = 0.0;
    double offset = 0.0;

    double operator()(double u) const {
        double acc = slope * u + offset;
        for (std::size_t k = 0; k < poles.size(); ++k) acc -= weights[k] / (u - poles[k]);
        return acc;
    }
};

inline void sort_terms(SecularTerms& t) {
    std::vector<std::size_t> idx(t.poles.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return t.poles[a] < t.poles[b]; });
    SecularTerms s{{}, {}, t.slope, t.offset};
    for (auto i : idx) {
        s.poles.push_back(t.poles[i]);
        s.weights.push_back(t.weights[i]);
    }
    t = std::move(s);
}

// Eigenvalues of the symmetric arrowhead matrix whose characteristic
// polynomial vanishes exactly where f does.
inline std::vector<double> secular_eigenvalues(const SecularTerms& t, double scale) {
    const auto n = static_cast<Eigen::Index>(t.poles.size());
    if (t.slope > 0.0) {
        const double slope_scaled = t.slope * scale;
        Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n + 1, n + 1);
        for (Eigen::Index k = 0; k < n; ++k) {
            m(k, k) = t.poles[k] / scale;
            const double w = std::sqrt(t.weights[k] / scale) / std::sqrt(slope_scaled);
            m(k, n) = w;
            m(n, k) = w;
        }
        m(n, n) = -t.offset / slope_scaled;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
        std::vector<double> out(es.eigenvalues().data(), es.eigenvalues().data() + n + 1);
        for (auto& v : out) v *= scale;
        return out;
    }
    if (t.offset == 0.0) throw ContractError("secular equation is degenerate (no slope and no offset)");
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    Eigen::VectorXd w(n);
    for (Eigen::Index k = 0; k < n; ++k) {
        m(k, k) = t.poles[k] / scale;
        w(k) = std::sqrt(t.weights[k] / scale);
    }
    // zeros of d - w^T (u - Q)^{-1} w are the eigenvalues of Q + w w^T / d
    m += w * w.transpose() / t.offset;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
    std::vector<double> out(es.eigenvalues().data(), es.eigenvalues().data() + n);
    for (auto& v : out) v *= scale;
    return out;
}

/// All real roots of the secular function, ascending. Eigenvalue estimates are
/// polished by bracketed root finding inside their interlacing interval. When
/// `drop_zero_root` is set the caller asserts f(0) = 0 analytically and that
/// root (the one below the first pole) is omitted.
inline std::vector<double> secular_roots(SecularTerms t, bool drop_zero_root) {
    sort_terms(t);
    const std::size_t n = t.poles.size();
    for (std::size_t k = 0; k < n; ++k) {
        if (!(t.weights[k] > 0.0) || !(t.poles[k] > 0.0)) throw ContractError("secular equation needs positive poles and weights");
        if (k > 0 && !(t.poles[k] > t.poles[k - 1])) throw ContractError("secular equation has coincident poles");
    }
    double scale = n > 0 ? t.poles.back() : (t.slope > 0.0 ? std::abs(t.offset / t.slope) : 1.0);
    if (!(scale > 0.0)) scale = 1.0;

    std::vector<double> estimates = secular_eigenvalues(t, scale);
    std::sort(estimates.begin(), estimates.end());

    // Which intervals carry a root: below the first pole iff slope > 0 or
    // offset < 0; above the last pole iff slope > 0 or offset > 0.
    const bool root_below = t.slope > 0.0 || t.offset < 0.0 || n == 0;
    std::vector<std::pair<double, double>> intervals;
    const double inf = std::numeric_limits<double>::infinity();
    if (root_below) intervals.emplace_back(-inf, n > 0 ? t.poles[0] : inf);
    for (std::size_t k = 1; k < n; ++k) intervals.emplace_back(t.poles[k - 1], t.poles[k]);
    if (n > 0 && (t.slope > 0.0 || t.offset > 0.0)) intervals.emplace_back(t.poles[n - 1], inf);
    if (intervals.size() != estimates.size()) throw NumericalError("secular equation: root count does not match interlacing");

    std::vector<double> roots;
    for (std::size_t j = 0; j < intervals.size(); ++j) {
        if (drop_zero_root && j == 0) continue;
        const auto [lo_bound, hi_bound] = intervals[j];
        double guess = estimates[j];
        const double width_scale = std::max(std::abs(guess), scale * 1e-12);
        if (guess <= lo_bound || guess >= hi_bound) {
            guess = std::isinf(lo_bound) ? hi_bound - width_scale : std::isinf(hi_bound) ? lo_bound + width_scale : 0.5 * (lo_bound + hi_bound);
        }
        const auto clamp_inside = [&](double v, double toward) {
            if (v <= lo_bound || v >= hi_bound) return 0.5 * (toward + (v <= lo_bound ? lo_bound : hi_bound));
            return v;
        };
        double step = 1e-10 * width_scale;
        double a = clamp_inside(guess - step, guess);
        double b = clamp_inside(guess + step, guess);
        for (int it = 0; it < 400 && !(t(a) <= 0.0); ++it) {
            step *= 4.0;
            a = clamp_inside(guess - step, a);
        }
        step = 1e-10 * width_scale;
        for (int it = 0; it < 400 && !(t(b) >= 0.0); ++it) {
            step *= 4.0;
            b = clamp_inside(guess + step, b);
        }
        // root closer to a pole than one ulp: return the neighbouring double
        const auto next_to = [](double v, double bound) {
            return std::isfinite(bound) && std::abs(v - bound) <= 4.0 * std::abs(std::nextafter(bound, v) - bound);
        };
        if (!(t(a) <= 0.0) && t(b) >= 0.0 && next_to(a, lo_bound)) {
            roots.push_back(std::nextafter(lo_bound, hi_bound));
            continue;
        }
        if (!(t(b) >= 0.0) && t(a) <= 0.0 && next_to(b, hi_bound)) {
            roots.push_back(std::nextafter(hi_bound, lo_bound));
            continue;
        }
        if (!(t(a) <= 0.0) || !(t(b) >= 0.0)) throw NumericalError("secular equation: could not bracket root");
        roots.push_back(numeric::find_root(t, a, b));
    }
    return roots;
}

}  // namespace pq::detail
