#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <span>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <boost/math/tools/roots.hpp>

#include "pq/error.hpp"

namespace pq::numeric {

enum class Spacing { linear, log };

inline std::vector<double> grid(double lo, double hi, std::size_t count, Spacing spacing) {
    if (count < 2) throw ConfigError("grid: point count must be >= 2");
    if (!(hi > lo)) throw ConfigError("grid: upper bound must exceed lower bound");
    if (spacing == Spacing::log && lo <= 0.0) throw ConfigError("grid: log spacing needs a positive lower bound");
    std::vector<double> out(count);
    const double n = static_cast<double>(count - 1);
    for (std::size_t i = 0; i < count; ++i) {
        const double t = static_cast<double>(i) / n;
        out[i] = spacing == Spacing::linear ? lo + (hi - lo) * t
                                            : std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) * t);
    }
    out.front() = lo;
    out.back() = hi;
    return out;
}

/// Bracketed root of a scalar function (TOMS 748). Throws NumericalError when
/// the bracket is invalid or the iteration budget is exhausted.
template <typename F>
double find_root(F&& f, double lo, double hi, std::uintmax_t max_iterations = 200, int bits = 52) {
    double flo = f(lo);
    double fhi = f(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if ((flo < 0.0) == (fhi < 0.0)) {
        throw NumericalError("find_root: function does not change sign on [" + std::to_string(lo) + ", " +
                             std::to_string(hi) + "]");
    }
    std::uintmax_t iterations = max_iterations;
    auto tol = boost::math::tools::eps_tolerance<double>(bits);
    auto [a, b] = boost::math::tools::toms748_solve(f, lo, hi, flo, fhi, tol, iterations);
    if (iterations >= max_iterations) {
        throw NumericalError("find_root: no convergence after " + std::to_string(max_iterations) + " iterations");
    }
    return 0.5 * (a + b);
}

/// Derivative of a smooth scalar function at x. Central difference with step
/// h = |x| * rel_step, Richardson-extrapolated once. When the two estimates
/// disagree by more than `agreement` a five-point stencil is used instead.
template <typename F>
double derivative(F&& f, double x, double rel_step = 1e-6, double agreement = 1e-4) {
    const double h = std::max(std::abs(x), 1e-300) * rel_step;
    const auto central = [&](double step) { return (f(x + step) - f(x - step)) / (2.0 * step); };
    const double d1 = central(h);
    const double d2 = central(0.5 * h);
    const double scale = std::max({std::abs(d1), std::abs(d2), 1e-300});
    if (std::abs(d1 - d2) <= agreement * scale) return (4.0 * d2 - d1) / 3.0;
    const double h5 = 0.5 * h;
    return (-f(x + 2.0 * h5) + 8.0 * f(x + h5) - 8.0 * f(x - h5) + f(x - 2.0 * h5)) / (12.0 * h5);
}

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
};

inline LineFit fit_line(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) throw ConfigError("fit_line: need >= 2 paired points");
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx == 0.0) throw ConfigError("fit_line: abscissae are all equal");
    const double slope = sxy / sxx;
    return {slope, my - slope * mx};
}

/// Least-squares slope of log(y) against log(x).
inline double loglog_slope(std::span<const double> x, std::span<const double> y) {
    std::vector<double> lx(x.size()), ly(y.size());
    std::transform(x.begin(), x.end(), lx.begin(), [](double v) { return std::log(v); });
    std::transform(y.begin(), y.end(), ly.begin(), [](double v) { return std::log(v); });
    return fit_line(lx, ly).slope;
}

inline double relative_difference(double a, double b) {
    const double scale = std::max(std::abs(a), std::abs(b));
    return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

/// Worker count: explicit request, else PHONON_QUANT_THREADS, else 1.
inline unsigned thread_count(unsigned requested = 0) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("PHONON_QUANT_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) return static_cast<unsigned>(n);
    }
    return 1;
}

/// Runs body(i) for i in [0, count). Each index is visited exactly once; the
/// caller owns ordering of results (write into a pre-sized vector by index).
/// If workers throw, the exception of the lowest-numbered failing worker is
/// rethrown on the calling thread.
template <typename Body>
void parallel_for(std::size_t count, unsigned threads, Body&& body) {
    threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(count, 1))));
    if (threads == 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::vector<std::exception_ptr> errors(threads);
    {
        std::vector<std::jthread> pool;
        pool.reserve(threads);
        for (unsigned t = 0; t < threads; ++t) {
            pool.emplace_back([&, t] {
                try {
                    for (std::size_t i = t; i < count; i += threads) body(i);
                } catch (...) {
                    errors[t] = std::current_exception();
                }
            });
        }
    }
    for (auto& err : errors)
        if (err) std::rethrow_exception(err);
}

}  // namespace pq::numeric
