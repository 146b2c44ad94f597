#ifndef RFSO_QUADRATURE_HPP
#define RFSO_QUADRATURE_HPP

// Globally adaptive Gauss-Kronrod (7/15) integration, in the style of QUADPACK QAG.

#include "rfso/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <string>
#include <vector>

namespace rfso::quad {

struct Options {
    double abs_tol = 1e-10;
    double rel_tol = 1e-10;
    int max_intervals = 4000;
    int initial_intervals = 1;
};

struct Result {
    double value = 0.0;
    double error = 0.0;
    double abs_value = 0.0; ///< integral of |f|, for judging cancellation
    int intervals = 0;
    bool converged = false;
};

namespace detail {

inline constexpr std::array<double, 8> kronrod_nodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};

inline constexpr std::array<double, 8> kronrod_weights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};

// Gauss weights for the 7-point rule, living on kronrod_nodes[1], [3], [5], [7].
inline constexpr std::array<double, 4> gauss_weights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Interval {
    double a, b, value, error, abs_value;
    bool operator<(const Interval& o) const { return error < o.error; }
};

template <class F>
Interval gauss_kronrod_15(F& f, double a, double b) {
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double abs_half = std::abs(half);

    const double fc = f(center);
    double result_kronrod = fc * kronrod_weights[7];
    double result_gauss = fc * gauss_weights[3];
    double result_abs = std::abs(result_kronrod);
    std::array<double, 7> f1{}, f2{};

    for (int j = 0; j < 7; ++j) {
        const double dx = half * kronrod_nodes[j];
        f1[j] = f(center - dx);
        f2[j] = f(center + dx);
        const double sum = f1[j] + f2[j];
        result_kronrod += kronrod_weights[j] * sum;
        result_abs += kronrod_weights[j] * (std::abs(f1[j]) + std::abs(f2[j]));
        if (j % 2 == 1) result_gauss += gauss_weights[j / 2] * sum;
    }

    const double mean = 0.5 * result_kronrod;
    double result_asc = kronrod_weights[7] * std::abs(fc - mean);
    for (int j = 0; j < 7; ++j)
        result_asc += kronrod_weights[j] * (std::abs(f1[j] - mean) + std::abs(f2[j] - mean));

    result_kronrod *= half;
    result_abs *= abs_half;
    result_asc *= abs_half;

    double err = std::abs((result_kronrod - result_gauss * half));
    if (result_asc != 0.0 && err != 0.0)
        err = result_asc * std::min(1.0, std::pow(200.0 * err / result_asc, 1.5));
    constexpr double eps = std::numeric_limits<double>::epsilon();
    constexpr double tiny = std::numeric_limits<double>::min();
    if (result_abs > tiny / (50.0 * eps)) err = std::max(50.0 * eps * result_abs, err);

    return {a, b, result_kronrod, err, result_abs};
}

} // namespace detail

/// Integrates f over [points.front(), points.back()], starting from the panels
/// between consecutive breakpoints. Never throws; check Result::converged.
template <class F>
Result integrate_adaptive_breakpoints(F&& f, const std::vector<double>& points, const Options& opts = {}) {
    std::priority_queue<detail::Interval> heap;
    double total = 0.0, total_err = 0.0;
    for (std::size_t i = 0; i + 1 < points.size(); ++i) {
        auto iv = detail::gauss_kronrod_15(f, points[i], points[i + 1]);
        total += iv.value;
        total_err += iv.error;
        heap.push(iv);
    }

    int count = static_cast<int>(heap.size());
    auto done = [&] { return total_err <= std::max(opts.abs_tol, opts.rel_tol * std::abs(total)); };
    while (!heap.empty() && !done() && count < opts.max_intervals) {
        auto worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        if (mid == worst.a || mid == worst.b) {
            // Interval cannot be split further in floating point; freeze it.
            worst.error = 0.0;
            heap.push(worst);
            total_err = 0.0;
            total = 0.0;
            auto copy = heap;
            while (!copy.empty()) {
                total += copy.top().value;
                total_err += copy.top().error;
                copy.pop();
            }
            if (heap.top().error == 0.0) break;
            continue;
        }
        auto left = detail::gauss_kronrod_15(f, worst.a, mid);
        auto right = detail::gauss_kronrod_15(f, mid, worst.b);
        total += left.value + right.value - worst.value;
        total_err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        ++count;
    }

    // Re-sum to shed accumulated update round-off.
    total = 0.0;
    total_err = 0.0;
    double total_abs = 0.0;
    while (!heap.empty()) {
        total += heap.top().value;
        total_err += heap.top().error;
        total_abs += heap.top().abs_value;
        heap.pop();
    }
    return {total, total_err, total_abs, count, total_err <= std::max(opts.abs_tol, opts.rel_tol * std::abs(total))};
}

/// Integrates f over [a, b]. Never throws; check Result::converged.
template <class F>
Result integrate_adaptive(F&& f, double a, double b, const Options& opts = {}) {
    const int n0 = std::max(1, opts.initial_intervals);
    std::vector<double> points(static_cast<std::size_t>(n0) + 1);
    for (int i = 0; i <= n0; ++i) points[static_cast<std::size_t>(i)] = a + (b - a) * i / n0;
    points.back() = b;
    return integrate_adaptive_breakpoints(f, points, opts);
}

/// Integrates f over [a, b], throwing QuadratureNonConvergent on failure.
template <class F>
double integrate(F&& f, double a, double b, const Options& opts = {}) {
    auto r = integrate_adaptive(f, a, b, opts);
    if (!r.converged)
        throw QuadratureNonConvergent("adaptive quadrature did not converge on [" + std::to_string(a) + ", " +
                                          std::to_string(b) + "], estimated error " + std::to_string(r.error),
                                      r.error);
    return r.value;
}

/// Integrates f over [a, inf) through x = a + t/(1-t).
template <class F>
Result integrate_to_infinity_adaptive(F&& f, double a, const Options& opts = {}) {
    auto g = [&](double t) {
        if (t >= 1.0) return 0.0;
        const double one_minus = 1.0 - t;
        const double x = a + t / one_minus;
        const double v = f(x);
        return v == 0.0 ? 0.0 : v / (one_minus * one_minus);
    };
    return integrate_adaptive(g, 0.0, 1.0, opts);
}

template <class F>
double integrate_to_infinity(F&& f, double a, const Options& opts = {}) {
    auto r = integrate_to_infinity_adaptive(f, a, opts);
    if (!r.converged)
        throw QuadratureNonConvergent("adaptive quadrature did not converge on [" + std::to_string(a) +
                                          ", inf), estimated error " + std::to_string(r.error),
                                      r.error);
    return r.value;
}

/// E[g(U)] for U ~ Exp(1), computed as the integral of g(-ln t) over t in (0, 1].
template <class F>
Result expect_exponential_adaptive(F&& g, const Options& opts = {}) {
    auto h = [&](double t) { return t <= 0.0 ? 0.0 : g(-std::log(t)); };
    return integrate_adaptive(h, 0.0, 1.0, opts);
}

} // namespace rfso::quad

#endif // RFSO_QUADRATURE_HPP
