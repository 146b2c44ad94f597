#ifndef RFSO_SPECFUN_HPP
#define RFSO_SPECFUN_HPP

// Special functions needed by the closed-form link statistics: log-gamma (real
// and complex), Bessel J0, generalized hypergeometric series and a Meijer
// G-function evaluator with two routes, a residue (Slater) series and a
// numerical Mellin-Barnes contour integral.

#include "rfso/errors.hpp"
#include "rfso/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <span>
#include <sstream>
#include <string>
#include <vector>

namespace rfso::specfun {

using complex = std::complex<double>;

namespace detail {

// Lanczos approximation, g = 7, n = 9.
inline constexpr double lanczos_g = 7.0;
inline constexpr std::array<double, 9> lanczos_coef = {
    0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
    771.32342877765313,      -176.61502916214059,   12.507343278686905,
    -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7};

// zeta(k) for k = 2..40.
inline constexpr std::array<double, 39> zeta_table = {
    1.6449340668482264, 1.2020569031595942, 1.0823232337111381, 1.03692775514337,
    1.0173430619844492, 1.008349277381923,  1.0040773561979444, 1.0020083928260821,
    1.000994575127818,  1.0004941886041194, 1.000246086553308,  1.0001227133475785,
    1.0000612481350588, 1.000030588236307,  1.0000152822594086, 1.0000076371976379,
    1.000003817293265,  1.0000019082127165, 1.0000009539620338, 1.0000004769329869,
    1.0000002384505027, 1.000000119219926,  1.000000059608189,  1.0000000298035034,
    1.0000000149015549, 1.0000000074507118, 1.000000003725334,  1.0000000018626598,
    1.0000000009313275, 1.0000000004656628, 1.000000000232831,  1.0000000001164155,
    1.0000000000582077, 1.0000000000291038, 1.000000000014552,  1.000000000007276,
    1.000000000003638,  1.000000000001819,  1.0000000000009095};

inline constexpr double euler_gamma = 0.5772156649015329;
inline const double half_log_two_pi = 0.5 * std::log(2.0 * std::numbers::pi);

// ln Gamma(1 + e) for |e| <= 0.25 by its Taylor series in zeta values.
inline double ln_gamma_1p_series(double e) {
    double sum = -euler_gamma * e;
    double power = -e; // (-e)^k after the first update
    for (int k = 2; k <= 40; ++k) {
        power *= -e;
        const double term = zeta_table[k - 2] * power / k;
        sum += term;
        if (std::abs(term) < 1e-18 * std::abs(sum)) break;
    }
    return sum;
}

inline double lanczos_ln_gamma(double x) {
    const double zm1 = x - 1.0;
    double acc = lanczos_coef[0];
    for (int i = 1; i < 9; ++i) acc += lanczos_coef[i] / (zm1 + i);
    const double t = zm1 + lanczos_g + 0.5;
    return half_log_two_pi + (zm1 + 0.5) * std::log(t) - t + std::log(acc);
}

inline complex lanczos_ln_gamma(complex z) {
    const complex zm1 = z - 1.0;
    complex acc = lanczos_coef[0];
    for (int i = 1; i < 9; ++i) acc += lanczos_coef[i] / (zm1 + static_cast<double>(i));
    const complex t = zm1 + lanczos_g + 0.5;
    return half_log_two_pi + (zm1 + 0.5) * std::log(t) - t + std::log(acc);
}

// log(sin(pi z)) without overflow for large |Im z|.
inline complex log_sin_pi(complex z) {
    if (z.imag() < 0.0) return std::conj(log_sin_pi(std::conj(z)));
    const complex i{0.0, 1.0};
    const double pi = std::numbers::pi;
    // sin(pi z) = exp(-i pi z) (1 - exp(2 i pi z)) / (-2i), |exp(2 i pi z)| <= 1.
    return -i * pi * z + std::log(1.0 - std::exp(2.0 * i * pi * z)) - std::log(-2.0 * i);
}

inline bool is_nonpositive_integer(double x) {
    return x <= 0.0 && x == std::floor(x);
}

} // namespace detail

/// ln Gamma(x) for x > 0.
inline double ln_gamma(double x) {
    if (!(x > 0.0) || !std::isfinite(x)) {
        std::ostringstream msg;
        msg << "ln_gamma: argument must be positive and finite, got " << x;
        throw DomainError(msg.str());
    }
    if (std::abs(x - 1.0) <= 0.25) return detail::ln_gamma_1p_series(x - 1.0);
    if (std::abs(x - 2.0) <= 0.25) return std::log1p(x - 2.0) + detail::ln_gamma_1p_series(x - 2.0);
    if (x < 0.5) {
        const double pi = std::numbers::pi;
        return std::log(pi / std::sin(pi * x)) - ln_gamma(1.0 - x);
    }
    return detail::lanczos_ln_gamma(x);
}

/// ln|Gamma(x)| together with the sign of Gamma(x), valid on the whole real
/// line except the poles at non-positive integers.
struct SignedLogGamma {
    double log_abs;
    int sign;
};

inline SignedLogGamma signed_ln_gamma(double x) {
    if (detail::is_nonpositive_integer(x) || !std::isfinite(x)) {
        std::ostringstream msg;
        msg << "gamma: pole at non-positive integer " << x;
        throw DomainError(msg.str());
    }
    if (x > 0.0) return {ln_gamma(x), 1};
    // Reflection: Gamma(x) Gamma(1-x) = pi / sin(pi x).
    const double pi = std::numbers::pi;
    const double s = std::sin(pi * x);
    return {std::log(pi / std::abs(s)) - ln_gamma(1.0 - x), s > 0.0 ? 1 : -1};
}

/// Gamma(x) for real x, negative non-integers through reflection.
inline double gamma_fn(double x) {
    const auto g = signed_ln_gamma(x);
    return g.sign * std::exp(g.log_abs);
}

/// 1/Gamma(x); zero at the poles of Gamma.
inline double rgamma(double x) {
    if (detail::is_nonpositive_integer(x)) return 0.0;
    const auto g = signed_ln_gamma(x);
    return g.sign * std::exp(-g.log_abs);
}

/// Principal-branch-free ln Gamma(z) for complex z: only exp() of the result is
/// meaningful (the imaginary part is defined modulo 2 pi).
inline complex ln_gamma(complex z) {
    if (z.imag() == 0.0 && detail::is_nonpositive_integer(z.real())) {
        std::ostringstream msg;
        msg << "ln_gamma: pole at " << z.real();
        throw DomainError(msg.str());
    }
    if (z.real() < 0.5) {
        const double log_pi = std::log(std::numbers::pi);
        return log_pi - detail::log_sin_pi(z) - detail::lanczos_ln_gamma(1.0 - z);
    }
    return detail::lanczos_ln_gamma(z);
}

/// Bessel function of the first kind, order zero.
inline double bessel_j0(double x) {
    const double ax = std::abs(x);
    if (ax <= 6.0) {
        // sum (-x^2/4)^k / (k!)^2
        const double q = -0.25 * ax * ax;
        double term = 1.0, sum = 1.0;
        for (int k = 1; k < 200; ++k) {
            term *= q / (static_cast<double>(k) * k);
            sum += term;
            if (std::abs(term) < 1e-17 * std::abs(sum) + 1e-300) break;
        }
        return sum;
    }
    // Miller backward recurrence normalised by J0 + 2 sum J_2k = 1.
    int start = static_cast<int>(ax + 30.0 + 10.0 * std::cbrt(ax));
    start += start % 2;
    double j_next = 0.0, j = 1e-30, norm = 2.0 * j;
    for (int n = start; n > 0; --n) {
        const double j_prev = 2.0 * n / ax * j - j_next;
        j_next = j;
        j = j_prev;
        if (std::abs(j) > 1e250) {
            j *= 1e-250;
            j_next *= 1e-250;
            norm *= 1e-250;
        }
        if ((n - 1) % 2 == 0 && n - 1 > 0) norm += 2.0 * j;
    }
    norm += j;
    return j / norm;
}

/// e^y E1(y) for y > 0, where E1 is the exponential integral. Equals
/// E[ln(1 + X/y)] for a unit-mean exponential X.
inline double exp_e1(double y) {
    if (!(y > 0.0)) throw DomainError("exp_e1: argument must be positive");
    if (std::isinf(y)) return 0.0;
    if (y <= 1.0) {
        double sum = 0.0, term = 1.0;
        for (int k = 1; k < 100; ++k) {
            term *= -y / k;
            const double add = -term / k;
            sum += add;
            if (std::abs(add) < 1e-17 * std::abs(sum)) break;
        }
        return std::exp(y) * (-detail::euler_gamma - std::log(y) + sum);
    }
    // Modified Lentz on the continued fraction of E1.
    const double tiny = 1e-300;
    double b = y + 1.0, c = 1.0 / tiny, d = 1.0 / b, h = d;
    for (int i = 1; i < 1000; ++i) {
        const double an = -static_cast<double>(i) * i;
        b += 2.0;
        d = 1.0 / (an * d + b);
        c = b + an / c;
        const double del = c * d;
        h *= del;
        if (std::abs(del - 1.0) < 1e-16) return h;
    }
    throw NonConvergent("exp_e1: continued fraction did not converge");
}

/// Result of a summed hypergeometric series with a cancellation diagnostic.
struct SeriesSum {
    double value;
    double largest_term; ///< max |term|, compare with |value| to gauge lost digits
    int terms;
};

/// pFq(a; b; x) by direct summation. Stops after 30 consecutive terms below
/// 1e-16 relative to the running sum; 10,000-term cap.
inline SeriesSum hypergeometric_pfq_sum(std::span<const double> a, std::span<const double> b, double x) {
    for (double bj : b)
        if (detail::is_nonpositive_integer(bj)) throw DomainError("hypergeometric_pfq: non-positive integer lower parameter");

    double term = 1.0, sum = 1.0, largest = 1.0;
    int small_run = 0;
    for (int k = 0; k < 10000; ++k) {
        double ratio = x / (k + 1.0);
        for (double ai : a) ratio *= ai + k;
        for (double bj : b) ratio /= bj + k;
        term *= ratio;
        if (term == 0.0) return {sum, largest, k + 1};
        sum += term;
        largest = std::max(largest, std::abs(term));
        if (std::abs(term) < 1e-16 * std::abs(sum))
            ++small_run;
        else
            small_run = 0;
        if (small_run >= 30) return {sum, largest, k + 1};
    }
    throw NonConvergent("hypergeometric_pfq: series did not converge within 10000 terms");
}

inline double hypergeometric_pfq(std::span<const double> a, std::span<const double> b, double x) {
    return hypergeometric_pfq_sum(a, b, x).value;
}

// ---------------------------------------------------------------------------
// Meijer G
// ---------------------------------------------------------------------------

/// Parameters of G^{m,n}_{p,q}(z | a; b) with p = a.size(), q = b.size().
struct MeijerGSpec {
    int m = 0;
    int n = 0;
    std::vector<double> a;
    std::vector<double> b;
    double z = 1.0;

    int p() const { return static_cast<int>(a.size()); }
    int q() const { return static_cast<int>(b.size()); }
};

inline void validate(const MeijerGSpec& s) {
    std::ostringstream msg;
    if (s.m < 0 || s.m > s.q()) msg << "m=" << s.m << " outside [0, q=" << s.q() << "]; ";
    if (s.n < 0 || s.n > s.p()) msg << "n=" << s.n << " outside [0, p=" << s.p() << "]; ";
    if (!(s.z > 0.0) || !std::isfinite(s.z)) msg << "z=" << s.z << " must be positive and finite; ";
    for (double v : s.a)
        if (!std::isfinite(v)) msg << "non-finite a-parameter; ";
    for (double v : s.b)
        if (!std::isfinite(v)) msg << "non-finite b-parameter; ";
    const auto text = msg.str();
    if (!text.empty()) throw DomainError("MeijerGSpec: " + text);
}

/// G^{m,n}_{p,q}(z | a; b) = G^{n,m}_{q,p}(1/z | 1-b; 1-a).
inline MeijerGSpec invert(const MeijerGSpec& s) {
    MeijerGSpec r;
    r.m = s.n;
    r.n = s.m;
    r.a.reserve(s.b.size());
    r.b.reserve(s.a.size());
    for (double v : s.b) r.a.push_back(1.0 - v);
    for (double v : s.a) r.b.push_back(1.0 - v);
    r.z = 1.0 / s.z;
    return r;
}

/// Multiplicity-annotated pole positions of one family of gamma factors.
struct PoleStructure {
    std::vector<double> pole_locations; ///< strictly increasing
    std::vector<int> multiplicities;    ///< each >= 1

    bool all_simple() const {
        return std::all_of(multiplicities.begin(), multiplicities.end(), [](int k) { return k == 1; });
    }
};

inline constexpr double pole_coincidence_tol = 1e-9;

namespace detail {

inline PoleStructure collect_poles(std::vector<double> raw) {
    std::sort(raw.begin(), raw.end());
    PoleStructure ps;
    for (double x : raw) {
        if (!ps.pole_locations.empty() &&
            std::abs(x - ps.pole_locations.back()) <= pole_coincidence_tol * std::max(1.0, std::abs(x))) {
            ++ps.multiplicities.back();
        } else {
            ps.pole_locations.push_back(x);
            ps.multiplicities.push_back(1);
        }
    }
    return ps;
}

} // namespace detail

/// Poles of prod_{j<=m} Gamma(b_j - s): s = b_j + k for k = 0..depth-1.
inline PoleStructure right_pole_structure(const MeijerGSpec& s, int depth) {
    std::vector<double> raw;
    for (int j = 0; j < s.m; ++j)
        for (int k = 0; k < depth; ++k) raw.push_back(s.b[j] + k);
    return detail::collect_poles(std::move(raw));
}

/// Poles of prod_{j<=n} Gamma(1 - a_j + s): s = a_j - 1 - k for k = 0..depth-1.
inline PoleStructure left_pole_structure(const MeijerGSpec& s, int depth) {
    std::vector<double> raw;
    for (int j = 0; j < s.n; ++j)
        for (int k = 0; k < depth; ++k) raw.push_back(s.a[j] - 1.0 - k);
    return detail::collect_poles(std::move(raw));
}

namespace detail {

inline int coincidence_depth(const std::vector<double>& v, int count) {
    if (count <= 1) return 1;
    const auto [lo, hi] = std::minmax_element(v.begin(), v.begin() + count);
    return static_cast<int>(std::ceil(*hi - *lo)) + 2;
}

inline void check_separable(const MeijerGSpec& s) {
    // A right pole b_h + i meets a left pole a_j - 1 - k iff a_j - b_h is a positive integer.
    for (int h = 0; h < s.m; ++h)
        for (int j = 0; j < s.n; ++j) {
            const double d = s.a[j] - s.b[h];
            const double r = std::round(d);
            if (r >= 1.0 && std::abs(d - r) <= pole_coincidence_tol * std::max(1.0, std::abs(d))) {
                std::ostringstream msg;
                msg << "pole families collide: a[" << j << "]=" << s.a[j] << ", b[" << h << "]=" << s.b[h];
                throw ContourNotSeparable(msg.str());
            }
        }
}

} // namespace detail

/// Residue (Slater) series. Applies to p < q, or p = q with z < 1, after the
/// argument inversion has been used to bring the spec into that form.
/// Throws PoleCoincidence when two right-family poles coincide.
inline double meijer_g_series(const MeijerGSpec& spec) {
    validate(spec);
    MeijerGSpec s = spec;
    if (s.p() > s.q() || (s.p() == s.q() && s.z > 1.0)) s = invert(s);
    if (s.p() == s.q() && s.z == 1.0) throw SeriesNotApplicable("meijer_g_series: p = q at z = 1");
    if (s.m == 0) throw SeriesNotApplicable("meijer_g_series: no residue family (m = 0 after inversion)");

    const auto poles = right_pole_structure(s, detail::coincidence_depth(s.b, s.m));
    if (!poles.all_simple()) {
        std::ostringstream msg;
        msg << "meijer_g_series: coincident poles among b[0.." << s.m - 1 << "]";
        throw PoleCoincidence(msg.str());
    }
    detail::check_separable(s);

    const int p = s.p(), q = s.q();
    const double sign_arg = ((p - s.m - s.n) % 2 == 0) ? 1.0 : -1.0;
    const double x = sign_arg * s.z;
    const double log_z = std::log(s.z);

    double total = 0.0, magnitude = 0.0;
    std::vector<double> upper(p), lower;
    lower.reserve(q);
    for (int h = 0; h < s.m; ++h) {
        const double bh = s.b[h];
        double log_coef = bh * log_z;
        int sign = 1;
        bool zero = false;
        auto mul = [&](double arg) {
            const auto g = signed_ln_gamma(arg);
            log_coef += g.log_abs;
            sign *= g.sign;
        };
        auto div = [&](double arg) {
            if (detail::is_nonpositive_integer(arg)) {
                zero = true;
                return;
            }
            const auto g = signed_ln_gamma(arg);
            log_coef -= g.log_abs;
            sign *= g.sign;
        };
        for (int j = 0; j < s.m; ++j)
            if (j != h) mul(s.b[j] - bh);
        for (int j = 0; j < s.n; ++j) mul(1.0 + bh - s.a[j]);
        for (int j = s.m; j < q; ++j) div(1.0 + bh - s.b[j]);
        for (int j = s.n; j < p; ++j) div(s.a[j] - bh);
        if (zero) continue;

        for (int j = 0; j < p; ++j) upper[j] = 1.0 + bh - s.a[j];
        lower.clear();
        for (int j = 0; j < q; ++j)
            if (j != h) lower.push_back(1.0 + bh - s.b[j]);
        for (double v : lower)
            if (detail::is_nonpositive_integer(v))
                throw SeriesNotApplicable("meijer_g_series: degenerate lower parameter");

        const auto series = hypergeometric_pfq_sum(upper, lower, x);
        const double coef = sign * std::exp(log_coef);
        total += coef * series.value;
        magnitude += std::abs(coef) * series.largest_term;
    }
    if (magnitude > 1e5 * std::abs(total)) {
        std::ostringstream msg;
        msg << "meijer_g_series: cancellation (term scale " << magnitude << " vs value " << total << ")";
        throw NonConvergent(msg.str());
    }
    return total;
}

struct ContourOptions {
    double rel_tol = 1e-11;
    double abs_tol_scale = 1e-15; ///< absolute floor, relative to the peak integrand magnitude
    double accept_rel = 1e-8;     ///< post-check: error above this (and the floor) raises NonConvergent
    double truncation = 1e-16;    ///< |integrand| / peak at which the line is cut
    int max_intervals = 20000;
};

/// Mellin-Barnes integral along the vertical line Re s = c that separates the
/// pole families. c is the minimiser of the real-axis log-integrand inside the
/// separating strip (kept a margin away from either pole family).
inline double meijer_g_contour(const MeijerGSpec& spec, const ContourOptions& opts = {}) {
    validate(spec);
    const MeijerGSpec& s = spec;
    const int p = s.p(), q = s.q();

    const double decay = s.m + s.n - 0.5 * (p + q);
    if (decay <= 0.0) {
        std::ostringstream msg;
        msg << "meijer_g_contour: integrand does not decay exponentially (m+n-(p+q)/2 = " << decay << ")";
        throw NonConvergent(msg.str());
    }

    const double inf = std::numeric_limits<double>::infinity();
    double left = -inf, right = inf;
    for (int j = 0; j < s.n; ++j) left = std::max(left, s.a[j] - 1.0);
    for (int j = 0; j < s.m; ++j) right = std::min(right, s.b[j]);
    if (!(left < right - 1e-12)) {
        std::ostringstream msg;
        msg << "meijer_g_contour: rightmost left pole " << left << " is not left of leftmost right pole " << right;
        throw ContourNotSeparable(msg.str());
    }

    const double log_z = std::log(s.z);

    // Real-axis profile used only to place the line; denominators contribute
    // only where their argument is positive.
    auto profile = [&](double c) {
        double v = c * log_z;
        for (int j = 0; j < s.m; ++j) v += ln_gamma(s.b[j] - c);
        for (int j = 0; j < s.n; ++j) v += ln_gamma(1.0 - s.a[j] + c);
        for (int j = s.m; j < q; ++j)
            if (1.0 - s.b[j] + c > 0.0) v -= ln_gamma(1.0 - s.b[j] + c);
        for (int j = s.n; j < p; ++j)
            if (s.a[j] - c > 0.0) v -= ln_gamma(s.a[j] - c);
        return v;
    };

    const bool finite_left = std::isfinite(left), finite_right = std::isfinite(right);
    // The profile diverges at the poles, so the search only needs to stay off them.
    const double margin = (finite_left && finite_right) ? 1e-9 * (right - left) : 1e-9;
    double lo = finite_left ? left + margin : -inf;
    double hi = finite_right ? right - margin : inf;

    if (!finite_left && !finite_right) {
        lo = -1.0;
        hi = 1.0;
    } else if (!finite_right) {
        double step = 1.0, prev = profile(lo);
        hi = lo + step;
        while (hi - lo < 1e8) {
            const double v = profile(hi);
            if (v > prev) break;
            prev = v;
            step *= 2.0;
            hi = lo + step;
        }
    } else if (!finite_left) {
        double step = 1.0, prev = profile(hi);
        lo = hi - step;
        while (hi - lo < 1e8) {
            const double v = profile(lo);
            if (v > prev) break;
            prev = v;
            step *= 2.0;
            lo = hi - step;
        }
    }

    // Golden-section search for the profile minimum on [lo, hi].
    const double ratio = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = hi - ratio * (hi - lo), x2 = lo + ratio * (hi - lo);
    double f1 = profile(x1), f2 = profile(x2);
    for (int it = 0; it < 80 && hi - lo > 1e-6; ++it) {
        if (f1 < f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - ratio * (hi - lo);
            f1 = profile(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + ratio * (hi - lo);
            f2 = profile(x2);
        }
    }
    const double c = 0.5 * (lo + hi);
    const double shift = profile(c);
    // Without denominator gammas the modulus on the line peaks at t = 0, so a
    // saddle this deep means the value underflows.
    if (s.m == q && s.n == p && shift < -800.0) return 0.0;

    auto log_integrand = [&](double t) {
        const complex sv{c, t};
        complex v = sv * log_z;
        for (int j = 0; j < s.m; ++j) v += ln_gamma(complex(s.b[j]) - sv);
        for (int j = 0; j < s.n; ++j) v += ln_gamma(complex(1.0 - s.a[j]) + sv);
        for (int j = s.m; j < q; ++j) {
            const complex arg = complex(1.0 - s.b[j]) + sv;
            if (arg.imag() == 0.0 && detail::is_nonpositive_integer(arg.real())) return complex(-inf, 0.0);
            v -= ln_gamma(arg);
        }
        for (int j = s.n; j < p; ++j) {
            const complex arg = complex(s.a[j]) - sv;
            if (arg.imag() == 0.0 && detail::is_nonpositive_integer(arg.real())) return complex(-inf, 0.0);
            v -= ln_gamma(arg);
        }
        return v - shift;
    };
    auto modulus = [&](double t) {
        const double re = log_integrand(t).real();
        return re == -inf ? 0.0 : std::exp(re);
    };

    // Truncation point: scan outward until the modulus falls below the cut.
    double peak = modulus(0.0), cut_at = 0.0;
    const double scan_step = 0.25;
    for (double t = scan_step;; t += scan_step) {
        const double mval = modulus(t);
        peak = std::max(peak, mval);
        if (mval < opts.truncation * peak && t > 1.0) {
            cut_at = t;
            break;
        }
        if (t > 1e4) throw NonConvergent("meijer_g_contour: integrand failed to decay before |Im s| = 1e4");
    }

    // Panels start at the distance to the nearest pole, which sets the width of
    // the peak at t = 0, and grow geometrically up to the oscillation scale.
    double distance = inf;
    if (finite_left) distance = std::min(distance, c - left);
    if (finite_right) distance = std::min(distance, right - c);
    distance = std::min(distance, 0.5);
    std::vector<double> points{0.0};
    while (points.back() < cut_at) {
        const double t = points.back();
        const double freq = std::abs(log_z) + (p + q) * std::log(2.0 + t) + 1.0;
        const double width = std::min({0.5, std::numbers::pi / (2.0 * freq), std::max(distance, t)});
        points.push_back(std::min(cut_at, t + width));
    }

    auto integrand = [&](double t) {
        const complex v = log_integrand(t);
        if (v.real() == -inf) return 0.0;
        return std::exp(v.real()) * std::cos(v.imag());
    };

    quad::Options qopts;
    qopts.abs_tol = opts.abs_tol_scale * peak;
    qopts.rel_tol = opts.rel_tol;
    qopts.max_intervals = std::max(opts.max_intervals, 4 * static_cast<int>(points.size()));
    const auto r = quad::integrate_adaptive_breakpoints(integrand, points, qopts);

    // Rounding in the panel sums is of order eps * integral of |f|; the
    // quadrature estimate cannot see it, so check it separately.
    const double rounding = 64.0 * std::numeric_limits<double>::epsilon() * r.abs_value;
    const double error = std::max(r.error, rounding);
    if (error > std::max(opts.accept_rel * std::abs(r.value), 100.0 * opts.abs_tol_scale * peak) ||
        rounding > opts.accept_rel * std::abs(r.value)) {
        std::ostringstream msg;
        msg << "meijer_g_contour: estimated error " << error << " vs value " << r.value << " (scaled, |f| integral "
            << r.abs_value << ") after " << r.intervals << " intervals";
        throw NonConvergent(msg.str(), error * std::exp(shift) / std::numbers::pi);
    }
    return r.value * std::exp(shift) / std::numbers::pi;
}

/// Evaluates G with the residue series when its poles are simple and the sum
/// is well conditioned, otherwise with the contour integral.
inline double meijer_g(const MeijerGSpec& spec) {
    try {
        return meijer_g_series(spec);
    } catch (const PoleCoincidence&) {
    } catch (const SeriesNotApplicable&) {
    } catch (const NonConvergent&) {
    }
    return meijer_g_contour(spec);
}

/// Delta(j; x) = x/j, (x+1)/j, ..., (x+j-1)/j, appended to out.
inline void append_delta(std::vector<double>& out, int j, double x) {
    for (int i = 0; i < j; ++i) out.push_back((x + i) / j);
}

} // namespace rfso::specfun

#endif // RFSO_SPECFUN_HPP
