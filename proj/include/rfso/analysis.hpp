#ifndef RFSO_ANALYSIS_HPP
#define RFSO_ANALYSIS_HPP

// Outage probability and ergodic capacity: closed forms in Meijer G plus
// Meijer-G-free integral evaluators that serve as their reference.
//
// Arbitration on disagreement: Monte Carlo > integral form > closed form.

#include "rfso/errors.hpp"
#include "rfso/link.hpp"
#include "rfso/quadrature.hpp"
#include "rfso/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

namespace rfso {

struct OutageQuery {
    double gamma_th = 1.0; ///< outage threshold, linear SNDR
    LinkConfig cfg;
};

/// Values of 1 - delta*gamma_th at or below this are treated as the ceiling.
inline constexpr double feasibility_guard = 1e-12;

namespace detail {

inline double outage_margin(const OutageQuery& q) {
    q.cfg.validate();
    if (!(q.gamma_th > 0.0) || !std::isfinite(q.gamma_th)) throw DomainError("outage: gamma_th must be positive");
    return 1.0 - q.cfg.impairments.delta() * q.gamma_th;
}

// The Meijer G form needs beta2*k integral. Any common multiple of (k, l)
// still satisfies beta1 l = beta2 k, so scale up to 8x before giving up.
inline OpticalHopConfig integer_order_config(const OpticalHopConfig& o) {
    for (int j = 1; j <= 8; ++j) {
        const double qr = o.beta2 * o.k * j;
        const double qi = std::round(qr);
        if (qi >= 1.0 && std::abs(qr - qi) <= 1e-9 * qr && (o.k + o.l) * j <= 64) {
            OpticalHopConfig scaled = o;
            scaled.k = o.k * j;
            scaled.l = o.l * j;
            return scaled;
        }
    }
    std::ostringstream msg;
    msg << "closed form needs beta2*k to be an integer for some multiple of (k, l) (beta2*k = " << o.beta2 * o.k << ")";
    throw UnsupportedParameters(msg.str());
}

// exp(log_z) for a Meijer G argument, rejected when it leaves the double range.
inline double meijer_argument(double log_z) {
    const double z = std::exp(log_z);
    if (!(z > 0.0) || !std::isfinite(z)) {
        std::ostringstream msg;
        msg << "Meijer G argument exp(" << log_z << ") is outside the double range";
        throw UnsupportedParameters(msg.str());
    }
    return z;
}

inline int integer_order(const OpticalHopConfig& o) { return static_cast<int>(std::round(o.beta2 * o.k)); }

// a-parameters [Delta(r; Delta(l;0)), Delta(r; Delta(k;0)), Delta(q;1)].
inline std::vector<double> lambda2(const OpticalHopConfig& o, int order) {
    const int r = o.r();
    std::vector<double> base;
    specfun::append_delta(base, o.l, 0.0);
    specfun::append_delta(base, o.k, 0.0);
    std::vector<double> out;
    for (double v : base) specfun::append_delta(out, r, v);
    specfun::append_delta(out, order, 1.0);
    return out;
}

// mu = -sum(Lambda0) + (k+l)/2 + 1.
inline double mu_exponent(const OpticalHopConfig& o) {
    std::vector<double> base;
    specfun::append_delta(base, o.l, 0.0);
    specfun::append_delta(base, o.k, 0.0);
    double sum = 0.0;
    for (double v : base) sum += v;
    return -sum + (o.k + o.l) / 2.0 + 1.0;
}

// log[((Omega1 l)^l (Omega2 k)^k r^{k+l})^r]
inline double log_optical_scale(const OpticalHopConfig& o) {
    const int r = o.r();
    return r * (o.l * std::log(o.omega1 * o.l) + o.k * std::log(o.omega2 * o.k) + (o.k + o.l) * std::log(double(r)));
}

} // namespace detail

/// Outage probability from the single integral over gamma_2 of the RF-hop CDF,
/// with the optical density expressed through its Weibull factors so no
/// Meijer G is involved. Absolute error target 1e-7.
inline double op_quadrature(const OutageQuery& q) {
    const double margin = detail::outage_margin(q);
    if (margin <= feasibility_guard) return 1.0;

    const auto& cfg = q.cfg;
    const auto& o = cfg.optical;
    const double k2 = cfg.impairments.kappa2;
    const double C = gain_constant(cfg);
    const double offset = (1.0 + k2 * k2) * q.gamma_th / margin;
    const double tau = C * q.gamma_th / margin;
    const auto terms = detail::rf_mixture(cfg.rf);
    const int r = o.r();

    auto rf_cdf_at = [&](double x) {
        if (std::isinf(x)) return 1.0;
        double s = 0.0;
        for (const auto& t : terms) s -= t.weight * std::expm1(-t.rate * x);
        return s;
    };

    quad::Options inner_opts;
    inner_opts.abs_tol = 1e-11;
    inner_opts.rel_tol = 1e-11;
    inner_opts.initial_intervals = 4;
    quad::Options outer_opts = inner_opts;
    outer_opts.abs_tol = 1e-9;

    double worst_inner = 0.0;
    bool inner_failed = false;
    auto outer = [&](double u) {
        const double x = std::pow(o.omega1 * u, 1.0 / o.beta1);
        auto inner = [&](double v) {
            const double y = std::pow(o.omega2 * v, 1.0 / o.beta2);
            const double I = x * y;
            const double g2 = o.avg_snr * (r == 1 ? I : I * I);
            if (!(g2 > 0.0)) return 1.0;
            return rf_cdf_at(offset + tau / g2);
        };
        const auto res = quad::expect_exponential_adaptive(inner, inner_opts);
        if (!res.converged) inner_failed = true;
        worst_inner = std::max(worst_inner, res.error);
        return res.value;
    };
    const auto res = quad::expect_exponential_adaptive(outer, outer_opts);
    if (!res.converged || inner_failed)
        throw QuadratureNonConvergent("op_quadrature: adaptive quadrature missed tolerance",
                                      std::max(res.error, worst_inner));
    return std::clamp(res.value, 0.0, 1.0);
}

/// Outage probability in closed form: a finite sum of exponentials times
/// G^{0, r(k+l)+beta2 k}_{r(k+l)+beta2 k, 0}. Requires beta2*k integral for
/// some multiple of (k, l).
inline double op_closed_form(const OutageQuery& q) {
    const double margin = detail::outage_margin(q);
    if (margin <= feasibility_guard) return 1.0;

    const auto& cfg = q.cfg;
    const auto o = detail::integer_order_config(cfg.optical);
    const auto& rf = cfg.rf;
    const int order = detail::integer_order(o);
    const int r = o.r(), k = o.k, l = o.l;
    const int N = rf.relays, m = rf.rank;
    const double k2 = cfg.impairments.kappa2;
    const double C = gain_constant(cfg);
    const double offset = (1.0 + k2 * k2) * q.gamma_th / margin;
    const double tau = C * q.gamma_th / margin;

    const double log_two_pi = std::log(2.0 * std::numbers::pi);
    // The (2 pi) exponent follows the size of the parameter list, beta2*k + r(k+l).
    const double log_prefactor = std::log(double(k)) + 0.5 * std::log(o.beta2 * l) +
                                 (detail::mu_exponent(o) - 1.0) * std::log(double(r)) -
                                 0.5 * (o.beta2 * k + r * (k + l) - 3.0) * log_two_pi;

    specfun::MeijerGSpec spec;
    spec.a = detail::lambda2(o, order);
    spec.m = 0;
    spec.n = spec.p();
    const double log_scale = detail::log_optical_scale(o);

    const double lead = m * detail::binomial(N, m);
    double sum = 0.0;
    for (int n = 0; n < m; ++n) {
        const double order_stat = N - m + n + 1.0;
        const double spread = (N - m + n) * (1.0 - rf.rho) + 1.0;
        const double xi = order_stat / spread;
        const double sign = (n % 2 == 0) ? 1.0 : -1.0;
        spec.z = detail::meijer_argument(log_scale + order * std::log(order * rf.avg_snr * o.avg_snr / (tau * xi)));
        const double g = specfun::meijer_g(spec);
        sum += lead * detail::binomial(m - 1, n) * sign / order_stat * std::exp(-xi * offset / rf.avg_snr) *
               std::exp(log_prefactor) * g;
    }
    return 1.0 - sum;
}

/// Closed form against the integral form. The integral is authoritative; a
/// discrepancy is reported, never absorbed.
struct OutageCrossCheck {
    double closed_form;
    double quadrature;
    double difference;
    bool discrepancy;
};

inline OutageCrossCheck cross_check_outage(const OutageQuery& q, double tolerance = 1e-5) {
    const double closed = op_closed_form(q);
    const double quad = op_quadrature(q);
    const double diff = closed - quad;
    return {closed, quad, diff, std::abs(diff) > tolerance};
}

/// Upper bound log2(1 + c J/(J delta + 1)) with J = E[gamma1 gamma2 / ((1+k2^2) gamma2 + C)]
/// in Meijer G form. Requires beta2*k integral.
inline double ec_upper_bound(const LinkConfig& cfg) {
    cfg.validate();
    const auto o = detail::integer_order_config(cfg.optical);
    const int order = detail::integer_order(o);
    const int r = o.r(), k = o.k, l = o.l;
    const double k2 = cfg.impairments.kappa2;
    const double C = gain_constant(cfg);

    specfun::MeijerGSpec spec;
    spec.a = detail::lambda2(o, order);
    specfun::append_delta(spec.b, order, 1.0);
    spec.m = order;
    spec.n = spec.p();
    spec.z = detail::meijer_argument(detail::log_optical_scale(o) + order * std::log((1.0 + k2 * k2) * o.avg_snr / C));

    const double log_two_pi = std::log(2.0 * std::numbers::pi);
    const double log_prefactor = std::log(o.beta2 * k) + 0.5 * std::log(double(k) * l) +
                                 (detail::mu_exponent(o) - 1.0) * std::log(double(r)) -
                                 (o.beta2 * k + r * (k + l) / 2.0 - 2.0) * log_two_pi + std::log(rf_mean(cfg.rf)) -
                                 std::log(1.0 + k2 * k2);
    const double J = std::exp(log_prefactor) * specfun::meijer_g(spec);
    const double c = cfg.detection_constant();
    return std::log2(1.0 + c * J / (J * cfg.impairments.delta() + 1.0));
}

/// log2(1 + E[psi]/E[phi]) with psi = c gamma1 gamma2 and
/// phi = delta gamma1 gamma2 + (1 + k2^2) gamma2 + C, hops independent.
inline double ec_approx(const LinkConfig& cfg) {
    cfg.validate();
    const double mean1 = rf_mean(cfg.rf);
    const double mean2 = gamma2_moment(1, cfg.optical);
    const double k2 = cfg.impairments.kappa2;
    const double e_psi = cfg.detection_constant() * mean1 * mean2;
    const double e_phi = cfg.impairments.delta() * mean1 * mean2 + (1.0 + k2 * k2) * mean2 + gain_constant(cfg);
    return std::log2(1.0 + e_psi / e_phi);
}

/// E[log2(1 + c SNDR)] by adaptive quadrature over the two Weibull factors of
/// the optical hop; the RF-hop average is exact, since for an exponential
/// gamma1 with rate lambda, E[ln(1 + alpha gamma1)] = e^{lambda/alpha} E1(lambda/alpha).
inline double ec_numeric(const LinkConfig& cfg) {
    cfg.validate();
    const auto& o = cfg.optical;
    const double delta = cfg.impairments.delta();
    const double k2 = cfg.impairments.kappa2;
    const double C = gain_constant(cfg);
    const double c = cfg.detection_constant();
    const auto terms = detail::rf_mixture(cfg.rf);
    const int r = o.r();

    // E over gamma1 of ln(1 + c X/(delta X + 1)) where X = gamma1 * s.
    auto rf_average = [&](double s) {
        if (!(s > 0.0)) return 0.0;
        double total = 0.0;
        for (const auto& t : terms) {
            double v = specfun::exp_e1(t.rate / ((delta + c) * s));
            if (delta > 0.0) v -= specfun::exp_e1(t.rate / (delta * s));
            total += t.weight * v;
        }
        return total;
    };

    quad::Options inner_opts;
    inner_opts.abs_tol = 1e-9;
    inner_opts.rel_tol = 1e-10;
    inner_opts.initial_intervals = 4;
    quad::Options outer_opts = inner_opts;
    outer_opts.abs_tol = 1e-8;

    bool inner_failed = false;
    double worst_inner = 0.0;
    auto outer = [&](double u) {
        const double x = std::pow(o.omega1 * u, 1.0 / o.beta1);
        auto inner = [&](double v) {
            const double y = std::pow(o.omega2 * v, 1.0 / o.beta2);
            const double I = x * y;
            const double g2 = o.avg_snr * (r == 1 ? I : I * I);
            if (!std::isfinite(g2)) return rf_average(1.0 / (1.0 + k2 * k2));
            return rf_average(g2 / ((1.0 + k2 * k2) * g2 + C));
        };
        const auto res = quad::expect_exponential_adaptive(inner, inner_opts);
        if (!res.converged) inner_failed = true;
        worst_inner = std::max(worst_inner, res.error);
        return res.value;
    };
    const auto res = quad::expect_exponential_adaptive(outer, outer_opts);
    if (!res.converged || inner_failed)
        throw QuadratureNonConvergent("ec_numeric: adaptive quadrature missed tolerance",
                                      std::max(res.error, worst_inner) / std::numbers::ln2);
    return res.value / std::numbers::ln2;
}

} // namespace rfso

#endif // RFSO_ANALYSIS_HPP
