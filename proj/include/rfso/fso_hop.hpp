#ifndef RFSO_FSO_HOP_HPP
#define RFSO_FSO_HOP_HPP

// Second (optical) hop: Double-Weibull irradiance I = X Y with X, Y independent
// Weibull, f(x) = beta x^{beta-1}/Omega exp(-x^beta/Omega), and the electrical
// SNR gamma_2 = avg_snr * I^r (r = 1 heterodyne, r = 2 IM/DD).

#include "rfso/errors.hpp"
#include "rfso/quadrature.hpp"
#include "rfso/specfun.hpp"

#include <cmath>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>

namespace rfso {

enum class Detection { heterodyne, im_dd };

inline int detection_exponent(Detection d) { return d == Detection::heterodyne ? 1 : 2; }

/// Capacity constant c: 1 for heterodyne, e/(2 pi) for IM/DD.
inline double detection_constant(Detection d) {
    return d == Detection::heterodyne ? 1.0 : std::numbers::e / (2.0 * std::numbers::pi);
}

inline std::string_view to_string(Detection d) { return d == Detection::heterodyne ? "heterodyne" : "im_dd"; }

inline Detection detection_from_string(std::string_view s) {
    if (s == "heterodyne") return Detection::heterodyne;
    if (s == "im_dd" || s == "imdd" || s == "IM/DD") return Detection::im_dd;
    throw ConfigInvalid("optical.detection: expected \"heterodyne\" or \"im_dd\", got \"" + std::string(s) + "\"");
}

struct KL {
    int k;
    int l;
    bool operator==(const KL&) const = default;
};

inline constexpr double kl_tolerance = 1e-9;

/// Simplest positive integers (k, l) with |l/k - beta2/beta1| <= tol * beta2/beta1,
/// found by walking the Stern-Brocot tree (continued-fraction convergents and
/// their intermediates). Both k and l are minimal, hence so is k + l.
inline KL rationalize_kl(double beta1, double beta2, double tol = kl_tolerance) {
    if (!(beta1 > 0.0) || !(beta2 > 0.0)) throw DomainError("rationalize_kl: shapes must be positive");
    const double ratio = beta2 / beta1;
    const double lo = ratio * (1.0 - tol), hi = ratio * (1.0 + tol);
    // left = a/b, right = c/d as l/k fractions
    long a = 0, b = 1, c = 1, d = 0;
    while (true) {
        const long l = a + c, k = b + d;
        if (k + l > 64) {
            std::ostringstream msg;
            msg << "rationalize_kl: beta2/beta1 = " << ratio << " has no l/k with k + l <= 64 within relative tolerance "
                << tol;
            throw NotRationalizable(msg.str());
        }
        const double mediant = static_cast<double>(l) / k;
        if (mediant < lo) {
            a = l;
            b = k;
        } else if (mediant > hi) {
            c = l;
            d = k;
        } else {
            return {static_cast<int>(k), static_cast<int>(l)};
        }
    }
}

struct OpticalHopConfig {
    double beta1 = 1.0;   ///< large-scale shape
    double beta2 = 1.0;   ///< small-scale shape
    int k = 1;            ///< l/k = beta2/beta1
    int l = 1;
    double omega1 = 1.0;  ///< Weibull scale of X
    double omega2 = 1.0;  ///< Weibull scale of Y
    Detection detection = Detection::heterodyne;
    double avg_snr = 1.0; ///< average electrical SNR, linear

    int r() const { return detection_exponent(detection); }

    void validate() const {
        std::ostringstream msg;
        if (!(beta1 > 0.0)) msg << "optical.beta1: must be positive; ";
        if (!(beta2 > 0.0)) msg << "optical.beta2: must be positive; ";
        if (k < 1) msg << "optical.k: must be a positive integer; ";
        if (l < 1) msg << "optical.l: must be a positive integer; ";
        if (!(omega1 > 0.0)) msg << "optical.omega1: must be positive; ";
        if (!(omega2 > 0.0)) msg << "optical.omega2: must be positive; ";
        if (!(avg_snr > 0.0) || !std::isfinite(avg_snr)) msg << "optical.avg_snr: must be positive; ";
        if (k >= 1 && l >= 1 && beta1 > 0.0 && beta2 > 0.0 &&
            std::abs(beta1 * l - beta2 * k) > kl_tolerance * beta2 * k)
            msg << "optical.k/l: beta1*l = " << beta1 * l << " must equal beta2*k = " << beta2 * k << "; ";
        const auto text = msg.str();
        if (!text.empty()) throw ConfigInvalid(text);
    }
};

/// Omega = (1/Gamma(1 + 1/beta))^beta, the scale giving E[X] = 1.
inline double weibull_scale_unit_mean(double beta) {
    if (!(beta > 0.0)) throw DomainError("weibull_scale_unit_mean: beta must be positive");
    return std::exp(-beta * specfun::ln_gamma(1.0 + 1.0 / beta));
}

/// Normalised variance E[X^2]/E[X]^2 - 1 of a Weibull variable with shape beta.
inline double scintillation_index(double beta) {
    if (!(beta > 0.0)) throw DomainError("scintillation_index: beta must be positive");
    return std::exp(specfun::ln_gamma(1.0 + 2.0 / beta) - 2.0 * specfun::ln_gamma(1.0 + 1.0 / beta)) - 1.0;
}

/// sigma^{-1.0852} for a normalised variance sigma^2.
inline double lambda_from_scintillation(double sigma2) {
    if (!(sigma2 > 0.0)) throw DomainError("lambda_from_scintillation: variance must be positive");
    return std::pow(std::sqrt(sigma2), -1.0852);
}

/// Builds a config, deriving (k, l) from the shapes unless supplied.
inline OpticalHopConfig make_optical_config(double beta1, double beta2, double omega1, double omega2, Detection detection,
                                            double avg_snr, std::optional<KL> kl = std::nullopt) {
    OpticalHopConfig cfg;
    cfg.beta1 = beta1;
    cfg.beta2 = beta2;
    cfg.omega1 = omega1;
    cfg.omega2 = omega2;
    cfg.detection = detection;
    cfg.avg_snr = avg_snr;
    const KL chosen = kl ? *kl : rationalize_kl(beta1, beta2);
    cfg.k = chosen.k;
    cfg.l = chosen.l;
    cfg.validate();
    return cfg;
}

/// Unit-mean X and Y.
inline OpticalHopConfig make_unit_mean_optical_config(double beta1, double beta2, Detection detection, double avg_snr,
                                                      std::optional<KL> kl = std::nullopt) {
    return make_optical_config(beta1, beta2, weibull_scale_unit_mean(beta1), weibull_scale_unit_mean(beta2), detection,
                               avg_snr, kl);
}

namespace detail {

// (2 pi)^{(k+l)/2 - 1} / sqrt(kl), the Gauss-multiplication normaliser of the
// Delta(l; .), Delta(k; .) parameter blocks.
inline double log_dw_norm(const OpticalHopConfig& cfg) {
    return ((cfg.k + cfg.l) / 2.0 - 1.0) * std::log(2.0 * std::numbers::pi) - 0.5 * std::log(double(cfg.k) * cfg.l);
}

inline double log_scale_product(const OpticalHopConfig& cfg) {
    // log[(Omega1 l)^l (Omega2 k)^k]
    return cfg.l * std::log(cfg.omega1 * cfg.l) + cfg.k * std::log(cfg.omega2 * cfg.k);
}

inline specfun::MeijerGSpec pdf_spec(const OpticalHopConfig& cfg, double log_arg) {
    specfun::MeijerGSpec s;
    s.m = 0;
    s.n = cfg.k + cfg.l;
    specfun::append_delta(s.a, cfg.l, 0.0);
    specfun::append_delta(s.a, cfg.k, 0.0);
    s.z = std::exp(log_arg);
    return s;
}

inline specfun::MeijerGSpec cdf_spec(const OpticalHopConfig& cfg, double log_arg) {
    specfun::MeijerGSpec s;
    s.m = cfg.k + cfg.l;
    s.n = 1;
    s.a = {1.0};
    specfun::append_delta(s.b, cfg.l, 1.0);
    specfun::append_delta(s.b, cfg.k, 1.0);
    s.b.push_back(0.0);
    s.z = std::exp(log_arg);
    return s;
}

} // namespace detail

/// Double-Weibull irradiance density via G^{0,k+l}_{k+l,0}.
inline double irradiance_pdf(double I, const OpticalHopConfig& cfg) {
    cfg.validate();
    if (!(I > 0.0)) throw DomainError("irradiance_pdf: I must be positive");
    const double log_arg = detail::log_scale_product(cfg) - cfg.beta2 * cfg.k * std::log(I);
    const double g = specfun::meijer_g(detail::pdf_spec(cfg, log_arg));
    return cfg.beta2 * cfg.k * std::exp(-detail::log_dw_norm(cfg)) / I * g;
}

/// Double-Weibull irradiance CDF via G^{k+l,1}_{1,k+l+1}.
inline double irradiance_cdf(double I, const OpticalHopConfig& cfg) {
    cfg.validate();
    if (!(I > 0.0)) throw DomainError("irradiance_cdf: I must be positive");
    if (std::isinf(I)) return 1.0;
    const double log_arg = cfg.beta1 * cfg.l * std::log(I) - detail::log_scale_product(cfg);
    const double g = specfun::meijer_g(detail::cdf_spec(cfg, log_arg));
    return std::exp(-detail::log_dw_norm(cfg)) * g;
}

/// Density of gamma_2 = avg_snr * I^r, G-function form with argument
/// (Omega1 l)^l (Omega2 k)^k (avg_snr/g)^{beta2 k / r}.
inline double gamma2_pdf(double g, const OpticalHopConfig& cfg) {
    cfg.validate();
    if (!(g > 0.0)) throw DomainError("gamma2_pdf: g must be positive");
    const int r = cfg.r();
    const double log_arg = detail::log_scale_product(cfg) + cfg.beta2 * cfg.k / r * std::log(cfg.avg_snr / g);
    const double G = specfun::meijer_g(detail::pdf_spec(cfg, log_arg));
    return cfg.beta2 * cfg.k * std::exp(-detail::log_dw_norm(cfg)) / (r * g) * G;
}

/// CDF of gamma_2: irradiance_cdf((g/avg_snr)^{1/r}).
inline double gamma2_cdf(double g, const OpticalHopConfig& cfg) {
    cfg.validate();
    if (!(g > 0.0)) throw DomainError("gamma2_cdf: g must be positive");
    const int r = cfg.r();
    const double log_arg = cfg.beta1 * cfg.l / r * std::log(g / cfg.avg_snr) - detail::log_scale_product(cfg);
    const double G = specfun::meijer_g(detail::cdf_spec(cfg, log_arg));
    return std::exp(-detail::log_dw_norm(cfg)) * G;
}

/// E[gamma_2^n].
inline double gamma2_moment(int order, const OpticalHopConfig& cfg) {
    cfg.validate();
    if (order < 1) throw DomainError("gamma2_moment: order must be >= 1");
    const double nr = static_cast<double>(order) * cfg.r();
    return std::exp(order * std::log(cfg.avg_snr) + nr / cfg.beta1 * std::log(cfg.omega1) +
                    nr / cfg.beta2 * std::log(cfg.omega2) + specfun::ln_gamma(1.0 + nr / cfg.beta1) +
                    specfun::ln_gamma(1.0 + nr / cfg.beta2));
}

// ---------------------------------------------------------------------------
// Meijer-G-free evaluation by product-distribution quadrature. X^beta1/Omega1
// is unit exponential, so expectations over X are integrals against e^{-u}.
// ---------------------------------------------------------------------------

inline double weibull_pdf(double x, double beta, double omega) {
    if (x <= 0.0) return 0.0;
    const double xb = std::pow(x, beta);
    return beta * xb / x / omega * std::exp(-xb / omega);
}

inline double weibull_cdf(double x, double beta, double omega) {
    if (x <= 0.0) return 0.0;
    return -std::expm1(-std::pow(x, beta) / omega);
}

/// f_I(I) = E_X[f_Y(I/X)/X].
inline double irradiance_pdf_by_quadrature(double I, const OpticalHopConfig& cfg, double abs_tol = 1e-13) {
    cfg.validate();
    if (!(I > 0.0)) throw DomainError("irradiance_pdf_by_quadrature: I must be positive");
    auto inner = [&](double u) {
        const double x = std::pow(cfg.omega1 * u, 1.0 / cfg.beta1);
        if (x <= 0.0 || !std::isfinite(x)) return 0.0;
        return weibull_pdf(I / x, cfg.beta2, cfg.omega2) / x;
    };
    quad::Options opts;
    opts.abs_tol = abs_tol;
    opts.rel_tol = 1e-11;
    opts.initial_intervals = 8;
    const auto r = quad::expect_exponential_adaptive(inner, opts);
    if (!r.converged) throw QuadratureNonConvergent("irradiance_pdf_by_quadrature did not converge", r.error);
    return r.value;
}

/// F_I(I) = E_X[F_Y(I/X)].
inline double irradiance_cdf_by_quadrature(double I, const OpticalHopConfig& cfg, double abs_tol = 1e-13) {
    cfg.validate();
    if (!(I > 0.0)) throw DomainError("irradiance_cdf_by_quadrature: I must be positive");
    auto inner = [&](double u) {
        const double x = std::pow(cfg.omega1 * u, 1.0 / cfg.beta1);
        if (x <= 0.0) return 1.0;
        if (!std::isfinite(x)) return 0.0;
        return weibull_cdf(I / x, cfg.beta2, cfg.omega2);
    };
    quad::Options opts;
    opts.abs_tol = abs_tol;
    opts.rel_tol = 1e-11;
    opts.initial_intervals = 8;
    const auto r = quad::expect_exponential_adaptive(inner, opts);
    if (!r.converged) throw QuadratureNonConvergent("irradiance_cdf_by_quadrature did not converge", r.error);
    return r.value;
}

/// Density of gamma_2 from the product-distribution oracle.
inline double gamma2_pdf_by_quadrature(double g, const OpticalHopConfig& cfg) {
    if (!(g > 0.0)) throw DomainError("gamma2_pdf_by_quadrature: g must be positive");
    const int r = cfg.r();
    const double I = std::pow(g / cfg.avg_snr, 1.0 / r);
    return irradiance_pdf_by_quadrature(I, cfg) * I / (r * g);
}

inline double gamma2_cdf_by_quadrature(double g, const OpticalHopConfig& cfg) {
    if (!(g > 0.0)) throw DomainError("gamma2_cdf_by_quadrature: g must be positive");
    return irradiance_cdf_by_quadrature(std::pow(g / cfg.avg_snr, 1.0 / cfg.r()), cfg);
}

// ---------------------------------------------------------------------------
// Sampling
// ---------------------------------------------------------------------------

/// Inverse-transform Weibull draw X = (-Omega ln U)^{1/beta}.
template <class Rng>
double weibull_sample(double beta, double omega, Rng& rng) {
    return std::pow(-omega * std::log(rng.uniform()), 1.0 / beta);
}

template <class Rng>
double irradiance_sample(const OpticalHopConfig& cfg, Rng& rng) {
    const double x = weibull_sample(cfg.beta1, cfg.omega1, rng);
    const double y = weibull_sample(cfg.beta2, cfg.omega2, rng);
    return x * y;
}

inline double gamma2_from_irradiance(double I, const OpticalHopConfig& cfg) {
    return cfg.r() == 1 ? cfg.avg_snr * I : cfg.avg_snr * I * I;
}

} // namespace rfso

#endif // RFSO_FSO_HOP_HPP
