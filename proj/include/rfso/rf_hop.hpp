#ifndef RFSO_RF_HOP_HPP
#define RFSO_RF_HOP_HPP

// First (RF) hop: Rayleigh fading with partial relay selection on outdated CSI.
// The selected relay has rank m in the increasing order of the outdated SNRs,
// and its current channel is h = sqrt(rho) h_outdated + sqrt(1 - rho) w.

#include "rfso/errors.hpp"
#include "rfso/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>
#include <vector>

namespace rfso {

struct RfHopConfig {
    int relays = 1;         ///< N
    int rank = 1;           ///< m, 1 = worst outdated SNR, N = best
    double rho = 1.0;       ///< time correlation between outdated and current CSI
    double avg_snr = 1.0;   ///< average first-hop SNR, linear

    void validate() const {
        std::ostringstream msg;
        if (relays < 1) msg << "rf.relays: must be >= 1 (got " << relays << "); ";
        if (rank < 1 || rank > relays) msg << "rf.rank: must be in [1, relays] (got " << rank << "); ";
        if (!(rho >= 0.0 && rho <= 1.0)) msg << "rf.rho: must be in [0, 1] (got " << rho << "); ";
        if (!(avg_snr > 0.0) || !std::isfinite(avg_snr)) msg << "rf.avg_snr: must be positive (got " << avg_snr << "); ";
        const auto text = msg.str();
        if (!text.empty()) throw ConfigInvalid(text);
    }
};

/// Jakes autocorrelation J0(2 pi f_d T_d). Tiny negative values produced by
/// evaluating right at the first root are clamped to zero; anything below
/// -1e-6 is rejected.
inline double jakes_rho(double doppler_hz, double delay_s) {
    if (!(doppler_hz >= 0.0) || !(delay_s >= 0.0)) throw DomainError("jakes_rho: doppler and delay must be non-negative");
    const double rho = specfun::bessel_j0(2.0 * std::numbers::pi * doppler_hz * delay_s);
    if (rho < -1e-6) {
        std::ostringstream msg;
        msg << "jakes_rho: correlation " << rho << " is negative (f_d*T_d = " << doppler_hz * delay_s
            << " lies beyond the first J0 root)";
        throw NegativeCorrelation(msg.str());
    }
    return std::clamp(rho, 0.0, 1.0);
}

namespace detail {

inline double binomial(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return std::round(r);
}

/// One term of the correlated-exponential mixture: weight * rate * exp(-rate x).
struct ExpTerm {
    double weight;
    double rate;
};

// Rank-m selection under outdated CSI gives a signed mixture of exponentials:
//   weight_n = m C(N,m) C(m-1,n) (-1)^n / (N-m+n+1)
//   rate_n   = (N-m+n+1) / ([(N-m+n)(1-rho)+1] avg_snr)
inline std::vector<ExpTerm> rf_mixture(const RfHopConfig& cfg) {
    const int N = cfg.relays, m = cfg.rank;
    const double lead = m * binomial(N, m);
    std::vector<ExpTerm> terms;
    terms.reserve(m);
    for (int n = 0; n < m; ++n) {
        const double order = N - m + n + 1.0;
        const double spread = (N - m + n) * (1.0 - cfg.rho) + 1.0;
        const double sign = (n % 2 == 0) ? 1.0 : -1.0;
        terms.push_back({lead * binomial(m - 1, n) * sign / order, order / (spread * cfg.avg_snr)});
    }
    return terms;
}

} // namespace detail

/// Density of the selected relay's current SNR.
inline double rf_pdf(double x, const RfHopConfig& cfg) {
    cfg.validate();
    if (x < 0.0) throw DomainError("rf_pdf: x must be non-negative");
    const int N = cfg.relays, m = cfg.rank;
    double sum = 0.0;
    for (int n = 0; n < m; ++n) {
        const double spread = (N - m + n) * (1.0 - cfg.rho) + 1.0;
        const double sign = (n % 2 == 0) ? 1.0 : -1.0;
        sum += detail::binomial(m - 1, n) * sign / (spread * cfg.avg_snr) *
               std::exp(-(N - m + n + 1.0) * x / (spread * cfg.avg_snr));
    }
    return m * detail::binomial(N, m) * sum;
}

/// CDF of the selected relay's current SNR. Written as sum w_n (1 - e^{-rate_n x})
/// so small-x values keep their relative precision.
inline double rf_cdf(double x, const RfHopConfig& cfg) {
    cfg.validate();
    if (x < 0.0) throw DomainError("rf_cdf: x must be non-negative");
    if (std::isinf(x)) return 1.0;
    double sum = 0.0;
    for (const auto& t : detail::rf_mixture(cfg)) sum -= t.weight * std::expm1(-t.rate * x);
    return std::clamp(sum, 0.0, 1.0);
}

/// E[gamma_1(m)].
inline double rf_mean(const RfHopConfig& cfg) {
    cfg.validate();
    const int N = cfg.relays, m = cfg.rank;
    double sum = 0.0;
    for (int n = 0; n < m; ++n) {
        const double order = N - m + n + 1.0;
        const double spread = (N - m + n) * (1.0 - cfg.rho) + 1.0;
        const double sign = (n % 2 == 0) ? 1.0 : -1.0;
        sum += detail::binomial(m - 1, n) * sign * spread * cfg.avg_snr / (order * order);
    }
    return m * detail::binomial(N, m) * sum;
}

/// Draws the selected relay's current SNR. Gains are unit-variance circular
/// complex Gaussians; the relay of rank m among the outdated |h|^2 is evolved
/// to the transmission instant.
template <class Rng>
double rf_sample(const RfHopConfig& cfg, Rng& rng) {
    thread_local std::vector<std::complex<double>> gains;
    thread_local std::vector<int> order;
    const double scale = std::sqrt(0.5);
    gains.resize(cfg.relays);
    order.resize(cfg.relays);
    for (int i = 0; i < cfg.relays; ++i) {
        const auto [re, im] = rng.normal_pair();
        gains[i] = {scale * re, scale * im};
        order[i] = i;
    }
    std::nth_element(order.begin(), order.begin() + (cfg.rank - 1), order.end(),
                     [&](int a, int b) { return std::norm(gains[a]) < std::norm(gains[b]); });
    const auto outdated = gains[order[cfg.rank - 1]];
    const auto [wr, wi] = rng.normal_pair();
    const std::complex<double> w{scale * wr, scale * wi};
    const auto current = std::sqrt(cfg.rho) * outdated + std::sqrt(1.0 - cfg.rho) * w;
    return std::norm(current) * cfg.avg_snr;
}

} // namespace rfso

#endif // RFSO_RF_HOP_HPP
