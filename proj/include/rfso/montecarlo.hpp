#ifndef RFSO_MONTECARLO_HPP
#define RFSO_MONTECARLO_HPP

// Trial-level simulation of the relay chain and estimation of outage
// probability and ergodic capacity with 95% confidence half-widths.
//
// Trials are split into fixed-size chunks. Chunk c of sweep point p draws from
// the Philox stream (seed, stream_id(p, c)), and chunk tallies are merged by a
// fixed pairwise tree, so results are bit-identical for any worker count.

#include "rfso/errors.hpp"
#include "rfso/link.hpp"
#include "rfso/random.hpp"
#include "rfso/specfun.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <thread>
#include <vector>

namespace rfso {

struct McEstimate {
    double value = 0.0;
    double half_width = 0.0; ///< 95% confidence half-width
    std::int64_t trials = 0;
    std::uint64_t seed = 0;
    /// False for OP estimates backed by fewer than 10 outage events.
    bool reliable = true;
};

struct McOptions {
    std::int64_t trials = 1'000'000;
    std::uint64_t seed = 1;
    std::uint64_t point_index = 0; ///< selects the substream family
    unsigned workers = 0;          ///< 0 = hardware concurrency
};

inline constexpr std::int64_t mc_min_trials = 10'000;
inline constexpr std::int64_t mc_chunk_size = 65'536;
inline constexpr double z95 = 1.959963984540054;

struct TrialSample {
    double gamma1;
    double irradiance;
    double gamma2;
    double sndr;
};

template <class Rng>
TrialSample draw_trial(const LinkConfig& cfg, double C, Rng& rng) {
    const double g1 = rf_sample(cfg.rf, rng);
    const double I = irradiance_sample(cfg.optical, rng);
    const double g2 = gamma2_from_irradiance(I, cfg.optical);
    return {g1, I, g2, sndr(g1, g2, cfg.impairments, C)};
}

/// One realised end-to-end SNDR.
template <class Rng>
double run_trial(const LinkConfig& cfg, double C, Rng& rng) {
    return draw_trial(cfg, C, rng).sndr;
}

namespace detail {

inline double binomial_cdf(std::int64_t k, std::int64_t n, double p) {
    if (k < 0) return 0.0;
    if (k >= n || p <= 0.0) return 1.0;
    if (p >= 1.0) return 0.0;
    const double lp = std::log(p), lq = std::log1p(-p);
    const double ln_n1 = specfun::ln_gamma(double(n) + 1.0);
    double sum = 0.0;
    for (std::int64_t i = 0; i <= k; ++i) {
        const double lt = ln_n1 - specfun::ln_gamma(double(i) + 1.0) - specfun::ln_gamma(double(n - i) + 1.0) +
                          double(i) * lp + double(n - i) * lq;
        sum += std::exp(lt);
    }
    return std::min(sum, 1.0);
}

// p such that f(p) = target, for f nonincreasing on [0, 1].
template <class F>
double bisect_decreasing(F f, double target) {
    double lo = 0.0, hi = 1.0;
    for (int it = 0; it < 200 && hi - lo > 1e-16; ++it) {
        const double mid = 0.5 * (lo + hi);
        (f(mid) > target ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

} // namespace detail

/// Exact two-sided 95% Clopper-Pearson interval for k successes in n trials.
inline std::pair<double, double> clopper_pearson(std::int64_t k, std::int64_t n) {
    if (n <= 0 || k < 0 || k > n) throw DomainError("clopper_pearson: need 0 <= k <= n, n > 0");
    // The small tail is summed directly; mirror when k is near n.
    if (n - k < k) {
        const auto [lo, hi] = clopper_pearson(n - k, n);
        return {1.0 - hi, 1.0 - lo};
    }
    const double alpha = 0.025;
    const double lower =
        k == 0 ? 0.0 : detail::bisect_decreasing([&](double p) { return detail::binomial_cdf(k - 1, n, p); }, 1.0 - alpha);
    const double upper =
        k == n ? 1.0 : detail::bisect_decreasing([&](double p) { return detail::binomial_cdf(k, n, p); }, alpha);
    return {lower, upper};
}

/// Proportion estimate; normal approximation unless successes or failures < 30.
inline McEstimate proportion_estimate(std::int64_t events, std::int64_t trials, std::uint64_t seed) {
    McEstimate est;
    est.trials = trials;
    est.seed = seed;
    est.value = double(events) / double(trials);
    est.reliable = events >= 10;
    if (events < 30 || trials - events < 30) {
        const auto [lo, hi] = clopper_pearson(events, trials);
        est.half_width = std::max(est.value - lo, hi - est.value);
    } else {
        est.half_width = z95 * std::sqrt(est.value * (1.0 - est.value) / double(trials));
    }
    return est;
}

namespace detail {

struct Tally {
    std::vector<std::int64_t> histogram; ///< bucket i: SNDR in [t_{i-1}, t_i)
    std::int64_t n = 0;
    double mean = 0.0; ///< running mean of log2(1 + c SNDR)
    double m2 = 0.0;
};

inline Tally merge(Tally a, const Tally& b) {
    for (std::size_t i = 0; i < a.histogram.size(); ++i) a.histogram[i] += b.histogram[i];
    const std::int64_t n = a.n + b.n;
    if (n == 0) return a;
    const double d = b.mean - a.mean;
    a.mean += d * double(b.n) / double(n);
    a.m2 += b.m2 + d * d * double(a.n) * double(b.n) / double(n);
    a.n = n;
    return a;
}

inline Tally reduce_pairwise(std::vector<Tally>& parts, std::size_t begin, std::size_t end) {
    if (end - begin == 1) return parts[begin];
    const std::size_t mid = begin + (end - begin) / 2;
    return merge(reduce_pairwise(parts, begin, mid), reduce_pairwise(parts, mid, end));
}

} // namespace detail

struct McRun {
    std::vector<McEstimate> op; ///< one per requested threshold, in request order
    McEstimate ec;
};

/// One simulation pass producing OP at every threshold and the ergodic capacity.
inline McRun simulate(const LinkConfig& cfg, std::span<const double> thresholds, const McOptions& opts) {
    cfg.validate();
    if (opts.trials < mc_min_trials) throw DomainError("simulate: at least 10^4 trials are required");
    for (double t : thresholds)
        if (!(t >= 0.0)) throw DomainError("simulate: thresholds must be non-negative");

    std::vector<double> sorted(thresholds.begin(), thresholds.end());
    std::sort(sorted.begin(), sorted.end());
    const double C = gain_constant(cfg);
    const double c = cfg.detection_constant();

    const std::int64_t chunks = (opts.trials + mc_chunk_size - 1) / mc_chunk_size;
    std::vector<detail::Tally> parts(static_cast<std::size_t>(chunks));

    auto run_chunk = [&](std::int64_t chunk) {
        Philox4x32 rng(opts.seed, stream_id(opts.point_index, std::uint64_t(chunk)));
        const std::int64_t count = std::min(mc_chunk_size, opts.trials - chunk * mc_chunk_size);
        detail::Tally t;
        t.histogram.assign(sorted.size() + 1, 0);
        for (std::int64_t i = 0; i < count; ++i) {
            const double s = run_trial(cfg, C, rng);
            const auto bucket = std::upper_bound(sorted.begin(), sorted.end(), s) - sorted.begin();
            ++t.histogram[static_cast<std::size_t>(bucket)];
            const double cap = std::log2(1.0 + c * s);
            ++t.n;
            const double d = cap - t.mean;
            t.mean += d / double(t.n);
            t.m2 += d * (cap - t.mean);
        }
        parts[static_cast<std::size_t>(chunk)] = std::move(t);
    };

    unsigned workers = opts.workers ? opts.workers : std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::int64_t>(workers, chunks));
    if (workers <= 1) {
        for (std::int64_t ch = 0; ch < chunks; ++ch) run_chunk(ch);
    } else {
        std::atomic<std::int64_t> next{0};
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                for (std::int64_t ch; (ch = next.fetch_add(1)) < chunks;) run_chunk(ch);
            });
        for (auto& th : pool) th.join();
    }

    const auto total = detail::reduce_pairwise(parts, 0, parts.size());

    McRun out;
    out.op.reserve(thresholds.size());
    for (double t : thresholds) {
        // SNDR < t covers every bucket up to and including t's own.
        const auto idx = std::lower_bound(sorted.begin(), sorted.end(), t) - sorted.begin();
        const std::int64_t events =
            std::accumulate(total.histogram.begin(), total.histogram.begin() + idx + 1, std::int64_t{0});
        out.op.push_back(proportion_estimate(events, total.n, opts.seed));
    }
    out.ec.value = total.mean;
    out.ec.trials = total.n;
    out.ec.seed = opts.seed;
    out.ec.half_width = total.n > 1 ? z95 * std::sqrt(total.m2 / double(total.n - 1) / double(total.n)) : 0.0;
    return out;
}

inline McEstimate estimate_op(double gamma_th, const LinkConfig& cfg, std::int64_t trials, std::uint64_t seed) {
    McOptions opts;
    opts.trials = trials;
    opts.seed = seed;
    const double th[] = {gamma_th};
    return simulate(cfg, th, opts).op.front();
}

inline std::vector<McEstimate> estimate_op_curve(std::span<const double> thresholds, const LinkConfig& cfg,
                                                 const McOptions& opts) {
    return simulate(cfg, thresholds, opts).op;
}

inline McEstimate estimate_ec(const LinkConfig& cfg, std::int64_t trials, std::uint64_t seed) {
    McOptions opts;
    opts.trials = trials;
    opts.seed = seed;
    return simulate(cfg, {}, opts).ec;
}

} // namespace rfso

#endif // RFSO_MONTECARLO_HPP
