#ifndef RFSO_RANDOM_HPP
#define RFSO_RANDOM_HPP

// Counter-based Philox4x32-10 generator. A stream is fully determined by
// (seed, stream id); stream ids are derived from (point index, chunk index) so
// Monte Carlo results never depend on thread scheduling.

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <utility>

namespace rfso {

inline constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

class Philox4x32 {
public:
    using result_type = std::uint64_t;

    Philox4x32(std::uint64_t seed, std::uint64_t stream) {
        const std::uint64_t key = splitmix64(seed);
        key_ = {static_cast<std::uint32_t>(key), static_cast<std::uint32_t>(key >> 32)};
        stream_ = stream;
    }

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()() {
        if (cursor_ == 2) {
            refill();
            cursor_ = 0;
        }
        return buffer_[cursor_++];
    }

    /// Uniform on the open interval (0, 1).
    double uniform() { return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53; }

    /// Standard normal pair by Box-Muller.
    std::pair<double, double> normal_pair() {
        const double r = std::sqrt(-2.0 * std::log(uniform()));
        const double theta = 2.0 * std::numbers::pi * uniform();
        return {r * std::cos(theta), r * std::sin(theta)};
    }

    /// Unit-mean exponential.
    double exponential() { return -std::log(uniform()); }

private:
    static void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
        const std::uint64_t prod = static_cast<std::uint64_t>(a) * b;
        hi = static_cast<std::uint32_t>(prod >> 32);
        lo = static_cast<std::uint32_t>(prod);
    }

    void refill() {
        std::array<std::uint32_t, 4> ctr = {static_cast<std::uint32_t>(block_), static_cast<std::uint32_t>(block_ >> 32),
                                            static_cast<std::uint32_t>(stream_),
                                            static_cast<std::uint32_t>(stream_ >> 32)};
        auto key = key_;
        for (int round = 0; round < 10; ++round) {
            std::uint32_t hi0, lo0, hi1, lo1;
            mulhilo(0xD2511F53u, ctr[0], hi0, lo0);
            mulhilo(0xCD9E8D57u, ctr[2], hi1, lo1);
            ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
            key[0] += 0x9E3779B9u;
            key[1] += 0xBB67AE85u;
        }
        buffer_[0] = (static_cast<std::uint64_t>(ctr[1]) << 32) | ctr[0];
        buffer_[1] = (static_cast<std::uint64_t>(ctr[3]) << 32) | ctr[2];
        ++block_;
    }

    std::array<std::uint32_t, 2> key_{};
    std::uint64_t stream_ = 0;
    std::uint64_t block_ = 0;
    std::array<std::uint64_t, 2> buffer_{};
    int cursor_ = 2;
};

/// Stream id for one chunk of one sweep point.
inline constexpr std::uint64_t stream_id(std::uint64_t point_index, std::uint64_t chunk_index) {
    return (point_index << 32) ^ chunk_index;
}

} // namespace rfso

#endif // RFSO_RANDOM_HPP
