// Counter-based random numbers for reproducible, order-independent sampling.
//
// The generator is Philox4x32-10 (Salmon, Moraes, Dror, Shaw; SC'11). A stream
// is identified by a 64-bit seed (the Philox key, after SplitMix64 mixing) and a
// 64-bit stream id (the upper half of the 128-bit counter). Block b of stream s
// is Philox(counter = {b_lo, b_hi, s_lo, s_hi}, key). Nothing is shared between
// streams, so trials can run in any order on any number of threads.
//
// Normal variates use the basic Box-Muller transform: each Philox block yields
// two 53-bit uniforms u1 in (0,1], u2 in [0,1) and therefore exactly two
// normals. No rejection step, so the i-th normal of a stream is a pure function
// of (seed, stream, i).
#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>

namespace nodal::rng {

inline constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Seed of the per-trial substream: hash(master seed, trial index).
inline constexpr std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t index) noexcept {
    return splitmix64(seed ^ splitmix64(index ^ 0x6A09E667F3BCC909ULL));
}

using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

inline constexpr PhiloxCounter philox4x32_10(PhiloxCounter ctr, PhiloxKey key) noexcept {
    constexpr std::uint32_t kMul0 = 0xD2511F53u;
    constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
    constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
    constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;
    for (int round = 0; round < 10; ++round) {
        if (round > 0) {
            key[0] += kWeyl0;
            key[1] += kWeyl1;
        }
        const std::uint64_t p0 = std::uint64_t{kMul0} * ctr[0];
        const std::uint64_t p1 = std::uint64_t{kMul1} * ctr[2];
        const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
        const auto lo0 = static_cast<std::uint32_t>(p0);
        const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
        const auto lo1 = static_cast<std::uint32_t>(p1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    }
    return ctr;
}

class CounterStream {
public:
    explicit CounterStream(std::uint64_t seed, std::uint64_t stream = 0) noexcept
        : seed_(seed), stream_(stream) {
        const std::uint64_t k = splitmix64(seed);
        key_ = {static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(k >> 32)};
    }

    std::uint64_t seed() const noexcept { return seed_; }
    std::uint64_t stream() const noexcept { return stream_; }

    PhiloxCounter block(std::uint64_t index) const noexcept {
        return philox4x32_10({static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32),
                              static_cast<std::uint32_t>(stream_), static_cast<std::uint32_t>(stream_ >> 32)},
                             key_);
    }

    /// Uniform in [0, 1) with 53 random bits.
    double uniform() noexcept {
        if (word_ >= 4) refill();
        const std::uint64_t hi = words_[word_++];
        if (word_ >= 4) refill();
        const std::uint64_t lo = words_[word_++];
        return static_cast<double>(((hi << 32) | lo) >> 11) * 0x1.0p-53;
    }

    double normal() noexcept {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const PhiloxCounter w = block(next_block_++);
        const std::uint64_t a = (std::uint64_t{w[0]} << 32 | w[1]) >> 11;
        const std::uint64_t b = (std::uint64_t{w[2]} << 32 | w[3]) >> 11;
        const double u1 = static_cast<double>(a + 1) * 0x1.0p-53;  // (0, 1]
        const double u2 = static_cast<double>(b) * 0x1.0p-53;      // [0, 1)
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * std::numbers::pi * u2;
        spare_ = radius * std::sin(angle);
        has_spare_ = true;
        return radius * std::cos(angle);
    }

    void fill_normal(std::span<double> out) noexcept {
        for (double& v : out) v = normal();
    }

    /// Standard exponential variate, -log(u) with u in (0, 1].
    double exponential() noexcept { return -std::log(1.0 - uniform()); }

private:
    void refill() noexcept {
        words_ = block(next_block_++);
        word_ = 0;
    }

    std::uint64_t seed_;
    std::uint64_t stream_;
    PhiloxKey key_{};
    std::uint64_t next_block_ = 0;
    PhiloxCounter words_{};
    int word_ = 4;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace nodal::rng
