#pragma once

// Counter-based random streams (Philox4x32-10, Salmon et al. SC 2011).
//
// Monte Carlo runs derive one stream per sample index from a single master
// seed. Streams for distinct indices are statistically independent, and a
// given (seed, index) pair produces the identical draw sequence on every
// platform and for every worker count, so parallel sweeps are reproducible
// bit for bit.

#include <cstdint>

namespace skewshadow {

namespace detail {

inline constexpr std::uint32_t kPhiloxW32A = 0x9E3779B9u;
inline constexpr std::uint32_t kPhiloxW32B = 0xBB67AE85u;
inline constexpr std::uint32_t kPhiloxM4x32A = 0xD2511F53u;
inline constexpr std::uint32_t kPhiloxM4x32B = 0xCD9E8D57u;

inline void philox_round(std::uint32_t counter[4], const std::uint32_t key[2]) {
    const std::uint64_t p0 = static_cast<std::uint64_t>(kPhiloxM4x32A) * counter[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kPhiloxM4x32B) * counter[2];
    const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
    const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
    const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
    counter[0] = hi1 ^ counter[1] ^ key[0];
    counter[1] = lo1;
    counter[2] = hi0 ^ counter[3] ^ key[1];
    counter[3] = lo0;
}

inline void philox_block(const std::uint32_t counter[4], const std::uint32_t key[2],
                         std::uint32_t out[4]) {
    std::uint32_t k[2] = {key[0], key[1]};
    out[0] = counter[0];
    out[1] = counter[1];
    out[2] = counter[2];
    out[3] = counter[3];
    for (int round = 0; round < 10; ++round) {
        philox_round(out, k);
        if (round < 9) {
            k[0] += kPhiloxW32A;
            k[1] += kPhiloxW32B;
        }
    }
}

} // namespace detail

/// One independent random stream. Counter layout: words 0-1 hold the running
/// block counter, words 2-3 hold the stream (sample) index; the key holds the
/// master seed.
class RandomStream {
public:
    RandomStream(std::uint64_t master_seed, std::uint64_t stream_index)
        : key_{static_cast<std::uint32_t>(master_seed),
               static_cast<std::uint32_t>(master_seed >> 32)},
          stream_lo_(static_cast<std::uint32_t>(stream_index)),
          stream_hi_(static_cast<std::uint32_t>(stream_index >> 32)) {}

    std::uint64_t next_u64() {
        if (buffer_pos_ >= 2) {
            refill();
        }
        return buffer_[buffer_pos_++];
    }

    /// Uniform draw from [0, 1) with 53 random bits.
    double uniform01() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Uniform draw from [-1, 1).
    double uniform_sym() {
        return 2.0 * uniform01() - 1.0;
    }

    /// Fair coin.
    bool bit() {
        return (next_u64() & 1u) != 0;
    }

private:
    void refill() {
        const std::uint32_t counter[4] = {
            static_cast<std::uint32_t>(block_),
            static_cast<std::uint32_t>(block_ >> 32),
            stream_lo_, stream_hi_};
        std::uint32_t out[4];
        detail::philox_block(counter, key_, out);
        buffer_[0] = static_cast<std::uint64_t>(out[0]) | (static_cast<std::uint64_t>(out[1]) << 32);
        buffer_[1] = static_cast<std::uint64_t>(out[2]) | (static_cast<std::uint64_t>(out[3]) << 32);
        buffer_pos_ = 0;
        ++block_;
    }

    std::uint32_t key_[2];
    std::uint32_t stream_lo_;
    std::uint32_t stream_hi_;
    std::uint64_t block_ = 0;
    std::uint64_t buffer_[2] = {0, 0};
    int buffer_pos_ = 2;
};

/// Stream for sample `sample_index` under `master_seed`.
inline RandomStream derive_stream(std::uint64_t master_seed, std::uint64_t sample_index) {
    return RandomStream(master_seed, sample_index);
}

/// SplitMix64 finalizer; used to hash heterogeneous values into derived seeds.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

} // namespace skewshadow
