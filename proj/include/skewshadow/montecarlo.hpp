#pragma once

// Monte Carlo estimators for the shadowing probabilities s(N, L) and
// p(d, N, eps), and phase-transition sweeps over (N, c) grids.
//
// Determinism contract: every estimate is a pure function of its inputs
// including the seed. Per-sample streams come from the counter construction,
// per-cell seeds from a hash of (master seed, n, c, cell index), and counts
// aggregate as sums, so neither worker count nor scheduling can change any
// result.

#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <thread>
#include <vector>

#include "skewshadow/model.hpp"
#include "skewshadow/rng.hpp"
#include "skewshadow/shadow.hpp"
#include "skewshadow/walk.hpp"

namespace skewshadow {

struct Estimate {
    std::uint64_t successes = 0;
    std::uint64_t samples = 0;
    double p_hat = 0.0;
    double ci_low = 0.0;  ///< 95% Wilson interval
    double ci_high = 0.0;
    std::uint64_t master_seed = 0;
};

/// 95% Wilson score interval for a binomial proportion. Well behaved at
/// p_hat near 0 and 1, which is exactly the phase-transition regime.
inline std::pair<double, double> wilson_interval(std::uint64_t successes,
                                                 std::uint64_t samples) {
    if (samples == 0) {
        return {0.0, 1.0};
    }
    const double z = 1.959963984540054;
    const double n = static_cast<double>(samples);
    const double p = static_cast<double>(successes) / n;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double center = (p + z2 / (2.0 * n)) / denom;
    const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
    return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

inline Estimate make_estimate(std::uint64_t successes, std::uint64_t samples,
                              std::uint64_t seed) {
    Estimate e;
    e.successes = successes;
    e.samples = samples;
    e.p_hat = (samples == 0) ? 0.0 : static_cast<double>(successes) / static_cast<double>(samples);
    const auto ci = wilson_interval(successes, samples);
    e.ci_low = ci.first;
    e.ci_high = ci.second;
    e.master_seed = seed;
    return e;
}

namespace detail {

inline unsigned resolve_threads(unsigned threads) {
    if (threads != 0) {
        return threads;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw ? hw : 1;
}

/// Runs body(sample_index) over [0, samples) on `threads` workers and sums
/// the boolean results. Partition is static; per-sample work depends only on
/// the index, so the count is independent of the partition.
template <typename Body>
std::uint64_t count_successes(std::uint64_t samples, unsigned threads, Body body) {
    threads = resolve_threads(threads);
    if (threads <= 1 || samples < 2 * threads) {
        std::uint64_t count = 0;
        for (std::uint64_t i = 0; i < samples; ++i) {
            count += body(i) ? 1 : 0;
        }
        return count;
    }
    std::vector<std::uint64_t> partial(threads, 0);
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) {
        pool.emplace_back([&, t]() {
            const std::uint64_t begin = samples * t / threads;
            const std::uint64_t end = samples * (t + 1) / threads;
            std::uint64_t local = 0;
            for (std::uint64_t i = begin; i < end; ++i) {
                local += body(i) ? 1 : 0;
            }
            partial[t] = local;
        });
    }
    for (auto& th : pool) {
        th.join();
    }
    std::uint64_t count = 0;
    for (std::uint64_t c : partial) {
        count += c;
    }
    return count;
}

} // namespace detail

/// Relative guard band around the threshold within which the fast statistic
/// is recomputed exactly before the strict comparison K < l is made.
inline constexpr double kThresholdGuard = 1e-8;

/// s(N, L) = P(K < L), strict inequality.
inline Estimate estimate_s(const NormalizedParams& params, std::size_t n, double l,
                           std::uint64_t samples, std::uint64_t seed,
                           unsigned threads = 1) {
    if (n < 1 || samples < 1) {
        throw std::invalid_argument("estimate_s: need n >= 1 and samples >= 1");
    }
    if (!(l >= 0.0)) {
        throw std::invalid_argument("estimate_s: threshold must be >= 0");
    }
    const std::uint64_t successes =
        detail::count_successes(samples, threads, [&](std::uint64_t i) {
            RandomStream stream = derive_stream(seed, i);
            const WalkPath walk = sample_walk(params, n, stream);
            const PseudoOrbit pseudo = sample_noise(walk, 1.0, stream);
            double k = k_fast(walk, pseudo).k_statistic;
            if (std::fabs(k - l) <= kThresholdGuard * std::max(k, l)) {
                k = k_naive(walk, pseudo).k_statistic;
            }
            return k < l;
        });
    return make_estimate(successes, samples, seed);
}

/// p(d, N, eps): probability that a d-pseudotrajectory of length N is
/// eps-shadowable. Delegates to estimate_s with L = eps / d.
inline Estimate estimate_p(const NormalizedParams& params, double d, std::size_t n,
                           double eps, std::uint64_t samples, std::uint64_t seed,
                           unsigned threads = 1) {
    if (!(d >= 0.0)) {
        throw std::invalid_argument("estimate_p: need d >= 0");
    }
    if (d == 0.0) {
        // Exact orbits are 0-shadowed by themselves.
        return make_estimate(samples, samples, seed);
    }
    return estimate_s(params, n, eps / d, samples, seed, threads);
}

struct SweepCell {
    std::size_t n = 0;
    double c = 0.0;
    double l = 0.0; ///< threshold N^c = exp(c ln N)
    Estimate estimate;
};

inline std::uint64_t cell_seed(std::uint64_t master_seed, std::size_t n, double c,
                               std::size_t cell_index) {
    std::uint64_t h = mix64(master_seed ^ 0x736B657773686164ull);
    h = mix64(h ^ static_cast<std::uint64_t>(n));
    h = mix64(h ^ std::bit_cast<std::uint64_t>(c));
    h = mix64(h ^ static_cast<std::uint64_t>(cell_index));
    return h;
}

/// Grid of estimates of s(N, N^c) = p(eps/N^c, N, eps), rows in n-major,
/// c-minor order. Adding cells to a sweep never perturbs existing cells.
inline std::vector<SweepCell> phase_sweep(const NormalizedParams& params, double eps,
                                          const std::vector<double>& c_list,
                                          const std::vector<std::size_t>& n_list,
                                          std::uint64_t samples, std::uint64_t seed,
                                          unsigned threads = 1) {
    (void)eps; // s(N, N^c) does not depend on eps (exact scale invariance)
    if (c_list.empty() || n_list.empty()) {
        throw std::invalid_argument("phase_sweep: empty grid");
    }
    for (double c : c_list) {
        if (!(c > 0.0)) {
            throw std::invalid_argument("phase_sweep: exponents must be positive");
        }
    }
    std::vector<SweepCell> cells;
    cells.reserve(c_list.size() * n_list.size());
    std::size_t index = 0;
    for (std::size_t n : n_list) {
        for (double c : c_list) {
            SweepCell cell;
            cell.n = n;
            cell.c = c;
            cell.l = std::exp(c * std::log(static_cast<double>(n)));
            cell.estimate = estimate_s(params, n, cell.l, samples,
                                       cell_seed(seed, n, c, index), threads);
            cells.push_back(cell);
            ++index;
        }
    }
    return cells;
}

} // namespace skewshadow
