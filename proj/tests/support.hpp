#pragma once

// Shared test helpers: deterministic walk construction and independent
// extended-precision reference computations. Everything here is derived from
// first principles (direct recursions in long double), not from the library
// code under test.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "skewshadow/model.hpp"
#include "skewshadow/walk.hpp"

namespace testsupport {

inline skewshadow::WalkPath walk_bits(const skewshadow::ModelParams& params,
                                      const std::vector<int>& bits) {
    std::vector<std::uint8_t> symbols(bits.begin(), bits.end());
    return skewshadow::walk_from_symbols(params, symbols);
}

/// z_k = sum_{i<=k} r_i e^{-S_i} summed directly in long double.
inline std::vector<long double> z_reference(const skewshadow::WalkPath& walk,
                                            const std::vector<double>& noise) {
    std::vector<long double> z(noise.size() + 1, 0.0L);
    long double s = 0.0L;
    for (std::size_t k = 1; k <= noise.size(); ++k) {
        s += static_cast<long double>(walk.gamma[k - 1]);
        z[k] = z[k - 1] + static_cast<long double>(noise[k - 1]) * std::exp(-s);
    }
    return z;
}

/// max over pairs of the statistic B, straight from its definition in long
/// double. Quadratic and range-limited; for small/mild instances only.
inline long double k_reference(const skewshadow::WalkPath& walk,
                               const std::vector<double>& noise) {
    const auto z = z_reference(walk, noise);
    const std::size_t n_steps = noise.size();
    std::vector<long double> s(n_steps + 1, 0.0L);
    for (std::size_t k = 1; k <= n_steps; ++k) {
        s[k] = s[k - 1] + static_cast<long double>(walk.gamma[k - 1]);
    }
    long double best = 0.0L;
    for (std::size_t k = 0; k < n_steps; ++k) {
        for (std::size_t n = k + 1; n <= n_steps; ++n) {
            const long double pref =
                std::exp(s[k] + s[n]) / (std::exp(s[k]) + std::exp(s[n]));
            const long double b = pref * std::fabs(z[n] - z[k]);
            if (b > best) {
                best = b;
            }
        }
    }
    return best;
}

/// min over y0 of max_k |y_k - x_k| for an arbitrary target sequence x, with
/// y the exact orbit y_{k+1} = e^{gamma_k} y_k. Golden-section on the hull of
/// the pullbacks x_k e^{-S_k}; long double throughout.
inline long double minmax_radius_reference(const std::vector<double>& gamma,
                                           const std::vector<long double>& x) {
    const std::size_t n_steps = gamma.size();
    std::vector<long double> s(n_steps + 1, 0.0L);
    for (std::size_t k = 1; k <= n_steps; ++k) {
        s[k] = s[k - 1] + static_cast<long double>(gamma[k - 1]);
    }
    const auto objective = [&](long double y0) {
        long double worst = 0.0L;
        for (std::size_t k = 0; k <= n_steps; ++k) {
            worst = std::max(worst, std::fabs(std::exp(s[k]) * y0 - x[k]));
        }
        return worst;
    };
    long double lo = x[0] * 1.0L, hi = lo;
    for (std::size_t k = 0; k <= n_steps; ++k) {
        const long double pull = x[k] * std::exp(-s[k]);
        lo = std::min(lo, pull);
        hi = std::max(hi, pull);
    }
    const long double phi = 0.6180339887498948482L;
    long double a = lo, b = hi;
    long double c = b - phi * (b - a), d = a + phi * (b - a);
    long double fc = objective(c), fd = objective(d);
    for (int it = 0; it < 300; ++it) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - phi * (b - a);
            fc = objective(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + phi * (b - a);
            fd = objective(d);
        }
    }
    return std::min(fc, fd);
}

} // namespace testsupport
