#pragma once

// Sampling of the driving random walk and the pseudotrajectory noise.
//
// Indexing convention: S_0 = 0 and S_k = gamma_0 + ... + gamma_{k-1}, so an
// exact fiber orbit satisfies y_k = exp(S_k) * y_0 and the weighted-sum
// recursion reads z_0 = 0, z_k = z_{k-1} + r_k * exp(-S_k). Only differences
// of prefix sums enter any statistic, so this convention is interchangeable
// with ending the sum at k.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "skewshadow/model.hpp"
#include "skewshadow/rng.hpp"
#include "skewshadow/scaled.hpp"

namespace skewshadow {

struct WalkPath {
    std::vector<std::uint8_t> symbols; ///< bit i selects gamma_i in {a0, a1}
    std::vector<double> gamma;         ///< log-rates, gamma_i = a_{symbols[i]}
    std::vector<double> prefix;        ///< S_0..S_N, S_0 = 0

    std::size_t steps() const { return gamma.size(); }
};

/// Deterministic construction from given symbols (instance files, tests).
inline WalkPath walk_from_symbols(const ModelParams& params,
                                  std::vector<std::uint8_t> symbols) {
    WalkPath w;
    w.symbols = std::move(symbols);
    w.gamma.reserve(w.symbols.size());
    w.prefix.reserve(w.symbols.size() + 1);
    w.prefix.push_back(0.0);
    double s = 0.0;
    for (std::uint8_t bit : w.symbols) {
        const double g = bit ? params.a1 : params.a0;
        w.gamma.push_back(g);
        s += g;
        w.prefix.push_back(s);
    }
    return w;
}

/// Samples n i.i.d. fair symbols from the stream.
inline WalkPath sample_walk(const NormalizedParams& params, std::size_t n,
                            RandomStream& stream) {
    std::vector<std::uint8_t> symbols(n);
    for (std::size_t i = 0; i < n; ++i) {
        symbols[i] = stream.bit() ? 1 : 0;
    }
    return walk_from_symbols(params.params, std::move(symbols));
}

/// z_0 = 0, z_k = z_{k-1} + noise[k-1] * exp(-S_k), in the piecewise-anchored
/// scaled representation. Safe for |S_k| up to 1e5 and beyond.
inline ScaledSequence compute_z(const WalkPath& walk, const std::vector<double>& noise) {
    if (noise.size() != walk.gamma.size()) {
        throw std::invalid_argument("compute_z: noise length must equal walk length");
    }
    ScaledSequence z;
    z.reserve(noise.size());
    for (std::size_t k = 1; k <= noise.size(); ++k) {
        z.append(noise[k - 1], walk.prefix[k]);
    }
    return z;
}

struct PseudoOrbit {
    std::vector<double> noise; ///< r_1..r_N, each in [-1, 1]
    double scale = 0.0;        ///< noise amplitude d >= 0
    ScaledSequence z;

    /// Realized fiber pseudotrajectory point x_k = d * exp(S_k) * z_k; the
    /// recursion x_{k+1} = exp(gamma_k) x_k + d r_{k+1} starts at x_0 = 0.
    std::size_t steps() const { return noise.size(); }
};

inline PseudoOrbit pseudo_from_noise(const WalkPath& walk, double d,
                                     std::vector<double> noise) {
    if (!(d >= 0.0)) {
        throw std::invalid_argument("noise scale d must be >= 0");
    }
    PseudoOrbit p;
    p.noise = std::move(noise);
    p.scale = d;
    p.z = compute_z(walk, p.noise);
    return p;
}

/// Draws r_k i.i.d. Uniform[-1, 1] and computes z.
inline PseudoOrbit sample_noise(const WalkPath& walk, double d, RandomStream& stream) {
    std::vector<double> noise(walk.steps());
    for (double& r : noise) {
        r = stream.uniform_sym();
    }
    return pseudo_from_noise(walk, d, std::move(noise));
}

} // namespace skewshadow
