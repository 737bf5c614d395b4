#pragma once

// The critical exponent c0 = 1/b of the shadowing phase transition, the
// large-deviation rate function of the driving walk, and Monte Carlo
// validation of the ruin bounds.
//
// b is the unique positive root of Phi(beta) = (e^{-beta a0} + e^{-beta a1})/2
// - 1. Phi is convex with Phi(0) = 0 and Phi'(0) = -v < 0, so for positive
// drift there is exactly one positive root.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>

#include "skewshadow/model.hpp"
#include "skewshadow/montecarlo.hpp"
#include "skewshadow/rng.hpp"

namespace skewshadow {

struct RuinSolution {
    double b = 0.0;        ///< ruin exponent
    double c0 = 0.0;       ///< critical exponent 1/b
    double residual = 0.0; ///< |Phi(b)| at the returned root
};

inline double ruin_equation(const ModelParams& p, double beta) {
    return 0.5 * (std::exp(-beta * p.a0) + std::exp(-beta * p.a1)) - 1.0;
}

inline RuinSolution solve_ruin_exponent(const NormalizedParams& params,
                                        double tol = 1e-12) {
    const ModelParams& p = params.params;
    if (!(p.v > 0.0)) {
        throw std::invalid_argument("solve_ruin_exponent: drift must be positive (normalize first)");
    }
    if (!(tol > 0.0)) {
        throw std::invalid_argument("solve_ruin_exponent: tol must be positive");
    }
    // Bracket by doubling; Phi grows like e^{-beta a0}/2 so this terminates
    // almost immediately for valid parameters.
    double hi = 1.0;
    int doublings = 0;
    while (ruin_equation(p, hi) <= 0.0) {
        hi *= 2.0;
        if (++doublings > 60) {
            throw std::runtime_error("solve_ruin_exponent: bracketing failed");
        }
    }
    double lo = 0.0;
    for (int it = 0; it < 200 && (hi - lo) > 1e-16 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (ruin_equation(p, mid) < 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    RuinSolution sol;
    sol.b = 0.5 * (lo + hi);
    sol.c0 = 1.0 / sol.b;
    sol.residual = std::fabs(ruin_equation(p, sol.b));
    if (sol.residual > tol) {
        throw std::runtime_error("solve_ruin_exponent: residual above tolerance");
    }
    // Uniqueness certificate: Phi changes sign exactly once on (0, inf).
    const double probe = 1e-6 * sol.b;
    if (!(ruin_equation(p, sol.b - probe) < 0.0) ||
        !(ruin_equation(p, sol.b + probe) > 0.0)) {
        throw std::runtime_error("solve_ruin_exponent: sign-change certificate failed");
    }
    return sol;
}

/// c0 for arbitrary valid parameters; invariant under the inverse-map swap.
inline double critical_exponent(const ModelParams& params, double tol = 1e-12) {
    return solve_ruin_exponent(normalize(params), tol).c0;
}

namespace detail {

/// Lambda(t) = ln((e^{t a0} + e^{t a1})/2), the cumulant generating function.
inline double cumulant(const ModelParams& p, double t) {
    const double x = t * p.a0;
    const double y = t * p.a1;
    const double m = std::max(x, y);
    return m + std::log1p(std::exp(std::min(x, y) - m)) - 0.6931471805599453;
}

/// Lambda'(t), the tilted mean; increasing from a0 to a1.
inline double cumulant_derivative(const ModelParams& p, double t) {
    const double x = t * p.a0;
    const double y = t * p.a1;
    // Softmax weight of the a0 branch.
    const double w = 1.0 / (1.0 + std::exp(y - x));
    return w * p.a0 + (1.0 - w) * p.a1;
}

} // namespace detail

/// Rate function h(eps) = I(v - eps) with I(x) = sup_t [t x - Lambda(t)],
/// governing P(S_n / n - v < -eps) ~ e^{-h(eps) n}. Admissible for
/// 0 < eps <= v - a0; the right endpoint returns the supremum ln 2.
inline double rate_function(const NormalizedParams& params, double eps,
                            double tol = 1e-12) {
    const ModelParams& p = params.params;
    if (!(eps > 0.0) || !(eps <= p.v - p.a0)) {
        throw std::invalid_argument("rate_function: eps must lie in (0, v - a0]");
    }
    if (!(tol > 0.0)) {
        throw std::invalid_argument("rate_function: tol must be positive");
    }
    const double x = p.v - eps; // target mean, in [a0, v)
    // The left-tail maximizer is negative; search [t_min, 0] where t_min is
    // deep enough that Lambda' is within e^-60 of a0.
    const double t_min = -60.0 / (p.a1 - p.a0);
    double lo = t_min, hi = 0.0;
    if (detail::cumulant_derivative(p, t_min) >= x) {
        lo = hi = t_min; // boundary maximizer (eps at or near v - a0)
    }
    for (int it = 0; it < 200 && (hi - lo) > 1e-15 * (std::fabs(lo) + 1.0); ++it) {
        const double mid = 0.5 * (lo + hi);
        if (detail::cumulant_derivative(p, mid) < x) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    const double t_star = 0.5 * (lo + hi);
    return t_star * x - detail::cumulant(p, t_star);
}

/// Default horizon for the ruin Monte Carlo: long enough that crossings past
/// it require the walk to return below -C against the drift, an exponentially
/// small correction next to the interval width.
inline std::size_t default_ruin_horizon(const NormalizedParams& params, double c) {
    return static_cast<std::size_t>(std::ceil(10.0 * c / params.params.v + 50.0 / params.params.v));
}

/// Monte Carlo estimate of the ruin probability P(exists i <= horizon with
/// S_i <= -C).
inline Estimate ruin_probability_mc(const NormalizedParams& params, double c,
                                    std::size_t horizon, std::uint64_t samples,
                                    std::uint64_t seed, unsigned threads = 1) {
    if (!(c > 0.0)) {
        throw std::invalid_argument("ruin_probability_mc: C must be positive");
    }
    if (horizon < 1 || samples < 1) {
        throw std::invalid_argument("ruin_probability_mc: need horizon >= 1 and samples >= 1");
    }
    const double a0 = params.params.a0;
    const double a1 = params.params.a1;
    const std::uint64_t successes =
        detail::count_successes(samples, threads, [&](std::uint64_t i) {
            RandomStream stream = derive_stream(seed, i);
            double s = 0.0;
            for (std::size_t step = 0; step < horizon; ++step) {
                s += stream.bit() ? a1 : a0;
                if (s <= -c) {
                    return true;
                }
            }
            return false;
        });
    return make_estimate(successes, samples, seed);
}

} // namespace skewshadow
