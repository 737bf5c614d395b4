#pragma once

// Model parameters of the linear skew product and their validation.
//
// The skew product acts on (symbol sequence, fiber) pairs; the fiber map
// multiplies by lambda0 or lambda1 depending on the current symbol. For noise
// amplitudes below the symbolic ball radius the symbol sequence of a random
// pseudotrajectory is an i.i.d. fair-coin sequence, so the whole problem
// reduces to the scalar fiber recursion driven by i.i.d. log-rates
// gamma in {a0, a1}. Only that reduction is represented here.

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace skewshadow {

inline constexpr double kDriftTolerance = 1e-12;

struct ModelParams {
    double lambda0 = 0.0; ///< fiber contraction, in (0, 1)
    double lambda1 = 0.0; ///< fiber expansion, > 1
    double a0 = 0.0;      ///< ln(lambda0) < 0
    double a1 = 0.0;      ///< ln(lambda1) > 0
    double v = 0.0;       ///< mean log-rate (a0 + a1) / 2
};

/// Validates raw multipliers and derives the log-domain quantities.
/// Throws std::invalid_argument naming the violated constraint.
inline ModelParams validate(double lambda0, double lambda1) {
    auto fail = [&](const char* what) {
        std::ostringstream os;
        os << "invalid parameters (lambda0=" << lambda0 << ", lambda1=" << lambda1
           << "): " << what;
        throw std::invalid_argument(os.str());
    };
    if (!std::isfinite(lambda0) || !std::isfinite(lambda1)) {
        fail("multipliers must be finite");
    }
    if (!(lambda0 > 0.0 && lambda0 < 1.0)) {
        fail("lambda0 must lie in (0, 1)");
    }
    if (!(lambda1 > 1.0)) {
        fail("lambda1 must exceed 1");
    }
    ModelParams p;
    p.lambda0 = lambda0;
    p.lambda1 = lambda1;
    p.a0 = std::log(lambda0);
    p.a1 = std::log(lambda1);
    p.v = (p.a0 + p.a1) / 2.0;
    if (std::fabs(p.a0 + p.a1) <= kDriftTolerance) {
        fail("lambda0 * lambda1 = 1 (degenerate drift)");
    }
    return p;
}

/// Parameters with positive drift, obtained from arbitrary valid parameters
/// by the inverse-map swap (lambda0, lambda1) <- (1/lambda1, 1/lambda0) when
/// necessary. Shadowing statistics are invariant under the swap.
struct NormalizedParams {
    ModelParams params;
    bool inverted = false;
};

inline NormalizedParams normalize(const ModelParams& p) {
    if (p.v > 0.0) {
        return NormalizedParams{p, false};
    }
    return NormalizedParams{validate(1.0 / p.lambda1, 1.0 / p.lambda0), true};
}

} // namespace skewshadow
