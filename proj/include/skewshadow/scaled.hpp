#pragma once

// Overflow-safe scaled arithmetic for the weighted-sum recursion.
//
// The z-recursion accumulates terms r_k * exp(-S_k) where the prefix sums S_k
// of the driving walk may reach magnitudes far beyond what double exponents
// can hold, and where consecutive z values can agree to hundreds of digits
// while their *difference* is still the quantity of interest (it enters the
// pairwise statistic multiplied by exp(+S)). Two layers deal with this:
//
//  - Scaled: a (mantissa, log_scale) pair representing mantissa * e^log_scale.
//  - ScaledSequence: the z sequence stored in anchored pieces. Each piece has
//    a shared log-scale chosen near the local increment scale, and mantissas
//    are offsets from the piece anchor (the element just before the piece).
//    Within a piece, differences are plain mantissa subtractions at full
//    relative precision; across pieces, anchor deltas are chained. Pieces are
//    cut whenever the increment scale drifts by more than kScaleDrift in log
//    or the local offset outgrows kMantissaLimit.
//
// Storing z as absolute doubles would lose the late differences to rounding
// (they fall below eps * |z| long before they stop mattering), which is why
// the piecewise-anchored form is load-bearing and not an optimization.

#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <vector>

namespace skewshadow {

struct Scaled {
    double mantissa = 0.0;
    double log_scale = 0.0;

    double log_abs() const {
        if (mantissa == 0.0) {
            return -std::numeric_limits<double>::infinity();
        }
        return std::log(std::fabs(mantissa)) + log_scale;
    }

    double to_double() const {
        if (mantissa == 0.0) {
            return 0.0;
        }
        // Split the exponential so that value near the edge of double range
        // still comes out right.
        if (log_scale > 700.0 || log_scale < -700.0) {
            const double half = log_scale / 2.0;
            return mantissa * std::exp(half) * std::exp(log_scale - half);
        }
        return mantissa * std::exp(log_scale);
    }
};

inline Scaled scaled_add(const Scaled& a, const Scaled& b) {
    if (a.mantissa == 0.0) {
        return b;
    }
    if (b.mantissa == 0.0) {
        return a;
    }
    const Scaled& big = (a.log_scale >= b.log_scale) ? a : b;
    const Scaled& small = (a.log_scale >= b.log_scale) ? b : a;
    const double shift = small.log_scale - big.log_scale; // <= 0
    Scaled r{big.mantissa + small.mantissa * std::exp(shift), big.log_scale};
    // Safety renormalization; unreachable for realistic inputs because chain
    // lengths are short and piece mantissas are bounded.
    if (r.mantissa != 0.0 && std::fabs(r.mantissa) > 1e250) {
        int e = 0;
        r.mantissa = std::frexp(r.mantissa, &e);
        r.log_scale += e * 0.6931471805599453;
    }
    return r;
}

inline Scaled scaled_negate(Scaled a) {
    a.mantissa = -a.mantissa;
    return a;
}

class ScaledSequence {
public:
    static constexpr double kScaleDrift = 40.0;
    /// A piece is cut once the accumulated offset exceeds e^10 times the
    /// local increment scale: past that point, eps * |mantissa| would start
    /// to eat into the relative precision of nearby differences.
    static constexpr double kPrecisionRatio = 2.2026465794806718e4; // e^10

    struct Piece {
        std::size_t first;  ///< index of the first element stored in this piece
        double log_scale;   ///< shared log-scale of the piece mantissas
        Scaled base_delta;  ///< z[anchor_j] - z[anchor_{j-1}], anchor_j = first - 1
        Scaled base_value;  ///< z[anchor_j], accumulated along the chain
    };

    /// Starts the sequence at z_0 = 0.
    ScaledSequence() {
        mantissa_.push_back(0.0);
        pieces_.push_back(Piece{0, 0.0, Scaled{}, Scaled{}});
    }

    void reserve(std::size_t n) { mantissa_.reserve(n + 1); }

    /// Appends z_k = z_{k-1} + r * exp(-s_k).
    void append(double r, double s_k) {
        const double increment_scale = -s_k;
        if (r != 0.0) {
            Piece& cur = pieces_.back();
            if (cur.first == mantissa_.size()) {
                // Piece has no elements yet; it can still adopt any scale.
                if (std::fabs(increment_scale - cur.log_scale) > kScaleDrift) {
                    cur.log_scale = increment_scale;
                }
            } else {
                const double unit = std::exp(increment_scale - cur.log_scale);
                // Cut before appending: either the increment dwarfs the piece
                // scale (mantissas would blow up), or the accumulated offset
                // dwarfs the increment (its low bits would round away).
                if (increment_scale - cur.log_scale > kScaleDrift ||
                    std::fabs(mantissa_.back()) > kPrecisionRatio * unit) {
                    start_piece(increment_scale);
                }
            }
        }
        Piece& piece = pieces_.back();
        double m = (piece.first == mantissa_.size()) ? 0.0 : mantissa_.back();
        if (r != 0.0) {
            m += r * std::exp(increment_scale - piece.log_scale);
        }
        mantissa_.push_back(m);
    }

    std::size_t size() const { return mantissa_.size(); }

    /// z_k as a plain double (may be +-inf when the true value exceeds the
    /// double range; the representation itself never overflows).
    double value(std::size_t k) const {
        const Piece& p = pieces_[piece_of(k)];
        return scaled_add(p.base_value, Scaled{mantissa_[k], p.log_scale}).to_double();
    }

    /// z_n - z_k in scaled form, full relative precision at the local scale.
    Scaled diff(std::size_t k, std::size_t n) const {
        if (k > n) {
            return scaled_negate(diff(n, k));
        }
        check_index(n);
        const std::size_t jk = piece_of(k);
        const std::size_t jn = piece_of(n);
        if (jk == jn) {
            return Scaled{mantissa_[n] - mantissa_[k], pieces_[jk].log_scale};
        }
        Scaled acc{-mantissa_[k], pieces_[jk].log_scale};
        for (std::size_t j = jk + 1; j <= jn; ++j) {
            acc = scaled_add(acc, pieces_[j].base_delta);
        }
        return scaled_add(acc, Scaled{mantissa_[n], pieces_[jn].log_scale});
    }

    const std::vector<Piece>& pieces() const { return pieces_; }
    double mantissa_at(std::size_t k) const { return mantissa_[k]; }

    std::size_t piece_of(std::size_t k) const {
        check_index(k);
        // Pieces are few; binary search over the first-index keys.
        std::size_t lo = 0, hi = pieces_.size() - 1;
        while (lo < hi) {
            const std::size_t mid = (lo + hi + 1) / 2;
            if (pieces_[mid].first <= k) {
                lo = mid;
            } else {
                hi = mid - 1;
            }
        }
        return lo;
    }

private:
    void start_piece(double log_scale) {
        const Piece& prev = pieces_.back();
        const Scaled delta{mantissa_.back(), prev.log_scale};
        const Scaled value = scaled_add(prev.base_value, delta);
        pieces_.push_back(Piece{mantissa_.size(), log_scale, delta, value});
    }

    void check_index(std::size_t k) const {
        if (k >= mantissa_.size()) {
            throw std::out_of_range("ScaledSequence index out of range");
        }
    }

    std::vector<double> mantissa_;
    std::vector<Piece> pieces_;
};

} // namespace skewshadow
