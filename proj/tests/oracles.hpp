// Independent reference implementations used to freeze expected values.
// Everything here is deliberately written against plain long double / int64
// arithmetic, separate from the library's mpfr/gmp code paths.
#ifndef RECUR_TEST_ORACLES_HPP
#define RECUR_TEST_ORACLES_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

namespace oracle {

inline long double frac_ld(long double x) {
    long double f = x - std::floor(x);
    if (f < 0) f += 1;
    if (f >= 1) f -= 1;
    return f;
}

inline long double torus_norm_ld(long double x) {
    long double f = frac_ld(x);
    return std::min(f, 1.0L - f);
}

// members of {n in [lo,hi] : max_j ||n a_j|| < eta}
inline std::vector<std::int64_t> bohr_scan(const std::vector<long double>& alpha,
                                           long double eta, std::int64_t lo, std::int64_t hi) {
    std::vector<std::int64_t> out;
    for (std::int64_t n = lo; n <= hi; ++n) {
        bool ok = true;
        for (long double a : alpha)
            if (torus_norm_ld(n * a) >= eta) {
                ok = false;
                break;
            }
        if (ok) out.push_back(n);
    }
    return out;
}

// brute-force Hamming ball size by enumerating Z_k^d
inline std::int64_t hamming_ball_brute(std::int64_t k, std::int64_t d, std::int64_t r) {
    std::int64_t size = 1;
    for (std::int64_t i = 0; i < d; ++i) size *= k;
    std::int64_t count = 0;
    for (std::int64_t y = 0; y < size; ++y) {
        std::int64_t v = y, agree = 0;
        for (std::int64_t j = 0; j < d; ++j) {
            if (v % k == 0) ++agree;  // center fixed at the zero tuple
            v /= k;
        }
        if (agree >= d - r) ++count;
    }
    return count;
}

// overlap length of [a, a+la) with [b, b+lb)+t on the circle, independent
// clipping on the lift
inline long double arc_overlap_ld(long double a, long double la, long double b, long double lb,
                                  long double t) {
    long double bb = frac_ld(b + t);
    long double total = 0;
    for (int s = -1; s <= 1; ++s) {
        long double lo = std::max(a, bb + s);
        long double hi = std::min(a + la, bb + s + lb);
        if (hi > lo) total += hi - lo;
    }
    return total;
}

// midpoint Riemann sum of the overlap indicator (a genuine numeric
// integration route; error O(breakpoints / samples))
inline long double arc_overlap_riemann(long double a, long double la, long double b,
                                       long double lb, long double t, int samples) {
    auto inside = [](long double x, long double lo, long double len) {
        long double v = frac_ld(x - lo);
        return v < len;
    };
    std::int64_t hits = 0;
    for (int i = 0; i < samples; ++i) {
        long double x = (i + 0.5L) / samples;
        if (inside(x, a, la) && inside(x, frac_ld(b + t), lb)) ++hits;
    }
    return static_cast<long double>(hits) / samples;
}

// naive Kleitman check, nested loops only, no bit tricks
struct NaiveKleitman {
    std::int64_t k, d;

    std::int64_t size() const {
        std::int64_t s = 1;
        for (std::int64_t i = 0; i < d; ++i) s *= k;
        return s;
    }
    std::vector<std::int64_t> tuple(std::int64_t idx) const {
        std::vector<std::int64_t> w(d);
        for (std::int64_t j = d - 1; j >= 0; --j) {
            w[j] = idx % k;
            idx /= k;
        }
        return w;
    }
    bool pair_exists(const std::vector<std::int64_t>& subset, std::int64_t center,
                     std::int64_t radius) const {
        std::vector<std::int64_t> c = tuple(center);
        for (std::int64_t a : subset)
            for (std::int64_t b : subset) {
                if (a == b) continue;
                std::vector<std::int64_t> ta = tuple(a), tb = tuple(b);
                std::int64_t agree = 0;
                for (std::int64_t j = 0; j < d; ++j)
                    if (((ta[j] - tb[j]) % k + k) % k == c[j]) ++agree;
                if (agree >= d - radius) return true;
            }
        return false;
    }
    // returns true when the lemma's conclusion holds for all subsets/centers
    bool holds(std::int64_t min_size, std::int64_t radius) const {
        const std::int64_t g = size();
        for (std::int64_t mask = 1; mask < (std::int64_t(1) << g); ++mask) {
            std::vector<std::int64_t> subset;
            for (std::int64_t i = 0; i < g; ++i)
                if (mask & (std::int64_t(1) << i)) subset.push_back(i);
            if (static_cast<std::int64_t>(subset.size()) < min_size) continue;
            for (std::int64_t x = 0; x < g; ++x)
                if (!pair_exists(subset, x, radius)) return false;
        }
        return true;
    }
};

}  // namespace oracle

#endif
