#ifndef RECUR_TORUS_HPP
#define RECUR_TORUS_HPP

#include "recur/real.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace recur {

// A point of T = R/Z, stored as its representative in [0,1).
class TorusPoint {
public:
    TorusPoint() : value_(0) {}
    explicit TorusPoint(const Real& x) : value_(frac(x)) { check(); }
    explicit TorusPoint(const Rational& q) : value_(frac(to_real(q))) { check(); }

    const Real& value() const { return value_; }
    unsigned precision_bits() const { return precision_bits_of(value_); }

    TorusPoint operator+(const TorusPoint& o) const { return TorusPoint(value_ + o.value_); }
    TorusPoint operator-(const TorusPoint& o) const { return TorusPoint(value_ - o.value_); }
    TorusPoint operator-() const { return TorusPoint(-value_); }

    // n*x mod 1.
    TorusPoint scaled(std::int64_t n) const { return TorusPoint(Real(n) * value_); }

private:
    void check() const {
        if (precision_bits_of(value_) < 64)
            throw ValidationError("TorusPoint requires >= 64 bits of precision");
    }
    Real value_;
};

// ||x|| = distance from x to the nearest integer, in [0, 1/2].
Real torus_norm(const TorusPoint& x);

// |e(x) - 1| = 2|sin(pi x)|, in [0, 2].
Real char_distance(const TorusPoint& x);

// Exact counterpart of torus_norm for rational points.
Rational torus_norm_rational(const Rational& x);

// The chord condition |e(x)-1| < c is equivalent to ||x|| < t where
// t = asin(c/2)/pi (clamped at 1/2).  NormThreshold carries the guarded
// window [lo, hi] so that chord comparisons reduce to norm comparisons.
struct NormThreshold {
    Real lo;  // ||x|| < lo            => |e(x)-1| < c definitely
    Real hi;  // ||x|| > hi            => |e(x)-1| > c definitely
};
NormThreshold chord_threshold(const Real& c, const Tol& tol = {});

// Classify ||x|| against a chord threshold.
Trilean norm_within(const Real& norm, const NormThreshold& th);

// One generator alpha_j = shift + sqrt(prime)/scale_den mod 1; distinct primes
// across coordinates make the vector independent over Q together with 1.
struct Generator {
    std::uint64_t prime = 2;
    Rational shift = 0;
    std::uint64_t scale_den = 1;

    Real evaluate() const;
};

// Result of the exhaustive small-relation scan.
struct IndependenceCertificate {
    std::int64_t bound = 0;            // scanned max |n_j|
    Real tolerance;                    // required min ||sum n_j alpha_j||
    Real min_norm;                     // achieved minimum over nonzero vectors
    std::vector<std::int64_t> argmin;  // a minimizing vector
    bool passed = false;
};

struct FrequencyVector {
    std::vector<TorusPoint> entries;
    std::vector<Generator> generators;
    IndependenceCertificate certificate;

    std::size_t dim() const { return entries.size(); }
};

// Open interval (lo, hi) on the torus, lo < hi < lo+1, taken mod 1.
struct OpenInterval {
    Real lo;
    Real hi;
    Real width() const { return hi - lo; }
};

// Runs the exhaustive scan over 0 < max|n_j| <= bound.
IndependenceCertificate certify_independence(const std::vector<TorusPoint>& entries,
                                             std::int64_t bound, const Real& tolerance);

// Builds a certified-independent frequency vector.  When intervals are given,
// alpha_j lands strictly inside interval j.  Throws ValidationError when the
// requested precision cannot separate interval endpoints.
//
// certificate_tolerance defaults to 1e-6; callers whose intervals force the
// points closer together than that (nested construction stages) pass their own
// floor -- the exhaustive scan then still rules out exact relations and
// duplicated points, while exact independence rests on the generator form.
FrequencyVector make_independent_frequencies(
    std::size_t d, const std::optional<std::vector<OpenInterval>>& intervals = std::nullopt,
    unsigned prec_bits = 0, std::int64_t certificate_bound = 0,
    std::uint64_t first_prime_index = 0,
    const std::optional<Real>& certificate_tolerance = std::nullopt);

std::uint64_t nth_prime(std::uint64_t index);

}  // namespace recur

#endif
