#ifndef RECUR_REAL_HPP
#define RECUR_REAL_HPP

#include <boost/multiprecision/mpfr.hpp>
#include <boost/multiprecision/gmp.hpp>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace recur {

// All torus arithmetic runs on MPFR floats; set_precision_bits() controls the
// working precision of newly created values (default 128, min 64).
using Real = boost::multiprecision::number<boost::multiprecision::mpfr_float_backend<0>,
                                           boost::multiprecision::et_off>;
using Rational = boost::multiprecision::mpq_rational;
using Int = boost::multiprecision::mpz_int;

void set_precision_bits(unsigned bits);
// Worker threads inherit the process-wide setting through this call.
void set_thread_precision_bits(unsigned bits);
unsigned precision_bits();
unsigned precision_bits_of(const Real& x);

Real pi_value();

// Fractional part in [0,1).
Real frac(const Real& x);

Real to_real(const Rational& q);
Rational rational_from_decimal(const std::string& s);
std::string decimal_string(const Real& x);

struct RecurError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ValidationError : RecurError {
    using RecurError::RecurError;
};
struct ResourceCapError : RecurError {
    using RecurError::RecurError;
};
struct InvariantViolation : RecurError {
    using RecurError::RecurError;
};

// Guard margin for strict inequalities on reals. Comparisons landing within
// tau of the boundary are reported as ambiguous instead of being resolved.
struct Tol {
    double tau = 0x1p-40;
};

enum class Trilean : int8_t { False = 0, Ambiguous = 1, True = 2 };

inline bool is_true(Trilean t) { return t == Trilean::True; }
inline bool is_false(Trilean t) { return t == Trilean::False; }
inline bool is_ambiguous(Trilean t) { return t == Trilean::Ambiguous; }

const char* to_string(Trilean t);

// a < b with guard margin.
Trilean lt_guarded(const Real& a, const Real& b, const Tol& tol = {});

// Count-threshold membership: true if at least `threshold` of the coordinate
// tests are definitively true, false if even counting ambiguities the
// threshold cannot be met.
Trilean count_meets_threshold(long count_true, long count_ambiguous, long threshold);

}  // namespace recur

#endif
