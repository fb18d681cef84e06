#include "recur/real.hpp"

#include <atomic>
#include <cmath>

namespace recur {

namespace {
std::atomic<unsigned> g_precision_bits{128};

unsigned digits10_for_bits(unsigned bits) {
    return static_cast<unsigned>(std::ceil(bits * 0.30102999566398)) + 2;
}
}  // namespace

void set_precision_bits(unsigned bits) {
    if (bits < 64) throw ValidationError("precision_bits must be >= 64");
    g_precision_bits.store(bits);
    Real::default_precision(digits10_for_bits(bits));
}

void set_thread_precision_bits(unsigned bits) {
    if (bits < 64) throw ValidationError("precision_bits must be >= 64");
    Real::default_precision(digits10_for_bits(bits));
}

unsigned precision_bits() { return g_precision_bits.load(); }

unsigned precision_bits_of(const Real& x) {
    return static_cast<unsigned>(mpfr_get_prec(x.backend().data()));
}

Real pi_value() {
    Real r;
    mpfr_const_pi(r.backend().data(), MPFR_RNDN);
    return r;
}

Real frac(const Real& x) {
    Real f = x - floor(x);
    if (f < 0) f += 1;      // floor rounding at the boundary
    if (f >= 1) f -= 1;
    return f;
}

Real to_real(const Rational& q) {
    return Real(numerator(q)) / Real(denominator(q));
}

namespace {

// mpz's string constructor auto-detects octal/hex prefixes; force base 10
Int int_base10(const std::string& s) {
    if (s.empty()) throw ValidationError("empty integer string");
    std::size_t i = (s[0] == '+' || s[0] == '-') ? 1 : 0;
    if (i == s.size()) throw ValidationError("bad integer '" + s + "'");
    Int v = 0;
    for (; i < s.size(); ++i) {
        if (s[i] < '0' || s[i] > '9') throw ValidationError("bad integer '" + s + "'");
        v = v * 10 + (s[i] - '0');
    }
    return s[0] == '-' ? Int(-v) : v;
}

}  // namespace

Rational rational_from_decimal(const std::string& s) {
    if (s.empty()) throw ValidationError("empty numeric string");
    auto slash = s.find('/');
    if (slash != std::string::npos) {
        Int num = int_base10(s.substr(0, slash));
        Int den = int_base10(s.substr(slash + 1));
        if (den == 0) throw ValidationError("zero denominator in '" + s + "'");
        return Rational(num, den);
    }
    bool neg = false;
    std::size_t i = 0;
    if (s[0] == '+' || s[0] == '-') {
        neg = s[0] == '-';
        i = 1;
    }
    std::string digits;
    long frac_digits = -1;
    for (; i < s.size(); ++i) {
        char c = s[i];
        if (c == '.') {
            if (frac_digits >= 0) throw ValidationError("bad number '" + s + "'");
            frac_digits = 0;
        } else if (c >= '0' && c <= '9') {
            digits.push_back(c);
            if (frac_digits >= 0) ++frac_digits;
        } else {
            throw ValidationError("bad number '" + s + "'");
        }
    }
    if (digits.empty()) throw ValidationError("bad number '" + s + "'");
    Int num = int_base10(digits);
    Int den = 1;
    for (long k = 0; k < std::max<long>(frac_digits, 0); ++k) den *= 10;
    Rational q(num, den);
    return neg ? -q : q;
}

std::string decimal_string(const Real& x) {
    unsigned digits = digits10_for_bits(precision_bits_of(x));
    return x.str(digits);
}

const char* to_string(Trilean t) {
    switch (t) {
        case Trilean::False: return "false";
        case Trilean::True: return "true";
        default: return "ambiguous";
    }
}

Trilean lt_guarded(const Real& a, const Real& b, const Tol& tol) {
    Real diff = b - a;
    if (diff > tol.tau) return Trilean::True;
    if (diff < -tol.tau) return Trilean::False;
    return Trilean::Ambiguous;
}

Trilean count_meets_threshold(long count_true, long count_ambiguous, long threshold) {
    if (count_true >= threshold) return Trilean::True;
    if (count_true + count_ambiguous < threshold) return Trilean::False;
    return Trilean::Ambiguous;
}

}  // namespace recur
