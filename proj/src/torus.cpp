#include "recur/torus.hpp"

#include <algorithm>
#include <sstream>

namespace recur {

Real torus_norm(const TorusPoint& x) {
    const Real& v = x.value();
    Real other = 1 - v;
    return v <= other ? v : other;
}

Real char_distance(const TorusPoint& x) {
    Real s = sin(pi_value() * x.value());
    return 2 * abs(s);
}

Rational torus_norm_rational(const Rational& x) {
    Int n = numerator(x), d = denominator(x);
    Int q = n / d;          // truncates toward zero
    if (q * d > n) q -= 1;  // floor
    Rational f = x - Rational(q);
    Rational other = Rational(1) - f;
    return f <= other ? f : other;
}

NormThreshold chord_threshold(const Real& c, const Tol& tol) {
    const Real half = Real(1) / 2;
    auto level = [&](const Real& chord) -> Real {
        if (chord <= 0) return Real(0);
        if (chord >= 2) return half;
        return asin(chord / 2) / pi_value();
    };
    NormThreshold th;
    th.lo = level(c - Real(tol.tau));
    th.hi = level(c + Real(tol.tau));
    return th;
}

Trilean norm_within(const Real& norm, const NormThreshold& th) {
    if (norm < th.lo) return Trilean::True;
    if (norm > th.hi) return Trilean::False;
    return Trilean::Ambiguous;
}

Real Generator::evaluate() const {
    Real root = sqrt(Real(prime));
    return frac(to_real(shift) + root / Real(scale_den));
}

namespace {

bool is_prime_u64(std::uint64_t n) {
    if (n < 2) return false;
    for (std::uint64_t p = 2; p * p <= n; ++p)
        if (n % p == 0) return false;
    return true;
}

}  // namespace

std::uint64_t nth_prime(std::uint64_t index) {
    std::uint64_t count = 0;
    for (std::uint64_t n = 2;; ++n) {
        if (is_prime_u64(n)) {
            if (count == index) return n;
            ++count;
        }
    }
}

IndependenceCertificate certify_independence(const std::vector<TorusPoint>& entries,
                                             std::int64_t bound, const Real& tolerance) {
    const std::size_t d = entries.size();
    IndependenceCertificate cert;
    cert.bound = bound;
    cert.tolerance = tolerance;
    cert.min_norm = Real(1);
    cert.argmin.assign(d, 0);

    std::vector<std::int64_t> n(d, -bound);
    // scan only vectors whose first nonzero coordinate is positive;
    // ||sum n_j a_j|| is invariant under global negation
    std::vector<Real> alpha(d);
    for (std::size_t j = 0; j < d; ++j) alpha[j] = entries[j].value();

    bool done = false;
    while (!done) {
        std::size_t first_nonzero = d;
        for (std::size_t j = 0; j < d; ++j)
            if (n[j] != 0) {
                first_nonzero = j;
                break;
            }
        if (first_nonzero < d && n[first_nonzero] > 0) {
            Real acc = 0;
            for (std::size_t j = 0; j < d; ++j)
                if (n[j] != 0) acc += Real(n[j]) * alpha[j];
            Real norm = torus_norm(TorusPoint(acc));
            if (norm < cert.min_norm) {
                cert.min_norm = norm;
                cert.argmin = n;
            }
        }
        // odometer
        std::size_t j = 0;
        for (;; ++j) {
            if (j == d) {
                done = true;
                break;
            }
            if (++n[j] <= bound) break;
            n[j] = -bound;
        }
    }
    cert.passed = cert.min_norm >= tolerance;
    return cert;
}

FrequencyVector make_independent_frequencies(
    std::size_t d, const std::optional<std::vector<OpenInterval>>& intervals,
    unsigned prec_bits, std::int64_t certificate_bound, std::uint64_t first_prime_index,
    const std::optional<Real>& certificate_tolerance) {
    if (d == 0) throw ValidationError("dimension must be positive");
    if (prec_bits == 0) prec_bits = precision_bits();
    if (prec_bits < 64) throw ValidationError("precision_bits must be >= 64");
    if (intervals && intervals->size() != d)
        throw ValidationError("expected one interval per coordinate");

    if (intervals) {
        // disjointness of the open arcs, mod 1
        for (std::size_t i = 0; i < d; ++i) {
            const auto& I = (*intervals)[i];
            if (!(I.lo < I.hi) || I.hi - I.lo >= 1)
                throw ValidationError("interval endpoints must satisfy lo < hi < lo+1");
            for (std::size_t j = i + 1; j < d; ++j) {
                const auto& J = (*intervals)[j];
                // compare arcs on the lift [0,2)
                Real a0 = frac(I.lo), a1 = a0 + I.width();
                Real b0 = frac(J.lo), b1 = b0 + J.width();
                for (int shift = -1; shift <= 1; ++shift) {
                    Real lo = std::max(Real(a0), Real(b0 + shift));
                    Real hi = std::min(Real(a1), Real(b1 + shift));
                    if (lo < hi) throw ValidationError("intervals must be mutually disjoint");
                }
            }
        }
    }

    FrequencyVector fv;
    for (std::size_t j = 0; j < d; ++j) {
        Generator g;
        g.prime = nth_prime(first_prime_index + j);
        if (intervals) {
            const OpenInterval& I = (*intervals)[j];
            Real width = I.width();
            Real quarter = width / 4;
            if (quarter <= Real(std::ldexp(1.0, -static_cast<int>(prec_bits) + 8)))
                throw ValidationError(
                    "interval too narrow for precision; need at least " +
                    std::to_string(static_cast<unsigned>(prec_bits) + 16) + " bits");
            Real root = sqrt(Real(g.prime));
            // scale_den = 2^t with sqrt(p)/2^t < width/4
            std::uint64_t den = 1;
            Real scaled = root;
            while (scaled >= quarter) {
                if (den > (std::uint64_t(1) << 62))
                    throw ValidationError("interval too narrow: scale denominator overflow");
                den <<= 1;
                scaled = root / Real(den);
            }
            g.scale_den = den;
            // place shift so alpha = shift + sqrt(p)/den sits near the middle
            Real target = frac(I.lo) + width / 2 - scaled;
            // round target to a dyadic rational fine enough to stay in the
            // middle half of the interval
            int fbits = 4;
            Real err = width;
            while (err * 8 >= width) {
                fbits += 4;
                if (fbits > static_cast<int>(prec_bits)) break;
                Real scale = Real(Int(1) << fbits);
                Real rounded = floor(target * scale + Real(0.5)) / scale;
                err = abs(rounded - target);
            }
            Real scale = Real(Int(1) << fbits);
            Int num = Int(floor(target * scale + Real(0.5)));
            g.shift = Rational(num, Int(1) << fbits);
            Real alpha = g.evaluate();
            // verify strict containment with a guard proportional to width
            Real lo = frac(I.lo), hi = lo + width;
            Real lifted = frac(alpha);
            if (lifted < lo) lifted += 1;
            if (!(lifted > lo + width / 16 && lifted < hi - width / 16))
                throw ValidationError("failed to place frequency inside interval; raise precision");
        }
        fv.generators.push_back(g);
        fv.entries.emplace_back(g.evaluate());
    }

    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = i + 1; j < d; ++j)
            if (fv.entries[i].value() == fv.entries[j].value())
                throw InvariantViolation("frequency entries must be mutually distinct");

    if (certificate_bound == 0) certificate_bound = d <= 2 ? 50 : (d == 3 ? 20 : 8);
    fv.certificate = certify_independence(
        fv.entries, certificate_bound,
        certificate_tolerance ? *certificate_tolerance : Real(1e-6));
    if (!fv.certificate.passed) {
        std::ostringstream os;
        os << "independence certificate failed: min norm " << fv.certificate.min_norm
           << " below tolerance at bound " << certificate_bound;
        throw InvariantViolation(os.str());
    }
    return fv;
}

}  // namespace recur
