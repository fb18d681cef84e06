#include "recur/bohr.hpp"
#include "recur/dioph.hpp"

#include <algorithm>

namespace recur {

Frequencies Frequencies::from_vector(FrequencyVector fv) {
    Frequencies f;
    f.irrational = std::move(fv);
    return f;
}

Frequencies Frequencies::from_rationals(std::vector<Rational> qs) {
    if (qs.empty()) throw ValidationError("frequency vector must be nonempty");
    Frequencies f;
    f.rational = std::move(qs);
    return f;
}

std::size_t Frequencies::dim() const {
    return exact() ? rational.size() : irrational->dim();
}

Real Frequencies::alpha(std::size_t j) const {
    return exact() ? frac(to_real(rational[j])) : irrational->entries[j].value();
}

const Rational& Frequencies::alpha_rational(std::size_t j) const {
    if (!exact()) throw ValidationError("frequency vector is not rational");
    return rational[j];
}

Real Frequencies::norm_of_multiple(std::size_t j, std::int64_t n) const {
    if (exact()) return to_real(exact_norm_of_multiple(j, n));
    return torus_norm(irrational->entries[j].scaled(n));
}

Rational Frequencies::exact_norm_of_multiple(std::size_t j, std::int64_t n) const {
    return torus_norm_rational(Rational(n) * rational[j]);
}

void BohrSpec::validate() const {
    if (freq.dim() == 0) throw ValidationError("Bohr spec needs at least one frequency");
    if (eta <= 0) throw ValidationError("Bohr spec requires eta > 0");
}

long ceil_rational(const Rational& q) {
    Int n = numerator(q), d = denominator(q);
    Int c = (n + d - 1) / d;  // d > 0 after canonicalization
    return static_cast<long>(c);
}

long BohrHammingSpec::threshold() const {
    Rational t = (Rational(1) - eta_frac) * Rational(static_cast<long>(freq.dim()));
    if (t < 0) t = 0;
    return ceil_rational(t);
}

void BohrHammingSpec::validate() const {
    if (freq.dim() == 0) throw ValidationError("Bohr-Hamming spec needs frequencies");
    if (eps <= 0) throw ValidationError("Bohr-Hamming spec requires eps > 0");
    if (eta_frac <= 0 || eta_frac > 1)
        throw ValidationError("Bohr-Hamming spec requires eta in (0, 1]");
}

void HammingBall::validate() const {
    if (k < 2) throw ValidationError("Hamming ball requires k >= 2");
    if (d < 1) throw ValidationError("Hamming ball requires d >= 1");
    if (r < 0 || r > d) throw ValidationError("Hamming ball requires 0 <= r <= d");
    if (static_cast<std::int64_t>(center.size()) != d)
        throw ValidationError("Hamming ball center has wrong dimension");
    for (std::int64_t c : center)
        if (c < 0 || c >= k) throw ValidationError("Hamming ball center entries must lie in [0,k)");
}

namespace {

// membership of n in {m : max_j ||m alpha_j|| < eta}
Trilean bohr_membership(const Frequencies& freq, const Rational& eta, std::int64_t n,
                        const Tol& tol) {
    const std::size_t d = freq.dim();
    if (freq.exact()) {
        for (std::size_t j = 0; j < d; ++j)
            if (!(freq.exact_norm_of_multiple(j, n) < eta)) return Trilean::False;
        return Trilean::True;
    }
    const Real eta_r = to_real(eta);
    bool ambiguous = false;
    for (std::size_t j = 0; j < d; ++j) {
        Trilean t = lt_guarded(freq.norm_of_multiple(j, n), eta_r, tol);
        if (is_false(t)) return Trilean::False;
        if (is_ambiguous(t)) ambiguous = true;
    }
    return ambiguous ? Trilean::Ambiguous : Trilean::True;
}

// count condition #{j : ||n alpha_j - z_j|| < eps} >= threshold, with z = 0
// when targets is null
Trilean count_membership(const Frequencies& freq, const Rational& eps, long threshold,
                         std::int64_t n, const std::vector<TorusPoint>* targets,
                         const Tol& tol) {
    const std::size_t d = freq.dim();
    if (threshold <= 0) return Trilean::True;
    long count_true = 0, count_amb = 0;
    if (freq.exact() && targets == nullptr) {
        for (std::size_t j = 0; j < d; ++j)
            if (freq.exact_norm_of_multiple(j, n) < eps) ++count_true;
        return count_meets_threshold(count_true, 0, threshold);
    }
    const Real eps_r = to_real(eps);
    for (std::size_t j = 0; j < d; ++j) {
        Real norm;
        if (targets) {
            TorusPoint shifted = TorusPoint(Real(n) * freq.alpha(j)) - (*targets)[j];
            norm = torus_norm(shifted);
        } else {
            norm = freq.norm_of_multiple(j, n);
        }
        Trilean t = lt_guarded(norm, eps_r, tol);
        if (is_true(t)) ++count_true;
        else if (is_ambiguous(t)) ++count_amb;
    }
    return count_meets_threshold(count_true, count_amb, threshold);
}

Enumeration enumerate_by(Window w, int workers,
                         const std::function<Trilean(std::int64_t)>& member,
                         std::string source) {
    Enumeration e;
    e.set.window = w;
    e.set.source = std::move(source);
    Classified c = parallel_classify(w, workers, member);
    e.set.members = std::move(c.members);
    e.ambiguous = std::move(c.ambiguous);
    return e;
}

}  // namespace

Trilean bohr_contains(const BohrSpec& spec, std::int64_t n, const Tol& tol) {
    spec.validate();
    return bohr_membership(spec.freq, spec.eta, n, tol);
}

Enumeration bohr_enumerate(const BohrSpec& spec, Window w, const Tol& tol, int workers) {
    spec.validate();
    w.validate();
    return enumerate_by(
        w, workers, [&](std::int64_t n) { return bohr_membership(spec.freq, spec.eta, n, tol); },
        "bohr");
}

Int hamming_ball_size(std::int64_t k, std::int64_t d, std::int64_t r) {
    if (k < 2 || d < 1 || r < 0 || r > d) throw ValidationError("bad Hamming ball parameters");
    Int total = 0;
    Int binom = 1;  // C(d, i)
    Int pow = 1;    // (k-1)^i
    for (std::int64_t i = 0; i <= r; ++i) {
        total += binom * pow;
        binom = binom * (d - i) / (i + 1);
        pow *= (k - 1);
    }
    return total;
}

bool hamming_ball_contains(const HammingBall& ball, const std::vector<std::int64_t>& y) {
    ball.validate();
    if (y.size() != ball.center.size())
        throw ValidationError("Hamming ball membership: dimension mismatch");
    std::int64_t agree = 0;
    for (std::size_t j = 0; j < y.size(); ++j) {
        std::int64_t yj = ((y[j] % ball.k) + ball.k) % ball.k;
        if (yj == ball.center[j]) ++agree;
    }
    return agree >= ball.d - ball.r;
}

Trilean bh_contains(const BohrHammingSpec& spec, std::int64_t n, const Tol& tol) {
    spec.validate();
    return count_membership(spec.freq, spec.eps, spec.threshold(), n - spec.shift, nullptr, tol);
}

Enumeration bh_enumerate(const BohrHammingSpec& spec, Window w, const Tol& tol, int workers) {
    spec.validate();
    w.validate();
    const long th = spec.threshold();
    return enumerate_by(
        w, workers,
        [&](std::int64_t n) {
            return count_membership(spec.freq, spec.eps, th, n - spec.shift, nullptr, tol);
        },
        "bohr-hamming");
}

std::vector<Real> bh_coordinate_norms(const BohrHammingSpec& spec, std::int64_t n) {
    std::vector<Real> norms;
    const std::int64_t base = n - spec.shift;
    for (std::size_t j = 0; j < spec.freq.dim(); ++j)
        norms.push_back(spec.freq.norm_of_multiple(j, base));
    return norms;
}

SumsetReport check_sumset_containment(const Frequencies& freq, const Rational& eps,
                                      const Rational& eta_frac, Window w, const Tol& tol,
                                      int workers) {
    w.validate();
    const Rational half = eps / 2;
    BohrSpec b{freq, half};
    BohrHammingSpec bh_half{freq, half, eta_frac, 0};
    BohrHammingSpec bh_full{freq, eps, eta_frac, 0};
    b.validate();
    bh_half.validate();
    bh_full.validate();

    SumsetReport rep;
    rep.bohr_members = bohr_enumerate(b, w, tol, workers).set.members;
    rep.bh_half_members = bh_enumerate(bh_half, w, tol, workers).set.members;

    // classify the full-radius set once; the pair loop is then table lookups
    Classified full = parallel_classify(
        w, workers, [&](std::int64_t n) { return bh_contains(bh_full, n, tol); });
    std::vector<std::int8_t> verdict(w.size(), 0);  // 0 false, 1 ambiguous, 2 true
    for (std::int64_t n : full.members) verdict[n - w.lo] = 2;
    for (std::int64_t n : full.ambiguous) verdict[n - w.lo] = 1;

    for (std::int64_t x : rep.bohr_members) {
        for (std::int64_t y : rep.bh_half_members) {
            std::int64_t s = x + y;
            if (!w.contains(s)) continue;
            ++rep.sums_checked;
            switch (verdict[s - w.lo]) {
                case 0: rep.violations.push_back(s); break;
                case 1: ++rep.sums_ambiguous; break;
                default: break;
            }
        }
    }
    std::sort(rep.violations.begin(), rep.violations.end());
    rep.violations.erase(std::unique(rep.violations.begin(), rep.violations.end()),
                         rep.violations.end());
    return rep;
}

CoverReport shifted_bh_cover(const Frequencies& freq, const std::vector<TorusPoint>& z,
                             const Rational& eps, const Rational& eta_frac,
                             std::int64_t search_bound, Window w, const Tol& tol) {
    if (z.size() != freq.dim()) throw ValidationError("target vector dimension mismatch");
    w.validate();

    ApproxQuery q;
    q.freq = freq;
    q.target = z;
    q.eps = eps / 2;
    q.search_bound = search_bound;
    ApproxResult got = kronecker_approximate(q, tol);

    CoverReport rep;
    rep.best_norm = got.best_norm;
    rep.best_candidate = got.best_n;
    if (!got.n) return rep;
    rep.m = *got.n;

    BohrHammingSpec bh_half{freq, eps / 2, eta_frac, *got.n};
    bh_half.validate();
    rep.bh_members = bh_enumerate(bh_half, w, tol).set.members;

    const long th = bh_half.threshold();
    for (std::int64_t n : rep.bh_members) {
        Trilean t = count_membership(freq, eps, th, n, &z, tol);
        if (is_false(t)) rep.violations.push_back(n);
        else if (is_ambiguous(t)) ++rep.ambiguous;
    }
    return rep;
}

}  // namespace recur
