#include "recur/dynamics.hpp"

#include <algorithm>
#include <random>

namespace recur {

namespace {

Rational rational_frac(const Rational& x) {
    Int n = numerator(x), d = denominator(x);
    Int q = n / d;
    if (q * d > n) q -= 1;
    return x - Rational(q);
}

}  // namespace

TorusAxis TorusAxis::from_rational(const Rational& q) {
    TorusAxis a;
    a.alpha_exact = rational_frac(q);
    a.alpha = TorusPoint(*a.alpha_exact);
    return a;
}

TorusAxis TorusAxis::from_point(const TorusPoint& p) {
    TorusAxis a;
    a.alpha = p;
    return a;
}

RotationSystem RotationSystem::torus(const Frequencies& freq) {
    RotationSystem s;
    for (std::size_t j = 0; j < freq.dim(); ++j) {
        if (freq.exact()) s.axes.emplace_back(TorusAxis::from_rational(freq.alpha_rational(j)));
        else s.axes.emplace_back(TorusAxis::from_point(freq.irrational->entries[j]));
    }
    return s;
}

RotationSystem RotationSystem::cyclic(std::int64_t k, std::int64_t step) {
    if (k < 1) throw ValidationError("cyclic system requires k >= 1");
    if (step < 0 || step >= k) throw ValidationError("cyclic step must lie in [0, k)");
    RotationSystem s;
    s.axes.emplace_back(CyclicAxis{k, step});
    return s;
}

void RotationSystem::validate() const {
    if (axes.empty()) throw ValidationError("rotation system needs at least one axis");
    for (const Axis& ax : axes)
        if (const auto* c = std::get_if<CyclicAxis>(&ax)) {
            if (c->k < 1) throw ValidationError("cyclic axis requires k >= 1");
            if (c->step < 0 || c->step >= c->k)
                throw ValidationError("cyclic step must lie in [0, k)");
        }
}

bool RotationSystem::exact() const {
    for (const Axis& ax : axes)
        if (const auto* t = std::get_if<TorusAxis>(&ax))
            if (!t->exact()) return false;
    return true;
}

RotationSystem product_system(const RotationSystem& a, const RotationSystem& b) {
    RotationSystem p;
    p.axes = a.axes;
    p.axes.insert(p.axes.end(), b.axes.begin(), b.axes.end());
    p.validate();
    return p;
}

Arc Arc::from_rational(const Rational& lo, const Rational& len) {
    if (len < 0 || len > 1) throw ValidationError("arc length must lie in [0,1]");
    Arc a;
    a.lo_exact = rational_frac(lo);
    a.len_exact = len;
    a.lo = to_real(*a.lo_exact);
    a.len = to_real(len);
    return a;
}

Arc Arc::from_real(const Real& lo, const Real& len) {
    if (len < 0 || len > 1) throw ValidationError("arc length must lie in [0,1]");
    Arc a;
    a.lo = frac(lo);
    a.len = len;
    return a;
}

Arc symmetric_arc(const Rational& half_width) {
    if (half_width <= 0 || half_width > Rational(1, 2))
        throw ValidationError("symmetric arc half-width must lie in (0, 1/2]");
    return Arc::from_rational(Rational(1) - half_width, 2 * half_width);
}

void BoxSet::validate(const RotationSystem& sys) const {
    sys.validate();
    for (const Box& b : boxes) {
        if (b.factors.size() != sys.axes.size())
            throw ValidationError("box arity does not match system axes");
        for (std::size_t i = 0; i < b.factors.size(); ++i) {
            const bool axis_cyclic = std::holds_alternative<CyclicAxis>(sys.axes[i]);
            const bool factor_cyclic = std::holds_alternative<CyclicSubset>(b.factors[i]);
            if (axis_cyclic != factor_cyclic)
                throw ValidationError("box factor kind does not match axis kind");
            if (factor_cyclic) {
                const auto& c = std::get<CyclicAxis>(sys.axes[i]);
                const auto& f = std::get<CyclicSubset>(b.factors[i]);
                for (std::size_t t = 0; t < f.elems.size(); ++t) {
                    if (f.elems[t] < 0 || f.elems[t] >= c.k)
                        throw ValidationError("cyclic subset element outside Z_k");
                    if (t > 0 && f.elems[t - 1] >= f.elems[t])
                        throw ValidationError("cyclic subset must be sorted and distinct");
                }
            }
        }
    }
}

bool BoxSet::exact() const {
    for (const Box& b : boxes)
        for (const BoxFactor& f : b.factors)
            if (const auto* a = std::get_if<Arc>(&f))
                if (!a->exact()) return false;
    return true;
}

namespace {

// ---- arc algebra on the lift [0,2), instantiated at Rational and Real ----

template <typename Num>
struct ArcT {
    Num lo, len;  // [lo, lo+len), 0 <= lo < 1, 0 <= len <= 1
};

template <typename Num>
Num num_frac(const Num& x);

template <>
Rational num_frac<Rational>(const Rational& x) { return rational_frac(x); }

template <>
Real num_frac<Real>(const Real& x) { return frac(x); }

// length of [a, a+la) /\ [b+s, b+s+lb) on the circle, summed over lifts
template <typename Num>
Num arc_overlap(const ArcT<Num>& A, const ArcT<Num>& B) {
    Num total(0);
    for (int s = -1; s <= 1; ++s) {
        Num lo = std::max(A.lo, Num(B.lo + s));
        Num hi = std::min(Num(A.lo + A.len), Num(B.lo + B.len + s));
        if (hi > lo) total += hi - lo;
    }
    return total;
}

template <typename Num>
std::vector<ArcT<Num>> arc_intersect(const ArcT<Num>& A, const ArcT<Num>& B) {
    std::vector<ArcT<Num>> out;
    for (int s = -1; s <= 1; ++s) {
        Num lo = std::max(A.lo, Num(B.lo + s));
        Num hi = std::min(Num(A.lo + A.len), Num(B.lo + B.len + s));
        if (hi > lo) out.push_back(ArcT<Num>{num_frac<Num>(lo), hi - lo});
    }
    return out;
}

template <typename Num>
std::vector<ArcT<Num>> arc_subtract(const ArcT<Num>& A, const ArcT<Num>& B) {
    if (B.len >= 1) return {};
    if (!(B.len > 0)) return {A};
    ArcT<Num> comp{num_frac<Num>(B.lo + B.len), Num(1) - B.len};
    return arc_intersect(A, comp);
}

// A torus-axis factor is a disjoint union of arcs; a cyclic factor a sorted
// subset of Z_k.
template <typename Num>
using AxisFactor = std::variant<std::vector<ArcT<Num>>, std::vector<std::int64_t>>;

template <typename Num>
struct BoxT {
    std::vector<AxisFactor<Num>> factors;
};

template <typename Num>
AxisFactor<Num> axis_subtract(const AxisFactor<Num>& A, const AxisFactor<Num>& B) {
    if (const auto* arcsA = std::get_if<std::vector<ArcT<Num>>>(&A)) {
        const auto& arcsB = std::get<std::vector<ArcT<Num>>>(B);
        std::vector<ArcT<Num>> pieces = *arcsA;
        for (const ArcT<Num>& b : arcsB) {
            std::vector<ArcT<Num>> next;
            for (const ArcT<Num>& a : pieces) {
                auto sub = arc_subtract(a, b);
                next.insert(next.end(), sub.begin(), sub.end());
            }
            pieces = std::move(next);
        }
        return pieces;
    }
    const auto& sa = std::get<std::vector<std::int64_t>>(A);
    const auto& sb = std::get<std::vector<std::int64_t>>(B);
    std::vector<std::int64_t> out;
    std::set_difference(sa.begin(), sa.end(), sb.begin(), sb.end(), std::back_inserter(out));
    return out;
}

template <typename Num>
AxisFactor<Num> axis_intersect(const AxisFactor<Num>& A, const AxisFactor<Num>& B) {
    if (const auto* arcsA = std::get_if<std::vector<ArcT<Num>>>(&A)) {
        const auto& arcsB = std::get<std::vector<ArcT<Num>>>(B);
        std::vector<ArcT<Num>> out;
        for (const ArcT<Num>& a : *arcsA)
            for (const ArcT<Num>& b : arcsB) {
                auto inter = arc_intersect(a, b);
                out.insert(out.end(), inter.begin(), inter.end());
            }
        return out;
    }
    const auto& sa = std::get<std::vector<std::int64_t>>(A);
    const auto& sb = std::get<std::vector<std::int64_t>>(B);
    std::vector<std::int64_t> out;
    std::set_intersection(sa.begin(), sa.end(), sb.begin(), sb.end(), std::back_inserter(out));
    return out;
}

template <typename Num>
bool axis_empty(const AxisFactor<Num>& f) {
    if (const auto* arcs = std::get_if<std::vector<ArcT<Num>>>(&f)) {
        for (const auto& a : *arcs)
            if (a.len > 0) return false;
        return true;
    }
    return std::get<std::vector<std::int64_t>>(f).empty();
}

// A \ B as a disjoint list of boxes, via the telescoping decomposition over axes.
template <typename Num>
std::vector<BoxT<Num>> box_subtract(const BoxT<Num>& A, const BoxT<Num>& B) {
    std::vector<BoxT<Num>> out;
    BoxT<Num> current = A;
    for (std::size_t i = 0; i < A.factors.size(); ++i) {
        AxisFactor<Num> diff = axis_subtract(current.factors[i], B.factors[i]);
        if (!axis_empty(diff)) {
            BoxT<Num> piece = current;
            piece.factors[i] = std::move(diff);
            out.push_back(std::move(piece));
        }
        AxisFactor<Num> inter = axis_intersect(current.factors[i], B.factors[i]);
        if (axis_empty(inter)) return out;
        current.factors[i] = std::move(inter);
    }
    return out;  // current is now A /\ B and is dropped
}

template <typename Num>
std::vector<BoxT<Num>> disjointify(const std::vector<BoxT<Num>>& boxes) {
    std::vector<BoxT<Num>> out;
    for (const BoxT<Num>& b : boxes) {
        std::vector<BoxT<Num>> pieces{b};
        for (const BoxT<Num>& existing : out) {
            std::vector<BoxT<Num>> next;
            for (const BoxT<Num>& p : pieces) {
                auto sub = box_subtract(p, existing);
                next.insert(next.end(), sub.begin(), sub.end());
            }
            pieces = std::move(next);
            if (pieces.empty()) break;
        }
        out.insert(out.end(), pieces.begin(), pieces.end());
    }
    return out;
}

struct AxisInfo {
    bool cyclic = false;
    std::int64_t k = 0;
    std::int64_t cyc_shift = 0;
};

std::vector<AxisInfo> axis_info(const RotationSystem& sys, std::int64_t n) {
    std::vector<AxisInfo> out;
    for (const Axis& ax : sys.axes) {
        AxisInfo s;
        if (const auto* c = std::get_if<CyclicAxis>(&ax)) {
            s.cyclic = true;
            s.k = c->k;
            s.cyc_shift = (((n % c->k) * (c->step % c->k)) % c->k + c->k) % c->k;
        }
        out.push_back(s);
    }
    return out;
}

template <typename Num>
std::vector<Num> torus_shifts(const RotationSystem& sys, std::int64_t n) {
    std::vector<Num> out;
    for (const Axis& ax : sys.axes) {
        if (const auto* t = std::get_if<TorusAxis>(&ax)) {
            if constexpr (std::is_same_v<Num, Rational>) {
                out.push_back(rational_frac(Rational(n) * *t->alpha_exact));
            } else {
                out.push_back(frac(Real(n) * t->alpha.value()));
            }
        } else {
            out.push_back(Num(0));
        }
    }
    return out;
}

std::int64_t cyclic_overlap(const std::vector<std::int64_t>& a,
                            const std::vector<std::int64_t>& b, std::int64_t shift,
                            std::int64_t k) {
    std::int64_t count = 0;
    for (std::int64_t x : b) {
        std::int64_t y = ((x + shift) % k + k) % k;
        if (std::binary_search(a.begin(), a.end(), y)) ++count;
    }
    return count;
}

// mu(A /\ T^n B) for disjoint boxes A, B
template <typename Num>
Num box_pair_overlap(const BoxT<Num>& A, const BoxT<Num>& B, const std::vector<AxisInfo>& info,
                     const std::vector<Num>& shift) {
    Num prod(1);
    for (std::size_t i = 0; i < A.factors.size(); ++i) {
        if (info[i].cyclic) {
            const auto& sa = std::get<std::vector<std::int64_t>>(A.factors[i]);
            const auto& sb = std::get<std::vector<std::int64_t>>(B.factors[i]);
            std::int64_t c = cyclic_overlap(sa, sb, info[i].cyc_shift, info[i].k);
            if (c == 0) return Num(0);
            prod *= Num(c) / Num(info[i].k);
        } else {
            const auto& arcsA = std::get<std::vector<ArcT<Num>>>(A.factors[i]);
            const auto& arcsB = std::get<std::vector<ArcT<Num>>>(B.factors[i]);
            Num len(0);
            for (const ArcT<Num>& a : arcsA)
                for (ArcT<Num> b : arcsB) {
                    b.lo = num_frac<Num>(b.lo + shift[i]);
                    len += arc_overlap(a, b);
                }
            if (!(len > 0)) return Num(0);
            prod *= len;
        }
    }
    return prod;
}

template <typename Num>
Num box_volume(const BoxT<Num>& b, const std::vector<AxisInfo>& info) {
    Num prod(1);
    for (std::size_t i = 0; i < b.factors.size(); ++i) {
        if (info[i].cyclic) {
            const auto& s = std::get<std::vector<std::int64_t>>(b.factors[i]);
            prod *= Num(static_cast<std::int64_t>(s.size())) / Num(info[i].k);
        } else {
            Num len(0);
            for (const auto& a : std::get<std::vector<ArcT<Num>>>(b.factors[i])) len += a.len;
            prod *= len;
        }
    }
    return prod;
}

template <typename Num>
std::vector<BoxT<Num>> lift_boxes(const BoxSet& d) {
    std::vector<BoxT<Num>> out;
    for (const Box& b : d.boxes) {
        BoxT<Num> nb;
        for (const BoxFactor& f : b.factors) {
            if (const auto* arc = std::get_if<Arc>(&f)) {
                if constexpr (std::is_same_v<Num, Rational>) {
                    nb.factors.emplace_back(
                        std::vector<ArcT<Rational>>{{*arc->lo_exact, *arc->len_exact}});
                } else {
                    nb.factors.emplace_back(std::vector<ArcT<Real>>{{arc->lo, arc->len}});
                }
            } else {
                nb.factors.emplace_back(std::get<CyclicSubset>(f).elems);
            }
        }
        out.push_back(std::move(nb));
    }
    return out;
}

template <typename Num>
Num measure_impl(const RotationSystem& sys, const BoxSet& d) {
    auto boxes = disjointify(lift_boxes<Num>(d));
    auto info = axis_info(sys, 0);
    Num total(0);
    for (const auto& b : boxes) total += box_volume(b, info);
    return total;
}

template <typename Num>
Num intersection_impl(const RotationSystem& sys, const BoxSet& d, std::int64_t n) {
    auto boxes = disjointify(lift_boxes<Num>(d));
    auto info = axis_info(sys, n);
    auto shifts = torus_shifts<Num>(sys, n);
    Num total(0);
    for (const auto& a : boxes)
        for (const auto& b : boxes) total += box_pair_overlap(a, b, info, shifts);
    return total;
}

}  // namespace

MeasureValue measure(const RotationSystem& sys, const BoxSet& d) {
    d.validate(sys);
    MeasureValue mv;
    if (d.exact()) {
        Rational total = measure_impl<Rational>(sys, d);
        mv.exact = total;
        mv.value = to_real(total);
    } else {
        mv.value = measure_impl<Real>(sys, d);
    }
    return mv;
}

MeasureValue intersection_measure(const RotationSystem& sys, const BoxSet& d, std::int64_t n) {
    d.validate(sys);
    MeasureValue mv;
    if (d.exact() && sys.exact()) {
        Rational total = intersection_impl<Rational>(sys, d, n);
        mv.exact = total;
        mv.value = to_real(total);
    } else {
        mv.value = intersection_impl<Real>(sys, d, n);
    }
    return mv;
}

ReturnSet return_set(const RotationSystem& sys, const BoxSet& d, const Rational& c, Window w,
                     const Tol& tol, int workers) {
    if (c < 0) throw ValidationError("return set threshold must satisfy c >= 0");
    w.validate();
    d.validate(sys);

    ReturnSet rs;
    rs.c = c;
    rs.window = w;
    rs.members.window = w;
    rs.members.source = "return-set";
    const bool exact_path = d.exact() && sys.exact();
    const Real c_real = to_real(c);
    rs.values.resize(w.size());

    // the disjointified geometry does not depend on n; values can be computed
    // in parallel chunks
    Classified cls = parallel_classify(w, workers, [&](std::int64_t n) {
        MeasureValue mv = intersection_measure(sys, d, n);
        Trilean verdict;
        if (exact_path) verdict = *mv.exact > c ? Trilean::True : Trilean::False;
        else verdict = lt_guarded(c_real, mv.value, tol);
        rs.values[n - w.lo] = {n, std::move(mv)};
        return verdict;
    });
    rs.members.members = std::move(cls.members);
    rs.ambiguous = std::move(cls.ambiguous);
    return rs;
}

BoxSet bohr_return_box(std::size_t d, const Rational& eta) {
    if (d == 0) throw ValidationError("dimension must be positive");
    if (eta <= 0 || eta > 1) throw ValidationError("eta must lie in (0, 1]");
    Box b;
    for (std::size_t j = 0; j < d; ++j) b.factors.emplace_back(symmetric_arc(eta / 4));
    BoxSet set;
    set.boxes.push_back(std::move(b));
    return set;
}

AuraReport aura_demo(const WindowedSet& s, const WindowedSet& e, const RotationSystem& sys,
                     const BoxSet& d, Window w, const Tol& tol) {
    s.validate();
    e.validate();
    AuraReport rep;
    ReturnSet r0 = return_set(sys, d, Rational(0), w, tol);
    rep.r0 = r0.members;
    rep.members.window = w;
    rep.members.source = "aura";
    for (std::int64_t x : s.members) {
        if (!w.contains(x)) continue;
        for (std::int64_t m : e.members) {
            std::int64_t n = x - m;
            if (r0.members.contains(n)) {
                rep.members.members.push_back(x);
                rep.witnesses.push_back({x, m, n});
                break;
            }
        }
    }
    return rep;
}

DensityReport upper_banach_density(const WindowedSet& a,
                                   const std::vector<std::int64_t>& block_lengths) {
    a.validate();
    DensityReport rep;
    rep.best = 0;
    for (std::int64_t L : block_lengths) {
        if (L < 1 || L > a.window.size()) {
            rep.skipped.push_back(L);
            continue;
        }
        DensityEstimate est;
        est.block = L;
        const auto& m = a.members;
        std::int64_t best_count = -1, best_start = 0;
        for (std::int64_t start = a.window.lo - 1; start + L <= a.window.hi; ++start) {
            auto lo_it = std::lower_bound(m.begin(), m.end(), start + 1);
            auto hi_it = std::upper_bound(m.begin(), m.end(), start + L);
            std::int64_t count = hi_it - lo_it;
            if (count > best_count) {
                best_count = count;
                best_start = start;
            }
        }
        est.best_count = best_count;
        est.best_start = best_start;
        est.estimate = Rational(best_count, L);
        rep.per_length.push_back(est);
        rep.best = est.estimate;
    }
    return rep;
}

std::optional<DeltaCounterexample> delta_recurrence_falsify(
    const WindowedSet& s, const Rational& delta, const std::vector<WindowedSet>& corpus) {
    s.validate();
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        const WindowedSet& a = corpus[i];
        a.validate();
        Rational density(static_cast<std::int64_t>(a.members.size()), a.window.size());
        if (!(density > delta)) continue;
        WindowedSet diff = difference_set(a);
        if (intersect_members(s.members, diff.members).empty()) {
            return DeltaCounterexample{i, density, a};
        }
    }
    return std::nullopt;
}

std::vector<WindowedSet> make_structured_corpus(Window w, std::uint64_t seed) {
    w.validate();
    std::vector<WindowedSet> corpus;
    auto push = [&](WindowedSet s) { corpus.push_back(std::move(s)); };

    for (std::int64_t q : {2, 3, 4}) {
        for (std::int64_t a = 0; a < q; ++a) {
            push(WindowedSet::from_predicate(
                w, [&](std::int64_t n) { return ((n - a) % q + q) % q == 0; },
                "ap(" + std::to_string(a) + "," + std::to_string(q) + ")"));
        }
    }
    {
        BohrSpec spec{Frequencies::from_rationals({Rational(1, 5)}), Rational(1, 4)};
        WindowedSet b = bohr_enumerate(spec, w).set;
        b.source = "bohr(1/5,1/4)";
        push(std::move(b));
    }
    {
        BohrSpec spec{Frequencies::from_vector(make_independent_frequencies(1)), Rational(1, 3)};
        WindowedSet b = bohr_enumerate(spec, w).set;
        b.source = "bohr(sqrt2,1/3)";
        push(std::move(b));
    }
    std::mt19937_64 rng(seed);
    for (int trial = 0; trial < 3; ++trial) {
        WindowedSet s;
        s.window = w;
        s.source = "random-dense-" + std::to_string(trial);
        for (std::int64_t n = w.lo; n <= w.hi; ++n)
            if (rng() % 2 == 0) s.members.push_back(n);
        push(std::move(s));
    }
    for (std::int64_t p : {7, 11}) {
        std::vector<bool> residue(p, false);
        for (std::int64_t x = 0; x < p; ++x) residue[(x * x) % p] = true;
        push(WindowedSet::from_predicate(
            w, [&](std::int64_t n) { return residue[((n % p) + p) % p]; },
            "quadratic-residues-mod-" + std::to_string(p)));
    }
    return corpus;
}

}  // namespace recur
