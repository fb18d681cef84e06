#include "recur/ks.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>
#include <sstream>

namespace recur {

namespace {

Real arc_center(const Arc& a) { return frac(a.lo + a.len / 2); }

// smallest lift of x into [base, base+1)
Real lift_above(const Real& x, const Real& base) {
    Real v = frac(x);
    while (v < base) v += 1;
    return v;
}

bool arc_contains_arc(const Arc& outer, const Arc& inner) {
    // closed containment on the lift
    Real o_lo = frac(outer.lo);
    Real i_lo = lift_above(inner.lo, o_lo);
    return i_lo + inner.len <= o_lo + outer.len;
}

bool arcs_disjoint(const Arc& a, const Arc& b) {
    Real a_lo = frac(a.lo);
    Real b_lo = frac(b.lo);
    for (int s = -1; s <= 1; ++s) {
        Real lo = std::max(a_lo, Real(b_lo + s));
        Real hi = std::min(Real(a_lo + a.len), Real(b_lo + b.len + s));
        if (hi > lo) return false;
    }
    return true;
}

}  // namespace

void IntervalFamily::validate(const IntervalFamily* prev) const {
    if (intervals.empty()) throw InvariantViolation("interval family is empty");
    if (parent.size() != intervals.size())
        throw InvariantViolation("interval family parent map size mismatch");
    Real max_len = 0;
    for (const Arc& a : intervals)
        if (a.len > max_len) max_len = a.len;
    if (max_len > max_diameter)
        throw InvariantViolation("recorded max diameter below actual");
    for (std::size_t i = 0; i < intervals.size(); ++i)
        for (std::size_t j = i + 1; j < intervals.size(); ++j)
            if (!arcs_disjoint(intervals[i], intervals[j]))
                throw InvariantViolation("stage intervals must be mutually disjoint");
    if (!prev) return;

    // (C1) nesting
    for (std::size_t i = 0; i < intervals.size(); ++i) {
        std::int64_t p = parent[i];
        if (p < 0 || p >= static_cast<std::int64_t>(prev->intervals.size()))
            throw InvariantViolation("parent index out of range");
        if (!arc_contains_arc(prev->intervals[p], intervals[i]))
            throw InvariantViolation("child interval escapes its parent");
    }
    // (C2) uniform branching
    std::vector<std::int64_t> counts(prev->intervals.size(), 0);
    for (std::int64_t p : parent) ++counts[p];
    for (std::int64_t c : counts)
        if (c != branching)
            throw InvariantViolation("each parent must contain exactly b_k children");
    // (C3) strict decrease
    if (!(max_diameter < prev->max_diameter))
        throw InvariantViolation("max diameter must strictly decrease");
}

Rational DiscreteMeasure::total_mass() const {
    Rational total = 0;
    for (const Rational& w : weights) total += w;
    return total;
}

void DiscreteMeasure::validate() const {
    if (atoms.size() != weights.size())
        throw InvariantViolation("measure atoms/weights size mismatch");
    for (const Rational& w : weights)
        if (!(w > 0)) throw InvariantViolation("measure weights must be positive");
    if (total_mass() != 1) throw InvariantViolation("measure mass must equal 1 exactly");
}

DiscreteMeasure stage_measure(const IntervalFamily& fam) {
    if (fam.intervals.empty()) throw ValidationError("cannot build a measure on an empty family");
    DiscreteMeasure mu;
    const std::int64_t n = static_cast<std::int64_t>(fam.intervals.size());
    for (const Arc& a : fam.intervals) {
        mu.atoms.emplace_back(arc_center(a));
        mu.weights.emplace_back(Rational(1, n));
    }
    mu.validate();
    return mu;
}

Rational measure_of_arc(const DiscreteMeasure& mu, const Arc& arc) {
    Rational mass = 0;
    Real lo = frac(arc.lo);
    for (std::size_t i = 0; i < mu.atoms.size(); ++i) {
        Real v = lift_above(mu.atoms[i].value(), lo);
        if (v < lo + arc.len || v == lo + arc.len) mass += mu.weights[i];
    }
    return mass;
}

Real l1_char_distance(const DiscreteMeasure& mu, const std::vector<TorusPoint>& f_phases,
                      std::int64_t n) {
    if (f_phases.size() != mu.atoms.size())
        throw ValidationError("l1_char_distance: phase per atom required");
    Real total = 0;
    for (std::size_t i = 0; i < mu.atoms.size(); ++i) {
        TorusPoint diff = mu.atoms[i].scaled(n) - f_phases[i];
        total += to_real(mu.weights[i]) * char_distance(diff);
    }
    return total;
}

Real rigidity_integral(const DiscreteMeasure& mu, std::int64_t s, std::int64_t m) {
    Real total = 0;
    for (std::size_t i = 0; i < mu.atoms.size(); ++i)
        total += to_real(mu.weights[i]) * char_distance(mu.atoms[i].scaled(s - m));
    return total;
}

std::vector<ProfileEntry> rigidity_profile(const std::vector<std::pair<std::int64_t, int>>& seq,
                                           const DiscreteMeasure& mu, std::int64_t m,
                                           const Tol& tol) {
    std::vector<ProfileEntry> out;
    for (const auto& [s, stage] : seq) {
        ProfileEntry e;
        e.s = s;
        e.origin_stage = stage;
        e.value = rigidity_integral(mu, s, m);
        e.bound = stage >= 1 ? Real(3) / stage : Real(3);
        e.within_bound = is_true(lt_guarded(e.value, e.bound, tol));
        out.push_back(std::move(e));
    }
    return out;
}

std::vector<IntervalFamily> build_cantor(const std::vector<std::int64_t>& branching,
                                         const Arc& start) {
    if (!(start.len > 0)) throw ValidationError("start interval must have positive length");
    std::vector<IntervalFamily> fams;
    IntervalFamily f0;
    f0.stage = 0;
    f0.intervals.push_back(start);
    f0.parent.push_back(-1);
    f0.branching = 1;
    f0.max_diameter = start.len;
    fams.push_back(std::move(f0));

    for (std::size_t s = 0; s < branching.size(); ++s) {
        const std::int64_t b = branching[s];
        if (b < 2) throw ValidationError("branching factors must be >= 2 after stage 0");
        const IntervalFamily& prev = fams.back();
        IntervalFamily next;
        next.stage = prev.stage + 1;
        next.branching = b;
        next.max_diameter = 0;
        for (std::size_t p = 0; p < prev.intervals.size(); ++p) {
            const Arc& pa = prev.intervals[p];
            const std::int64_t slots = 2 * b - 1;
            if (pa.exact()) {
                Rational slot = *pa.len_exact / slots;
                if (!(slot > 0))
                    throw ValidationError("interval too narrow for requested branching");
                for (std::int64_t c = 0; c < b; ++c) {
                    Rational lo = *pa.lo_exact + Rational(2 * c) * slot;
                    next.intervals.push_back(Arc::from_rational(lo, slot));
                    next.parent.push_back(static_cast<std::int64_t>(p));
                }
            } else {
                Real slot = pa.len / slots;
                if (!(slot > 0))
                    throw ValidationError(
                        "interval too narrow for requested branching at current precision");
                for (std::int64_t c = 0; c < b; ++c) {
                    Real lo = pa.lo + Real(2 * c) * slot;
                    next.intervals.push_back(Arc::from_real(lo, slot));
                    next.parent.push_back(static_cast<std::int64_t>(p));
                }
            }
            if (next.intervals.back().len > next.max_diameter)
                next.max_diameter = next.intervals.back().len;
        }
        next.validate(&prev);
        fams.push_back(std::move(next));
    }
    return fams;
}

namespace {

struct CandidateTable {
    std::vector<std::int64_t> members;    // ambient-true candidates, ascending
    std::vector<std::int64_t> ambiguous;  // ambient-ambiguous
    // per member x point: bitmask over root indices of definitive passes /
    // ambiguous comparisons of ||n x_i - l/k|| against the chord threshold
    std::vector<std::uint32_t> pass;
    std::vector<std::uint32_t> amb;
    std::size_t points = 0;

    std::uint32_t pass_mask(std::size_t c, std::size_t i) const { return pass[c * points + i]; }
    std::uint32_t amb_mask(std::size_t c, std::size_t i) const { return amb[c * points + i]; }
};

CandidateTable build_candidates(const SetSpec& ambient, Window w, int k,
                                const FrequencyVector& points, long threshold, const Tol& tol) {
    CandidateTable table;
    table.points = points.dim();
    Enumeration amb_enum = ambient.enumerate(w, tol);
    table.members = std::move(amb_enum.set.members);
    table.ambiguous = std::move(amb_enum.ambiguous);
    if (threshold <= 0) return table;  // masks not needed, count condition vacuous

    NormThreshold th = chord_threshold(Real(1) / (2 * k), tol);
    table.pass.assign(table.members.size() * table.points, 0);
    table.amb.assign(table.members.size() * table.points, 0);
    for (std::size_t c = 0; c < table.members.size(); ++c) {
        const std::int64_t n = table.members[c];
        for (std::size_t i = 0; i < table.points; ++i) {
            Real nx = frac(Real(n) * points.entries[i].value());
            for (std::int64_t l = 0; l < k; ++l) {
                TorusPoint diff = TorusPoint(nx) - TorusPoint(Rational(l, k));
                Trilean t = norm_within(torus_norm(diff), th);
                if (is_true(t)) table.pass[c * table.points + i] |= 1u << l;
                else if (is_ambiguous(t)) table.amb[c * table.points + i] |= 1u << l;
            }
        }
    }
    return table;
}

// candidate indices ordered by |n| ascending, positive before negative
std::vector<std::size_t> abs_order(const std::vector<std::int64_t>& ns) {
    std::vector<std::size_t> idx(ns.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        std::int64_t xa = std::llabs(ns[a]), xb = std::llabs(ns[b]);
        if (xa != xb) return xa < xb;
        return ns[a] > ns[b];
    });
    return idx;
}

std::int64_t checked_pow(std::int64_t base, std::int64_t exp, std::int64_t cap) {
    std::int64_t v = 1;
    for (std::int64_t i = 0; i < exp; ++i) {
        if (v > cap / base) return cap + 1;
        v *= base;
    }
    return v;
}

}  // namespace

PendingStage begin_stage(const IntervalFamily& prev, int k, const SetSpec& ambient, Window w,
                         const KsCaps& caps, const std::vector<std::int64_t>& force_targets,
                         const Tol& tol) {
    if (k < 1) throw ValidationError("stage index must be >= 1");
    w.validate();
    prev.validate(nullptr);
    const std::int64_t n_prev = static_cast<std::int64_t>(prev.size());
    if (n_prev > caps.max_points)
        throw ResourceCapError("|K_k| cap is below the parent interval count");
    const std::int64_t b =
        std::max<std::int64_t>(1, std::min(caps.branching, caps.max_points / n_prev));

    // disjoint open sub-intervals: b segments per parent, middle half of each
    std::vector<OpenInterval> slots;
    std::vector<std::int64_t> slot_parent;
    for (std::int64_t p = 0; p < n_prev; ++p) {
        const Arc& pa = prev.intervals[p];
        for (std::int64_t c = 0; c < b; ++c) {
            Real seg_lo = frac(pa.lo) + pa.len * c / b;
            Real seg_len = pa.len / b;
            slots.push_back(OpenInterval{seg_lo + seg_len / 4, seg_lo + 3 * seg_len / 4});
            slot_parent.push_back(p);
        }
    }

    PendingStage pending;
    pending.parent_family = prev;
    StageRecord& rec = pending.record;
    rec.k = k;
    // nested stages confine the points to intervals far narrower than the
    // default certificate tolerance; the scan here only rules out exact
    // relations and duplicates
    rec.points = make_independent_frequencies(slots.size(), slots, 0, 0, 0,
                                              Real(std::ldexp(1.0, -100)));
    rec.point_parent = slot_parent;
    rec.lambda_order = k;

    const std::int64_t points = static_cast<std::int64_t>(rec.points.dim());
    const long threshold = ceil_rational(Rational(k - 1, k) * Rational(points));
    CandidateTable table = build_candidates(ambient, w, k, rec.points, threshold, tol);
    const std::vector<std::size_t> order = abs_order(table.members);

    // psi enumeration
    std::vector<PsiAssignment> psis;
    std::set<PsiAssignment> seen;
    auto add_psi = [&](PsiAssignment psi) {
        if (seen.insert(psi).second) psis.push_back(std::move(psi));
    };
    const std::int64_t total_psi = checked_pow(k, points, caps.max_psi);
    if (total_psi <= caps.max_psi) {
        PsiAssignment cur(points, 0);
        while (true) {
            add_psi(cur);
            std::int64_t i = points - 1;
            for (; i >= 0; --i) {
                if (++cur[i] < k) break;
                cur[i] = 0;
            }
            if (i < 0) break;
        }
    } else {
        rec.psi_sampled = true;
        for (std::int64_t m : force_targets) {
            PsiAssignment psi(points);
            for (std::int64_t i = 0; i < points; ++i) {
                Real mx = frac(Real(m) * rec.points.entries[i].value());
                std::int64_t root = static_cast<std::int64_t>(floor(mx * k + Real(1) / 2));
                psi[i] = ((root % k) + k) % k;
            }
            add_psi(std::move(psi));
        }
        std::mt19937_64 rng(caps.seed ^ (0x9e3779b97f4a7c15ULL * (k + 1)));
        while (static_cast<std::int64_t>(psis.size()) < caps.psi_samples) {
            PsiAssignment psi(points);
            for (std::int64_t i = 0; i < points; ++i)
                psi[i] = static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(k));
            add_psi(std::move(psi));
        }
    }

    // per-psi membership, counts, samples, selections
    std::set<std::int64_t> union_sel;
    for (const PsiAssignment& psi : psis) {
        PsiRecord pr;
        pr.psi = psi;
        auto classify = [&](std::size_t c) -> Trilean {
            if (threshold <= 0) return Trilean::True;
            long ct = 0, ca = 0;
            for (std::int64_t i = 0; i < points; ++i) {
                std::uint32_t bit = 1u << psi[i];
                if (table.pass_mask(c, i) & bit) ++ct;
                else if (table.amb_mask(c, i) & bit) ++ca;
            }
            return count_meets_threshold(ct, ca, threshold);
        };
        for (std::size_t c = 0; c < table.members.size(); ++c) {
            Trilean t = classify(c);
            if (is_true(t)) {
                ++pr.count_true;
                if (static_cast<std::int64_t>(pr.sample.size()) < caps.sample_cap)
                    pr.sample.push_back(table.members[c]);
            } else if (is_ambiguous(t)) {
                ++pr.count_ambiguous;
            }
        }
        pr.count_ambiguous += static_cast<std::int64_t>(table.ambiguous.size());
        for (std::size_t pos : order) {
            if (static_cast<std::int64_t>(pr.selection.size()) >= caps.select_cap) break;
            if (is_true(classify(pos))) pr.selection.push_back(table.members[pos]);
        }
        pr.gap = pr.selection.empty();
        for (std::int64_t n : pr.selection) union_sel.insert(n);
        rec.psi_table.push_back(std::move(pr));
    }
    rec.selection_union.assign(union_sel.begin(), union_sel.end());
    return pending;
}

IntervalFamily finalize_stage(PendingStage& pending, const std::vector<std::int64_t>& extra_pins,
                              const Tol& tol) {
    StageRecord& rec = pending.record;
    const IntervalFamily& prev = pending.parent_family;
    const int k = rec.k;

    std::int64_t max_n = 1;
    for (std::int64_t n : rec.selection_union) max_n = std::max<std::int64_t>(max_n, std::llabs(n));
    for (std::int64_t n : extra_pins) max_n = std::max<std::int64_t>(max_n, std::llabs(n));
    rec.max_abs_n = max_n;

    // geometry: distance to parent edges and between neighbors within a parent
    Real r_geom = Real(1);
    std::map<std::int64_t, std::vector<Real>> by_parent;
    for (std::size_t i = 0; i < rec.points.dim(); ++i) {
        const std::int64_t p = rec.point_parent[i];
        const Arc& pa = prev.intervals[p];
        Real base = frac(pa.lo);
        Real pos = lift_above(rec.points.entries[i].value(), base);
        Real d_lo = pos - base;
        Real d_hi = base + pa.len - pos;
        r_geom = std::min(r_geom, std::min(d_lo, d_hi));
        by_parent[p].push_back(pos);
    }
    for (auto& [p, xs] : by_parent) {
        std::sort(xs.begin(), xs.end());
        for (std::size_t i = 1; i < xs.size(); ++i)
            r_geom = std::min(r_geom, Real((xs[i] - xs[i - 1]) / 2));
    }
    r_geom /= 2;

    // shrink: 2 pi max_n r kept a factor 16k below the 1/(2k) budget, so later
    // stages inherit usable slack
    Real r_shrink = Real(1) / (Real(64) * pi_value() * k * k * max_n);
    Real r_diam = Real(1) / (4 * k);
    Real r_c3 = prev.max_diameter / 4;
    Real r = std::min(std::min(r_geom, r_shrink), std::min(r_diam, r_c3));
    if (!(r > 0)) throw InvariantViolation("shrink radius collapsed to zero");
    rec.shrink_radius = r;

    IntervalFamily fam;
    fam.stage = prev.stage + 1;
    fam.branching = static_cast<std::int64_t>(rec.points.dim() / prev.size());
    fam.max_diameter = 2 * r;
    for (std::size_t i = 0; i < rec.points.dim(); ++i) {
        fam.intervals.push_back(Arc::from_real(rec.points.entries[i].value() - r, 2 * r));
        fam.parent.push_back(rec.point_parent[i]);
    }
    fam.validate(&prev);

    // certificate: 2 pi |n| r < 1/(2k) for every pinned integer
    const Real budget = Real(1) / (2 * k);
    for (std::int64_t n : rec.selection_union)
        if (!is_true(lt_guarded(2 * pi_value() * std::llabs(n) * r, budget, tol)))
            throw InvariantViolation("shrink certificate failed for a selected integer");
    for (std::int64_t n : extra_pins)
        if (!is_true(lt_guarded(2 * pi_value() * std::llabs(n) * r, budget, tol)))
            throw InvariantViolation("shrink certificate failed for a pinned integer");
    return fam;
}

std::pair<StageRecord, IntervalFamily> refine_stage(const IntervalFamily& prev, int k,
                                                    const SetSpec& ambient, Window w,
                                                    const KsCaps& caps, const Tol& tol) {
    PendingStage pending = begin_stage(prev, k, ambient, w, caps, {0}, tol);
    IntervalFamily fam = finalize_stage(pending, {}, tol);
    return {std::move(pending.record), std::move(fam)};
}

Enumeration q_set(const IntervalFamily& fam, int k, const std::vector<std::int64_t>& f_roots,
                  const SetSpec& s, Window w, const Tol& tol) {
    if (k < 1) throw ValidationError("q_set requires k >= 1");
    if (f_roots.size() != fam.size())
        throw ValidationError("q_set needs one root per interval");
    w.validate();
    const std::int64_t n_int = static_cast<std::int64_t>(fam.size());
    const long threshold = ceil_rational(Rational(k - 1, k) * Rational(n_int));
    const Real one_over_k = Real(1) / k;
    const Real two_pi = 2 * pi_value();

    Enumeration e;
    e.set.window = w;
    e.set.source = "q-set";
    for (std::int64_t n = w.lo; n <= w.hi; ++n) {
        Trilean in_s = s.contains(n, tol);
        if (is_false(in_s)) continue;
        Trilean cond = Trilean::True;
        if (threshold > 0) {
            long ct = 0, ca = 0;
            for (std::size_t i = 0; i < fam.size(); ++i) {
                const Arc& arc = fam.intervals[i];
                Real radius = arc.len / 2;
                TorusPoint center(arc_center(arc));
                TorusPoint diff = center.scaled(n) - TorusPoint(Rational(f_roots[i], k));
                Real sup_bound = char_distance(diff) + two_pi * std::llabs(n) * radius;
                Trilean t = lt_guarded(sup_bound, one_over_k, tol);
                if (is_true(t)) ++ct;
                else if (is_ambiguous(t)) ++ca;
            }
            cond = count_meets_threshold(ct, ca, threshold);
        }
        // combine with ambient membership
        Trilean overall;
        if (is_false(cond)) overall = Trilean::False;
        else if (is_true(cond) && is_true(in_s)) overall = Trilean::True;
        else overall = Trilean::Ambiguous;
        if (is_true(overall)) e.set.members.push_back(n);
        else if (is_ambiguous(overall)) e.ambiguous.push_back(n);
    }
    return e;
}

std::vector<std::int64_t> spiral_targets(std::size_t count) {
    std::vector<std::int64_t> out;
    std::int64_t v = 0;
    while (out.size() < count) {
        out.push_back(v);
        if (out.size() >= count) break;
        if (v > 0) out.push_back(-v);
        ++v;
    }
    out.resize(count);
    return out;
}

PipelineReport build_ks_pipeline(const SetSpec& s, const std::vector<std::int64_t>& targets,
                                 int stages, Window w, const KsCaps& caps, const Tol& tol) {
    if (stages < 1) throw ValidationError("pipeline needs at least one stage");
    if (static_cast<int>(targets.size()) < stages)
        throw ValidationError("pipeline needs one target per stage");
    w.validate();

    PipelineReport report;
    report.window = w;

    IntervalFamily fam;
    fam.stage = 0;
    fam.intervals.push_back(Arc::from_rational(Rational(0), Rational(1)));
    fam.parent.push_back(-1);
    fam.branching = 1;
    fam.max_diameter = Real(1);

    SetSpec ambient = s;
    for (int k = 1; k <= stages; ++k) {
        const std::int64_t m_k = targets[k - 1];
        PipelineStage stage;
        stage.target_m = m_k;
        stage.ambient = ambient;

        PendingStage pending = begin_stage(fam, k, ambient, w, caps, {0, m_k}, tol);

        // expanding selection against sigma_k (atoms are the stage points and
        // do not depend on the shrink radius)
        DiscreteMeasure sigma;
        {
            const std::int64_t np = static_cast<std::int64_t>(pending.record.points.dim());
            for (std::size_t i = 0; i < pending.record.points.dim(); ++i) {
                sigma.atoms.push_back(pending.record.points.entries[i]);
                sigma.weights.emplace_back(Rational(1, np));
            }
        }
        Enumeration ambient_members = ambient.enumerate(w, tol);
        std::vector<std::pair<std::int64_t, Real>> values;
        values.reserve(ambient_members.set.members.size());
        for (std::int64_t n : ambient_members.set.members)
            values.emplace_back(n, rigidity_integral(sigma, n, m_k));

        std::set<std::int64_t> s_next;
        for (std::int64_t r = 1; r <= caps.expanding_r_cap; ++r) {
            const Real level = Real(1) / r;
            std::vector<std::pair<std::int64_t, Real>> hits;
            for (const auto& [n, v] : values)
                if (is_true(lt_guarded(v, level, tol))) hits.emplace_back(n, v);
            std::sort(hits.begin(), hits.end(), [](const auto& a, const auto& b) {
                std::int64_t xa = std::llabs(a.first), xb = std::llabs(b.first);
                if (xa != xb) return xa < xb;
                return a.first > b.first;
            });
            if (static_cast<std::int64_t>(hits.size()) > caps.expanding_cap)
                hits.resize(caps.expanding_cap);
            std::vector<std::int64_t> er;
            for (const auto& [n, v] : hits) {
                er.push_back(n);
                s_next.insert(n);
            }
            stage.expanding_selections.push_back(std::move(er));
        }
        stage.ambient_next.assign(s_next.begin(), s_next.end());
        stage.gap = stage.ambient_next.empty();
        if (stage.gap) {
            std::ostringstream os;
            os << "stage " << k << ": expanding selection empty for target " << m_k;
            report.gaps.push_back(os.str());
        }
        for (const PsiRecord& pr : pending.record.psi_table)
            if (pr.gap) {
                std::ostringstream os;
                os << "stage " << k << ": empty selection for a psi assignment";
                report.gaps.push_back(os.str());
                break;
            }

        std::vector<std::int64_t> pins = stage.ambient_next;
        pins.push_back(m_k);
        IntervalFamily next = finalize_stage(pending, pins, tol);

        stage.record = std::move(pending.record);
        stage.family = next;
        stage.sigma = stage_measure(next);
        report.stages.push_back(std::move(stage));

        fam = std::move(next);
        ambient = SetSpec::explicit_list(report.stages.back().ambient_next);
    }

    // diagonal selection: smallest elements of each ambient_next
    std::map<std::int64_t, int> origin;  // deepest stage wins
    for (int k = 1; k <= stages; ++k) {
        std::vector<std::int64_t> picks = report.stages[k - 1].ambient_next;
        std::sort(picks.begin(), picks.end(), [](std::int64_t a, std::int64_t b) {
            std::int64_t xa = std::llabs(a), xb = std::llabs(b);
            if (xa != xb) return xa < xb;
            return a > b;
        });
        if (static_cast<std::int64_t>(picks.size()) > caps.expanding_cap)
            picks.resize(caps.expanding_cap);
        for (std::int64_t n : picks) origin[n] = k;
    }
    for (const auto& [n, k] : origin) report.diagonal.emplace_back(n, k);

    // m = 0 thread: per-stage selections of the all-zero psi, against the
    // final stage measure
    const DiscreteMeasure& final_sigma = report.stages.back().sigma;
    std::vector<std::pair<std::int64_t, int>> zero_seq;
    for (int k = 1; k <= stages; ++k) {
        const StageRecord& rec = report.stages[k - 1].record;
        for (const PsiRecord& pr : rec.psi_table) {
            bool all_zero = std::all_of(pr.psi.begin(), pr.psi.end(),
                                        [](std::int64_t l) { return l == 0; });
            if (!all_zero) continue;
            for (std::int64_t n : pr.selection) zero_seq.emplace_back(n, k);
            break;
        }
    }
    report.zero_profile = rigidity_profile(zero_seq, final_sigma, 0, tol);
    return report;
}

namespace {

std::size_t ancestor_index(const PipelineReport& report, int from_stage, std::size_t idx,
                           int to_stage) {
    std::size_t cur = idx;
    for (int s = from_stage; s > to_stage; --s) {
        const IntervalFamily& fam = report.stages[s - 1].family;
        cur = static_cast<std::size_t>(fam.parent[cur]);
    }
    return cur;
}

}  // namespace

std::vector<StageBoundCheck> check_stage_bounds(const PipelineReport& report, const Tol& tol) {
    std::vector<StageBoundCheck> out;
    const int stages = static_cast<int>(report.stages.size());
    for (int k = 1; k <= stages; ++k) {
        const StageRecord& rec = report.stages[k - 1].record;
        const Real bound = Real(3) / k;
        for (std::size_t pi = 0; pi < rec.psi_table.size(); ++pi) {
            const PsiRecord& pr = rec.psi_table[pi];
            for (std::int64_t n : pr.selection) {
                for (int kp = k; kp <= stages; ++kp) {
                    const DiscreteMeasure& mu = report.stages[kp - 1].sigma;
                    Real value = 0;
                    for (std::size_t a = 0; a < mu.atoms.size(); ++a) {
                        std::size_t anc = ancestor_index(report, kp, a, k);
                        TorusPoint phase(Rational(pr.psi[anc], rec.lambda_order));
                        TorusPoint diff = mu.atoms[a].scaled(n) - phase;
                        value += to_real(mu.weights[a]) * char_distance(diff);
                    }
                    StageBoundCheck chk;
                    chk.k = k;
                    chk.psi_index = pi;
                    chk.n = n;
                    chk.k_prime = kp;
                    chk.value = value;
                    chk.bound = bound;
                    chk.ok = is_true(lt_guarded(value, bound, tol));
                    out.push_back(std::move(chk));
                }
            }
        }
    }
    return out;
}

}  // namespace recur
