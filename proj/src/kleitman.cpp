#include "recur/kleitman.hpp"

#include <algorithm>
#include <bit>
#include <random>
#include <sstream>

namespace recur {

void KleitmanInstance::validate() const {
    GroupZkd g{k, d};
    if (k < 2 || d < 1) throw ValidationError("Kleitman instance requires k >= 2, d >= 1");
    if (delta <= 0 || delta > 1) throw ValidationError("Kleitman delta must lie in (0, 1]");
    if (radius < 0 || radius > d) throw ValidationError("Kleitman radius must lie in [0, d]");
    if (mode == KleitmanMode::Sampled && trials < 1)
        throw ValidationError("sampled mode needs trials >= 1");
    (void)g;
}

namespace {

// bitmask of U_r(x) over group indices; group size <= 64 in exhaustive mode
std::uint64_t ball_mask(const GroupZkd& g, std::int64_t center, std::int64_t radius) {
    std::uint64_t mask = 0;
    std::vector<std::int64_t> c = g.tuple(center);
    for (std::int64_t y = 0; y < g.size(); ++y) {
        std::vector<std::int64_t> t = g.tuple(y);
        std::int64_t agree = 0;
        for (std::int64_t j = 0; j < g.d; ++j)
            if (t[j] == c[j]) ++agree;
        if (agree >= g.d - radius) mask |= std::uint64_t(1) << y;
    }
    return mask;
}

std::uint64_t diff_mask(const GroupZkd& g, const std::vector<std::int64_t>& subset) {
    std::uint64_t mask = 0;
    for (std::size_t i = 0; i < subset.size(); ++i)
        for (std::size_t j = 0; j < subset.size(); ++j)
            if (i != j) mask |= std::uint64_t(1) << g.sub(subset[i], subset[j]);
    return mask;
}

std::vector<std::int64_t> mask_to_indices(std::uint64_t mask) {
    std::vector<std::int64_t> out;
    for (std::int64_t i = 0; mask; ++i, mask >>= 1)
        if (mask & 1) out.push_back(i);
    return out;
}

}  // namespace

KleitmanVerdict kleitman_check(const KleitmanInstance& inst) {
    inst.validate();
    GroupZkd g{inst.k, inst.d};
    const std::int64_t size = g.size();

    KleitmanVerdict verdict;
    verdict.min_subset_size = ceil_rational(inst.delta * Rational(size));

    if (inst.mode == KleitmanMode::Exhaustive) {
        if (size > inst.group_cap || size > 24)
            throw ResourceCapError(
                "k^d exceeds the exhaustive cap; use sampled mode for this instance");
        std::vector<std::uint64_t> balls(size);
        for (std::int64_t x = 0; x < size; ++x) balls[x] = ball_mask(g, x, inst.radius);

        const std::uint64_t total = std::uint64_t(1) << size;
        for (std::uint64_t mask = 1; mask < total; ++mask) {
            if (std::popcount(mask) < verdict.min_subset_size) continue;
            ++verdict.subsets_checked;
            std::vector<std::int64_t> subset = mask_to_indices(mask);
            std::uint64_t diffs = diff_mask(g, subset);
            for (std::int64_t x = 0; x < size; ++x) {
                ++verdict.pairs_checked;
                if ((diffs & balls[x]) == 0) {
                    verdict.holds = false;
                    verdict.counterexample = KleitmanCounterexample{subset, x};
                    return verdict;
                }
            }
        }
        verdict.holds = true;
        return verdict;
    }

    // sampled mode: subsets of exactly the threshold size (supersets only add pairs)
    std::mt19937_64 rng(inst.seed);
    std::vector<std::int64_t> all(size);
    for (std::int64_t i = 0; i < size; ++i) all[i] = i;
    const std::int64_t m = std::max<std::int64_t>(verdict.min_subset_size, 0);
    for (std::int64_t trial = 0; trial < inst.trials; ++trial) {
        std::vector<std::int64_t> pool = all;
        std::shuffle(pool.begin(), pool.end(), rng);
        std::vector<std::int64_t> subset(pool.begin(), pool.begin() + std::min<std::int64_t>(m, size));
        std::sort(subset.begin(), subset.end());
        std::int64_t x = static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(size));
        ++verdict.subsets_checked;

        std::vector<std::int64_t> c = g.tuple(x);
        bool found = false;
        for (std::size_t i = 0; i < subset.size() && !found; ++i)
            for (std::size_t j = 0; j < subset.size() && !found; ++j) {
                if (i == j) continue;
                ++verdict.pairs_checked;
                std::vector<std::int64_t> dtuple = g.tuple(g.sub(subset[i], subset[j]));
                std::int64_t agree = 0;
                for (std::int64_t jj = 0; jj < g.d; ++jj)
                    if (dtuple[jj] == c[jj]) ++agree;
                if (agree >= g.d - inst.radius) found = true;
            }
        if (!found) {
            verdict.holds = false;
            verdict.counterexample = KleitmanCounterexample{subset, x};
            return verdict;
        }
    }
    verdict.holds = true;
    return verdict;
}

const char* to_string(WitnessStage s) {
    switch (s) {
        case WitnessStage::Embedding: return "embedding";
        case WitnessStage::Target: return "target";
        case WitnessStage::Translate: return "translate";
        default: return "pair";
    }
}

WitnessResult hamming_recurrence_witness(const Frequencies& freq, const Rational& eps,
                                         std::int64_t m, const WindowedSet& a_set,
                                         std::int64_t k, std::int64_t search_bound,
                                         const Tol& tol, std::int64_t group_cap) {
    if (eps <= 0) throw ValidationError("witness extraction requires eps > 0");
    if (!(Rational(k) * eps > 3))
        throw ValidationError("witness extraction requires k > 3/eps");
    a_set.validate();
    const std::int64_t d = static_cast<std::int64_t>(freq.dim());
    GroupZkd g{k, d};
    g.validate(group_cap);

    // (1) embed Z_k^d at quality eps/3
    EmbeddingTable table;
    try {
        table = embed_group(freq, k, eps / 3, search_bound, tol, group_cap);
    } catch (const RecurError& e) {
        return WitnessFailure{WitnessStage::Embedding, e.what()};
    }

    // (2) nearest lattice tuple to m * alpha
    std::vector<std::int64_t> target(d);
    const Real eps3 = to_real(eps / 3);
    for (std::int64_t j = 0; j < d; ++j) {
        Real mj = frac(Real(m) * freq.alpha(j));
        std::int64_t w = static_cast<std::int64_t>(floor(mj * Real(k) + Real(1) / 2));
        target[j] = ((w % k) + k) % k;
        TorusPoint diff = TorusPoint(mj) - TorusPoint(Rational(target[j], k));
        if (!is_true(lt_guarded(torus_norm(diff), eps3, tol)))
            return WitnessFailure{WitnessStage::Target,
                                  "no lattice tuple within eps/3 of m*alpha"};
    }

    // (3) Hamming ball radius ceil(d eps), clamped to d
    std::int64_t radius = std::min<std::int64_t>(ceil_rational(Rational(d) * eps), d);

    // (4) density translate
    TranslateResult tr;
    try {
        tr = find_translate(a_set, table.n_of);
    } catch (const RecurError& e) {
        return WitnessFailure{WitnessStage::Translate, e.what()};
    }
    std::vector<std::int64_t> tilde;  // group indices w with n_w in A + t
    for (std::int64_t w = 0; w < g.size(); ++w)
        if (a_set.contains(table.n_of[w] - tr.t)) tilde.push_back(w);
    if (tilde.size() < 2)
        return WitnessFailure{WitnessStage::Pair,
                              "translated set captures fewer than two embedded points"};

    // (5)-(6) lexicographic pair search with direct verification of the norm
    // count; the ball filters candidates, the norms decide
    const long threshold = ceil_rational((Rational(1) - eps) * Rational(d));
    const Real eps_r = to_real(eps);
    const std::vector<std::int64_t>& ctr = target;
    std::uint64_t rejected = 0;
    for (std::int64_t wi : tilde) {
        for (std::int64_t wj : tilde) {
            if (wi == wj) continue;
            std::vector<std::int64_t> dtuple = g.tuple(g.sub(wi, wj));
            std::int64_t agree = 0;
            for (std::int64_t j = 0; j < d; ++j)
                if (dtuple[j] == ctr[j]) ++agree;
            if (agree < d - radius) continue;

            const std::int64_t nw = table.n_of[wi];
            const std::int64_t nwp = table.n_of[wj];
            std::vector<WitnessProofEntry> proof;
            std::vector<std::size_t> passing;
            std::vector<std::int64_t> wt = g.tuple(wi), wpt = g.tuple(wj);
            for (std::int64_t j = 0; j < d; ++j) {
                WitnessProofEntry e;
                e.j = static_cast<std::size_t>(j);
                TorusPoint alpha_j = TorusPoint(freq.alpha(j));
                e.norm = torus_norm(alpha_j.scaled(nw - nwp - m));
                e.part_w = torus_norm(TorusPoint(Real(nw) * freq.alpha(j)) -
                                      TorusPoint(Rational(wt[j], k)));
                e.part_wp = torus_norm(TorusPoint(Rational(wpt[j], k)) -
                                       TorusPoint(Real(nwp) * freq.alpha(j)));
                e.part_m = torus_norm(TorusPoint(Rational(target[j], k)) -
                                      TorusPoint(Real(m) * freq.alpha(j)));
                e.passes = is_true(lt_guarded(e.norm, eps_r, tol));
                if (e.passes) passing.push_back(e.j);
                proof.push_back(std::move(e));
            }
            if (static_cast<long>(passing.size()) >= threshold) {
                HammingWitness wit;
                wit.a = nw - tr.t;
                wit.b = nwp - tr.t;
                wit.m = m;
                wit.translate = tr.t;
                wit.w_index = wi;
                wit.wp_index = wj;
                wit.target_tuple = target;
                wit.threshold = threshold;
                wit.passing_indices = std::move(passing);
                wit.proof = std::move(proof);
                wit.achieved_density =
                    Rational(static_cast<std::int64_t>(tilde.size()), g.size());
                return wit;
            }
            ++rejected;
        }
    }
    std::ostringstream os;
    os << "no pair in the translated set meets the norm count; " << rejected
       << " ball-filtered pairs failed verification";
    return WitnessFailure{WitnessStage::Pair, os.str()};
}

}  // namespace recur
