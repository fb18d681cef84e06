#ifndef RECUR_DYNAMICS_HPP
#define RECUR_DYNAMICS_HPP

#include "recur/bohr.hpp"
#include "recur/torus.hpp"
#include "recur/windowed.hpp"

#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

namespace recur {

// One coordinate of a rotation system: a torus coordinate rotating by alpha
// (rational or high-precision), or a cyclic group Z_k rotating by `step`.
struct TorusAxis {
    std::optional<Rational> alpha_exact;
    TorusPoint alpha;  // always set; mirrors alpha_exact when that is present

    static TorusAxis from_rational(const Rational& q);
    static TorusAxis from_point(const TorusPoint& p);
    bool exact() const { return alpha_exact.has_value(); }
};

struct CyclicAxis {
    std::int64_t k = 2;
    std::int64_t step = 1;
};

using Axis = std::variant<TorusAxis, CyclicAxis>;

struct RotationSystem {
    std::vector<Axis> axes;

    static RotationSystem torus(const Frequencies& freq);
    static RotationSystem cyclic(std::int64_t k, std::int64_t step);
    void validate() const;
    bool exact() const;  // every torus axis rational
};

// Product of two systems (axes concatenated; products flatten).
RotationSystem product_system(const RotationSystem& a, const RotationSystem& b);

// Arc [lo, lo+len) on the torus, 0 <= lo < 1, 0 <= len <= 1.  Exact endpoints
// are carried alongside the real ones whenever the arc was built from
// rationals.
struct Arc {
    Real lo;
    Real len;
    std::optional<Rational> lo_exact;
    std::optional<Rational> len_exact;

    static Arc from_rational(const Rational& lo, const Rational& len);
    static Arc from_real(const Real& lo, const Real& len);
    bool exact() const { return lo_exact && len_exact; }
};

// Around-zero arc {x : ||x|| < half_width}.
Arc symmetric_arc(const Rational& half_width);

struct CyclicSubset {
    std::vector<std::int64_t> elems;  // sorted subset of Z_k
};

using BoxFactor = std::variant<Arc, CyclicSubset>;

struct Box {
    std::vector<BoxFactor> factors;  // one per system axis
};

struct BoxSet {
    std::vector<Box> boxes;

    void validate(const RotationSystem& sys) const;
    bool exact() const;
};

struct MeasureValue {
    Real value;
    std::optional<Rational> exact;
};

// Haar/counting measure of D; overlapping boxes are disjointified first.
MeasureValue measure(const RotationSystem& sys, const BoxSet& d);

// mu(D /\ T^n D), computed axis-by-axis on the disjointified boxes.
MeasureValue intersection_measure(const RotationSystem& sys, const BoxSet& d, std::int64_t n);

struct ReturnSet {
    Rational c;
    Window window;
    WindowedSet members;
    std::vector<std::int64_t> ambiguous;
    std::vector<std::pair<std::int64_t, MeasureValue>> values;  // ordered by n
};

// R_c(T; D) = {n : mu(D /\ T^n D) > c} restricted to the window.
ReturnSet return_set(const RotationSystem& sys, const BoxSet& d, const Rational& c, Window w,
                     const Tol& tol = {}, int workers = 1);

// The box D with mu(D) = eta^d 2^{-d} whose windowed return set R_0 sits
// inside Bohr(alpha, eta): each coordinate is the arc {||x|| < eta/4}.
BoxSet bohr_return_box(std::size_t d, const Rational& eta);

struct AuraWitness {
    std::int64_t member = 0;
    std::int64_t from_e = 0;
    std::int64_t from_r0 = 0;
};

struct AuraReport {
    WindowedSet members;  // S /\ (E + R_0(T;D)) within the window
    std::vector<AuraWitness> witnesses;
    WindowedSet r0;
};

AuraReport aura_demo(const WindowedSet& s, const WindowedSet& e, const RotationSystem& sys,
                     const BoxSet& d, Window w, const Tol& tol = {});

struct DensityEstimate {
    std::int64_t block = 0;
    std::int64_t best_count = 0;
    std::int64_t best_start = 0;  // block is {start+1, ..., start+block}
    Rational estimate;
};

struct DensityReport {
    std::vector<DensityEstimate> per_length;
    std::vector<std::int64_t> skipped;  // block lengths exceeding the window
    Rational best;                      // estimate at the largest usable length
};

DensityReport upper_banach_density(const WindowedSet& a,
                                   const std::vector<std::int64_t>& block_lengths);

struct DeltaCounterexample {
    std::size_t corpus_index = 0;
    Rational density;
    WindowedSet witness;
};

// First corpus set with windowed density > delta whose difference set misses S.
std::optional<DeltaCounterexample> delta_recurrence_falsify(
    const WindowedSet& s, const Rational& delta, const std::vector<WindowedSet>& corpus);

// Structured corpus used by the falsification harness: arithmetic
// progressions, Bohr sets, random dense sets, quadratic residues.
std::vector<WindowedSet> make_structured_corpus(Window w, std::uint64_t seed);

}  // namespace recur

#endif
