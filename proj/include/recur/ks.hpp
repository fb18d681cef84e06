#ifndef RECUR_KS_HPP
#define RECUR_KS_HPP

#include "recur/bohr.hpp"
#include "recur/dynamics.hpp"
#include "recur/setspec.hpp"
#include "recur/torus.hpp"
#include "recur/windowed.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace recur {

// One stage of nested closed arcs.  parent[i] indexes the containing interval
// one stage up (-1 at stage 0).  Diameters are arc lengths.
struct IntervalFamily {
    int stage = 0;
    std::vector<Arc> intervals;
    std::vector<std::int64_t> parent;
    std::int64_t branching = 1;  // children per parent entering this stage
    Real max_diameter;

    std::size_t size() const { return intervals.size(); }
    // (C1) nesting, (C2) uniform branching, (C3) strict diameter decrease,
    // pairwise disjointness
    void validate(const IntervalFamily* prev) const;
};

struct DiscreteMeasure {
    std::vector<TorusPoint> atoms;
    std::vector<Rational> weights;

    Rational total_mass() const;
    void validate() const;
};

// Atoms at the interval centers, uniform weights 1/N.
DiscreteMeasure stage_measure(const IntervalFamily& fam);

// Mass assigned by `mu` to the arc (exact rational: sum of atom weights).
Rational measure_of_arc(const DiscreteMeasure& mu, const Arc& arc);

// sum_i w_i |f(x_i) - e(n x_i)|, f given by its phase at each atom.
Real l1_char_distance(const DiscreteMeasure& mu, const std::vector<TorusPoint>& f_phases,
                      std::int64_t n);

// integral of |e((s - m) x) - 1| d mu
Real rigidity_integral(const DiscreteMeasure& mu, std::int64_t s, std::int64_t m);

struct ProfileEntry {
    std::int64_t s = 0;
    int origin_stage = 0;
    Real value;
    Real bound;  // 3/k for the origin stage
    bool within_bound = false;
};

// Values of the rigidity integral for a stage-tagged sequence, with the 3/k
// envelope flags.
std::vector<ProfileEntry> rigidity_profile(const std::vector<std::pair<std::int64_t, int>>& seq,
                                           const DiscreteMeasure& mu, std::int64_t m,
                                           const Tol& tol = {});

// Geometric Cantor scheme: each parent splits into 2b-1 equal slots, children
// occupy the even slots.  Returns families for stages 0..branching.size().
std::vector<IntervalFamily> build_cantor(const std::vector<std::int64_t>& branching,
                                         const Arc& start);

// psi : K_k -> Lambda_k, stored as the root index (0..k-1) per point.
using PsiAssignment = std::vector<std::int64_t>;

struct PsiRecord {
    PsiAssignment psi;
    std::int64_t count_true = 0;  // |S_psi ^ window|
    std::int64_t count_ambiguous = 0;
    std::vector<std::int64_t> sample;     // first members (ascending n, capped)
    std::vector<std::int64_t> selection;  // S'_psi: smallest-|n| members
    bool gap = false;
};

struct StageRecord {
    int k = 0;
    FrequencyVector points;                  // K_k, one point per emitted child
    std::vector<std::int64_t> point_parent;  // parent interval index per point
    std::int64_t lambda_order = 1;           // |Lambda_k| = k
    std::vector<PsiRecord> psi_table;
    std::vector<std::int64_t> selection_union;  // S'_k
    Real shrink_radius;
    std::int64_t max_abs_n = 0;  // covers S'_k plus caller pins
    bool psi_sampled = false;
};

struct KsCaps {
    std::int64_t max_points = 4;       // |K_k| cap
    std::int64_t max_psi = 512;        // full psi enumeration cap
    std::int64_t psi_samples = 32;     // random draws beyond the cap
    std::int64_t select_cap = 12;      // |S'_psi| cap
    std::int64_t branching = 2;        // requested children per parent
    std::int64_t expanding_r_cap = 32; // r range for the expanding selection
    std::int64_t expanding_cap = 12;   // |E'_r| cap
    std::int64_t sample_cap = 64;      // stored members per psi record
    std::uint64_t seed = 0;
};

// First phase of a stage: pick K_k, enumerate psi, select S'_psi.  Children
// are not emitted yet; finalize_stage() shrinks once every integer that must
// survive is known.
struct PendingStage {
    StageRecord record;
    IntervalFamily parent_family;
};

// `force_targets`: integers m whose nearest-root assignments are always
// included in the psi enumeration (relevant when sampling).
PendingStage begin_stage(const IntervalFamily& prev, int k, const SetSpec& ambient, Window w,
                         const KsCaps& caps, const std::vector<std::int64_t>& force_targets = {0},
                         const Tol& tol = {});

// Emits child intervals centered at the stage points.  The radius honors the
// geometry and keeps 2 pi |n| r < 1/(2k) with margin for every n in the
// selection union and extra_pins.
IntervalFamily finalize_stage(PendingStage& pending, const std::vector<std::int64_t>& extra_pins,
                              const Tol& tol = {});

std::pair<StageRecord, IntervalFamily> refine_stage(const IntervalFamily& prev, int k,
                                                    const SetSpec& ambient, Window w,
                                                    const KsCaps& caps, const Tol& tol = {});

// Q_{f,k}: n in S whose count of intervals with rigorous sup bound
// sup_{x in I}|f(x) - e(nx)| < 1/k reaches (1 - 1/k) #I.  f is the
// interval-constant function with root index f_roots[i] on interval i.
Enumeration q_set(const IntervalFamily& fam, int k, const std::vector<std::int64_t>& f_roots,
                  const SetSpec& s, Window w, const Tol& tol = {});

struct PipelineStage {
    StageRecord record;
    IntervalFamily family;
    DiscreteMeasure sigma;
    std::int64_t target_m = 0;
    SetSpec ambient;                                              // S_{k-1}
    std::vector<std::vector<std::int64_t>> expanding_selections;  // E'_r per r
    std::vector<std::int64_t> ambient_next;                       // S_k
    bool gap = false;
};

struct PipelineReport {
    Window window;
    std::vector<PipelineStage> stages;
    std::vector<std::pair<std::int64_t, int>> diagonal;  // (s, origin stage)
    std::vector<ProfileEntry> zero_profile;  // m=0 thread vs the final measure
    std::vector<std::string> gaps;
};

// Spiral enumeration 0, 1, -1, 2, -2, ...
std::vector<std::int64_t> spiral_targets(std::size_t count);

PipelineReport build_ks_pipeline(const SetSpec& s, const std::vector<std::int64_t>& targets,
                                 int stages, Window w, const KsCaps& caps, const Tol& tol = {});

struct StageBoundCheck {
    int k = 0;
    std::size_t psi_index = 0;
    std::int64_t n = 0;
    int k_prime = 0;
    Real value;
    Real bound;  // 3/k
    bool ok = false;
};

// ||f~ - e_n||_{L1(sigma_k')} < 3/k for every stage k, psi, selected n, and
// every built k' >= k.
std::vector<StageBoundCheck> check_stage_bounds(const PipelineReport& report,
                                                const Tol& tol = {});

}  // namespace recur

#endif
