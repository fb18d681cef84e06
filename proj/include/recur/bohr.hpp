#ifndef RECUR_BOHR_HPP
#define RECUR_BOHR_HPP

#include "recur/torus.hpp"
#include "recur/windowed.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace recur {

// Frequency data for Bohr-type sets: either a certified-independent vector or
// an exact rational vector.  Rational coordinates are evaluated with exact
// arithmetic and never produce ambiguous comparisons.
struct Frequencies {
    std::optional<FrequencyVector> irrational;
    std::vector<Rational> rational;

    static Frequencies from_vector(FrequencyVector fv);
    static Frequencies from_rationals(std::vector<Rational> qs);

    bool exact() const { return !irrational.has_value(); }
    std::size_t dim() const;
    Real alpha(std::size_t j) const;
    const Rational& alpha_rational(std::size_t j) const;

    // ||n * alpha_j||
    Real norm_of_multiple(std::size_t j, std::int64_t n) const;
    Rational exact_norm_of_multiple(std::size_t j, std::int64_t n) const;
};

struct BohrSpec {
    Frequencies freq;
    Rational eta;

    bool degenerate() const { return eta >= Rational(1, 2); }
    void validate() const;
};

struct BohrHammingSpec {
    Frequencies freq;
    Rational eps;
    Rational eta_frac;       // in (0, 1]
    std::int64_t shift = 0;  // neighborhood of m

    // count threshold ceil((1 - eta) d), computed in exact rational arithmetic
    long threshold() const;
    void validate() const;
};

struct HammingBall {
    std::int64_t k = 2;
    std::int64_t d = 1;
    std::int64_t r = 0;
    std::vector<std::int64_t> center;  // element of Z_k^d

    void validate() const;
};

long ceil_rational(const Rational& q);

Trilean bohr_contains(const BohrSpec& spec, std::int64_t n, const Tol& tol = {});
Enumeration bohr_enumerate(const BohrSpec& spec, Window w, const Tol& tol = {},
                           int workers = 1);

Int hamming_ball_size(std::int64_t k, std::int64_t d, std::int64_t r);
bool hamming_ball_contains(const HammingBall& ball, const std::vector<std::int64_t>& y);

Trilean bh_contains(const BohrHammingSpec& spec, std::int64_t n, const Tol& tol = {});
Enumeration bh_enumerate(const BohrHammingSpec& spec, Window w, const Tol& tol = {},
                         int workers = 1);

// Per-coordinate norms of n (after shift removal), for CSV export and proofs.
std::vector<Real> bh_coordinate_norms(const BohrHammingSpec& spec, std::int64_t n);

struct SumsetReport {
    std::vector<std::int64_t> bohr_members;      // Bohr(alpha, eps/2) in window
    std::vector<std::int64_t> bh_half_members;   // BH(alpha; eps/2, eta) in window
    std::int64_t sums_checked = 0;
    std::int64_t sums_ambiguous = 0;
    std::vector<std::int64_t> violations;        // sums definitively outside BH(alpha; eps, eta)
    bool holds() const { return violations.empty(); }
};

// Windowed check of: Bohr(alpha, eps/2) + BH(alpha; eps/2, eta) inside
// BH(alpha; eps, eta).
SumsetReport check_sumset_containment(const Frequencies& freq, const Rational& eps,
                                      const Rational& eta_frac, Window w,
                                      const Tol& tol = {}, int workers = 1);

struct CoverReport {
    std::optional<std::int64_t> m;
    Real best_norm;                   // max_j ||m alpha_j - z_j|| achieved
    std::int64_t best_candidate = 0;  // minimizer when no m qualifies
    std::vector<std::int64_t> bh_members;  // BH(alpha; eps/2, eta) + m in window
    std::vector<std::int64_t> violations;  // members definitively outside the target set
    std::int64_t ambiguous = 0;
    bool found() const { return m.has_value(); }
};

// Finds m with ||m alpha_j - z_j|| < eps/2 for all j, then verifies that
// BH(alpha; eps/2, eta) + m lies inside
// C = {n : #{j : ||n alpha_j - z_j|| < eps} >= (1 - eta) d} within the window.
CoverReport shifted_bh_cover(const Frequencies& freq, const std::vector<TorusPoint>& z,
                             const Rational& eps, const Rational& eta_frac,
                             std::int64_t search_bound, Window w, const Tol& tol = {});

}  // namespace recur

#endif
