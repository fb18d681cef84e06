#ifndef RECUR_DIOPH_HPP
#define RECUR_DIOPH_HPP

#include "recur/bohr.hpp"
#include "recur/torus.hpp"
#include "recur/windowed.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

namespace recur {

enum class ApproxStrategy { Exhaustive, Lattice };

struct ApproxQuery {
    Frequencies freq;
    std::vector<TorusPoint> target;
    Rational eps = Rational(1, 10);
    std::int64_t search_bound = 10000;
    ApproxStrategy strategy = ApproxStrategy::Exhaustive;
    std::int64_t min_abs = 0;  // require |n| >= min_abs

    void validate() const;
};

struct ApproxResult {
    std::optional<std::int64_t> n;
    std::vector<Real> norms;        // per-coordinate ||n alpha_j - z_j|| of the answer
    Real best_norm;                 // minimal achieved max-norm over the scan
    std::int64_t best_n = 0;        // its candidate
    bool lattice_fallback = false;  // lattice strategy fell back to the exhaustive scan
    ApproxStrategy strategy = ApproxStrategy::Exhaustive;
};

// Kronecker approximation: n with max_j ||n alpha_j - z_j|| < eps.  The
// exhaustive strategy scans 0, 1, -1, 2, -2, ... and returns the smallest |n|
// (positive first on ties).  The lattice strategy derives candidates from an
// LLL-reduced simultaneous-approximation lattice; every candidate is verified
// against the defining inequality before being returned, and the scan is used
// as a fallback so both strategies agree on solvability.
ApproxResult kronecker_approximate(const ApproxQuery& q, const Tol& tol = {});

// Z_k^d bookkeeping.  Tuples are indexed with coordinate 0 most significant:
// index = w_0 k^{d-1} + ... + w_{d-1}.
struct GroupZkd {
    std::int64_t k = 2;
    std::int64_t d = 1;

    std::int64_t size() const;
    std::vector<std::int64_t> tuple(std::int64_t index) const;
    std::int64_t index(const std::vector<std::int64_t>& w) const;
    std::int64_t sub(std::int64_t a, std::int64_t b) const;  // componentwise a-b mod k
    void validate(std::int64_t cap = 1 << 20) const;
};

struct EmbeddingTable {
    std::int64_t k = 2;
    std::int64_t d = 1;
    Rational eps;
    std::vector<std::int64_t> n_of;  // indexed by group index; mutually distinct
    Real max_norm;                   // worst achieved ||n_w alpha_j - w_j/k||

    const GroupZkd group() const { return {k, d}; }
};

// Injective map w -> n_w with ||n_w alpha_j - w_j / k|| < eps for all j.
// Collisions with already-assigned integers take the next-smallest |n|.
EmbeddingTable embed_group(const Frequencies& freq, std::int64_t k, const Rational& eps,
                           std::int64_t search_bound, const Tol& tol = {},
                           std::int64_t cap = 1 << 14);

struct TranslateResult {
    std::int64_t t = 0;
    std::int64_t count = 0;
};

// t maximizing |(A + t) /\ F| over all t that keep F - t inside A's window;
// smallest maximizer wins.
TranslateResult find_translate(const WindowedSet& a, const std::vector<std::int64_t>& f);

}  // namespace recur

#endif
