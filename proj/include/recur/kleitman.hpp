#ifndef RECUR_KLEITMAN_HPP
#define RECUR_KLEITMAN_HPP

#include "recur/bohr.hpp"
#include "recur/dioph.hpp"
#include "recur/windowed.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace recur {

enum class KleitmanMode { Exhaustive, Sampled };

struct KleitmanInstance {
    std::int64_t k = 2;
    std::int64_t d = 2;
    Rational delta = Rational(1, 2);
    std::int64_t radius = 1;
    KleitmanMode mode = KleitmanMode::Exhaustive;
    std::int64_t trials = 1000;       // sampled mode
    std::uint64_t seed = 0;           // sampled mode
    std::int64_t group_cap = 16;      // exhaustive mode requires k^d <= group_cap

    void validate() const;
};

struct KleitmanCounterexample {
    std::vector<std::int64_t> subset;  // group indices of A
    std::int64_t center = 0;           // group index of x
};

struct KleitmanVerdict {
    bool holds = false;
    std::optional<KleitmanCounterexample> counterexample;
    std::int64_t min_subset_size = 0;  // ceil(delta k^d)
    std::uint64_t subsets_checked = 0;
    std::uint64_t pairs_checked = 0;
};

// Checks: every A in Z_k^d with |A| >= ceil(delta k^d) and every center x admit
// distinct a, b in A with a - b in U_r(x).  Exhaustive mode enumerates subsets
// in mask order and centers in index order, so verdicts are reproducible
// bit-for-bit.
KleitmanVerdict kleitman_check(const KleitmanInstance& inst);

enum class WitnessStage { Embedding, Target, Translate, Pair };

struct WitnessFailure {
    WitnessStage stage;
    std::string detail;
};

const char* to_string(WitnessStage s);

struct WitnessProofEntry {
    std::size_t j = 0;
    Real norm;         // ||(a - b - m) alpha_j||
    Real part_w;       // ||n_w alpha_j - w_j||
    Real part_wp;      // ||w'_j - n_w' alpha_j||
    Real part_m;       // ||w^(m)_j - m alpha_j||
    bool passes = false;
};

struct HammingWitness {
    std::int64_t a = 0;  // element of A
    std::int64_t b = 0;  // element of A, a != b
    std::int64_t m = 0;
    std::int64_t translate = 0;     // t from the density step; a + t = n_w
    std::int64_t w_index = 0;       // group indices of the chosen pair
    std::int64_t wp_index = 0;
    std::vector<std::int64_t> target_tuple;  // w^(m)
    long threshold = 0;             // ceil((1 - eps) d)
    std::vector<std::size_t> passing_indices;
    std::vector<WitnessProofEntry> proof;
    Rational achieved_density;      // |A~| / k^d
};

using WitnessResult = std::variant<HammingWitness, WitnessFailure>;

// Constructive extraction of a pair a, b in A with a - b in BH(alpha;eps,eps)+m,
// following the embedding / target / translate / pair pipeline.  Returned
// witnesses are verified against the defining norm counts before being
// reported.
WitnessResult hamming_recurrence_witness(const Frequencies& freq, const Rational& eps,
                                         std::int64_t m, const WindowedSet& a_set,
                                         std::int64_t k, std::int64_t search_bound,
                                         const Tol& tol = {}, std::int64_t group_cap = 1 << 14);

}  // namespace recur

#endif
