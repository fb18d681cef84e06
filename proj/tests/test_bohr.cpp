#include <doctest.h>

#include "recur/bohr.hpp"
#include "oracles.hpp"

#include <random>

using namespace recur;

namespace {

Frequencies sqrt2_freq() { return Frequencies::from_vector(make_independent_frequencies(1)); }
Frequencies sqrt23_freq() { return Frequencies::from_vector(make_independent_frequencies(2)); }

}  // namespace

TEST_CASE("bohr membership, exact rational path") {
    BohrSpec spec{Frequencies::from_rationals({Rational(1, 3)}), Rational(1, 5)};
    CHECK(is_true(bohr_contains(spec, 3)));
    CHECK(is_false(bohr_contains(spec, 1)));
    CHECK(is_true(bohr_contains(spec, 0)));
}

TEST_CASE("bohr membership, irrational path") {
    BohrSpec spec{sqrt2_freq(), Rational(3, 20)};
    CHECK(is_true(bohr_contains(spec, 5)));  // ||5 sqrt2|| ~ 0.0711
    CHECK(is_false(bohr_contains(spec, 1)));
}

TEST_CASE("bohr enumerate frozen windows") {
    // direct scan of ||n sqrt 2|| for n = 0..10 gives {0, 5, 7, 10}
    BohrSpec spec{sqrt2_freq(), Rational(3, 20)};
    Enumeration e = bohr_enumerate(spec, {0, 10});
    CHECK(e.set.members == std::vector<std::int64_t>{0, 5, 7, 10});
    CHECK(e.ambiguous.empty());

    // exact table of ||n/4||
    BohrSpec quarter{Frequencies::from_rationals({Rational(1, 4)}), Rational(3, 10)};
    Enumeration e2 = bohr_enumerate(quarter, {0, 8});
    CHECK(e2.set.members == std::vector<std::int64_t>{0, 1, 3, 4, 5, 7, 8});

    // eta > 1/2 is all of Z
    BohrSpec degen{sqrt2_freq(), Rational(3, 5)};
    CHECK(degen.degenerate());
    Enumeration e3 = bohr_enumerate(degen, {-3, 3});
    CHECK(e3.set.members == std::vector<std::int64_t>{-3, -2, -1, 0, 1, 2, 3});
}

TEST_CASE("bohr enumeration matches the long-double oracle") {
    FrequencyVector fv = make_independent_frequencies(2);
    std::vector<long double> alpha;
    for (const TorusPoint& p : fv.entries)
        alpha.push_back(static_cast<long double>(static_cast<double>(p.value())));
    // keep eta away from achievable norms so the float oracle cannot disagree
    BohrSpec spec{Frequencies::from_vector(fv), Rational(22, 100)};
    Enumeration e = bohr_enumerate(spec, {-300, 300});
    CHECK(e.set.members == oracle::bohr_scan(alpha, 0.22L, -300, 300));
    CHECK(e.ambiguous.empty());
}

TEST_CASE("bohr symmetry and parallel scan equivalence") {
    BohrSpec spec{sqrt23_freq(), Rational(1, 5)};
    Enumeration e = bohr_enumerate(spec, {-250, 250});
    for (std::int64_t n : e.set.members) CHECK(e.set.contains(-n));
    Enumeration par = bohr_enumerate(spec, {-250, 250}, {}, 3);
    CHECK(par.set.members == e.set.members);
    CHECK(par.ambiguous == e.ambiguous);
}

TEST_CASE("hamming ball size formula vs enumeration") {
    CHECK(hamming_ball_size(2, 4, 1) == 5);
    CHECK(hamming_ball_size(5, 3, 0) == 1);
    CHECK(hamming_ball_size(3, 2, 2) == 9);
    for (std::int64_t k = 2; k <= 4; ++k)
        for (std::int64_t d = 1; d <= 6; ++d)
            for (std::int64_t r = 0; r <= d; ++r)
                CHECK(hamming_ball_size(k, d, r) == Int(oracle::hamming_ball_brute(k, d, r)));
}

TEST_CASE("hamming ball membership") {
    HammingBall ball{2, 3, 1, {0, 0, 0}};
    CHECK(hamming_ball_contains(ball, {0, 0, 0}));
    CHECK_FALSE(hamming_ball_contains(ball, {1, 1, 0}));
    CHECK(hamming_ball_contains(ball, {1, 0, 0}));
    CHECK_THROWS_AS(hamming_ball_contains(ball, {0, 0}), ValidationError);
}

TEST_CASE("bohr-hamming membership basics") {
    BohrHammingSpec spec{sqrt23_freq(), Rational(3, 20), Rational(1, 2), 17};
    CHECK(is_true(bh_contains(spec, 17)));  // n = m
    BohrHammingSpec vacuous{sqrt23_freq(), Rational(1, 100), Rational(1), 0};
    CHECK(vacuous.threshold() == 0);
    CHECK(is_true(bh_contains(vacuous, 12345)));
}

TEST_CASE("bohr-hamming enumeration vs per-coordinate scan") {
    FrequencyVector fv = make_independent_frequencies(2);
    BohrHammingSpec spec{Frequencies::from_vector(fv), Rational(3, 20), Rational(1, 2), 0};
    CHECK(spec.threshold() == 1);
    Enumeration e = bh_enumerate(spec, {0, 10});
    // at least 1 of 2 coordinates passes; coordinate 1 passes on {0,5,7,10}
    std::vector<std::int64_t> expect;
    for (std::int64_t n = 0; n <= 10; ++n) {
        int count = 0;
        for (std::size_t j = 0; j < 2; ++j)
            if (torus_norm(fv.entries[j].scaled(n)) < Real(3) / 20) ++count;
        if (count >= 1) expect.push_back(n);
    }
    CHECK(e.set.members == expect);
    CHECK(e.set.contains(0));
    CHECK(e.set.contains(5));
}

TEST_CASE("bohr-hamming monotonicity in eps and eta") {
    std::mt19937_64 rng(23);
    Frequencies freq = sqrt23_freq();
    for (int trial = 0; trial < 6; ++trial) {
        Rational eps(5 + static_cast<std::int64_t>(rng() % 12), 100);
        Rational eps2 = eps + Rational(static_cast<std::int64_t>(rng() % 10 + 1), 100);
        Rational eta(static_cast<std::int64_t>(rng() % 40 + 10), 100);
        Rational eta2 = eta + Rational(static_cast<std::int64_t>(rng() % 30 + 1), 100);
        if (eta2 > 1) eta2 = 1;
        BohrHammingSpec small{freq, eps, eta, 0};
        BohrHammingSpec large{freq, eps2, eta2, 0};
        Enumeration es = bh_enumerate(small, {-120, 120});
        Enumeration el = bh_enumerate(large, {-120, 120});
        for (std::int64_t n : es.set.members) CHECK(el.set.contains(n));
    }
}

TEST_CASE("Bohr set sits inside any Bohr-Hamming relaxation") {
    Frequencies freq = sqrt23_freq();
    BohrSpec b{freq, Rational(1, 8)};
    BohrHammingSpec bh{freq, Rational(1, 8), Rational(1, 3), 0};
    Enumeration eb = bohr_enumerate(b, {-200, 200});
    Enumeration ebh = bh_enumerate(bh, {-200, 200});
    for (std::int64_t n : eb.set.members) CHECK(ebh.set.contains(n));
}

TEST_CASE("sumset containment reports") {
    SUBCASE("exact rational, eta = 1") {
        SumsetReport rep = check_sumset_containment(Frequencies::from_rationals({Rational(1, 5)}),
                                                    Rational(1, 5), Rational(1), {-20, 20});
        CHECK(rep.holds());
        CHECK(rep.sums_checked > 0);
    }
    SUBCASE("bohr half reduced to {0}") {
        // eps/2 = 1/100 leaves only n=0 in a small window
        SumsetReport rep = check_sumset_containment(sqrt2_freq(), Rational(1, 50),
                                                    Rational(1, 2), {-10, 10});
        CHECK(rep.bohr_members == std::vector<std::int64_t>{0});
        CHECK(rep.holds());
    }
    SUBCASE("irrational window scan") {
        SumsetReport rep = check_sumset_containment(sqrt2_freq(), Rational(1, 5),
                                                    Rational(1, 2), {-200, 200});
        CHECK(rep.holds());
        CHECK(rep.sums_ambiguous == 0);
    }
}

TEST_CASE("shifted cover") {
    Frequencies freq = sqrt2_freq();
    SUBCASE("zero target means m = 0") {
        CoverReport rep = shifted_bh_cover(freq, {TorusPoint(Real(0))}, Rational(1, 10),
                                           Rational(1, 2), 1000, {-50, 50});
        REQUIRE(rep.found());
        CHECK(*rep.m == 0);
        CHECK(rep.violations.empty());
    }
    SUBCASE("target alpha means m = 1") {
        CoverReport rep = shifted_bh_cover(freq, {freq.irrational->entries[0]}, Rational(1, 10),
                                           Rational(1, 2), 1000, {-50, 50});
        REQUIRE(rep.found());
        CHECK(*rep.m == 1);
    }
    SUBCASE("target one half means m = 6") {
        CoverReport rep = shifted_bh_cover(freq, {TorusPoint(Rational(1, 2))}, Rational(1, 10),
                                           Rational(1, 2), 10000, {-100, 100});
        REQUIRE(rep.found());
        CHECK(*rep.m == 6);  // ||6 sqrt2 - 1/2|| ~ 0.0147 < 0.05
        CHECK(rep.violations.empty());
    }
    SUBCASE("tiny bound reports the best miss") {
        CoverReport rep = shifted_bh_cover(freq, {TorusPoint(Rational(1, 2))}, Rational(1, 10),
                                           Rational(1, 2), 3, {-100, 100});
        CHECK_FALSE(rep.found());
        CHECK(rep.best_norm > Real(1) / 20);
        CHECK(std::llabs(rep.best_candidate) <= 3);
    }
}
