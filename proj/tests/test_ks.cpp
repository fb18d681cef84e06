#include <doctest.h>

#include "recur/ks.hpp"

#include <set>

using namespace recur;

namespace {

Arc unit_start() { return Arc::from_rational(Rational(0), Rational(1)); }

}  // namespace

TEST_CASE("binary cantor scheme") {
    auto fams = build_cantor({2, 2}, unit_start());
    REQUIRE(fams.size() == 3);
    CHECK(fams[1].size() == 2);
    CHECK(fams[2].size() == 4);
    // nested 2-by-2
    for (std::size_t i = 0; i < 4; ++i) CHECK(fams[2].parent[i] == static_cast<std::int64_t>(i / 2));
    // diameters shrink like (1/3)^k
    CHECK(fams[1].max_diameter == Real(to_real(Rational(1, 3))));
    CHECK(fams[2].max_diameter == Real(to_real(Rational(1, 9))));
    CHECK_THROWS_AS(build_cantor({1}, unit_start()), ValidationError);
}

TEST_CASE("stage measures are exactly uniform") {
    auto fams = build_cantor({2, 2, 2}, unit_start());
    for (const auto& fam : fams) {
        DiscreteMeasure mu = stage_measure(fam);
        CHECK(mu.total_mass() == 1);
        for (const Rational& w : mu.weights)
            CHECK(w == Rational(1, static_cast<std::int64_t>(fam.size())));
    }
}

TEST_CASE("ancestor masses are exactly 1 / N_j") {
    auto fams = build_cantor({2, 3}, unit_start());
    DiscreteMeasure mu2 = stage_measure(fams[2]);
    // each stage-1 interval holds 3 of the 6 atoms
    for (const Arc& parent : fams[1].intervals)
        CHECK(measure_of_arc(mu2, parent) == Rational(1, 2));
    // and the root holds everything
    CHECK(measure_of_arc(mu2, fams[0].intervals[0]) == 1);
}

TEST_CASE("l1 distance to characters") {
    SUBCASE("all atoms at zero and f == 1") {
        DiscreteMeasure mu;
        mu.atoms = {TorusPoint(Real(0))};
        mu.weights = {Rational(1)};
        std::vector<TorusPoint> ones{TorusPoint(Real(0))};
        for (std::int64_t n : {0, 1, 7}) CHECK(l1_char_distance(mu, ones, n) == 0);
    }
    SUBCASE("atoms at 0 and 1/2 against f == 1 at n = 1") {
        DiscreteMeasure mu;
        mu.atoms = {TorusPoint(Real(0)), TorusPoint(Rational(1, 2))};
        mu.weights = {Rational(1, 2), Rational(1, 2)};
        std::vector<TorusPoint> ones{TorusPoint(Real(0)), TorusPoint(Real(0))};
        CHECK(abs(l1_char_distance(mu, ones, 1) - 1) < Real(1e-30));  // (0 + 2)/2
    }
    SUBCASE("f = e_3 matches n = 3 exactly") {
        auto fams = build_cantor({2, 2}, unit_start());
        DiscreteMeasure mu = stage_measure(fams[2]);
        std::vector<TorusPoint> phases;
        for (const TorusPoint& x : mu.atoms) phases.push_back(x.scaled(3));
        CHECK(l1_char_distance(mu, phases, 3) == 0);
    }
}

TEST_CASE("rigidity integrals") {
    DiscreteMeasure point;
    point.atoms = {TorusPoint(Real(0))};
    point.weights = {Rational(1)};
    CHECK(rigidity_integral(point, 123, 0) == 0);  // point mass at 0
    auto fams = build_cantor({2}, unit_start());
    DiscreteMeasure mu = stage_measure(fams[1]);
    CHECK(rigidity_integral(mu, 9, 9) == 0);  // m = s
    auto prof = rigidity_profile({{9, 2}}, mu, 9);
    CHECK(prof[0].within_bound);
}

TEST_CASE("q sets") {
    auto fams = build_cantor({2}, unit_start());
    SUBCASE("k = 1 reduces to S in the window") {
        SetSpec evens = SetSpec::arithmetic_progression(0, 2);
        Enumeration q = q_set(fams[1], 1, {0, 0}, evens, {-6, 6});
        CHECK(q.set.members == std::vector<std::int64_t>{-6, -4, -2, 0, 2, 4, 6});
    }
    SUBCASE("n = 0 against the constant-one function always qualifies") {
        Enumeration q = q_set(fams[1], 3, {0, 0}, SetSpec::all(), {0, 0});
        CHECK(q.set.contains(0));
    }
    SUBCASE("narrow intervals matching e_n put n in Q") {
        // one interval centered at 1/3 with 3 * (1/3) = 1 = root 0 of Lambda_2,
        // radius below 1/(4 pi k n)
        const int k = 2;
        const std::int64_t n = 3;
        Real radius = Real(1) / (4 * pi_value() * k * n) / 2;
        IntervalFamily fam;
        fam.stage = 0;
        fam.intervals.push_back(Arc::from_real(Real(1) / 3 - radius, 2 * radius));
        fam.parent.push_back(-1);
        fam.branching = 1;
        fam.max_diameter = 2 * radius;
        Enumeration q = q_set(fam, k, {0}, SetSpec::all(), {n, n});
        CHECK(q.set.contains(n));
    }
}

TEST_CASE("refine stage on the trivial ambient set") {
    auto fams = build_cantor({}, unit_start());
    SUBCASE("k = 1 selects from the whole window") {
        KsCaps caps;
        caps.max_points = 2;
        auto [rec, fam] = refine_stage(fams[0], 1, SetSpec::all(), {-50, 50}, caps);
        REQUIRE(rec.psi_table.size() == 1);  // Lambda_1 has one root
        CHECK(rec.psi_table[0].count_true == 101);
        CHECK(rec.psi_table[0].selection ==
              std::vector<std::int64_t>{0, 1, -1, 2, -2, 3, -3, 4, -4, 5, -5, 6});
        CHECK(fam.size() == 2);
        fam.validate(&fams[0]);
        // Cauchy certificate for every selected n, and the radius stays below
        // the 1/(4 pi k max|n|) budget
        for (std::int64_t n : rec.selection_union)
            CHECK(2 * pi_value() * std::llabs(n) * rec.shrink_radius < Real(1) / 2);
        CHECK(rec.shrink_radius < Real(1) / (4 * pi_value() * rec.k * rec.max_abs_n));
    }
    SUBCASE("an empty ambient set records gaps") {
        KsCaps caps;
        caps.max_points = 2;
        auto [rec, fam] = refine_stage(fams[0], 1, SetSpec::explicit_list({}), {-50, 50}, caps);
        REQUIRE(!rec.psi_table.empty());
        CHECK(rec.psi_table[0].gap);
        CHECK(rec.selection_union.empty());
        fam.validate(&fams[0]);  // the stage still refines
    }
    SUBCASE("stage k = 2 memberships follow the chord oracle") {
        KsCaps caps;
        caps.max_points = 1;
        caps.branching = 1;
        auto [rec1, fam1] = refine_stage(fams[0], 1, SetSpec::all(), {-50, 50}, caps);
        auto [rec2, fam2] = refine_stage(fam1, 2, SetSpec::all(), {-50, 50}, caps);
        REQUIRE(rec2.psi_table.size() == 2);
        const TorusPoint& alpha = rec2.points.entries[0];
        // psi == 1 membership demands |1 - e(n alpha)| < 1/4
        for (const PsiRecord& pr : rec2.psi_table) {
            if (pr.psi != PsiAssignment{0}) continue;
            for (std::int64_t n : pr.sample)
                CHECK(char_distance(alpha.scaled(n)) < Real(1) / 4);
        }
    }
}

TEST_CASE("S_{psi,2} membership for frac(sqrt 2), frozen") {
    // |1 - e(n sqrt 2)| < 1/4 on [-50, 50]: the chord at n = 5 is ~0.443, so 5
    // is out; the survivors are 0, +-12, +-29, +-41
    FrequencyVector fv = make_independent_frequencies(1);
    const TorusPoint& alpha = fv.entries[0];
    std::vector<std::int64_t> members;
    for (std::int64_t n = -50; n <= 50; ++n)
        if (char_distance(alpha.scaled(n)) < Real(1) / 4) members.push_back(n);
    CHECK(members == std::vector<std::int64_t>{-41, -29, -12, 0, 12, 29, 41});
    CHECK(char_distance(alpha.scaled(5)) > Real(1) / 4);
}

TEST_CASE("small pipeline maintains the stage invariants") {
    KsCaps caps;
    caps.max_points = 3;
    caps.expanding_r_cap = 16;
    caps.expanding_cap = 8;
    caps.select_cap = 8;
    Window w{-3000, 3000};
    PipelineReport rep = build_ks_pipeline(SetSpec::all(), {0, 0}, 2, w, caps);
    REQUIRE(rep.stages.size() == 2);

    SUBCASE("measure exactness and nesting") {
        for (const PipelineStage& st : rep.stages) {
            CHECK(st.sigma.total_mass() == 1);
            st.sigma.validate();
        }
        const auto& s1 = rep.stages[0].ambient_next;
        const auto& s2 = rep.stages[1].ambient_next;
        for (std::int64_t n : s2)
            CHECK(std::binary_search(s1.begin(), s1.end(), n));  // S_2 inside S_1
        // ancestor masses: stage-1 intervals each hold half of sigma_2
        for (const Arc& parent : rep.stages[0].family.intervals)
            CHECK(measure_of_arc(rep.stages[1].sigma, parent) ==
                  Rational(1, static_cast<std::int64_t>(rep.stages[0].family.size())));
    }

    SUBCASE("shrink certificates") {
        for (const PipelineStage& st : rep.stages) {
            const int k = st.record.k;
            for (std::int64_t n : st.record.selection_union)
                CHECK(is_true(lt_guarded(2 * pi_value() * std::llabs(n) * st.record.shrink_radius,
                                         Real(1) / (2 * k))));
        }
    }

    SUBCASE("stage bounds hold at every later stage") {
        auto checks = check_stage_bounds(rep);
        CHECK_FALSE(checks.empty());
        for (const auto& c : checks) CHECK(c.ok);
    }

    SUBCASE("zero profile decays under the 3/k envelope") {
        CHECK_FALSE(rep.zero_profile.empty());
        bool saw_stage2 = false;
        for (const ProfileEntry& e : rep.zero_profile) {
            CHECK(e.within_bound);
            saw_stage2 |= e.origin_stage == 2;
        }
        CHECK(saw_stage2);
    }

    SUBCASE("psi selections sit inside their q sets") {
        for (const PipelineStage& st : rep.stages) {
            const StageRecord& rec = st.record;
            for (const PsiRecord& pr : rec.psi_table) {
                if (pr.selection.empty()) continue;
                Enumeration q = q_set(st.family, rec.k, pr.psi, st.ambient, w);
                for (std::int64_t n : pr.selection) CHECK(q.set.contains(n));
            }
        }
    }

    SUBCASE("diagonal selections come from the stage sets") {
        for (const auto& [n, k] : rep.diagonal) {
            const auto& amb = rep.stages[k - 1].ambient_next;
            CHECK(std::binary_search(amb.begin(), amb.end(), n));
        }
    }
}

TEST_CASE("pipeline respects explicit ambient sets") {
    KsCaps caps;
    caps.max_points = 2;
    caps.expanding_r_cap = 8;
    Window w{-2000, 2000};
    SetSpec evens = SetSpec::arithmetic_progression(0, 2);
    PipelineReport rep = build_ks_pipeline(evens, {0}, 1, w, caps);
    for (const PipelineStage& st : rep.stages)
        for (std::int64_t n : st.ambient_next) CHECK(n % 2 == 0);
    for (const auto& [n, k] : rep.diagonal) CHECK(n % 2 == 0);
}

TEST_CASE("spiral target enumeration") {
    CHECK(spiral_targets(5) == std::vector<std::int64_t>{0, 1, -1, 2, -2});
    CHECK(spiral_targets(1) == std::vector<std::int64_t>{0});
}
