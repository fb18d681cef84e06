#include <doctest.h>

#include "recur/json_io.hpp"
#include "recur/setspec.hpp"

using namespace recur;

TEST_CASE("set spec membership") {
    CHECK(is_true(SetSpec::all().contains(-37)));
    SetSpec ap = SetSpec::arithmetic_progression(2, 5);
    CHECK(is_true(ap.contains(7)));
    CHECK(is_false(ap.contains(8)));
    CHECK(is_true(ap.contains(-3)));

    SetSpec sq = SetSpec::squares();
    CHECK(is_true(sq.contains(49)));
    CHECK(is_false(sq.contains(0)));  // nonzero squares only
    CHECK(is_false(sq.contains(50)));
    CHECK(is_false(sq.contains(-4)));

    SetSpec shifted = SetSpec::shifted(SetSpec::squares(), 3);
    CHECK(is_true(shifted.contains(12)));  // 9 + 3

    SetSpec uni = SetSpec::union_of({SetSpec::arithmetic_progression(0, 2), SetSpec::squares()});
    CHECK(is_true(uni.contains(9)));
    CHECK(is_true(uni.contains(4)));
    CHECK(is_false(uni.contains(7)));

    SetSpec expl = SetSpec::explicit_list({5, -2, 5});
    CHECK(is_true(expl.contains(-2)));
    CHECK(is_false(expl.contains(3)));

    WindowedSet w = WindowedSet::from_predicate({0, 10}, [](std::int64_t n) { return n % 2 == 0; });
    SetSpec imp = SetSpec::import(w);
    CHECK(is_true(imp.contains(4)));
    CHECK(is_false(imp.contains(12)));  // outside the import window
}

TEST_CASE("complement of a Bohr set") {
    BohrSpec bohr{Frequencies::from_rationals({Rational(1, 4)}), Rational(3, 10)};
    SetSpec comp = SetSpec::complement_of_bohr(bohr);
    CHECK(is_false(comp.contains(0)));
    CHECK(is_true(comp.contains(2)));  // ||2/4|| = 1/2 >= 0.3
}

TEST_CASE("set spec enumeration and description") {
    SetSpec uni = SetSpec::union_of({SetSpec::arithmetic_progression(0, 3), SetSpec::squares()});
    Enumeration e = uni.enumerate({0, 12});
    CHECK(e.set.members == std::vector<std::int64_t>{0, 1, 3, 4, 6, 9, 12});
    CHECK(uni.describe() == "union(ap(0,3),squares)");
}

TEST_CASE("set spec json round trip") {
    SetSpec spec = SetSpec::union_of(
        {SetSpec::shifted(SetSpec::squares(), -1), SetSpec::arithmetic_progression(1, 4),
         SetSpec::explicit_list({100, 200})});
    Json j = to_json(spec);
    SetSpec back = set_spec_from_json(j);
    for (std::int64_t n = -30; n <= 30; ++n)
        CHECK(to_string(spec.contains(n)) == to_string(back.contains(n)));
}

TEST_CASE("windowed set json round trip") {
    WindowedSet w = WindowedSet::from_predicate({-5, 5}, [](std::int64_t n) { return n * n < 10; },
                                                "small");
    WindowedSet back = windowed_set_from_json(to_json(w));
    CHECK(back.window.lo == w.window.lo);
    CHECK(back.members == w.members);
    CHECK(back.source == "small");
}

TEST_CASE("frequency vector json round trip") {
    FrequencyVector fv = make_independent_frequencies(2);
    Json j = to_json(fv);
    FrequencyVector back = frequency_vector_from_json(j);
    CHECK(back.dim() == 2);
    CHECK(abs(back.entries[0].value() - fv.entries[0].value()) < Real(1e-35));
    CHECK(back.certificate.passed);
}

TEST_CASE("rotation system and box json round trips") {
    Json sys_json;
    sys_json["components"] = Json::array();
    {
        Json torus;
        torus["type"] = "torus";
        Json freq;
        freq["kind"] = "rational";
        freq["alpha"] = Json::array({"1/4"});
        torus["freq"] = freq;
        sys_json["components"].push_back(torus);
        Json cyc;
        cyc["type"] = "cyclic";
        cyc["k"] = 6;
        cyc["step"] = 2;
        sys_json["components"].push_back(cyc);
    }
    RotationSystem sys = rotation_system_from_json(sys_json);
    CHECK(sys.axes.size() == 2);

    Json box_json;
    box_json["boxes"] = Json::array();
    Json factors = Json::array();
    {
        Json arc;
        arc["type"] = "arc";
        arc["lo"] = "0";
        arc["len"] = "1/8";
        factors.push_back(arc);
        Json cyc;
        cyc["type"] = "cyclic";
        cyc["elems"] = Json::array({0, 3});
        factors.push_back(cyc);
    }
    box_json["boxes"].push_back(factors);
    BoxSet d = box_set_from_json(box_json);
    d.validate(sys);
    MeasureValue mv = measure(sys, d);
    REQUIRE(mv.exact.has_value());
    CHECK(*mv.exact == Rational(1, 8) * Rational(2, 6));

    RotationSystem sys_back = rotation_system_from_json(to_json(sys));
    CHECK(sys_back.axes.size() == 2);
    BoxSet d_back = box_set_from_json(to_json(d, sys));
    MeasureValue mv2 = measure(sys_back, d_back);
    REQUIRE(mv2.exact.has_value());
    CHECK(*mv2.exact == *mv.exact);
}
