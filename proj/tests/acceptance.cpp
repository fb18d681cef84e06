// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure.  Pass --cli <path> so the determinism criterion can drive the
// command-line tool.
#include "recur/dioph.hpp"
#include "recur/dynamics.hpp"
#include "recur/json_io.hpp"
#include "recur/kleitman.hpp"
#include "recur/ks.hpp"
#include "recur/setspec.hpp"

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

namespace fs = std::filesystem;
using namespace recur;

namespace {

int g_failures = 0;

struct Criterion {
    int id;
    std::string label;
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    bool ok = true;
    std::string detail;

    void fail(const std::string& why) {
        ok = false;
        if (!detail.empty()) detail += "; ";
        detail += why;
    }
    double seconds() const {
        return std::chrono::duration_cast<std::chrono::milliseconds>(
                   std::chrono::steady_clock::now() - start)
                   .count() /
               1000.0;
    }
    void report(double limit_s) {
        double secs = seconds();
        if (limit_s > 0 && secs > limit_s) fail("runtime above limit");
        std::ostringstream os;
        os << (ok ? "[PASS]" : "[FAIL]") << " criterion " << id << ": " << label << " ("
           << secs << "s)";
        if (!ok) os << " -- " << detail;
        std::cout << os.str() << std::endl;
        if (!ok) ++g_failures;
    }
};

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

// criterion 1: 4||x|| <= |e(x)-1| <= 2pi||x|| on 1e6 points, exact anchors
void criterion_1() {
    Criterion c{1, "norm/character inequality on 1e6 points"};
    const Real slack(std::ldexp(1.0, -100));
    const Real two_pi = 2 * pi_value();
    std::int64_t violations = 0;
    auto check = [&](const Real& v) {
        TorusPoint x(v);
        Real norm = torus_norm(x);
        Real chord = char_distance(x);
        if (!(4 * norm <= chord + slack)) ++violations;
        if (!(chord <= two_pi * norm + slack)) ++violations;
    };
    const int grid = 500000;
    for (int i = 0; i < grid; ++i) check(Real(i) / grid);
    std::mt19937_64 rng(1234);
    for (int i = 0; i < 500000; ++i)
        check(Real(rng()) / Real(std::numeric_limits<std::uint64_t>::max()));
    if (violations) c.fail(std::to_string(violations) + " inequality violations");
    if (char_distance(TorusPoint(Real(0))) != 0) c.fail("|e(0)-1| not exactly 0");
    if (abs(char_distance(TorusPoint(Rational(1, 4))) - sqrt(Real(2))) > slack)
        c.fail("|e(1/4)-1| differs from sqrt(2)");
    if (abs(char_distance(TorusPoint(Rational(1, 2))) - 2) > slack)
        c.fail("|e(1/2)-1| differs from 2");
    c.report(5.0);
}

// criterion 2: R_0(T_alpha; D) inside Bohr(alpha, eta) on [-1e4, 1e4], with
// mu(D) = eta^d 2^{-d} exactly
void criterion_2() {
    Criterion c{2, "windowed R_0 inside Bohr, exact box measure"};
    const Window w{-10000, 10000};
    for (int d = 1; d <= 2; ++d) {
        std::vector<Frequencies> freqs;
        if (d == 1) freqs = {Frequencies::from_rationals({Rational(1, 4)}),
                             Frequencies::from_vector(make_independent_frequencies(1))};
        else
            freqs = {Frequencies::from_rationals({Rational(1, 4), Rational(1, 3)}),
                     Frequencies::from_vector(make_independent_frequencies(2))};
        for (const Rational& eta : {Rational(1, 8), Rational(1, 4), Rational(1, 2)}) {
            for (const Frequencies& freq : freqs) {
                RotationSystem sys = RotationSystem::torus(freq);
                BoxSet box = bohr_return_box(d, eta);
                MeasureValue mv = measure(sys, box);
                Rational expected = 1;
                for (int j = 0; j < d; ++j) expected *= eta / 2;
                if (!mv.exact || *mv.exact != expected) {
                    c.fail("mu(D) not exactly eta^d 2^-d");
                    continue;
                }
                ReturnSet rs = return_set(sys, box, Rational(0), w);
                BohrSpec bohr{freq, eta};
                for (std::int64_t n : rs.members.members)
                    if (is_false(bohr_contains(bohr, n))) {
                        c.fail("member escapes Bohr at n=" + std::to_string(n));
                        break;
                    }
            }
        }
    }
    c.report(30.0);
}

// criterion 3: sumset containment, >= 20 parameter draws on [-2000, 2000]
void criterion_3() {
    Criterion c{3, "Bohr + BH sumset containment, 20 draws"};
    std::mt19937_64 rng(77);
    const Window w{-2000, 2000};
    int draws = 0;
    while (draws < 20) {
        int d = 1 + static_cast<int>(rng() % 3);
        Frequencies freq = Frequencies::from_vector(
            make_independent_frequencies(d, std::nullopt, 128, 0, rng() % 4));
        Rational eps(static_cast<std::int64_t>(rng() % 9 + 4), 100);       // 0.04 .. 0.12
        Rational eta(static_cast<std::int64_t>(rng() % 80 + 20), 100);     // 0.20 .. 0.99
        SumsetReport rep = check_sumset_containment(freq, eps, eta, w, Tol{0x1p-40});
        ++draws;
        if (!rep.holds())
            c.fail("violations on draw " + std::to_string(draws) + " (" +
                   std::to_string(rep.violations.size()) + ")");
    }
    c.report(60.0);
}

// criterion 4: Kleitman exhaustive behavior for k=2, d <= 4
void criterion_4() {
    Criterion c{4, "Kleitman exhaustive verdicts for k=2, d<=4"};
    for (std::int64_t d = 1; d <= 4; ++d) {
        // deterministic verdict: identical reruns
        KleitmanInstance inst;
        inst.k = 2;
        inst.d = d;
        inst.delta = Rational(1, 2);
        inst.radius = 1;
        KleitmanVerdict a = kleitman_check(inst);
        KleitmanVerdict b = kleitman_check(inst);
        if (a.holds != b.holds || a.subsets_checked != b.subsets_checked)
            c.fail("nondeterministic verdict at d=" + std::to_string(d));
        if (a.counterexample && b.counterexample &&
            (a.counterexample->subset != b.counterexample->subset ||
             a.counterexample->center != b.counterexample->center))
            c.fail("nondeterministic counterexample at d=" + std::to_string(d));

        // singleton threshold is always a counterexample
        KleitmanInstance singleton = inst;
        singleton.delta = Rational(1, (std::int64_t(1) << d) + 1);
        KleitmanVerdict sv = kleitman_check(singleton);
        if (sv.min_subset_size != 1 || sv.holds || !sv.counterexample ||
            sv.counterexample->subset.size() != 1)
            c.fail("singleton case not a counterexample at d=" + std::to_string(d));

        // r = d with at least two elements always holds; delta = 3/4 keeps the
        // minimum subset size at 2 even for d = 1
        KleitmanInstance full = inst;
        full.radius = d;
        full.delta = Rational(3, 4);
        KleitmanVerdict fv = kleitman_check(full);
        if (fv.min_subset_size < 2 || !fv.holds)
            c.fail("full-radius case failed at d=" + std::to_string(d));
    }
    c.report(600.0);
}

// criterion 5: witness re-verification on random configurations
void criterion_5() {
    Criterion c{5, "hamming witnesses re-verified via bh_contains"};
    std::mt19937_64 rng(4242);
    int produced = 0, mismatches = 0, attempts = 0;
    while (produced < 10 && attempts < 40) {
        ++attempts;
        int d = 1 + static_cast<int>(rng() % 3);
        std::int64_t k = 4 + static_cast<std::int64_t>(rng() % 2);  // 4 or 5
        Rational eps = k == 4 ? Rational(80 + static_cast<std::int64_t>(rng() % 20), 100)
                              : Rational(65 + static_cast<std::int64_t>(rng() % 35), 100);
        std::int64_t m = static_cast<std::int64_t>(rng() % 7) - 3;
        Frequencies freq = Frequencies::from_vector(
            make_independent_frequencies(d, std::nullopt, 128, 0, rng() % 3));
        WindowedSet a =
            WindowedSet::from_predicate({-3000, 3000}, [](std::int64_t) { return true; }, "all");
        WitnessResult res = hamming_recurrence_witness(freq, eps, m, a, k, 200000);
        if (const auto* wit = std::get_if<HammingWitness>(&res)) {
            ++produced;
            BohrHammingSpec bh{freq, eps, eps, m};
            if (is_false(bh_contains(bh, wit->a - wit->b))) ++mismatches;
            if (wit->a == wit->b) ++mismatches;
        }
    }
    if (produced < 10)
        c.fail("only " + std::to_string(produced) + " witnesses produced in " +
               std::to_string(attempts) + " attempts");
    if (mismatches) c.fail(std::to_string(mismatches) + " re-verification mismatches");
    c.report(0.0);
}

// criterion 6: Cantor stage measures exactly uniform with exact ancestor masses
void criterion_6() {
    Criterion c{6, "Cantor measure exactness for branching (2,2,2)"};
    auto fams = build_cantor({2, 2, 2}, Arc::from_rational(Rational(0), Rational(1)));
    for (std::size_t stage = 0; stage < fams.size(); ++stage) {
        DiscreteMeasure mu = stage_measure(fams[stage]);
        if (mu.total_mass() != 1) c.fail("stage mass not exactly 1");
        for (std::size_t j = 0; j <= stage; ++j) {
            for (const Arc& ancestor : fams[j].intervals) {
                Rational mass = measure_of_arc(mu, ancestor);
                if (mass != Rational(1, static_cast<std::int64_t>(fams[j].size())))
                    c.fail("ancestor mass differs from 1/#I at stage " + std::to_string(stage));
            }
        }
    }
    c.report(1.0);
}

PipelineReport run_pipeline_for_acceptance() {
    KsCaps caps;
    caps.max_points = 3;
    PipelineReport rep =
        build_ks_pipeline(SetSpec::all(), {0, 0, 0}, 3, Window{-100000, 100000}, caps);
    return rep;
}

// criterion 7: stage bounds ||f~ - e_n|| < 3/k at all later stages + shrink
// certificates
void criterion_7(const PipelineReport& rep) {
    Criterion c{7, "KS stage bounds and shrink certificates"};
    auto checks = check_stage_bounds(rep);
    if (checks.empty()) c.fail("no stage-bound checks generated");
    for (const auto& chk : checks)
        if (!chk.ok) {
            std::ostringstream os;
            os << "bound failed at k=" << chk.k << " n=" << chk.n << " k'=" << chk.k_prime;
            c.fail(os.str());
            break;
        }
    for (const PipelineStage& st : rep.stages) {
        const int k = st.record.k;
        const Real budget = Real(1) / (2 * k);
        std::vector<std::int64_t> pinned = st.record.selection_union;
        pinned.insert(pinned.end(), st.ambient_next.begin(), st.ambient_next.end());
        pinned.push_back(st.target_m);
        for (std::int64_t n : pinned) {
            Real lhs = 2 * pi_value() * std::llabs(n) * st.record.shrink_radius;
            if (!(lhs < budget)) {
                c.fail("shrink certificate failed at stage " + std::to_string(k));
                break;
            }
        }
        bool has_selection = false;
        for (const PsiRecord& pr : st.record.psi_table) has_selection |= !pr.selection.empty();
        if (!has_selection) c.fail("stage " + std::to_string(k) + " selected nothing");
    }
    c.report(600.0);
}

// criterion 8: m=0 rigidity profile inside the nonincreasing 3/k envelope
void criterion_8(const PipelineReport& rep) {
    Criterion c{8, "rigidity profile decay at the 3/k envelope"};
    if (rep.zero_profile.empty()) c.fail("empty m=0 profile");
    Real prev_bound(1000);
    int prev_stage = 0;
    std::vector<bool> stage_seen(rep.stages.size() + 1, false);
    for (const ProfileEntry& e : rep.zero_profile) {
        if (!e.within_bound) c.fail("envelope violation at s=" + std::to_string(e.s));
        if (e.origin_stage < prev_stage) c.fail("profile not ordered by stage");
        if (e.origin_stage > prev_stage) {
            if (!(e.bound <= prev_bound)) c.fail("envelope not nonincreasing");
            prev_bound = e.bound;
            prev_stage = e.origin_stage;
        }
        stage_seen[e.origin_stage] = true;
    }
    for (std::size_t k = 1; k < stage_seen.size(); ++k)
        if (!stage_seen[k]) c.fail("stage " + std::to_string(k) + " contributed no elements");
    c.report(0.0);
}

// criterion 9: solver strategies agree on solvability; named examples reproduce
void criterion_9() {
    Criterion c{9, "kronecker exhaustive/lattice agreement on 100 queries"};
    std::mt19937_64 rng(99);
    FrequencyVector fv1 = make_independent_frequencies(1);
    FrequencyVector fv2 = make_independent_frequencies(2);
    for (int trial = 0; trial < 100; ++trial) {
        ApproxQuery q;
        q.freq = trial % 2 == 0 ? Frequencies::from_vector(fv1) : Frequencies::from_vector(fv2);
        for (std::size_t j = 0; j < q.freq.dim(); ++j)
            q.target.emplace_back(Rational(static_cast<std::int64_t>(rng() % 10000), 10000));
        q.eps = Rational(static_cast<std::int64_t>(rng() % 10 + 1), 100);
        q.search_bound = 100000;
        q.strategy = ApproxStrategy::Exhaustive;
        ApproxResult ex = kronecker_approximate(q);
        q.strategy = ApproxStrategy::Lattice;
        ApproxResult la = kronecker_approximate(q);
        if (ex.n.has_value() != la.n.has_value()) {
            c.fail("solvability disagreement on trial " + std::to_string(trial));
            break;
        }
    }
    // named worked examples
    {
        ApproxQuery q;
        q.freq = Frequencies::from_vector(fv1);
        q.target = {TorusPoint(Real(0))};
        q.eps = Rational(1, 10);
        q.search_bound = 10000;
        q.min_abs = 1;
        ApproxResult r = kronecker_approximate(q);
        if (!r.n || *r.n != 5) c.fail("homogeneous example did not give n=5");
    }
    {
        ApproxQuery q;
        q.freq = Frequencies::from_vector(fv1);
        q.target = {TorusPoint(Rational(1, 2))};
        q.eps = Rational(1, 20);
        q.search_bound = 10000;
        ApproxResult r = kronecker_approximate(q);
        if (!r.n || *r.n != 6) c.fail("target-1/2 example did not give n=6");
    }
    c.report(0.0);
}

// criterion 10: identical config + seed => byte-identical artifacts
void criterion_10(const std::string& cli) {
    Criterion c{10, "byte-identical artifacts under identical config and seed"};
    if (cli.empty()) {
        c.fail("no --cli path supplied");
        c.report(0.0);
        return;
    }
    fs::path base = fs::temp_directory_path() / "recur_acceptance";
    fs::remove_all(base);
    fs::create_directories(base);

    struct Run {
        std::string args;
        std::vector<std::string> artifacts;
    };
    std::vector<Run> runs = {
        {"bohr enumerate --alpha sqrt2 --eta 0.15 --window 0:200", {"bohr_enumerate.json",
                                                                    "bohr_enumerate.csv"}},
        {"kleitman verify --k 2 --d 5 --delta 1/2 --r 2 --mode sampled --trials 60 --seed 11 "
         "--cap 64",
         {"kleitman_verdict.json"}},
        {"ks build --stages 2 --window -2000:2000 --targets 0,0 --seed 3",
         {"stages.json", "measure.csv", "profile.csv"}},
    };
    for (std::size_t i = 0; i < runs.size(); ++i) {
        fs::path out1 = base / ("a" + std::to_string(i));
        fs::path out2 = base / ("b" + std::to_string(i));
        for (const fs::path& out : {out1, out2}) {
            std::string cmd = cli + " --out " + out.string() + " " + runs[i].args + " >/dev/null";
            if (std::system(cmd.c_str()) != 0) {
                c.fail("run failed: " + runs[i].args);
                break;
            }
        }
        for (const std::string& artifact : runs[i].artifacts) {
            if (read_file(out1 / artifact) != read_file(out2 / artifact) ||
                read_file(out1 / artifact).empty()) {
                c.fail("artifact differs or is empty: " + artifact);
            }
        }
    }
    c.report(0.0);
}

// spec'd CLI contract: exit codes and the --verify round trips
void cli_contract(const std::string& cli) {
    Criterion c{0, "cli contract: exit codes and verify modes"};
    c.label = "cli contract: exit codes and verify modes";
    if (cli.empty()) {
        c.fail("no --cli path supplied");
        c.report(0.0);
        return;
    }
    fs::path base = fs::temp_directory_path() / "recur_cli_contract";
    fs::remove_all(base);
    fs::create_directories(base);
    auto run = [&](const std::string& args) {
        std::string cmd = cli + " " + args + " >/dev/null 2>&1";
        int status = std::system(cmd.c_str());
        return WEXITSTATUS(status);
    };
    // invalid window: validation error, exit 2
    if (run("bohr enumerate --alpha sqrt2 --eta 0.15 --window 10:0 --out " +
            (base / "w").string()) != 2)
        c.fail("lo > hi window did not exit 2");
    // exhaustive cap overrun: exit 4
    if (run("kleitman verify --k 3 --d 4 --delta 1/2 --r 1 --mode exhaustive --out " +
            (base / "cap").string()) != 4)
        c.fail("cap overrun did not exit 4");
    // singleton counterexample via the CLI (spec example)
    fs::path kv = base / "kv";
    if (run("kleitman verify --k 2 --d 2 --delta 0.25 --r 1 --out " + kv.string()) != 0)
        c.fail("kleitman verify run failed");
    else {
        Json v = load_json_file((kv / "kleitman_verdict.json").string());
        if (v.at("holds").get<bool>() || !v.contains("counterexample"))
            c.fail("delta=0.25 d=2 did not produce the singleton counterexample");
    }
    // verify round trips re-accept their own artifacts
    fs::path b1 = base / "bohr";
    if (run("bohr enumerate --alpha sqrt2 --eta 0.15 --window 0:120 --out " + b1.string()) != 0)
        c.fail("bohr enumerate failed");
    else if (run("bohr enumerate --verify " + (b1 / "bohr_enumerate.json").string()) != 0)
        c.fail("bohr --verify rejected its own artifact");
    fs::path b2 = base / "bh";
    if (run("bh enumerate --alpha sqrt2,sqrt3 --eps 0.15 --eta 0.5 --window -80:80 --out " +
            b2.string()) != 0)
        c.fail("bh enumerate failed");
    else if (run("bh enumerate --verify " + (b2 / "bh_enumerate.json").string()) != 0)
        c.fail("bh --verify rejected its own artifact");
    fs::path kr = base / "kron";
    if (run("kronecker solve --alpha sqrt2 --target 1/2 --eps 0.05 --bound 10000 --out " +
            kr.string()) != 0)
        c.fail("kronecker solve failed");
    else if (run("kronecker solve --verify " + (kr / "kronecker.json").string()) != 0)
        c.fail("kronecker --verify rejected its own artifact");
    std::ostringstream os;
    os << (c.ok ? "[PASS]" : "[FAIL]") << " " << c.label;
    if (!c.ok) os << " -- " << c.detail;
    std::cout << os.str() << std::endl;
    if (!c.ok) ++g_failures;
}

}  // namespace

int main(int argc, char** argv) {
    set_precision_bits(128);
    std::string cli;
    for (int i = 1; i + 1 < argc; ++i)
        if (std::string(argv[i]) == "--cli") cli = argv[i + 1];

    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6();
    auto t0 = std::chrono::steady_clock::now();
    PipelineReport rep = run_pipeline_for_acceptance();
    double pipeline_s = std::chrono::duration_cast<std::chrono::milliseconds>(
                            std::chrono::steady_clock::now() - t0)
                            .count() /
                        1000.0;
    std::cout << "(pipeline run for criteria 7/8 took " << pipeline_s << "s)" << std::endl;
    criterion_7(rep);
    criterion_8(rep);
    criterion_9();
    criterion_10(cli);
    cli_contract(cli);

    if (g_failures) {
        std::cout << g_failures << " criterion(s) failed" << std::endl;
        return 1;
    }
    std::cout << "all criteria passed" << std::endl;
    return 0;
}
