// Command-line front end: every module exposed as subcommands with JSON
// configuration and CSV/JSON artifacts.
//
// Exit codes: 0 success, 2 validation error, 3 invariant violation detected,
// 4 resource cap exceeded.
#include "recur/dioph.hpp"
#include "recur/dynamics.hpp"
#include "recur/json_io.hpp"
#include "recur/kleitman.hpp"
#include "recur/ks.hpp"
#include "recur/setspec.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using namespace recur;

namespace {

struct CommonOpts {
    std::string config_path;
    std::string out_dir = "out";
    unsigned precision_bits = 128;
    double tau = 0x1p-40;
    std::uint64_t seed = 0;
    int workers = 1;
    std::string window = "";
    Json config;  // loaded file, command-specific keys

    Tol tol() const { return Tol{tau}; }

    Window parse_window(const std::string& fallback) const {
        std::string w = !window.empty() ? window : cfg_str("window", fallback);
        auto colon = w.find(':', 1);  // allow a leading minus
        if (colon == std::string::npos)
            throw ValidationError("window must look like lo:hi, got '" + w + "'");
        Window out;
        try {
            out.lo = std::stoll(w.substr(0, colon));
            out.hi = std::stoll(w.substr(colon + 1));
        } catch (const std::exception&) {
            throw ValidationError("window must look like lo:hi, got '" + w + "'");
        }
        out.validate();
        return out;
    }

    std::string cfg_str(const std::string& key, const std::string& dflt) const {
        if (config.contains(key)) {
            if (config.at(key).is_string()) return config.at(key).get<std::string>();
            return config.at(key).dump();
        }
        return dflt;
    }

    fs::path out_file(const std::string& name) const {
        fs::create_directories(out_dir);
        return fs::path(out_dir) / name;
    }
};

// "sqrt2,sqrt3" -> generator form; "1/3,0.2" -> exact rationals
Frequencies parse_frequencies(const std::string& alpha_tokens, const std::string& freq_file) {
    if (!freq_file.empty()) return frequencies_from_json(load_json_file(freq_file));
    if (alpha_tokens.empty()) throw ValidationError("need --alpha or --freq-file");
    std::vector<std::string> tokens;
    std::stringstream ss(alpha_tokens);
    std::string tok;
    while (std::getline(ss, tok, ',')) tokens.push_back(tok);
    if (tokens.empty()) throw ValidationError("empty --alpha");

    bool all_sqrt = true, all_rational = true;
    for (const std::string& t : tokens) {
        if (t.rfind("sqrt", 0) == 0) all_rational = false;
        else all_sqrt = false;
    }
    if (all_sqrt) {
        FrequencyVector fv;
        for (const std::string& t : tokens) {
            Generator g;
            try {
                g.prime = std::stoull(t.substr(4));
            } catch (const std::exception&) {
                throw ValidationError("bad frequency token '" + t + "'");
            }
            fv.generators.push_back(g);
            fv.entries.emplace_back(g.evaluate());
        }
        for (std::size_t i = 0; i < fv.generators.size(); ++i)
            for (std::size_t j = i + 1; j < fv.generators.size(); ++j)
                if (fv.generators[i].prime == fv.generators[j].prime)
                    throw ValidationError("sqrt tokens need distinct primes");
        std::int64_t bound = fv.entries.size() <= 2 ? 50 : 20;
        fv.certificate = certify_independence(fv.entries, bound, Real(1e-6));
        if (!fv.certificate.passed)
            throw InvariantViolation("independence certificate failed for --alpha");
        return Frequencies::from_vector(std::move(fv));
    }
    if (all_rational) {
        std::vector<Rational> qs;
        for (const std::string& t : tokens) qs.push_back(rational_from_decimal(t));
        return Frequencies::from_rationals(std::move(qs));
    }
    throw ValidationError("--alpha must be all sqrtP tokens or all rationals");
}

std::vector<TorusPoint> parse_targets(const std::string& tokens, std::size_t dim) {
    std::vector<TorusPoint> out;
    std::stringstream ss(tokens);
    std::string tok;
    while (std::getline(ss, tok, ',')) out.emplace_back(rational_from_decimal(tok));
    if (out.size() != dim) throw ValidationError("target needs one coordinate per frequency");
    return out;
}

void write_text_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot write " + path.string());
    out << text;
}

std::string csv_real(const Real& x) { return decimal_string(x); }

bool json_list_contains(const Json& list, std::int64_t n) {
    for (const Json& v : list)
        if (v.get<std::int64_t>() == n) return true;
    return false;
}

// ---- command implementations ----

int cmd_bohr_enumerate(const CommonOpts& common, const std::string& alpha,
                       const std::string& freq_file, const std::string& eta_str,
                       const std::string& verify_path) {
    if (!verify_path.empty()) {
        Json prev = load_json_file(verify_path);
        BohrSpec stored = bohr_spec_from_json(prev.at("spec"));
        WindowedSet claimed = windowed_set_from_json(prev.at("members"));
        for (std::int64_t n = claimed.window.lo; n <= claimed.window.hi; ++n) {
            Trilean t = bohr_contains(stored, n, common.tol());
            bool says = claimed.contains(n);
            if ((says && is_false(t)) ||
                (!says && is_true(t) && !json_list_contains(prev.at("ambiguous"), n))) {
                std::cerr << "verify: membership mismatch at n=" << n << "\n";
                return 3;
            }
        }
        std::cout << "verify: all membership claims re-checked\n";
        return 0;
    }

    Frequencies freq =
        parse_frequencies(alpha.empty() ? common.cfg_str("alpha", "") : alpha, freq_file);
    Rational eta = rational_from_decimal(eta_str.empty() ? common.cfg_str("eta", "1/4") : eta_str);
    BohrSpec spec{freq, eta};
    Window w = common.parse_window("-100:100");

    Enumeration e = bohr_enumerate(spec, w, common.tol(), common.workers);
    Json j;
    j["spec"] = to_json(spec);
    j["members"] = to_json(e.set);
    j["ambiguous"] = e.ambiguous;
    save_json_file(common.out_file("bohr_enumerate.json").string(), j);

    std::ostringstream csv;
    csv << "n";
    for (std::size_t c = 0; c < freq.dim(); ++c) csv << ",norm_" << c;
    csv << ",member\n";
    for (std::int64_t n = w.lo; n <= w.hi; ++n) {
        csv << n;
        for (std::size_t c = 0; c < freq.dim(); ++c)
            csv << ',' << csv_real(freq.norm_of_multiple(c, n));
        csv << ',' << (e.set.contains(n) ? 1 : 0) << '\n';
    }
    write_text_file(common.out_file("bohr_enumerate.csv"), csv.str());
    std::cout << "bohr enumerate: " << e.set.members.size() << " members, " << e.ambiguous.size()
              << " ambiguous in [" << w.lo << "," << w.hi << "]\n"
              << "artifacts: bohr_enumerate.json, bohr_enumerate.csv\n";
    return 0;
}

int cmd_bh_enumerate(const CommonOpts& common, const std::string& alpha,
                     const std::string& freq_file, const std::string& eps_str,
                     const std::string& eta_str, std::int64_t shift,
                     const std::string& verify_path) {
    if (!verify_path.empty()) {
        Json prev = load_json_file(verify_path);
        BohrHammingSpec stored = bh_spec_from_json(prev.at("spec"));
        WindowedSet claimed = windowed_set_from_json(prev.at("members"));
        for (std::int64_t n = claimed.window.lo; n <= claimed.window.hi; ++n) {
            Trilean t = bh_contains(stored, n, common.tol());
            bool says = claimed.contains(n);
            if ((says && is_false(t)) ||
                (!says && is_true(t) && !json_list_contains(prev.at("ambiguous"), n))) {
                std::cerr << "verify: membership mismatch at n=" << n << "\n";
                return 3;
            }
        }
        std::cout << "verify: all membership claims re-checked\n";
        return 0;
    }

    Frequencies freq =
        parse_frequencies(alpha.empty() ? common.cfg_str("alpha", "") : alpha, freq_file);
    BohrHammingSpec spec{
        freq,
        rational_from_decimal(eps_str.empty() ? common.cfg_str("eps", "1/10") : eps_str),
        rational_from_decimal(eta_str.empty() ? common.cfg_str("eta", "1/2") : eta_str), shift};
    Window w = common.parse_window("-100:100");

    Enumeration e = bh_enumerate(spec, w, common.tol(), common.workers);
    Json j;
    j["spec"] = to_json(spec);
    j["members"] = to_json(e.set);
    j["ambiguous"] = e.ambiguous;
    save_json_file(common.out_file("bh_enumerate.json").string(), j);

    std::ostringstream csv;
    csv << "n";
    for (std::size_t c = 0; c < freq.dim(); ++c) csv << ",norm_" << c;
    csv << ",member\n";
    for (std::int64_t n = w.lo; n <= w.hi; ++n) {
        csv << n;
        for (const Real& norm : bh_coordinate_norms(spec, n)) csv << ',' << csv_real(norm);
        csv << ',' << (e.set.contains(n) ? 1 : 0) << '\n';
    }
    write_text_file(common.out_file("bh_enumerate.csv"), csv.str());
    std::cout << "bh enumerate: threshold " << spec.threshold() << ", " << e.set.members.size()
              << " members, " << e.ambiguous.size() << " ambiguous\n"
              << "artifacts: bh_enumerate.json, bh_enumerate.csv\n";
    return 0;
}

int cmd_bh_check_sumset(const CommonOpts& common, const std::string& alpha,
                        const std::string& freq_file, const std::string& eps_str,
                        const std::string& eta_str) {
    Frequencies freq =
        parse_frequencies(alpha.empty() ? common.cfg_str("alpha", "") : alpha, freq_file);
    Rational eps = rational_from_decimal(eps_str.empty() ? common.cfg_str("eps", "1/5") : eps_str);
    Rational eta = rational_from_decimal(eta_str.empty() ? common.cfg_str("eta", "1/2") : eta_str);
    Window w = common.parse_window("-500:500");
    SumsetReport rep = check_sumset_containment(freq, eps, eta, w, common.tol(), common.workers);
    Json j;
    j["eps"] = rational_string(eps);
    j["eta"] = rational_string(eta);
    j["window"] = Json::array({w.lo, w.hi});
    j["bohr_half_count"] = rep.bohr_members.size();
    j["bh_half_count"] = rep.bh_half_members.size();
    j["sums_checked"] = rep.sums_checked;
    j["sums_ambiguous"] = rep.sums_ambiguous;
    j["violations"] = rep.violations;
    j["holds"] = rep.holds();
    save_json_file(common.out_file("sumset_report.json").string(), j);
    std::cout << "check-sumset: " << rep.sums_checked << " sums checked, "
              << rep.violations.size() << " violations\nartifacts: sumset_report.json\n";
    return rep.holds() ? 0 : 3;
}

int cmd_bh_cover(const CommonOpts& common, const std::string& alpha,
                 const std::string& freq_file, const std::string& target,
                 const std::string& eps_str, const std::string& eta_str, std::int64_t bound) {
    Frequencies freq =
        parse_frequencies(alpha.empty() ? common.cfg_str("alpha", "") : alpha, freq_file);
    std::vector<TorusPoint> z =
        parse_targets(target.empty() ? common.cfg_str("target", "0") : target, freq.dim());
    Rational eps = rational_from_decimal(eps_str.empty() ? common.cfg_str("eps", "1/10") : eps_str);
    Rational eta = rational_from_decimal(eta_str.empty() ? common.cfg_str("eta", "1/2") : eta_str);
    Window w = common.parse_window("-500:500");
    CoverReport rep = shifted_bh_cover(freq, z, eps, eta, bound, w, common.tol());
    Json j;
    j["found"] = rep.found();
    if (rep.found()) j["m"] = *rep.m;
    j["best_norm"] = decimal_string(rep.best_norm);
    j["best_candidate"] = rep.best_candidate;
    j["bh_members"] = rep.bh_members;
    j["violations"] = rep.violations;
    j["ambiguous"] = rep.ambiguous;
    save_json_file(common.out_file("cover_report.json").string(), j);
    if (!rep.found()) {
        std::cout << "cover: no m within bound; best max-norm " << decimal_string(rep.best_norm)
                  << " at " << rep.best_candidate << "\n";
        return 0;
    }
    std::cout << "cover: m=" << *rep.m << ", " << rep.bh_members.size()
              << " translated members, " << rep.violations.size() << " violations\n"
              << "artifacts: cover_report.json\n";
    return rep.violations.empty() ? 0 : 3;
}

int cmd_kronecker_solve(const CommonOpts& common, const std::string& alpha,
                        const std::string& freq_file, const std::string& target,
                        const std::string& eps_str, std::int64_t bound,
                        const std::string& strategy, std::int64_t min_abs,
                        const std::string& verify_path) {
    if (!verify_path.empty()) {
        Json prev = load_json_file(verify_path);
        Frequencies freq = frequencies_from_json(prev.at("freq"));
        if (!prev.at("n").is_null()) {
            std::int64_t n = prev.at("n").get<std::int64_t>();
            Rational eps = rational_from_decimal(prev.at("eps").get<std::string>());
            std::vector<TorusPoint> z;
            for (const Json& t : prev.at("target"))
                z.emplace_back(rational_from_decimal(t.get<std::string>()));
            Real worst = 0;
            for (std::size_t j = 0; j < freq.dim(); ++j) {
                Real norm = torus_norm(TorusPoint(Real(n) * freq.alpha(j)) - z[j]);
                if (norm > worst) worst = norm;
            }
            if (!is_true(lt_guarded(worst, to_real(eps), common.tol()))) {
                std::cerr << "verify: claimed n fails the inequality\n";
                return 3;
            }
        }
        std::cout << "verify: solution re-checked\n";
        return 0;
    }

    ApproxQuery q;
    q.freq = parse_frequencies(alpha.empty() ? common.cfg_str("alpha", "") : alpha, freq_file);
    std::string tgt = target.empty() ? common.cfg_str("target", "0") : target;
    std::vector<std::string> raw_targets;
    {
        std::stringstream ss(tgt);
        std::string tok;
        while (std::getline(ss, tok, ',')) raw_targets.push_back(tok);
    }
    q.target = parse_targets(tgt, q.freq.dim());
    q.eps = rational_from_decimal(eps_str.empty() ? common.cfg_str("eps", "1/10") : eps_str);
    q.search_bound = bound;
    q.min_abs = min_abs;
    q.strategy = strategy == "lattice" ? ApproxStrategy::Lattice : ApproxStrategy::Exhaustive;
    ApproxResult r = kronecker_approximate(q, common.tol());

    Json j;
    j["freq"] = to_json(q.freq);
    Json tj = Json::array();
    for (const std::string& t : raw_targets)
        tj.push_back(rational_string(rational_from_decimal(t)));
    j["target"] = tj;
    j["eps"] = rational_string(q.eps);
    j["strategy"] = strategy == "lattice" ? "lattice" : "exhaustive";
    j["lattice_fallback"] = r.lattice_fallback;
    if (r.n) {
        j["n"] = *r.n;
        Json norms = Json::array();
        for (const Real& norm : r.norms) norms.push_back(decimal_string(norm));
        j["norms"] = norms;
    } else {
        j["n"] = nullptr;
        j["best_n"] = r.best_n;
        j["best_norm"] = decimal_string(r.best_norm);
    }
    save_json_file(common.out_file("kronecker.json").string(), j);
    if (r.n) std::cout << "kronecker: n=" << *r.n << "\n";
    else
        std::cout << "kronecker: not found within bound; best n=" << r.best_n << " at max-norm "
                  << decimal_string(r.best_norm) << "\n";
    std::cout << "artifacts: kronecker.json\n";
    return 0;
}

int cmd_kronecker_embed(const CommonOpts& common, const std::string& alpha,
                        const std::string& freq_file, std::int64_t k,
                        const std::string& eps_str, std::int64_t bound) {
    Frequencies freq =
        parse_frequencies(alpha.empty() ? common.cfg_str("alpha", "") : alpha, freq_file);
    Rational eps = rational_from_decimal(eps_str.empty() ? common.cfg_str("eps", "1/10") : eps_str);
    EmbeddingTable t = embed_group(freq, k, eps, bound, common.tol());
    Json j;
    j["k"] = t.k;
    j["d"] = t.d;
    j["eps"] = rational_string(t.eps);
    j["max_norm"] = decimal_string(t.max_norm);
    j["n_of"] = t.n_of;
    save_json_file(common.out_file("embedding.json").string(), j);
    std::cout << "embed: " << t.n_of.size() << " tuples, max norm " << decimal_string(t.max_norm)
              << "\nartifacts: embedding.json\n";
    return 0;
}

int cmd_system_returns(const CommonOpts& common, const std::string& system_path,
                       const std::string& set_path, const std::string& c_str,
                       const std::string& verify_path) {
    RotationSystem sys = rotation_system_from_json(load_json_file(system_path));
    BoxSet d = box_set_from_json(load_json_file(set_path));

    if (!verify_path.empty()) {
        Json prev = load_json_file(verify_path);
        WindowedSet claimed = windowed_set_from_json(prev.at("members"));
        Rational c0 = rational_from_decimal(prev.at("c").get<std::string>());
        for (std::int64_t n = claimed.window.lo; n <= claimed.window.hi; ++n) {
            MeasureValue mv = intersection_measure(sys, d, n);
            Trilean t = mv.exact ? (*mv.exact > c0 ? Trilean::True : Trilean::False)
                                 : lt_guarded(to_real(c0), mv.value, common.tol());
            bool says = claimed.contains(n);
            if ((says && is_false(t)) || (!says && is_true(t))) {
                std::cerr << "verify: return-set mismatch at n=" << n << "\n";
                return 3;
            }
        }
        std::cout << "verify: all return-set claims re-checked\n";
        return 0;
    }

    Rational c = rational_from_decimal(c_str.empty() ? common.cfg_str("c", "0") : c_str);
    Window w = common.parse_window("-1000:1000");
    ReturnSet rs = return_set(sys, d, c, w, common.tol(), common.workers);
    Json j;
    j["system"] = to_json(sys);
    j["set"] = to_json(d, sys);
    j["c"] = rational_string(c);
    j["members"] = to_json(rs.members);
    j["ambiguous"] = rs.ambiguous;
    save_json_file(common.out_file("returns.json").string(), j);

    std::ostringstream csv;
    csv << "n,measure,member\n";
    for (const auto& [n, mv] : rs.values)
        csv << n << ',' << csv_real(mv.value) << ',' << (rs.members.contains(n) ? 1 : 0) << '\n';
    write_text_file(common.out_file("returns.csv"), csv.str());
    std::cout << "returns: " << rs.members.members.size() << " members above c="
              << rational_string(c) << "\nartifacts: returns.json, returns.csv\n";
    return 0;
}

int cmd_system_aura(const CommonOpts& common, const std::string& system_path,
                    const std::string& set_path, const std::string& s_path,
                    const std::string& e_path) {
    RotationSystem sys = rotation_system_from_json(load_json_file(system_path));
    BoxSet d = box_set_from_json(load_json_file(set_path));
    WindowedSet s = windowed_set_from_json(load_json_file(s_path));
    WindowedSet e = windowed_set_from_json(load_json_file(e_path));
    Window w = common.parse_window("-500:500");
    AuraReport rep = aura_demo(s, e, sys, d, w, common.tol());
    Json j;
    j["members"] = to_json(rep.members);
    j["r0"] = to_json(rep.r0);
    Json wit = Json::array();
    for (const AuraWitness& x : rep.witnesses)
        wit.push_back(Json{{"member", x.member}, {"from_e", x.from_e}, {"from_r0", x.from_r0}});
    j["witnesses"] = wit;
    save_json_file(common.out_file("aura.json").string(), j);
    std::cout << "aura: " << rep.members.members.size() << " members with witnesses\n"
              << "artifacts: aura.json\n";
    return 0;
}

int cmd_density_falsify(const CommonOpts& common, const std::string& s_path,
                        const std::string& delta_str, const std::string& corpus_path) {
    WindowedSet s = windowed_set_from_json(load_json_file(s_path));
    Rational delta =
        rational_from_decimal(delta_str.empty() ? common.cfg_str("delta", "1/4") : delta_str);
    std::vector<WindowedSet> corpus;
    if (!corpus_path.empty()) {
        for (const Json& cj : load_json_file(corpus_path))
            corpus.push_back(windowed_set_from_json(cj));
    } else {
        corpus = make_structured_corpus(common.parse_window("-500:500"), common.seed);
    }
    auto cx = delta_recurrence_falsify(s, delta, corpus);
    Json j;
    j["delta"] = rational_string(delta);
    j["corpus_size"] = corpus.size();
    j["falsified"] = cx.has_value();
    if (cx) {
        j["corpus_index"] = cx->corpus_index;
        j["witness_source"] = cx->witness.source;
        j["witness_density"] = rational_string(cx->density);
    }
    save_json_file(common.out_file("falsify.json").string(), j);
    if (cx)
        std::cout << "falsify: counterexample '" << cx->witness.source << "' (density "
                  << rational_string(cx->density) << ")\n";
    else
        std::cout << "falsify: no counterexample in " << corpus.size() << " corpus sets\n";
    std::cout << "artifacts: falsify.json\n";
    return 0;
}

int cmd_kleitman_verify(const CommonOpts& common, std::int64_t k, std::int64_t d,
                        const std::string& delta_str, std::int64_t r, const std::string& mode,
                        std::int64_t trials, std::int64_t cap) {
    KleitmanInstance inst;
    inst.k = k;
    inst.d = d;
    inst.delta =
        rational_from_decimal(delta_str.empty() ? common.cfg_str("delta", "1/2") : delta_str);
    inst.radius = r;
    inst.mode = mode == "sampled" ? KleitmanMode::Sampled : KleitmanMode::Exhaustive;
    inst.trials = trials;
    inst.seed = common.seed;
    inst.group_cap = cap;

    auto start = std::chrono::steady_clock::now();
    KleitmanVerdict v = kleitman_check(inst);
    auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                  std::chrono::steady_clock::now() - start)
                  .count();

    Json j;
    j["k"] = k;
    j["d"] = d;
    j["delta"] = rational_string(inst.delta);
    j["r"] = r;
    j["mode"] = mode == "sampled" ? "sampled" : "exhaustive";
    j["min_subset_size"] = v.min_subset_size;
    j["holds"] = v.holds;
    j["subsets_checked"] = v.subsets_checked;
    j["pairs_checked"] = v.pairs_checked;
    if (v.counterexample) {
        j["counterexample"] =
            Json{{"subset", v.counterexample->subset}, {"center", v.counterexample->center}};
    }
    save_json_file(common.out_file("kleitman_verdict.json").string(), j);
    // runtime stays out of the artifact so identical runs stay byte-identical
    std::cout << "kleitman verify: " << (v.holds ? "holds" : "counterexample") << ", "
              << v.subsets_checked << " subsets in " << ms << " ms\n"
              << "artifacts: kleitman_verdict.json\n";
    return 0;
}

int cmd_kleitman_witness(const CommonOpts& common, const std::string& alpha,
                         const std::string& freq_file, const std::string& eps_str, std::int64_t m,
                         std::int64_t k, std::int64_t bound, const std::string& a_path) {
    Frequencies freq =
        parse_frequencies(alpha.empty() ? common.cfg_str("alpha", "") : alpha, freq_file);
    Rational eps = rational_from_decimal(eps_str.empty() ? common.cfg_str("eps", "9/10") : eps_str);
    Window w = common.parse_window("-500:500");
    WindowedSet a =
        a_path.empty()
            ? WindowedSet::from_predicate(w, [](std::int64_t) { return true; }, "all")
            : windowed_set_from_json(load_json_file(a_path));
    WitnessResult res = hamming_recurrence_witness(freq, eps, m, a, k, bound, common.tol());

    Json j;
    j["eps"] = rational_string(eps);
    j["m"] = m;
    j["k"] = k;
    if (const auto* wit = std::get_if<HammingWitness>(&res)) {
        j["found"] = true;
        j["a"] = wit->a;
        j["b"] = wit->b;
        j["translate"] = wit->translate;
        j["threshold"] = wit->threshold;
        j["passing_indices"] = wit->passing_indices;
        j["achieved_density"] = rational_string(wit->achieved_density);
        Json proof = Json::array();
        for (const WitnessProofEntry& e : wit->proof) {
            proof.push_back(Json{{"j", e.j},
                                 {"norm", decimal_string(e.norm)},
                                 {"part_w", decimal_string(e.part_w)},
                                 {"part_wp", decimal_string(e.part_wp)},
                                 {"part_m", decimal_string(e.part_m)},
                                 {"passes", e.passes}});
        }
        j["proof"] = proof;
        save_json_file(common.out_file("witness.json").string(), j);
        // independent re-verification of the membership claim
        BohrHammingSpec bh{freq, eps, eps, m};
        if (is_false(bh_contains(bh, wit->a - wit->b, common.tol()))) {
            std::cerr << "witness failed independent bh_contains re-verification\n";
            return 3;
        }
        std::cout << "witness: a=" << wit->a << " b=" << wit->b << " (a-b-m in BH)\n"
                  << "artifacts: witness.json\n";
        return 0;
    }
    const auto& fail = std::get<WitnessFailure>(res);
    j["found"] = false;
    j["stage"] = to_string(fail.stage);
    j["detail"] = fail.detail;
    save_json_file(common.out_file("witness.json").string(), j);
    std::cout << "witness: failed at stage " << to_string(fail.stage) << ": " << fail.detail
              << "\nartifacts: witness.json\n";
    return 0;
}

KsCaps caps_from_json(const Json& j) {
    KsCaps caps;
    caps.max_points = j.value("max_points", caps.max_points);
    caps.max_psi = j.value("max_psi", caps.max_psi);
    caps.psi_samples = j.value("psi_samples", caps.psi_samples);
    caps.select_cap = j.value("select_cap", caps.select_cap);
    caps.branching = j.value("branching", caps.branching);
    caps.expanding_r_cap = j.value("expanding_r_cap", caps.expanding_r_cap);
    caps.expanding_cap = j.value("expanding_cap", caps.expanding_cap);
    caps.sample_cap = j.value("sample_cap", caps.sample_cap);
    return caps;
}

int cmd_ks_build(const CommonOpts& common, const std::string& set_path, int stages,
                 const std::string& caps_path, const std::string& targets_str) {
    SetSpec s = set_path.empty() ? SetSpec::all() : set_spec_from_json(load_json_file(set_path));
    KsCaps caps = caps_path.empty() ? KsCaps{} : caps_from_json(load_json_file(caps_path));
    caps.seed = common.seed;
    Window w = common.parse_window("-100000:100000");
    std::vector<std::int64_t> targets;
    if (!targets_str.empty()) {
        std::stringstream ss(targets_str);
        std::string tok;
        while (std::getline(ss, tok, ',')) targets.push_back(std::stoll(tok));
    } else {
        targets = spiral_targets(stages);
    }
    if (static_cast<int>(targets.size()) < stages)
        throw ValidationError("need one target per stage");

    PipelineReport rep = build_ks_pipeline(s, targets, stages, w, caps, common.tol());
    save_json_file(common.out_file("stages.json").string(), to_json(rep));

    std::ostringstream mcsv;
    mcsv << "atom,weight\n";
    const DiscreteMeasure& sigma = rep.stages.back().sigma;
    for (std::size_t i = 0; i < sigma.atoms.size(); ++i)
        mcsv << decimal_string(sigma.atoms[i].value()) << ','
             << rational_string(sigma.weights[i]) << '\n';
    write_text_file(common.out_file("measure.csv"), mcsv.str());

    std::ostringstream pcsv;
    pcsv << "s,m,value,bound,within\n";
    for (const auto& [n, origin] : rep.diagonal) {
        for (const PipelineStage& st : rep.stages) {
            Real value = rigidity_integral(st.sigma, n, st.target_m);
            Real bound = Real(3) / origin;
            pcsv << n << ',' << st.target_m << ',' << csv_real(value) << ',' << csv_real(bound)
                 << ',' << (is_true(lt_guarded(value, bound, common.tol())) ? 1 : 0) << '\n';
        }
    }
    write_text_file(common.out_file("profile.csv"), pcsv.str());

    auto checks = check_stage_bounds(rep, common.tol());
    std::size_t bad = 0;
    for (const auto& c : checks)
        if (!c.ok) ++bad;
    std::cout << "ks build: " << rep.stages.size() << " stages, diagonal " << rep.diagonal.size()
              << " elements, " << rep.gaps.size() << " gaps, " << checks.size()
              << " stage-bound checks (" << bad << " failing)\n"
              << "artifacts: stages.json, measure.csv, profile.csv\n";
    return bad == 0 ? 0 : 3;
}

int cmd_ks_profile(const CommonOpts& common, const std::string& run_path, std::int64_t m) {
    Json run = load_json_file(run_path);
    const Json& stages = run.at("stages");
    if (stages.empty()) throw ValidationError("run has no stages");
    const Json& final_family = stages.back().at("family").at("intervals");
    DiscreteMeasure sigma;
    const std::int64_t n_atoms = static_cast<std::int64_t>(final_family.size());
    for (const Json& ij : final_family) {
        Real lo(ij.at("lo").get<std::string>());
        Real len(ij.at("len").get<std::string>());
        sigma.atoms.emplace_back(lo + len / 2);
        sigma.weights.emplace_back(Rational(1, n_atoms));
    }
    std::ostringstream pcsv;
    pcsv << "s,m,value,bound,within\n";
    for (const Json& dj : run.at("diagonal")) {
        std::int64_t s = dj.at(0).get<std::int64_t>();
        int origin = dj.at(1).get<int>();
        Real value = rigidity_integral(sigma, s, m);
        Real bound = Real(3) / origin;
        pcsv << s << ',' << m << ',' << csv_real(value) << ',' << csv_real(bound) << ','
             << (is_true(lt_guarded(value, bound, common.tol())) ? 1 : 0) << '\n';
    }
    write_text_file(common.out_file("profile.csv"), pcsv.str());
    std::cout << "ks profile: wrote profile.csv for m=" << m << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"desk-scale recurrence toolkit"};
    app.require_subcommand(1);
    app.fallthrough();  // global options may follow the subcommand

    CommonOpts common;
    app.add_option("--config", common.config_path, "JSON config file; flags override its fields");
    app.add_option("--out", common.out_dir, "output directory");
    app.add_option("--precision", common.precision_bits, "working precision in bits (>= 64)");
    app.add_option("--tau", common.tau, "guard margin for strict comparisons");
    app.add_option("--seed", common.seed, "seed for sampled modes");
    app.add_option("--workers", common.workers, "worker pool size for windowed scans");
    app.add_option("--window", common.window, "window lo:hi");

    std::string alpha, freq_file, eta, eps, target, verify, strategy = "exhaustive";
    std::string system_path, set_path, s_path, e_path, delta, mode = "exhaustive";
    std::string corpus_path, a_path, caps_path, run_path, targets_str, c_str;
    std::int64_t shift = 0, bound = 10000, k = 2, d = 2, r = 1, trials = 1000, cap = 16;
    std::int64_t min_abs = 0, m = 0;
    int stages = 3;

    CLI::App* bohr = app.add_subcommand("bohr", "Bohr sets");
    CLI::App* bohr_enum = bohr->add_subcommand("enumerate", "windowed members of Bohr(alpha,eta)");
    bohr_enum->add_option("--alpha", alpha, "sqrt2,sqrt3 or rationals 1/3,0.2");
    bohr_enum->add_option("--freq-file", freq_file, "frequencies JSON");
    bohr_enum->add_option("--eta", eta, "radius eta");
    bohr_enum->add_option("--verify", verify, "re-check a previous artifact");

    CLI::App* bh = app.add_subcommand("bh", "Bohr-Hamming neighborhoods");
    CLI::App* bh_enum = bh->add_subcommand("enumerate", "windowed members of BH(alpha;eps,eta)+m");
    bh_enum->add_option("--alpha", alpha);
    bh_enum->add_option("--freq-file", freq_file);
    bh_enum->add_option("--eps", eps);
    bh_enum->add_option("--eta", eta);
    bh_enum->add_option("--m", shift, "translate");
    bh_enum->add_option("--verify", verify);
    CLI::App* bh_sum =
        bh->add_subcommand("check-sumset", "Bohr(eps/2) + BH(eps/2,eta) inside BH(eps,eta)");
    bh_sum->add_option("--alpha", alpha);
    bh_sum->add_option("--freq-file", freq_file);
    bh_sum->add_option("--eps", eps);
    bh_sum->add_option("--eta", eta);
    CLI::App* bh_cover = bh->add_subcommand("cover", "translated BH inside the target count set");
    bh_cover->add_option("--alpha", alpha);
    bh_cover->add_option("--freq-file", freq_file);
    bh_cover->add_option("--target", target, "target vector, comma separated");
    bh_cover->add_option("--eps", eps);
    bh_cover->add_option("--eta", eta);
    bh_cover->add_option("--bound", bound);

    CLI::App* kron = app.add_subcommand("kronecker", "simultaneous approximation");
    CLI::App* kron_solve = kron->add_subcommand("solve", "find n with max_j ||n a_j - z_j|| < eps");
    kron_solve->add_option("--alpha", alpha);
    kron_solve->add_option("--freq-file", freq_file);
    kron_solve->add_option("--target", target);
    kron_solve->add_option("--eps", eps);
    kron_solve->add_option("--bound", bound);
    kron_solve->add_option("--strategy", strategy, "exhaustive|lattice");
    kron_solve->add_option("--min-abs", min_abs, "require |n| >= this");
    kron_solve->add_option("--verify", verify);
    CLI::App* kron_embed = kron->add_subcommand("embed", "inject Z_k^d via n_w");
    kron_embed->add_option("--alpha", alpha);
    kron_embed->add_option("--freq-file", freq_file);
    kron_embed->add_option("--k", k);
    kron_embed->add_option("--eps", eps);
    kron_embed->add_option("--bound", bound);

    CLI::App* system = app.add_subcommand("system", "rotation systems");
    CLI::App* sys_returns = system->add_subcommand("returns", "R_c(T;D) over a window");
    sys_returns->add_option("--spec", system_path, "system JSON")->required();
    sys_returns->add_option("--set", set_path, "box set JSON")->required();
    sys_returns->add_option("--c", c_str, "threshold c");
    sys_returns->add_option("--verify", verify);
    CLI::App* sys_aura = system->add_subcommand("aura", "S /\\ (E + R_0(T;D)) with witnesses");
    sys_aura->add_option("--spec", system_path)->required();
    sys_aura->add_option("--set", set_path)->required();
    sys_aura->add_option("--s-set", s_path)->required();
    sys_aura->add_option("--e-set", e_path)->required();

    CLI::App* density = app.add_subcommand("density", "upper Banach density harness");
    CLI::App* dens_fals =
        density->add_subcommand("falsify", "search the corpus for S /\\ (A-A) = {}");
    dens_fals->add_option("--s-set", s_path)->required();
    dens_fals->add_option("--delta", delta);
    dens_fals->add_option("--corpus", corpus_path, "corpus JSON (list of windowed sets)");

    CLI::App* kle = app.add_subcommand("kleitman", "Hamming-ball pigeonhole checks");
    CLI::App* kle_verify = kle->add_subcommand("verify", "exhaustive / sampled lemma check");
    kle_verify->add_option("--k", k);
    kle_verify->add_option("--d", d);
    kle_verify->add_option("--delta", delta);
    kle_verify->add_option("--r", r);
    kle_verify->add_option("--mode", mode, "exhaustive|sampled");
    kle_verify->add_option("--trials", trials);
    kle_verify->add_option("--cap", cap, "exhaustive group-size cap");
    CLI::App* kle_wit = kle->add_subcommand("witness", "constructive difference-pair extraction");
    kle_wit->add_option("--alpha", alpha);
    kle_wit->add_option("--freq-file", freq_file);
    kle_wit->add_option("--eps", eps);
    kle_wit->add_option("--m", m);
    kle_wit->add_option("--k", k);
    kle_wit->add_option("--bound", bound);
    kle_wit->add_option("--a-set", a_path, "windowed set JSON (default: full window)");

    CLI::App* ks = app.add_subcommand("ks", "staged Cantor / KS-measure construction");
    CLI::App* ks_build = ks->add_subcommand("build", "run the staged pipeline");
    ks_build->add_option("--set", set_path, "ambient set spec JSON (default: all)");
    ks_build->add_option("--stages", stages);
    ks_build->add_option("--caps", caps_path, "caps JSON");
    ks_build->add_option("--targets", targets_str, "comma-separated targets (default spiral)");
    CLI::App* ks_prof = ks->add_subcommand("profile", "profile a previous run");
    ks_prof->add_option("--run", run_path, "stages.json from a build")->required();
    ks_prof->add_option("--m", m);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (common.precision_bits < 64) throw ValidationError("precision must be >= 64 bits");
        set_precision_bits(common.precision_bits);
        if (common.workers < 1) throw ValidationError("workers must be >= 1");
        if (!common.config_path.empty()) common.config = load_json_file(common.config_path);
        if (common.config.contains("precision_bits"))
            set_precision_bits(common.config.at("precision_bits").get<unsigned>());
        if (common.config.contains("tau")) common.tau = common.config.at("tau").get<double>();
        if (common.config.contains("seed") && common.seed == 0)
            common.seed = common.config.at("seed").get<std::uint64_t>();
        if (common.config.contains("out") && common.out_dir == "out")
            common.out_dir = common.config.at("out").get<std::string>();
        if (common.config.contains("workers") && common.workers == 1)
            common.workers = common.config.at("workers").get<int>();

        if (bohr_enum->parsed()) return cmd_bohr_enumerate(common, alpha, freq_file, eta, verify);
        if (bh_enum->parsed())
            return cmd_bh_enumerate(common, alpha, freq_file, eps, eta, shift, verify);
        if (bh_sum->parsed()) return cmd_bh_check_sumset(common, alpha, freq_file, eps, eta);
        if (bh_cover->parsed())
            return cmd_bh_cover(common, alpha, freq_file, target, eps, eta, bound);
        if (kron_solve->parsed())
            return cmd_kronecker_solve(common, alpha, freq_file, target, eps, bound, strategy,
                                       min_abs, verify);
        if (kron_embed->parsed())
            return cmd_kronecker_embed(common, alpha, freq_file, k, eps, bound);
        if (sys_returns->parsed())
            return cmd_system_returns(common, system_path, set_path, c_str, verify);
        if (sys_aura->parsed())
            return cmd_system_aura(common, system_path, set_path, s_path, e_path);
        if (dens_fals->parsed()) return cmd_density_falsify(common, s_path, delta, corpus_path);
        if (kle_verify->parsed())
            return cmd_kleitman_verify(common, k, d, delta, r, mode, trials, cap);
        if (kle_wit->parsed())
            return cmd_kleitman_witness(common, alpha, freq_file, eps, m, k, bound, a_path);
        if (ks_build->parsed())
            return cmd_ks_build(common, set_path, stages, caps_path, targets_str);
        if (ks_prof->parsed()) return cmd_ks_profile(common, run_path, m);
        std::cerr << "no subcommand selected\n";
        return 2;
    } catch (const ResourceCapError& e) {
        std::cerr << "resource cap: " << e.what() << "\n";
        return 4;
    } catch (const InvariantViolation& e) {
        std::cerr << "invariant violation: " << e.what() << "\n";
        return 3;
    } catch (const ValidationError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 2;
    } catch (const RecurError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
