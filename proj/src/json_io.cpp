#include "recur/json_io.hpp"

#include <fstream>
#include <sstream>

namespace recur {

std::string rational_string(const Rational& q) {
    std::ostringstream os;
    os << numerator(q);
    if (denominator(q) != 1) os << '/' << denominator(q);
    return os.str();
}

Rational parse_rational(const Json& j) {
    if (j.is_number_integer()) return Rational(j.get<std::int64_t>());
    if (j.is_string()) return rational_from_decimal(j.get<std::string>());
    if (j.is_number_float()) {
        // floats are accepted but routed through their shortest decimal form
        std::ostringstream os;
        os.precision(17);
        os << j.get<double>();
        return rational_from_decimal(os.str());
    }
    throw ValidationError("expected a rational value (string \"p/q\", decimal, or integer)");
}

Json to_json(const FrequencyVector& fv) {
    Json j;
    Json entries = Json::array();
    for (const TorusPoint& p : fv.entries) entries.push_back(decimal_string(p.value()));
    j["entries"] = entries;
    Json gens = Json::array();
    for (const Generator& g : fv.generators) {
        Json gj;
        gj["prime"] = g.prime;
        gj["shift"] = rational_string(g.shift);
        gj["scale_den"] = g.scale_den;
        gens.push_back(gj);
    }
    j["generators"] = gens;
    j["certificate_bound"] = fv.certificate.bound;
    Json cert;
    cert["passed"] = fv.certificate.passed;
    cert["tolerance"] = decimal_string(fv.certificate.tolerance);
    cert["min_norm"] = decimal_string(fv.certificate.min_norm);
    cert["argmin"] = fv.certificate.argmin;
    j["certificate"] = cert;
    return j;
}

FrequencyVector frequency_vector_from_json(const Json& j) {
    if (!j.contains("generators")) throw ValidationError("frequency vector needs generators");
    FrequencyVector fv;
    for (const Json& gj : j.at("generators")) {
        Generator g;
        g.prime = gj.at("prime").get<std::uint64_t>();
        g.shift = parse_rational(gj.at("shift"));
        g.scale_den = gj.value("scale_den", std::uint64_t(1));
        fv.generators.push_back(g);
        fv.entries.emplace_back(g.evaluate());
    }
    if (fv.entries.empty()) throw ValidationError("frequency vector is empty");
    std::int64_t bound = j.value("certificate_bound", std::int64_t(0));
    if (bound == 0) bound = fv.entries.size() <= 2 ? 50 : 20;
    fv.certificate = certify_independence(fv.entries, bound, Real(1e-6));
    if (!fv.certificate.passed)
        throw InvariantViolation("loaded frequency vector fails its independence certificate");
    return fv;
}

Json to_json(const Frequencies& f) {
    Json j;
    if (f.exact()) {
        j["kind"] = "rational";
        Json alpha = Json::array();
        for (const Rational& q : f.rational) alpha.push_back(rational_string(q));
        j["alpha"] = alpha;
    } else {
        j["kind"] = "generator";
        j["vector"] = to_json(*f.irrational);
    }
    return j;
}

Frequencies frequencies_from_json(const Json& j) {
    const std::string kind = j.value("kind", j.contains("alpha") ? "rational" : "generator");
    if (kind == "rational") {
        std::vector<Rational> qs;
        for (const Json& a : j.at("alpha")) qs.push_back(parse_rational(a));
        return Frequencies::from_rationals(std::move(qs));
    }
    if (kind == "generator")
        return Frequencies::from_vector(frequency_vector_from_json(j.at("vector")));
    throw ValidationError("frequencies kind must be 'rational' or 'generator'");
}

Json to_json(const WindowedSet& s) {
    Json j;
    j["window"] = Json::array({s.window.lo, s.window.hi});
    j["members"] = s.members;
    j["source"] = s.source;
    return j;
}

WindowedSet windowed_set_from_json(const Json& j) {
    WindowedSet s;
    s.window.lo = j.at("window").at(0).get<std::int64_t>();
    s.window.hi = j.at("window").at(1).get<std::int64_t>();
    s.members = j.at("members").get<std::vector<std::int64_t>>();
    s.source = j.value("source", "");
    s.validate();
    return s;
}

Json to_json(const BohrSpec& s) {
    Json j;
    j["freq"] = to_json(s.freq);
    j["eta"] = rational_string(s.eta);
    j["degenerate"] = s.degenerate();
    return j;
}

BohrSpec bohr_spec_from_json(const Json& j) {
    BohrSpec s{frequencies_from_json(j.at("freq")), parse_rational(j.at("eta"))};
    s.validate();
    return s;
}

Json to_json(const BohrHammingSpec& s) {
    Json j;
    j["freq"] = to_json(s.freq);
    j["eps"] = rational_string(s.eps);
    j["eta"] = rational_string(s.eta_frac);
    j["shift"] = s.shift;
    j["threshold"] = s.threshold();
    return j;
}

BohrHammingSpec bh_spec_from_json(const Json& j) {
    BohrHammingSpec s{frequencies_from_json(j.at("freq")), parse_rational(j.at("eps")),
                      parse_rational(j.at("eta")), j.value("shift", std::int64_t(0))};
    s.validate();
    return s;
}

Json to_json(const SetSpec& s) {
    return std::visit(
        [](const auto& node) -> Json {
            using T = std::decay_t<decltype(node)>;
            Json j;
            if constexpr (std::is_same_v<T, SetSpec::All>) {
                j["kind"] = "all";
            } else if constexpr (std::is_same_v<T, SetSpec::AP>) {
                j["kind"] = "ap";
                j["a"] = node.a;
                j["q"] = node.q;
            } else if constexpr (std::is_same_v<T, SetSpec::Squares>) {
                j["kind"] = "squares";
            } else if constexpr (std::is_same_v<T, SetSpec::Shifted>) {
                j["kind"] = "shifted";
                j["m"] = node.m;
                j["base"] = to_json(*node.base);
            } else if constexpr (std::is_same_v<T, SetSpec::UnionOf>) {
                j["kind"] = "union";
                Json parts = Json::array();
                for (const auto& p : node.parts) parts.push_back(to_json(*p));
                j["parts"] = parts;
            } else if constexpr (std::is_same_v<T, SetSpec::ComplementBohr>) {
                j["kind"] = "complement-bohr";
                j["spec"] = to_json(node.spec);
            } else if constexpr (std::is_same_v<T, SetSpec::Explicit>) {
                j["kind"] = "explicit";
                j["members"] = node.members;
            } else {
                j["kind"] = "import";
                j["set"] = to_json(node.set);
            }
            return j;
        },
        s.node());
}

SetSpec set_spec_from_json(const Json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "all") return SetSpec::all();
    if (kind == "ap")
        return SetSpec::arithmetic_progression(j.at("a").get<std::int64_t>(),
                                               j.at("q").get<std::int64_t>());
    if (kind == "squares") return SetSpec::squares();
    if (kind == "shifted")
        return SetSpec::shifted(set_spec_from_json(j.at("base")), j.at("m").get<std::int64_t>());
    if (kind == "union") {
        std::vector<SetSpec> parts;
        for (const Json& p : j.at("parts")) parts.push_back(set_spec_from_json(p));
        return SetSpec::union_of(std::move(parts));
    }
    if (kind == "complement-bohr")
        return SetSpec::complement_of_bohr(bohr_spec_from_json(j.at("spec")));
    if (kind == "explicit")
        return SetSpec::explicit_list(j.at("members").get<std::vector<std::int64_t>>());
    if (kind == "import") return SetSpec::import(windowed_set_from_json(j.at("set")));
    throw ValidationError("unknown set spec kind '" + kind + "'");
}

Json to_json(const RotationSystem& s) {
    Json axes = Json::array();
    for (const Axis& ax : s.axes) {
        Json a;
        if (const auto* t = std::get_if<TorusAxis>(&ax)) {
            a["kind"] = "torus";
            if (t->exact()) a["alpha"] = rational_string(*t->alpha_exact);
            else a["alpha_decimal"] = decimal_string(t->alpha.value());
        } else {
            const auto& c = std::get<CyclicAxis>(ax);
            a["kind"] = "cyclic";
            a["k"] = c.k;
            a["step"] = c.step;
        }
        axes.push_back(a);
    }
    Json j;
    j["axes"] = axes;
    return j;
}

RotationSystem rotation_system_from_json(const Json& j) {
    RotationSystem s;
    if (j.contains("components")) {
        for (const Json& comp : j.at("components")) {
            const std::string type = comp.at("type").get<std::string>();
            if (type == "torus") {
                RotationSystem sub = RotationSystem::torus(frequencies_from_json(comp.at("freq")));
                s.axes.insert(s.axes.end(), sub.axes.begin(), sub.axes.end());
            } else if (type == "cyclic") {
                s.axes.emplace_back(CyclicAxis{comp.at("k").get<std::int64_t>(),
                                               comp.at("step").get<std::int64_t>()});
            } else {
                throw ValidationError("system component type must be 'torus' or 'cyclic'");
            }
        }
    } else {
        for (const Json& a : j.at("axes")) {
            const std::string kind = a.at("kind").get<std::string>();
            if (kind == "torus") {
                if (a.contains("alpha"))
                    s.axes.emplace_back(TorusAxis::from_rational(parse_rational(a.at("alpha"))));
                else
                    s.axes.emplace_back(TorusAxis::from_point(
                        TorusPoint(Real(a.at("alpha_decimal").get<std::string>()))));
            } else if (kind == "cyclic") {
                s.axes.emplace_back(
                    CyclicAxis{a.at("k").get<std::int64_t>(), a.at("step").get<std::int64_t>()});
            } else {
                throw ValidationError("axis kind must be 'torus' or 'cyclic'");
            }
        }
    }
    s.validate();
    return s;
}

Json to_json(const BoxSet& d, const RotationSystem& sys) {
    d.validate(sys);
    Json boxes = Json::array();
    for (const Box& b : d.boxes) {
        Json factors = Json::array();
        for (const BoxFactor& f : b.factors) {
            Json fj;
            if (const auto* arc = std::get_if<Arc>(&f)) {
                fj["type"] = "arc";
                if (arc->exact()) {
                    fj["lo"] = rational_string(*arc->lo_exact);
                    fj["len"] = rational_string(*arc->len_exact);
                } else {
                    fj["lo_decimal"] = decimal_string(arc->lo);
                    fj["len_decimal"] = decimal_string(arc->len);
                }
            } else {
                fj["type"] = "cyclic";
                fj["elems"] = std::get<CyclicSubset>(f).elems;
            }
            factors.push_back(fj);
        }
        boxes.push_back(factors);
    }
    Json j;
    j["boxes"] = boxes;
    return j;
}

BoxSet box_set_from_json(const Json& j) {
    BoxSet d;
    for (const Json& bj : j.at("boxes")) {
        Box b;
        for (const Json& fj : bj) {
            const std::string type = fj.at("type").get<std::string>();
            if (type == "arc") {
                if (fj.contains("lo"))
                    b.factors.emplace_back(
                        Arc::from_rational(parse_rational(fj.at("lo")), parse_rational(fj.at("len"))));
                else
                    b.factors.emplace_back(
                        Arc::from_real(Real(fj.at("lo_decimal").get<std::string>()),
                                       Real(fj.at("len_decimal").get<std::string>())));
            } else if (type == "cyclic") {
                CyclicSubset c;
                c.elems = fj.at("elems").get<std::vector<std::int64_t>>();
                b.factors.emplace_back(std::move(c));
            } else {
                throw ValidationError("box factor type must be 'arc' or 'cyclic'");
            }
        }
        d.boxes.push_back(std::move(b));
    }
    return d;
}

Json to_json(const PipelineReport& report) {
    Json j;
    j["window"] = Json::array({report.window.lo, report.window.hi});
    Json stages = Json::array();
    for (const PipelineStage& st : report.stages) {
        Json sj;
        sj["k"] = st.record.k;
        sj["target_m"] = st.target_m;
        sj["ambient"] = to_json(st.ambient);
        sj["lambda_order"] = st.record.lambda_order;
        sj["psi_sampled"] = st.record.psi_sampled;
        sj["shrink_radius"] = decimal_string(st.record.shrink_radius);
        sj["max_abs_n"] = st.record.max_abs_n;
        sj["selection_union"] = st.record.selection_union;
        sj["points"] = to_json(st.record.points);
        sj["point_parent"] = st.record.point_parent;

        Json psis = Json::array();
        for (const PsiRecord& pr : st.record.psi_table) {
            Json pj;
            pj["psi"] = pr.psi;
            pj["count_true"] = pr.count_true;
            pj["count_ambiguous"] = pr.count_ambiguous;
            pj["sample"] = pr.sample;
            pj["selection"] = pr.selection;
            pj["gap"] = pr.gap;
            psis.push_back(pj);
        }
        sj["psi_table"] = psis;

        Json fam;
        fam["stage"] = st.family.stage;
        fam["branching"] = st.family.branching;
        fam["max_diameter"] = decimal_string(st.family.max_diameter);
        Json intervals = Json::array();
        for (std::size_t i = 0; i < st.family.intervals.size(); ++i) {
            Json ij;
            ij["lo"] = decimal_string(st.family.intervals[i].lo);
            ij["len"] = decimal_string(st.family.intervals[i].len);
            ij["parent"] = st.family.parent[i];
            intervals.push_back(ij);
        }
        fam["intervals"] = intervals;
        sj["family"] = fam;

        Json er = Json::array();
        for (const auto& sel : st.expanding_selections) er.push_back(sel);
        sj["expanding_selections"] = er;
        sj["ambient_next"] = st.ambient_next;
        sj["gap"] = st.gap;
        stages.push_back(sj);
    }
    j["stages"] = stages;

    Json diag = Json::array();
    for (const auto& [n, k] : report.diagonal)
        diag.push_back(Json::array({n, k}));
    j["diagonal"] = diag;

    Json zero = Json::array();
    for (const ProfileEntry& e : report.zero_profile) {
        Json ej;
        ej["s"] = e.s;
        ej["origin_stage"] = e.origin_stage;
        ej["value"] = decimal_string(e.value);
        ej["bound"] = decimal_string(e.bound);
        ej["within_bound"] = e.within_bound;
        zero.push_back(ej);
    }
    j["zero_profile"] = zero;
    j["gaps"] = report.gaps;
    return j;
}

Json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open file: " + path);
    Json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw ValidationError("failed to parse " + path + ": " + e.what());
    }
    return j;
}

void save_json_file(const std::string& path, const Json& j) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot write file: " + path);
    out << j.dump(2) << '\n';
}

}  // namespace recur
