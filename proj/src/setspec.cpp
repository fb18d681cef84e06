#include "recur/setspec.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace recur {

SetSpec SetSpec::all() { return SetSpec(All{}); }

SetSpec SetSpec::arithmetic_progression(std::int64_t a, std::int64_t q) {
    if (q < 1) throw ValidationError("arithmetic progression requires q >= 1");
    return SetSpec(AP{a, q});
}

SetSpec SetSpec::squares() { return SetSpec(Squares{}); }

SetSpec SetSpec::shifted(SetSpec base, std::int64_t m) {
    return SetSpec(Shifted{std::make_shared<SetSpec>(std::move(base)), m});
}

SetSpec SetSpec::union_of(std::vector<SetSpec> parts) {
    if (parts.empty()) throw ValidationError("union needs at least one part");
    UnionOf u;
    for (SetSpec& p : parts) u.parts.push_back(std::make_shared<SetSpec>(std::move(p)));
    return SetSpec(std::move(u));
}

SetSpec SetSpec::complement_of_bohr(BohrSpec spec) {
    spec.validate();
    return SetSpec(ComplementBohr{std::move(spec)});
}

SetSpec SetSpec::explicit_list(std::vector<std::int64_t> members) {
    std::sort(members.begin(), members.end());
    members.erase(std::unique(members.begin(), members.end()), members.end());
    return SetSpec(Explicit{std::move(members)});
}

SetSpec SetSpec::import(WindowedSet set) {
    set.validate();
    return SetSpec(Import{std::move(set)});
}

namespace {

bool is_positive_square(std::int64_t n) {
    if (n < 1) return false;
    std::int64_t r = static_cast<std::int64_t>(std::sqrt(static_cast<double>(n)));
    for (std::int64_t t = std::max<std::int64_t>(r - 2, 1); t <= r + 2; ++t)
        if (t * t == n) return true;
    return false;
}

}  // namespace

Trilean SetSpec::contains(std::int64_t n, const Tol& tol) const {
    return std::visit(
        [&](const auto& node) -> Trilean {
            using T = std::decay_t<decltype(node)>;
            if constexpr (std::is_same_v<T, All>) {
                return Trilean::True;
            } else if constexpr (std::is_same_v<T, AP>) {
                return ((n - node.a) % node.q + node.q) % node.q == 0 ? Trilean::True
                                                                      : Trilean::False;
            } else if constexpr (std::is_same_v<T, Squares>) {
                return is_positive_square(n) ? Trilean::True : Trilean::False;
            } else if constexpr (std::is_same_v<T, Shifted>) {
                return node.base->contains(n - node.m, tol);
            } else if constexpr (std::is_same_v<T, UnionOf>) {
                bool amb = false;
                for (const auto& p : node.parts) {
                    Trilean t = p->contains(n, tol);
                    if (is_true(t)) return Trilean::True;
                    if (is_ambiguous(t)) amb = true;
                }
                return amb ? Trilean::Ambiguous : Trilean::False;
            } else if constexpr (std::is_same_v<T, ComplementBohr>) {
                Trilean t = bohr_contains(node.spec, n, tol);
                if (is_true(t)) return Trilean::False;
                if (is_false(t)) return Trilean::True;
                return Trilean::Ambiguous;
            } else if constexpr (std::is_same_v<T, Explicit>) {
                return std::binary_search(node.members.begin(), node.members.end(), n)
                           ? Trilean::True
                           : Trilean::False;
            } else {
                return node.set.window.contains(n) && node.set.contains(n) ? Trilean::True
                                                                           : Trilean::False;
            }
        },
        node_);
}

Enumeration SetSpec::enumerate(Window w, const Tol& tol) const {
    w.validate();
    Enumeration e;
    e.set.window = w;
    e.set.source = describe();
    for (std::int64_t n = w.lo; n <= w.hi; ++n) {
        Trilean t = contains(n, tol);
        if (is_true(t)) e.set.members.push_back(n);
        else if (is_ambiguous(t)) e.ambiguous.push_back(n);
    }
    return e;
}

std::string SetSpec::describe() const {
    return std::visit(
        [](const auto& node) -> std::string {
            using T = std::decay_t<decltype(node)>;
            if constexpr (std::is_same_v<T, All>) {
                return "all";
            } else if constexpr (std::is_same_v<T, AP>) {
                std::ostringstream os;
                os << "ap(" << node.a << "," << node.q << ")";
                return os.str();
            } else if constexpr (std::is_same_v<T, Squares>) {
                return "squares";
            } else if constexpr (std::is_same_v<T, Shifted>) {
                std::ostringstream os;
                os << "shift(" << node.base->describe() << "," << node.m << ")";
                return os.str();
            } else if constexpr (std::is_same_v<T, UnionOf>) {
                std::string s = "union(";
                for (std::size_t i = 0; i < node.parts.size(); ++i) {
                    if (i) s += ",";
                    s += node.parts[i]->describe();
                }
                return s + ")";
            } else if constexpr (std::is_same_v<T, ComplementBohr>) {
                return "complement-of-bohr";
            } else if constexpr (std::is_same_v<T, Explicit>) {
                return "explicit[" + std::to_string(node.members.size()) + "]";
            } else {
                return "import(" + node.set.source + ")";
            }
        },
        node_);
}

}  // namespace recur
