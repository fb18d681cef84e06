#ifndef RECUR_SETSPEC_HPP
#define RECUR_SETSPEC_HPP

#include "recur/bohr.hpp"
#include "recur/windowed.hpp"

#include <cstdint>
#include <memory>
#include <string>
#include <variant>
#include <vector>

namespace recur {

// Predicate DSL for the input sets S: evaluable membership for any integer,
// windowed enumeration for reports.
class SetSpec {
public:
    struct All {};
    struct AP {
        std::int64_t a = 0;
        std::int64_t q = 1;
    };
    struct Squares {};  // nonzero perfect squares {1, 4, 9, ...}
    struct Shifted {
        std::shared_ptr<const SetSpec> base;
        std::int64_t m = 0;
    };
    struct UnionOf {
        std::vector<std::shared_ptr<const SetSpec>> parts;
    };
    struct ComplementBohr {
        BohrSpec spec;
    };
    struct Explicit {
        std::vector<std::int64_t> members;  // sorted, distinct
    };
    struct Import {
        WindowedSet set;  // membership confined to the import window
    };

    using Node = std::variant<All, AP, Squares, Shifted, UnionOf, ComplementBohr, Explicit, Import>;

    SetSpec() : node_(All{}) {}
    explicit SetSpec(Node n) : node_(std::move(n)) {}

    static SetSpec all();
    static SetSpec arithmetic_progression(std::int64_t a, std::int64_t q);
    static SetSpec squares();
    static SetSpec shifted(SetSpec base, std::int64_t m);
    static SetSpec union_of(std::vector<SetSpec> parts);
    static SetSpec complement_of_bohr(BohrSpec spec);
    static SetSpec explicit_list(std::vector<std::int64_t> members);
    static SetSpec import(WindowedSet set);

    Trilean contains(std::int64_t n, const Tol& tol = {}) const;
    Enumeration enumerate(Window w, const Tol& tol = {}) const;
    std::string describe() const;
    const Node& node() const { return node_; }

private:
    Node node_;
};

}  // namespace recur

#endif
