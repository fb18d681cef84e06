#ifndef RECUR_WINDOWED_HPP
#define RECUR_WINDOWED_HPP

#include "recur/real.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace recur {

struct Window {
    std::int64_t lo = 0;
    std::int64_t hi = 0;

    std::int64_t size() const { return hi - lo + 1; }
    bool contains(std::int64_t n) const { return n >= lo && n <= hi; }
    void validate() const {
        if (lo > hi) throw ValidationError("window requires lo <= hi");
    }
};

// Finite stand-in for a subset of Z, confined to [lo, hi].
struct WindowedSet {
    Window window;
    std::vector<std::int64_t> members;  // sorted, duplicate-free
    std::string source;

    bool contains(std::int64_t n) const;
    void validate() const;

    static WindowedSet from_predicate(Window w, const std::function<bool(std::int64_t)>& pred,
                                      std::string source = {});
};

// Enumeration result carrying boundary cases separately.
struct Enumeration {
    WindowedSet set;
    std::vector<std::int64_t> ambiguous;
};

// A - A restricted to the natural difference window.
WindowedSet difference_set(const WindowedSet& a);

// Sorted intersection of members (windows intersected as well).
std::vector<std::int64_t> intersect_members(const std::vector<std::int64_t>& a,
                                            const std::vector<std::int64_t>& b);

// Chunked scan over [lo, hi]: chunks are processed by up to `workers` threads
// and merged in window order, so results do not depend on the worker count.
std::vector<std::int64_t> parallel_filter(
    Window w, int workers, const std::function<bool(std::int64_t)>& keep);

// Same, but classifying each n as member / ambiguous / neither.
struct Classified {
    std::vector<std::int64_t> members;
    std::vector<std::int64_t> ambiguous;
};
Classified parallel_classify(Window w, int workers,
                             const std::function<Trilean(std::int64_t)>& classify);

}  // namespace recur

#endif
