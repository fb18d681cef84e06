#include "recur/windowed.hpp"

#include <algorithm>
#include <thread>

namespace recur {

bool WindowedSet::contains(std::int64_t n) const {
    return std::binary_search(members.begin(), members.end(), n);
}

void WindowedSet::validate() const {
    window.validate();
    for (std::size_t i = 0; i < members.size(); ++i) {
        if (!window.contains(members[i]))
            throw InvariantViolation("windowed set member outside window");
        if (i > 0 && members[i - 1] >= members[i])
            throw InvariantViolation("windowed set members must be sorted and distinct");
    }
}

WindowedSet WindowedSet::from_predicate(Window w, const std::function<bool(std::int64_t)>& pred,
                                        std::string source) {
    w.validate();
    WindowedSet s;
    s.window = w;
    s.source = std::move(source);
    for (std::int64_t n = w.lo; n <= w.hi; ++n)
        if (pred(n)) s.members.push_back(n);
    return s;
}

WindowedSet difference_set(const WindowedSet& a) {
    WindowedSet d;
    d.window = {a.window.lo - a.window.hi, a.window.hi - a.window.lo};
    d.source = "difference(" + a.source + ")";
    std::vector<std::int64_t> out;
    out.reserve(a.members.size() * a.members.size());
    for (std::int64_t x : a.members)
        for (std::int64_t y : a.members) out.push_back(x - y);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    d.members = std::move(out);
    return d;
}

std::vector<std::int64_t> intersect_members(const std::vector<std::int64_t>& a,
                                            const std::vector<std::int64_t>& b) {
    std::vector<std::int64_t> out;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

std::vector<std::int64_t> parallel_filter(Window w, int workers,
                                          const std::function<bool(std::int64_t)>& keep) {
    Classified c = parallel_classify(w, workers, [&](std::int64_t n) {
        return keep(n) ? Trilean::True : Trilean::False;
    });
    return std::move(c.members);
}

Classified parallel_classify(Window w, int workers,
                             const std::function<Trilean(std::int64_t)>& classify) {
    w.validate();
    if (workers < 1) workers = 1;
    const std::int64_t total = w.size();
    if (workers == 1 || total < 4 * workers) {
        Classified out;
        for (std::int64_t n = w.lo; n <= w.hi; ++n) {
            Trilean t = classify(n);
            if (is_true(t)) out.members.push_back(n);
            else if (is_ambiguous(t)) out.ambiguous.push_back(n);
        }
        return out;
    }
    std::vector<Classified> parts(workers);
    std::vector<std::thread> threads;
    const unsigned prec = precision_bits();
    const std::int64_t chunk = (total + workers - 1) / workers;
    for (int t = 0; t < workers; ++t) {
        std::int64_t lo = w.lo + t * chunk;
        std::int64_t hi = std::min(w.hi, lo + chunk - 1);
        if (lo > w.hi) break;
        threads.emplace_back([&, lo, hi, t]() {
            set_thread_precision_bits(prec);
            for (std::int64_t n = lo; n <= hi; ++n) {
                Trilean v = classify(n);
                if (is_true(v)) parts[t].members.push_back(n);
                else if (is_ambiguous(v)) parts[t].ambiguous.push_back(n);
            }
        });
    }
    for (auto& th : threads) th.join();
    Classified out;
    for (auto& p : parts) {
        out.members.insert(out.members.end(), p.members.begin(), p.members.end());
        out.ambiguous.insert(out.ambiguous.end(), p.ambiguous.begin(), p.ambiguous.end());
    }
    return out;
}

}  // namespace recur
