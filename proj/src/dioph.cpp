#include "recur/dioph.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace recur {

void ApproxQuery::validate() const {
    if (freq.dim() == 0) throw ValidationError("approximation query needs frequencies");
    if (target.size() != freq.dim())
        throw ValidationError("approximation query: target dimension mismatch");
    if (eps <= 0) throw ValidationError("approximation query requires eps > 0");
    if (search_bound < 0) throw ValidationError("approximation query requires bound >= 0");
    if (min_abs < 0) throw ValidationError("approximation query requires min_abs >= 0");
}

namespace {

// max_j ||n alpha_j - z_j||
Real query_norm(const ApproxQuery& q, std::int64_t n) {
    Real worst = 0;
    for (std::size_t j = 0; j < q.freq.dim(); ++j) {
        TorusPoint p = TorusPoint(Real(n) * q.freq.alpha(j)) - q.target[j];
        Real norm = torus_norm(p);
        if (norm > worst) worst = norm;
    }
    return worst;
}

struct ScanOutcome {
    std::optional<std::int64_t> hit;
    Real best_norm = Real(1);
    std::int64_t best_n = 0;
};

ScanOutcome exhaustive_scan(const ApproxQuery& q, const Tol& tol) {
    ScanOutcome out;
    const Real eps_r = to_real(q.eps);
    bool first = true;
    for (std::int64_t a = q.min_abs; a <= q.search_bound; ++a) {
        for (int sign = 0; sign < 2; ++sign) {
            if (a == 0 && sign == 1) continue;
            std::int64_t n = sign == 0 ? a : -a;
            Real norm = query_norm(q, n);
            if (first || norm < out.best_norm) {
                out.best_norm = norm;
                out.best_n = n;
                first = false;
            }
            if (is_true(lt_guarded(norm, eps_r, tol))) {
                out.hit = n;
                return out;
            }
        }
    }
    return out;
}

// Plain LLL over double vectors, delta = 0.99, with integer row-operation
// tracking so each reduced row knows its coefficient on the original basis.
struct LatticeBasis {
    std::vector<std::vector<double>> rows;
    std::vector<std::vector<std::int64_t>> coeff;  // coeff[i] over original rows
};

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

void lll_reduce(LatticeBasis& basis) {
    const std::size_t m = basis.rows.size();
    if (m == 0) return;
    const double delta = 0.99;
    std::vector<std::vector<double>> gs = basis.rows;
    std::vector<std::vector<double>> mu(m, std::vector<double>(m, 0.0));
    std::vector<double> norms(m, 0.0);

    auto recompute = [&]() {
        for (std::size_t i = 0; i < m; ++i) {
            gs[i] = basis.rows[i];
            for (std::size_t j = 0; j < i; ++j) {
                mu[i][j] = norms[j] > 0 ? dot(basis.rows[i], gs[j]) / norms[j] : 0.0;
                for (std::size_t t = 0; t < gs[i].size(); ++t) gs[i][t] -= mu[i][j] * gs[j][t];
            }
            norms[i] = dot(gs[i], gs[i]);
        }
    };
    recompute();

    std::size_t kk = 1;
    int guard = 0;
    while (kk < m && guard++ < 10000) {
        for (std::size_t j = kk; j-- > 0;) {
            double r = std::round(mu[kk][j]);
            if (r != 0.0) {
                for (std::size_t t = 0; t < basis.rows[kk].size(); ++t)
                    basis.rows[kk][t] -= r * basis.rows[j][t];
                for (std::size_t t = 0; t < basis.coeff[kk].size(); ++t)
                    basis.coeff[kk][t] -= static_cast<std::int64_t>(r) * basis.coeff[j][t];
                recompute();
            }
        }
        if (norms[kk] >= (delta - mu[kk][kk - 1] * mu[kk][kk - 1]) * norms[kk - 1]) {
            ++kk;
        } else {
            std::swap(basis.rows[kk], basis.rows[kk - 1]);
            std::swap(basis.coeff[kk], basis.coeff[kk - 1]);
            recompute();
            kk = kk > 1 ? kk - 1 : 1;
        }
    }
}

// Candidate n values from the reduced Kannan-embedded lattice.
std::vector<std::int64_t> lattice_candidates(const ApproxQuery& q) {
    const std::size_t d = q.freq.dim();
    const double C = std::ldexp(1.0, 40);
    const double eps_d = static_cast<double>(to_real(q.eps));
    const double bound_d = static_cast<double>(q.search_bound > 0 ? q.search_bound : 1);
    const double w0 = std::max(C * eps_d / bound_d, 1.0);
    const double M = C * eps_d;

    // rows: b0 = n-direction, b1..bd = integer corrections, b_{d+1} = target
    const std::size_t cols = d + 2;
    LatticeBasis basis;
    auto add_row = [&](std::vector<double> row) {
        basis.rows.push_back(std::move(row));
        basis.coeff.push_back(std::vector<std::int64_t>(d + 2, 0));
        basis.coeff.back()[basis.rows.size() - 1] = 1;
    };
    {
        std::vector<double> r(cols, 0.0);
        r[0] = w0;
        for (std::size_t j = 0; j < d; ++j)
            r[1 + j] = C * static_cast<double>(q.freq.alpha(j));
        add_row(std::move(r));
    }
    for (std::size_t j = 0; j < d; ++j) {
        std::vector<double> r(cols, 0.0);
        r[1 + j] = C;
        add_row(std::move(r));
    }
    {
        std::vector<double> r(cols, 0.0);
        for (std::size_t j = 0; j < d; ++j)
            r[1 + j] = -C * static_cast<double>(q.target[j].value());
        r[cols - 1] = M;
        add_row(std::move(r));
    }

    lll_reduce(basis);

    std::set<std::int64_t> cand;
    auto harvest = [&](const std::vector<std::int64_t>& coeff, std::int64_t scale) {
        std::int64_t target_coeff = coeff[d + 1] * scale;
        if (target_coeff == 1 || target_coeff == -1) {
            std::int64_t n = coeff[0] * scale * (target_coeff == 1 ? 1 : -1);
            // target row carried coefficient -1 overall means v ~ n*b0 - t
            cand.insert(n);
            cand.insert(-n);
        }
    };
    for (const auto& c : basis.coeff) {
        harvest(c, 1);
        harvest(c, -1);
    }
    // pairwise combinations catch near-misses of the reduction
    for (std::size_t i = 0; i < basis.coeff.size(); ++i)
        for (std::size_t j = 0; j < basis.coeff.size(); ++j) {
            if (i == j) continue;
            std::vector<std::int64_t> sum(d + 2);
            for (std::size_t t = 0; t < d + 2; ++t)
                sum[t] = basis.coeff[i][t] + basis.coeff[j][t];
            harvest(sum, 1);
            harvest(sum, -1);
        }
    std::vector<std::int64_t> out(cand.begin(), cand.end());
    std::sort(out.begin(), out.end(), [](std::int64_t a, std::int64_t b) {
        return std::llabs(a) != std::llabs(b) ? std::llabs(a) < std::llabs(b) : a > b;
    });
    return out;
}

}  // namespace

ApproxResult kronecker_approximate(const ApproxQuery& q, const Tol& tol) {
    q.validate();
    ApproxResult res;
    res.strategy = q.strategy;
    const Real eps_r = to_real(q.eps);

    if (q.strategy == ApproxStrategy::Lattice) {
        for (std::int64_t n : lattice_candidates(q)) {
            if (std::llabs(n) < q.min_abs || std::llabs(n) > q.search_bound) continue;
            Real norm = query_norm(q, n);
            if (is_true(lt_guarded(norm, eps_r, tol))) {
                res.n = n;
                res.best_norm = norm;
                res.best_n = n;
                for (std::size_t j = 0; j < q.freq.dim(); ++j) {
                    TorusPoint p = TorusPoint(Real(n) * q.freq.alpha(j)) - q.target[j];
                    res.norms.push_back(torus_norm(p));
                }
                return res;
            }
        }
        res.lattice_fallback = true;
    }

    ScanOutcome scan = exhaustive_scan(q, tol);
    res.best_norm = scan.best_norm;
    res.best_n = scan.best_n;
    if (scan.hit) {
        res.n = scan.hit;
        for (std::size_t j = 0; j < q.freq.dim(); ++j) {
            TorusPoint p = TorusPoint(Real(*scan.hit) * q.freq.alpha(j)) - q.target[j];
            res.norms.push_back(torus_norm(p));
        }
    }
    return res;
}

std::int64_t GroupZkd::size() const {
    std::int64_t s = 1;
    for (std::int64_t i = 0; i < d; ++i) s *= k;
    return s;
}

std::vector<std::int64_t> GroupZkd::tuple(std::int64_t index) const {
    std::vector<std::int64_t> w(d);
    for (std::int64_t j = d - 1; j >= 0; --j) {
        w[j] = index % k;
        index /= k;
    }
    return w;
}

std::int64_t GroupZkd::index(const std::vector<std::int64_t>& w) const {
    std::int64_t idx = 0;
    for (std::int64_t j = 0; j < d; ++j) idx = idx * k + (((w[j] % k) + k) % k);
    return idx;
}

std::int64_t GroupZkd::sub(std::int64_t a, std::int64_t b) const {
    std::vector<std::int64_t> wa = tuple(a), wb = tuple(b);
    for (std::int64_t j = 0; j < d; ++j) wa[j] = ((wa[j] - wb[j]) % k + k) % k;
    return index(wa);
}

void GroupZkd::validate(std::int64_t cap) const {
    if (k < 2 || d < 1) throw ValidationError("Z_k^d requires k >= 2, d >= 1");
    double approx = std::pow(static_cast<double>(k), static_cast<double>(d));
    if (approx > static_cast<double>(cap))
        throw ResourceCapError("group size k^d exceeds cap");
}

EmbeddingTable embed_group(const Frequencies& freq, std::int64_t k, const Rational& eps,
                           std::int64_t search_bound, const Tol& tol, std::int64_t cap) {
    GroupZkd g{k, static_cast<std::int64_t>(freq.dim())};
    g.validate(cap);
    if (eps <= 0) throw ValidationError("embedding requires eps > 0");

    EmbeddingTable table;
    table.k = k;
    table.d = g.d;
    table.eps = eps;
    table.max_norm = 0;
    const Real eps_r = to_real(eps);

    std::set<std::int64_t> used;
    std::vector<std::int64_t> failures;
    for (std::int64_t w = 0; w < g.size(); ++w) {
        std::vector<std::int64_t> tup = g.tuple(w);
        std::vector<TorusPoint> z;
        for (std::int64_t j = 0; j < g.d; ++j) z.emplace_back(Rational(tup[j], k));

        std::optional<std::int64_t> chosen;
        Real chosen_norm = 0;
        for (std::int64_t a = 0; a <= search_bound && !chosen; ++a) {
            for (int sign = 0; sign < 2 && !chosen; ++sign) {
                if (a == 0 && sign == 1) continue;
                std::int64_t n = sign == 0 ? a : -a;
                if (used.count(n)) continue;
                Real worst = 0;
                for (std::int64_t j = 0; j < g.d; ++j) {
                    TorusPoint p = TorusPoint(Real(n) * freq.alpha(j)) - z[j];
                    Real norm = torus_norm(p);
                    if (norm > worst) worst = norm;
                }
                if (is_true(lt_guarded(worst, eps_r, tol))) {
                    chosen = n;
                    chosen_norm = worst;
                }
            }
        }
        if (!chosen) {
            failures.push_back(w);
            continue;
        }
        used.insert(*chosen);
        table.n_of.push_back(*chosen);
        if (chosen_norm > table.max_norm) table.max_norm = chosen_norm;
    }
    if (!failures.empty()) {
        std::ostringstream os;
        os << "embedding unsolvable within bound " << search_bound << " for " << failures.size()
           << " tuples:";
        for (std::size_t i = 0; i < failures.size() && i < 8; ++i) os << ' ' << failures[i];
        throw RecurError(os.str());
    }
    return table;
}

TranslateResult find_translate(const WindowedSet& a, const std::vector<std::int64_t>& f) {
    a.validate();
    if (f.empty()) throw ValidationError("find_translate requires a nonempty finite set");
    std::int64_t fmin = *std::min_element(f.begin(), f.end());
    std::int64_t fmax = *std::max_element(f.begin(), f.end());
    std::int64_t t_lo = fmax - a.window.hi;
    std::int64_t t_hi = fmin - a.window.lo;
    if (t_lo > t_hi) throw ValidationError("window too small to slide the finite set");

    TranslateResult best{t_lo, -1};
    for (std::int64_t t = t_lo; t <= t_hi; ++t) {
        std::int64_t count = 0;
        for (std::int64_t x : f)
            if (a.contains(x - t)) ++count;
        if (count > best.count) {
            best.t = t;
            best.count = count;
        }
    }
    return best;
}

}  // namespace recur
