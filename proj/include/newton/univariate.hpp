#pragma once

#include <algorithm>
#include <optional>
#include <stdexcept>
#include <vector>

#include "newton/linalg.hpp"
#include "newton/rational.hpp"

namespace newton {

/// Coefficient of w^i at index i; normalized form has a nonzero back().
using UniPoly = std::vector<Rat>;

inline void uni_normalize(UniPoly& p) {
    while (!p.empty() && p.back() == 0) p.pop_back();
}
inline int uni_degree(const UniPoly& p) { return static_cast<int>(p.size()) - 1; }
inline bool uni_zero(const UniPoly& p) { return p.empty(); }

inline Rat uni_eval(const UniPoly& p, const Rat& w) {
    Rat s = 0;
    for (int i = uni_degree(p); i >= 0; --i) s = s * w + p[i];
    return s;
}

inline UniPoly uni_derivative(const UniPoly& p) {
    UniPoly d;
    for (size_t i = 1; i < p.size(); ++i) d.push_back(Rat(Int(i)) * p[i]);
    uni_normalize(d);
    return d;
}

inline UniPoly uni_mul(const UniPoly& a, const UniPoly& b) {
    if (uni_zero(a) || uni_zero(b)) return {};
    UniPoly c(a.size() + b.size() - 1, Rat(0));
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < b.size(); ++j) c[i + j] += a[i] * b[j];
    uni_normalize(c);
    return c;
}

inline UniPoly uni_sub(UniPoly a, const UniPoly& b) {
    if (a.size() < b.size()) a.resize(b.size(), Rat(0));
    for (size_t i = 0; i < b.size(); ++i) a[i] -= b[i];
    uni_normalize(a);
    return a;
}

/// Exact division with remainder; quotient in q, remainder returned.
inline UniPoly uni_divrem(UniPoly a, const UniPoly& b, UniPoly& q) {
    if (uni_zero(b)) throw std::domain_error("division by zero polynomial");
    q.clear();
    int db = uni_degree(b);
    while (uni_degree(a) >= db) {
        int shift = uni_degree(a) - db;
        Rat c = a.back() / b.back();
        if (static_cast<int>(q.size()) < shift + 1) q.resize(shift + 1, Rat(0));
        q[shift] += c;
        for (int i = 0; i <= db; ++i) a[shift + i] -= c * b[i];
        uni_normalize(a);
    }
    uni_normalize(q);
    return a;
}

inline UniPoly uni_divexact(const UniPoly& a, const UniPoly& b) {
    UniPoly q;
    UniPoly r = uni_divrem(a, b, q);
    if (!uni_zero(r)) throw std::domain_error("inexact polynomial division");
    return q;
}

/// Monic gcd by the Euclidean chain.
inline UniPoly uni_gcd(UniPoly a, UniPoly b) {
    uni_normalize(a);
    uni_normalize(b);
    while (!uni_zero(b)) {
        UniPoly q;
        UniPoly r = uni_divrem(a, b, q);
        a = std::move(b);
        b = std::move(r);
    }
    if (!uni_zero(a)) {
        Rat lc = a.back();
        for (Rat& c : a) c /= lc;
    }
    return a;
}

/// Squarefree decomposition: f = const * prod factors[i]^(i+1), each factor
/// monic squarefree (possibly 1).
inline std::vector<UniPoly> yun_squarefree(UniPoly f) {
    uni_normalize(f);
    std::vector<UniPoly> out;
    if (uni_degree(f) < 1) return out;
    UniPoly fp = uni_derivative(f);
    UniPoly d = uni_gcd(f, fp);
    UniPoly b = uni_divexact(f, d);
    UniPoly c = uni_divexact(fp, d);
    UniPoly z = uni_sub(c, uni_derivative(b));
    while (uni_degree(b) > 0) {
        UniPoly a = uni_gcd(b, z);
        out.push_back(a);
        b = uni_divexact(b, a);
        c = uni_divexact(z, a);
        z = uni_sub(c, uni_derivative(b));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Sturm chain: number of distinct real roots of a squarefree polynomial.
inline int sturm_real_roots(const UniPoly& q) {
    if (uni_degree(q) < 1) return 0;
    std::vector<UniPoly> chain{q, uni_derivative(q)};
    while (!uni_zero(chain.back()) && uni_degree(chain.back()) > 0) {
        UniPoly quo;
        UniPoly r = uni_divrem(chain[chain.size() - 2], chain.back(), quo);
        for (Rat& c : r) c = -c;
        if (uni_zero(r)) break;
        chain.push_back(std::move(r));
    }
    auto variations = [&](int at_infinity) {
        int v = 0, prev = 0;
        for (const auto& p : chain) {
            if (uni_zero(p)) continue;
            int s = p.back() > 0 ? 1 : -1;
            if (at_infinity < 0 && uni_degree(p) % 2 == 1) s = -s;
            if (prev != 0 && s != prev) ++v;
            prev = s;
        }
        return v;
    };
    return variations(-1) - variations(+1);
}

/// Whether a squarefree polynomial has a real root other than zero.
inline bool has_nonzero_real_root(UniPoly q) {
    uni_normalize(q);
    size_t low = 0;
    while (low < q.size() && q[low] == 0) ++low;
    q.erase(q.begin(), q.begin() + low);
    if (uni_degree(q) < 1) return false;
    return sturm_real_roots(q) > 0;
}

// ---------------------------------------------------------------------------
inline std::vector<Int> uni_integerize(const UniPoly& p) {
    Int lcm = 1;
    for (const Rat& c : p) {
        Int den = rat_den(c);
        lcm = lcm / boost::multiprecision::gcd(lcm, den) * den;
    }
    std::vector<Int> out(p.size());
    for (size_t i = 0; i < p.size(); ++i) out[i] = rat_num(p[i]) * (lcm / rat_den(p[i]));
    Int g = 0;
    for (const Int& x : out) g = boost::multiprecision::gcd(g, x);
    if (g > 1)
        for (Int& x : out) x /= g;
    return out;
}

inline std::vector<Int> divisors_of(Int x) {
    if (x < 0) x = -x;
    std::vector<Int> out;
    for (Int i = 1; i * i <= x; ++i) {
        if (x % i != 0) continue;
        out.push_back(i);
        if (i * i != x) out.push_back(x / i);
        if (out.size() > 4096) throw std::runtime_error("too many divisors");
    }
    std::sort(out.begin(), out.end());
    return out;
}

/// All rational roots, each listed once.
inline std::vector<Rat> rational_roots(const UniPoly& p0) {
    UniPoly p = p0;
    uni_normalize(p);
    std::vector<Rat> out;
    size_t low = 0;
    while (low < p.size() && p[low] == 0) ++low;
    if (low > 0) {
        out.push_back(0);
        p.erase(p.begin(), p.begin() + low);
    }
    if (uni_degree(p) < 1) return out;
    auto z = uni_integerize(p);
    for (const Int& num : divisors_of(z.front()))
        for (const Int& den : divisors_of(z.back()))
            for (int sign : {1, -1}) {
                Rat r(sign * num, den);
                if (uni_eval(p, r) == 0 &&
                    std::find(out.begin(), out.end(), r) == out.end())
                    out.push_back(r);
            }
    std::sort(out.begin(), out.end());
    return out;
}

/// Resultant via the Sylvester determinant.
inline Rat resultant(const UniPoly& p, const UniPoly& q) {
    int m = uni_degree(p), n = uni_degree(q);
    if (m < 0 || n < 0) return 0;
    if (m == 0 && n == 0) return 1;
    int N = m + n;
    RatMat s(N, RatVec(N, Rat(0)));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j <= m; ++j) s[i][i + j] = p[m - j];
    for (int i = 0; i < m; ++i)
        for (int j = 0; j <= n; ++j) s[n + i][i + j] = q[n - j];
    return det(std::move(s));
}

// ---------------------------------------------------------------------------
// p-adic root decision for squarefree polynomials.

inline long padic_valuation(Int x, long p) {
    if (x == 0) throw std::domain_error("valuation of zero");
    long v = 0;
    while (x % p == 0) { x /= p; ++v; }
    return v;
}
inline long padic_valuation(const Rat& x, long p) {
    return padic_valuation(rat_num(x), p) - padic_valuation(rat_den(x), p);
}

struct PadicCapExceeded : std::runtime_error {
    PadicCapExceeded() : std::runtime_error("p-adic enumeration exceeds the cap") {}
};

namespace detail {

// Whether the squarefree integer polynomial r has a root in the p-adic units.
// Candidate residues are grown digit by digit (a root mod p^{j+1} reduces to
// a root mod p^j), up to the level L past twice the resultant valuation where
// the quadratic-convergence criterion decides: r(u) = 0 mod p^L together with
// 2*val(r'(u)) < L certifies a nearby unit root, and every true unit root w
// presents that certificate at u = w mod p^L because val(r'(w)) is bounded by
// the resultant valuation.
inline bool has_unit_root(const std::vector<Int>& r, long p, long long cap) {
    int deg = static_cast<int>(r.size()) - 1;
    if (deg < 1) return false;
    UniPoly rq(r.size());
    for (size_t i = 0; i < r.size(); ++i) rq[i] = Rat(r[i]);
    Rat res = resultant(rq, uni_derivative(rq));
    if (res == 0) throw std::logic_error("non-squarefree p-adic input");
    long delta = padic_valuation(res, p) + padic_valuation(Rat(r.back()), p);
    long L = 2 * delta + 1;
    std::vector<Int> dcoef;
    for (size_t i = 1; i < r.size(); ++i) dcoef.push_back(Int(i) * r[i]);
    auto eval_mod = [](const std::vector<Int>& poly, const Int& u,
                       const Int& mod) {
        Int s = 0;
        for (int i = static_cast<int>(poly.size()) - 1; i >= 0; --i)
            s = (s * u + poly[i]) % mod;
        if (s < 0) s += mod;
        return s;
    };
    std::vector<Int> cand;
    for (long w = 1; w < p; ++w)
        if (eval_mod(r, w, p) == 0) cand.push_back(w);
    Int level = p;
    for (long j = 2; j <= L && !cand.empty(); ++j) {
        Int next_level = level * p;
        std::vector<Int> next;
        for (const Int& u0 : cand)
            for (long t = 0; t < p; ++t) {
                Int u = u0 + level * t;
                if (eval_mod(r, u, next_level) == 0) next.push_back(u);
            }
        cand = std::move(next);
        level = next_level;
        if (static_cast<long long>(cand.size()) > cap) throw PadicCapExceeded();
    }
    for (const Int& u : cand) {
        Int dv = eval_mod(dcoef, u, level);
        long vd = 0;
        if (dv == 0) {
            vd = L;  // derivative vanishes to the full precision
        } else {
            Int t = dv;
            while (t % p == 0) { t /= p; ++vd; }
        }
        if (2 * vd < L) return true;
    }
    return false;
}

}  // namespace detail

/// Whether a squarefree polynomial has a root in Q_p excluding zero. Scans the
/// integer slopes of the coefficient valuations, rescales each candidate
/// valuation to a unit-root question, and decides it by residue enumeration.
inline bool has_nonzero_padic_root(UniPoly q, long p, long long cap = 1000000) {
    uni_normalize(q);
    size_t low = 0;
    while (low < q.size() && q[low] == 0) ++low;
    q.erase(q.begin(), q.begin() + low);
    if (uni_degree(q) < 1) return false;
    // the unit-root certificate below assumes a squarefree input
    auto sq = uni_gcd(q, uni_derivative(q));
    if (uni_degree(sq) > 0) q = uni_divexact(q, sq);
    auto z = uni_integerize(q);
    int deg = static_cast<int>(z.size()) - 1;
    // candidate root valuations: integer slopes of the lower coefficient hull
    long maxval = 0;
    for (const Int& c : z)
        if (c != 0) maxval = std::max(maxval, padic_valuation(c, p));
    for (long v = -(maxval + 1); v <= maxval + 1; ++v) {
        // w = p^v u: coefficient i picks up valuation v*i
        std::vector<Rat> shifted(z.size());
        for (int i = 0; i <= deg; ++i) {
            Rat f = 1;
            for (long k = 0; k < std::labs(v) * i; ++k) {
                if (v >= 0)
                    f *= p;
                else
                    f /= p;
            }
            shifted[i] = Rat(z[i]) * f;
        }
        auto zi = uni_integerize(shifted);
        if (detail::has_unit_root(zi, p, cap)) return true;
    }
    return false;
}

}  // namespace newton
