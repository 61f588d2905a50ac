#pragma once

// Cross-checking oracle for the test suite. Everything here recomputes
// invariants from scratch through routes unrelated to the library pipeline:
// hull membership by exhaustive generator-subset solving, the diagonal
// distance by rational bisection plus smallest-denominator recovery, face
// dimension by two-sided membership probes, compact faces by sweeping
// strictly positive integer functionals, and root multiplicities by
// simultaneous root iteration (complex/real) or residue counting (p-adic).

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <map>
#include <set>
#include <stdexcept>
#include <vector>

#include "newton/linalg.hpp"
#include "newton/polynomial.hpp"

namespace oracle {

using newton::Exp;
using newton::Int;
using newton::Polynomial;
using newton::Rat;
using newton::RatMat;
using newton::RatVec;

// ---------------------------------------------------------------------------
// Exact membership in conv(support) + nonnegative orthant.
// Homogenize: q is in the hull iff (q,1) is a nonnegative combination of
// {(alpha,1)} and {(e_j,0)}, and then some linearly independent subset of at
// most n+1 generators already suffices.
inline bool in_hull(const std::vector<Exp>& support, const RatVec& q) {
    int n = static_cast<int>(q.size());
    std::vector<RatVec> gens;
    for (const auto& a : support) {
        RatVec g(n + 1);
        for (int i = 0; i < n; ++i) g[i] = a[i];
        g[n] = 1;
        gens.push_back(std::move(g));
    }
    for (int j = 0; j < n; ++j) {
        RatVec g(n + 1, Rat(0));
        g[j] = 1;
        gens.push_back(std::move(g));
    }
    RatVec target = q;
    target.push_back(1);

    int m = static_cast<int>(gens.size());
    int kmax = std::min(m, n + 1);
    std::vector<int> idx;
    auto feasible = [&]() {
        size_t s = idx.size();
        RatMat A(n + 1, RatVec(s));
        for (size_t c = 0; c < s; ++c)
            for (int r = 0; r <= n; ++r) A[r][c] = gens[idx[c]][r];
        RatVec x;
        if (!newton::solve_rect(A, target, x)) return false;
        for (const Rat& v : x)
            if (v < 0) return false;
        return true;
    };
    std::function<bool(int)> rec = [&](int start) -> bool {
        if (!idx.empty() && feasible()) return true;
        if (static_cast<int>(idx.size()) == kmax) return false;
        for (int i = start; i < m; ++i) {
            idx.push_back(i);
            if (rec(i + 1)) return true;
            idx.pop_back();
        }
        return false;
    };
    return rec(0);
}

// ---------------------------------------------------------------------------
// Smallest-denominator rational in the closed interval [lo, hi], 0 <= lo <= hi.
inline Rat simplest_in(const Rat& lo, const Rat& hi) {
    Int c = newton::rat_ceil(lo);
    if (Rat(c) <= hi) return Rat(c);
    Int fl = newton::rat_floor(lo);
    return Rat(fl) + Rat(1) / simplest_in(Rat(1) / (hi - Rat(fl)), Rat(1) / (lo - Rat(fl)));
}

inline bool diagonal_in_hull(const std::vector<Exp>& support, const Rat& t) {
    RatVec q(support.empty() ? 0 : support[0].size(), t);
    return in_hull(support, q);
}

// Distance along the diagonal: the least t with (t,...,t) in the hull.
// Bisection with exact membership, then smallest-denominator recovery,
// then verification of both sides.
inline Rat diagonal_distance(const std::vector<Exp>& support) {
    if (support.empty()) throw std::invalid_argument("empty support");
    Rat hi = 0;
    {
        int best = -1;
        for (const auto& a : support) {
            int mx = *std::max_element(a.begin(), a.end());
            if (best < 0 || mx < best) best = mx;
        }
        hi = best;
    }
    Rat lo = 0;
    if (diagonal_in_hull(support, lo)) return 0;
    if (!diagonal_in_hull(support, hi)) throw std::logic_error("upper bound not in hull");
    for (int it = 0; it < 80; ++it) {
        Rat mid = (lo + hi) / 2;
        if (diagonal_in_hull(support, mid))
            hi = mid;
        else
            lo = mid;
    }
    Rat d = simplest_in(lo, hi);
    if (!diagonal_in_hull(support, d)) throw std::logic_error("candidate not in hull");
    if (diagonal_in_hull(support, d - Rat(1, Int(1) << 90)))
        throw std::logic_error("candidate not minimal");
    return d;
}

// ---------------------------------------------------------------------------
// Dimension of the face whose relative interior contains (d,...,d): the rank
// of the directions u with both (d,...,d) + eps*u and - eps*u in the hull.
// Acceptance in both directions is exact evidence (the face property), and a
// too-large eps can only reject, so two scales guard against that.
inline int central_dim(const std::vector<Exp>& support, const Rat& d) {
    int n = static_cast<int>(support[0].size());
    RatVec q(n, d);
    std::vector<RatVec> dirs;
    for (const auto& a : support) {
        RatVec u(n);
        for (int i = 0; i < n; ++i) u[i] = Rat(a[i]) - d;
        dirs.push_back(std::move(u));
    }
    for (int j = 0; j < n; ++j) {
        RatVec u(n, Rat(0));
        u[j] = 1;
        dirs.push_back(std::move(u));
    }
    auto rank_at = [&](const Rat& eps) {
        RatMat kept;
        for (const auto& u : dirs) {
            RatVec plus(n), minus(n);
            for (int i = 0; i < n; ++i) {
                plus[i] = q[i] + eps * u[i];
                minus[i] = q[i] - eps * u[i];
            }
            if (in_hull(support, plus) && in_hull(support, minus)) kept.push_back(u);
        }
        return newton::rank(std::move(kept));
    };
    int k1 = rank_at(Rat(1, 1 << 12));
    int k2 = rank_at(Rat(1, Int(1) << 20));
    if (k1 != k2) throw std::logic_error("central dimension unstable across eps");
    return k2;
}

// A support point y lies on the central face iff pushing from y through the
// diagonal point slightly past it stays inside the hull.
inline bool point_in_central(const std::vector<Exp>& support, const Rat& d, const Exp& y) {
    int n = static_cast<int>(y.size());
    Rat eps(1, Int(1) << 20);
    RatVec probe(n);
    for (int i = 0; i < n; ++i) probe[i] = d + eps * (d - y[i]);
    return in_hull(support, probe);
}

// ---------------------------------------------------------------------------
// Compact faces as minimizer sets of strictly positive integer functionals.
struct OFace {
    std::vector<int> members;  // indices into the support, sorted
    int dim = 0;
};

inline std::vector<OFace> compact_faces(const std::vector<Exp>& support, int W = 12) {
    int n = static_cast<int>(support[0].size());
    std::set<std::vector<int>> seen;
    std::vector<OFace> out;
    std::vector<int> w(n, 1);
    for (;;) {
        Int best = 0;
        bool first = true;
        for (const auto& a : support) {
            Int v = 0;
            for (int i = 0; i < n; ++i) v += Int(w[i]) * a[i];
            if (first || v < best) { best = v; first = false; }
        }
        std::vector<int> members;
        for (size_t i = 0; i < support.size(); ++i) {
            Int v = 0;
            for (int j = 0; j < n; ++j) v += Int(w[j]) * support[i][j];
            if (v == best) members.push_back(static_cast<int>(i));
        }
        if (seen.insert(members).second) {
            OFace F;
            F.members = members;
            RatMat diffs;
            for (size_t i = 1; i < members.size(); ++i) {
                RatVec u(n);
                for (int j = 0; j < n; ++j)
                    u[j] = Rat(support[members[i]][j]) - Rat(support[members[0]][j]);
                diffs.push_back(std::move(u));
            }
            F.dim = diffs.empty() ? 0 : newton::rank(std::move(diffs));
            out.push_back(std::move(F));
        }
        // next functional in {1..W}^n
        int pos = 0;
        while (pos < n && w[pos] == W) w[pos++] = 1;
        if (pos == n) break;
        ++w[pos];
    }
    std::sort(out.begin(), out.end(),
              [](const OFace& a, const OFace& b) { return a.members < b.members; });
    return out;
}

// ---------------------------------------------------------------------------
// One-variable reduction of a face of dimension one: points along the edge
// are alpha_0 + t_i * step with step primitive, giving q(w) = sum c_i w^{t_i}.
// Returns (t_i, c_i) pairs sorted by t.
inline std::vector<std::pair<int, Rat>> edge_reduction(const Polynomial& f,
                                                       const std::vector<int>& members) {
    auto support = f.support();
    int n = f.nvars();
    // Pick the two extreme points to get the direction.
    const Exp* lo = &support[members[0]];
    for (int idx : members)
        if (support[idx] < *lo) lo = &support[idx];
    newton::IntVec step(n, 0);
    bool have = false;
    for (int idx : members) {
        newton::IntVec u(n);
        bool nonzero = false;
        for (int j = 0; j < n; ++j) {
            u[j] = Int(support[idx][j]) - Int((*lo)[j]);
            if (u[j] != 0) nonzero = true;
        }
        if (nonzero && !have) { step = newton::primitive(u); have = true; }
    }
    if (!have) throw std::invalid_argument("face is a single point");
    // Orient so parameters come out nonnegative, then normalize to min 0.
    std::vector<std::pair<int, Rat>> terms;
    std::vector<Int> params;
    for (int idx : members) {
        // solve alpha = lo + t*step exactly; all points are collinear
        Int t = 0;
        for (int j = 0; j < n; ++j) {
            if (step[j] == 0) continue;
            Int diff = Int(support[idx][j]) - Int((*lo)[j]);
            if (diff % step[j] != 0) throw std::logic_error("edge points not on lattice line");
            t = diff / step[j];
            break;
        }
        // verify all coordinates
        for (int j = 0; j < n; ++j)
            if (Int((*lo)[j]) + t * step[j] != Int(support[idx][j]))
                throw std::logic_error("face points not collinear");
        params.push_back(t);
    }
    Int tmin = *std::min_element(params.begin(), params.end());
    for (size_t i = 0; i < members.size(); ++i) {
        int t = (params[i] - tmin).convert_to<int>();
        terms.push_back({t, f.coeff(support[members[i]])});
    }
    std::sort(terms.begin(), terms.end());
    return terms;
}

// ---------------------------------------------------------------------------
// Complex roots by simultaneous (Durand-Kerner) iteration on the monic
// deflated polynomial; returns all roots of the w^0-normalized poly.
inline std::vector<std::complex<double>> dk_roots(std::vector<double> c) {
    // strip zero roots: lowest nonzero coefficient becomes the constant term
    size_t low = 0;
    while (low < c.size() && c[low] == 0.0) ++low;
    c.erase(c.begin(), c.begin() + low);
    while (!c.empty() && c.back() == 0.0) c.pop_back();
    if (c.size() <= 1) return {};
    int deg = static_cast<int>(c.size()) - 1;
    for (double& v : c) v /= c[deg];
    std::vector<std::complex<double>> z(deg);
    std::complex<double> seed(0.4, 0.9);
    std::complex<double> acc(1, 0);
    for (int i = 0; i < deg; ++i) {
        acc *= seed;
        z[i] = acc;
    }
    auto eval = [&](std::complex<double> w) {
        std::complex<double> s = 0;
        for (int i = deg; i >= 0; --i) s = s * w + c[i];
        return s;
    };
    for (int it = 0; it < 600; ++it) {
        double moved = 0;
        for (int i = 0; i < deg; ++i) {
            std::complex<double> den(1, 0);
            for (int j = 0; j < deg; ++j)
                if (j != i) den *= z[i] - z[j];
            std::complex<double> delta = eval(z[i]) / den;
            z[i] -= delta;
            moved = std::max(moved, std::abs(delta));
        }
        if (moved < 1e-14) break;
    }
    return z;
}

inline std::vector<std::vector<std::complex<double>>> cluster_roots(
    const std::vector<std::complex<double>>& roots, double tol = 1e-3) {
    std::vector<std::vector<std::complex<double>>> clusters;
    for (auto r : roots) {
        bool placed = false;
        for (auto& cl : clusters) {
            std::complex<double> cen = 0;
            for (auto x : cl) cen += x;
            cen /= static_cast<double>(cl.size());
            if (std::abs(r - cen) < tol) {
                cl.push_back(r);
                placed = true;
                break;
            }
        }
        if (!placed) clusters.push_back({r});
    }
    return clusters;
}

inline std::vector<double> edge_to_doubles(const std::vector<std::pair<int, Rat>>& terms) {
    int deg = 0;
    for (auto& [t, c] : terms) deg = std::max(deg, t);
    std::vector<double> c(deg + 1, 0.0);
    for (auto& [t, co] : terms) c[t] += newton::to_double(co);
    return c;
}

inline int edge_order_complex(const std::vector<std::pair<int, Rat>>& terms) {
    auto clusters = cluster_roots(dk_roots(edge_to_doubles(terms)));
    int best = 0;
    for (auto& cl : clusters) {
        std::complex<double> cen = 0;
        for (auto x : cl) cen += x;
        cen /= static_cast<double>(cl.size());
        if (std::abs(cen) > 1e-6) best = std::max(best, static_cast<int>(cl.size()));
    }
    return best;
}

inline int edge_order_real(const std::vector<std::pair<int, Rat>>& terms) {
    auto clusters = cluster_roots(dk_roots(edge_to_doubles(terms)));
    int best = 0;
    for (auto& cl : clusters) {
        std::complex<double> cen = 0;
        for (auto x : cl) cen += x;
        cen /= static_cast<double>(cl.size());
        if (std::abs(cen) > 1e-6 && std::abs(cen.imag()) < 1e-5)
            best = std::max(best, static_cast<int>(cl.size()));
    }
    return best;
}

// ---------------------------------------------------------------------------
// p-adic root multiplicity by residue counting. Roots of valuation v become
// unit roots of q(p^v w); for each shift the count of unit solutions mod p^m
// grows like p^{m(1-1/mu)} where mu is the largest multiplicity.
inline long padic_val(Int x, long p) {
    if (x == 0) return 1 << 20;
    long v = 0;
    while (x % p == 0) { x /= p; ++v; }
    return v;
}

inline int edge_order_padic(const std::vector<std::pair<int, Rat>>& terms, long p) {
    // integerize coefficients
    Int lcm = 1;
    for (auto& [t, c] : terms) {
        Int den = newton::rat_den(c);
        lcm = lcm / boost::multiprecision::gcd(lcm, den) * den;
    }
    int deg = 0;
    for (auto& [t, c] : terms) deg = std::max(deg, t);
    std::vector<Int> a(deg + 1, 0);
    for (auto& [t, c] : terms) a[t] += newton::rat_num(c) * (lcm / newton::rat_den(c));

    long spread = 0;
    for (const Int& x : a)
        if (x != 0) spread = std::max(spread, padic_val(x, p));
    int T = static_cast<int>(spread) + deg + 1;

    // choose the largest exponent with p^m below the enumeration budget
    int m_hi = 1;
    {
        long long pm = p;
        while (pm * p <= 1000000LL) { pm *= p; ++m_hi; }
    }
    int m_lo = std::max(1, m_hi - 2);

    // exact count of unit roots mod p^m, found by lifting level by level:
    // every root mod p^{j+1} reduces to a root mod p^j, so extending each
    // survivor by the p possible next digits enumerates them all
    auto count_units = [&](const std::vector<Int>& b, int m) -> long long {
        long long pm = 1;
        for (int i = 0; i < m; ++i) pm *= p;
        std::vector<long long> br(b.size());
        for (size_t i = 0; i < b.size(); ++i) {
            Int r = b[i] % pm;
            if (r < 0) r += pm;
            br[i] = r.convert_to<long long>();
        }
        auto value_mod = [&](long long w, long long mod) -> long long {
            long long s = 0;
            for (int i = static_cast<int>(br.size()) - 1; i >= 0; --i)
                s = (static_cast<unsigned __int128>(s) * w + br[i]) % mod;
            return s;
        };
        std::vector<long long> roots;
        for (long long w = 1; w < p; ++w)
            if (value_mod(w, p) == 0) roots.push_back(w);
        long long level = p;
        for (int j = 2; j <= m; ++j) {
            level *= p;
            std::vector<long long> next;
            for (long long w0 : roots)
                for (long long t = 0; t < p; ++t) {
                    long long w = w0 + t * (level / p);
                    if (value_mod(w, level) == 0) next.push_back(w);
                }
            roots = std::move(next);
            if (roots.size() > 200000)
                throw std::logic_error("p-adic root census exploded");
        }
        return static_cast<long long>(roots.size());
    };

    int best = 0;
    for (int v = -T; v <= T; ++v) {
        // b_i = a_i * p^{v i}, cleared to integers and v-content removed
        std::vector<Rat> br(a.size());
        long minval = 1 << 20;
        for (size_t i = 0; i < a.size(); ++i) {
            if (a[i] == 0) continue;
            Rat pv = 1;
            for (int k = 0; k < std::abs(v) * static_cast<int>(i); ++k) {
                if (v >= 0)
                    pv *= p;
                else
                    pv /= p;
            }
            br[i] = Rat(a[i]) * pv;
        }
        // scale to integer with unit content
        Int l2 = 1;
        for (auto& c : br) {
            Int den = newton::rat_den(c);
            l2 = l2 / boost::multiprecision::gcd(l2, den) * den;
        }
        std::vector<Int> b(a.size(), 0);
        for (size_t i = 0; i < a.size(); ++i)
            b[i] = newton::rat_num(br[i]) * (l2 / newton::rat_den(br[i]));
        for (const Int& x : b)
            if (x != 0) minval = std::min(minval, padic_val(x, p));
        for (auto& x : b)
            for (long k = 0; k < minval; ++k) x /= p;

        long long c_hi = count_units(b, m_hi);
        if (c_hi == 0) continue;
        auto estimate = [&](long long cnt, int m) {
            double logc = std::log(static_cast<double>(cnt)) / std::log(static_cast<double>(p));
            double mu = m / (m - logc);
            return static_cast<int>(std::lround(mu));
        };
        int mu_hi = estimate(c_hi, m_hi);
        long long c_lo = count_units(b, m_lo);
        int mu_lo = c_lo == 0 ? 0 : estimate(c_lo, m_lo);
        if (mu_hi != mu_lo) throw std::logic_error("p-adic multiplicity unstable across levels");
        best = std::max(best, mu_hi);
    }
    return best;
}

// ---------------------------------------------------------------------------
// Assembled growth prediction.
struct OGrowth {
    Rat d;
    int k = 0;
    char tag = 'a';
    Rat exponent;   // delta/b_K: 1/d in cases a,b; 1/s upper side in case c
    int log_lo = 0; // log power (case a: both equal n-k-1; case b: bracket)
    int log_hi = 0;
    bool upper_only = false;
    Rat s;          // sup of face orders, case c
};

// field: 'R', 'C', or 'P' (with the prime). Orders of faces of dimension >= 2
// cannot be recovered by the elementary routes here; they must be pinned by
// the caller (keyed by member index set).
inline OGrowth predict(const Polynomial& f, char field, long p,
                       const std::map<std::vector<int>, int>& high_dim_orders = {}) {
    auto support = f.support();
    int n = f.nvars();
    OGrowth g;
    g.d = diagonal_distance(support);
    g.k = central_dim(support, g.d);
    auto faces = compact_faces(support);
    Rat smax = 0;
    bool any_over = false, equality_central = false, all_le = true;
    for (const auto& F : faces) {
        int o;
        if (F.dim == 0) {
            o = 0;
        } else if (F.dim == 1) {
            auto terms = edge_reduction(f, F.members);
            o = field == 'C'   ? edge_order_complex(terms)
                : field == 'R' ? edge_order_real(terms)
                               : edge_order_padic(terms, p);
        } else {
            auto it = high_dim_orders.find(F.members);
            if (it == high_dim_orders.end())
                throw std::logic_error("order of a higher-dimensional face not pinned");
            o = it->second;
        }
        if (Rat(o) > g.d) { any_over = true; }
        if (Rat(o) > smax) smax = o;
        bool central = true;
        for (int idx : F.members)
            if (!point_in_central(support, g.d, support[idx])) { central = false; break; }
        if (central && Rat(o) == g.d) equality_central = true;
        if (Rat(o) > g.d) all_le = false;
    }
    if (any_over) {
        g.tag = 'c';
        g.s = smax;
        g.exponent = Rat(1) / smax;
        g.upper_only = true;
        g.log_lo = g.log_hi = 0;
    } else if (equality_central) {
        g.tag = 'b';
        g.exponent = Rat(1) / g.d;
        g.log_lo = n - g.k - 1;
        g.log_hi = n - g.k;
    } else {
        (void)all_le;
        g.tag = 'a';
        g.exponent = Rat(1) / g.d;
        g.log_lo = g.log_hi = n - g.k - 1;
    }
    return g;
}

}  // namespace oracle
