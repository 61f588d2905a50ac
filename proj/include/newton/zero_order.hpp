#pragma once

#include <stdexcept>
#include <vector>

#include "newton/modular.hpp"
#include "newton/polyhedron.hpp"
#include "newton/univariate.hpp"

namespace newton {

enum class Field { real, complex, padic };

struct FieldSpec {
    Field field = Field::real;
    long p = 0;

    int bK() const { return field == Field::complex ? 2 : 1; }
    static FieldSpec reals() { return {Field::real, 0}; }
    static FieldSpec complexes() { return {Field::complex, 0}; }
    static FieldSpec padics(long p) { return {Field::padic, p}; }
    const char* name() const {
        switch (field) {
            case Field::real: return "R";
            case Field::complex: return "C";
            default: return "Qp";
        }
    }
};

/// Order of vanishing of a face polynomial on the torus, as a certified
/// range. Exact paths give lo == hi.
struct ZeroOrder {
    int lo = 0;
    int hi = 0;
    bool exact = true;

    int value() const { return hi; }
};

/// One-variable reduction of a one-dimensional face: its points sit at
/// alpha_min + t * step along a primitive lattice direction, and on the torus
/// the face polynomial vanishes exactly where q(w) = sum c_t w^t does with
/// w ranging over the nonzero field elements.
inline UniPoly face_edge_poly(const NewtonPolyhedron& P, int face_id) {
    const Face& F = P.faces()[face_id];
    const auto& support = P.support();
    int n = P.nvars();
    const Exp* base = &support[F.members[0]];
    for (int idx : F.members)
        if (support[idx] < *base) base = &support[idx];
    IntVec step;
    for (int idx : F.members) {
        IntVec u(n);
        bool nz = false;
        for (int j = 0; j < n; ++j) {
            u[j] = Int(support[idx][j]) - Int((*base)[j]);
            if (u[j] != 0) nz = true;
        }
        if (nz) { step = primitive(u); break; }
    }
    if (step.empty()) throw std::invalid_argument("face has a single point");
    UniPoly q;
    for (int idx : F.members) {
        Int t = 0;
        for (int j = 0; j < n; ++j)
            if (step[j] != 0) {
                t = (Int(support[idx][j]) - Int((*base)[j])) / step[j];
                break;
            }
        for (int j = 0; j < n; ++j)
            if (Int((*base)[j]) + t * step[j] != Int(support[idx][j]))
                throw std::logic_error("face points are not collinear");
        int ti = t.convert_to<int>();
        if (static_cast<int>(q.size()) < ti + 1) q.resize(ti + 1, Rat(0));
        q[ti] += P.poly().coeff(support[idx]);
    }
    uni_normalize(q);
    return q;
}

/// Largest multiplicity among roots of q in the multiplicative group of the
/// field: squarefree decomposition, then a per-field existence test on each
/// squarefree layer.
inline ZeroOrder max_nonzero_root_multiplicity(const UniPoly& q, FieldSpec K) {
    auto layers = yun_squarefree(q);
    ZeroOrder out;
    for (size_t i = 0; i < layers.size(); ++i) {
        UniPoly f = layers[i];
        // drop the root at zero if present
        size_t low = 0;
        while (low < f.size() && f[low] == 0) ++low;
        f.erase(f.begin(), f.begin() + low);
        if (uni_degree(f) < 1) continue;
        bool has_root;
        switch (K.field) {
            case Field::complex: has_root = true; break;
            case Field::real: has_root = has_nonzero_real_root(f); break;
            default:
                try {
                    has_root = has_nonzero_padic_root(f, K.p);
                } catch (const PadicCapExceeded&) {
                    out.hi = std::max(out.hi, static_cast<int>(i) + 1);
                    out.exact = false;
                    continue;
                }
        }
        if (has_root) {
            out.lo = std::max(out.lo, static_cast<int>(i) + 1);
            out.hi = std::max(out.hi, static_cast<int>(i) + 1);
        }
    }
    return out;
}

/// Heuristic bound for faces of dimension two and up: search for common torus
/// zeros of the face polynomial and its gradient modulo a handful of primes.
/// A genuine degenerate zero shows up modulo all but finitely many primes, so
/// a clean majority is treated as evidence of none, giving the verdict
/// o <= 1; otherwise only the trivial degree bound holds.
inline ZeroOrder gradient_order_bound(const Polynomial& fF,
                                      const std::vector<long>& primes = {11, 13, 17, 19,
                                                                         23}) {
    int n = fF.nvars();
    std::vector<Polynomial> sys{fF};
    for (int i = 0; i < n; ++i) sys.push_back(fF.derivative(i));
    int clean = 0;
    for (long p : primes) {
        std::vector<ModularEvaluator> evals;
        bool bad_modulus = false;
        try {
            for (const auto& g : sys) evals.emplace_back(g, p);
        } catch (const std::domain_error&) {
            bad_modulus = true;  // a denominator collides with p
        }
        if (bad_modulus) continue;
        bool found = false;
        std::vector<uint64_t> x(n, 1);
        for (;;) {
            bool all_zero = true;
            for (const auto& ev : evals)
                if (ev(x) != 0) { all_zero = false; break; }
            if (all_zero) { found = true; break; }
            int pos = 0;
            while (pos < n && x[pos] == static_cast<uint64_t>(p) - 1) x[pos++] = 1;
            if (pos == n) break;
            ++x[pos];
        }
        if (!found) ++clean;
    }
    ZeroOrder out;
    out.exact = false;
    out.lo = 0;
    out.hi = clean * 2 >= static_cast<int>(primes.size()) ? 1 : fF.degree();
    return out;
}

enum class OrderMethod { exact2d, gradient_check, sampled, user_override };

struct OrderRequest {
    OrderMethod method = OrderMethod::exact2d;
    std::vector<long> primes = {11, 13, 17, 19, 23};
    int override_value = 0;
};

/// Zero order of one face, by the requested route. The exact2d route covers
/// vertices and edges (any zero- or one-dimensional face) and insists on two
/// variables as a guard against calling it where higher-dimensional faces
/// exist.
inline ZeroOrder face_zero_order(const NewtonPolyhedron& P, int face_id, FieldSpec K,
                                 const OrderRequest& req = {}) {
    const Face& F = P.faces()[face_id];
    switch (req.method) {
        case OrderMethod::user_override:
            return ZeroOrder{req.override_value, req.override_value, true};
        case OrderMethod::exact2d:
            if (P.nvars() != 2)
                throw std::invalid_argument("exact order route requires two variables");
            break;
        case OrderMethod::gradient_check:
        case OrderMethod::sampled:
            return gradient_order_bound(P.face_polynomial(face_id), req.primes);
    }
    if (F.dim == 0) return ZeroOrder{0, 0, true};
    return max_nonzero_root_multiplicity(face_edge_poly(P, face_id), K);
}

/// Internal route used by the growth classifier: exact for dimensions zero
/// and one in any number of variables, gradient bound beyond.
inline ZeroOrder face_zero_order_auto(const NewtonPolyhedron& P, int face_id,
                                      FieldSpec K) {
    const Face& F = P.faces()[face_id];
    if (F.dim == 0) return ZeroOrder{0, 0, true};
    if (F.dim == 1) return max_nonzero_root_multiplicity(face_edge_poly(P, face_id), K);
    return gradient_order_bound(P.face_polynomial(face_id));
}

}  // namespace newton
