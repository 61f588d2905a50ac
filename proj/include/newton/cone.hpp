#pragma once

#include <algorithm>
#include <functional>
#include <set>
#include <stdexcept>
#include <vector>

#include "linalg.hpp"
#include "polyhedron.hpp"

namespace newton {

// A polyhedral cone in the dual (normal) space, spanned by primitive integer
// generators with nonnegative entries. Generators are kept in descending lex
// order; that order is also the placement order for triangulations, so every
// routine here is deterministic.
struct Cone {
    std::vector<IntVec> generators;

    int nvars() const {
        return generators.empty() ? 0 : static_cast<int>(generators[0].size());
    }
    int rank() const { return rank_int_rows(generators); }
};

namespace detail {

inline bool desc_lex(const IntVec& a, const IntVec& b) { return a > b; }

inline RatVec to_rat(const IntVec& v) {
    RatVec r(v.size());
    for (size_t i = 0; i < v.size(); ++i) r[i] = Rat(v[i]);
    return r;
}

// Coordinates of each generator in a basis of their common span, so facet
// enumeration can work in a full-dimensional picture even for low cones.
inline std::vector<RatVec> span_coordinates(const std::vector<IntVec>& gens,
                                            int r) {
    RatMat basis;
    for (const auto& g : gens) {
        RatMat probe = basis;
        probe.push_back(to_rat(g));
        if (rank(probe) > static_cast<int>(basis.size()))
            basis.push_back(to_rat(g));
        if (static_cast<int>(basis.size()) == r) break;
    }
    size_t n = gens[0].size();
    RatMat bt(n, RatVec(r));
    for (int j = 0; j < r; ++j)
        for (size_t i = 0; i < n; ++i) bt[i][j] = basis[j][i];
    std::vector<RatVec> coords;
    for (const auto& g : gens) {
        RatVec c;
        if (!solve_rect(bt, to_rat(g), c))
            throw std::logic_error("generator escapes its own span");
        coords.push_back(c);
    }
    return coords;
}

// Facets of cone(gens) as sorted generator-index sets.
inline std::vector<std::vector<int>> cone_facets(
    const std::vector<IntVec>& gens, int r) {
    auto coords = span_coordinates(gens, r);
    int m = static_cast<int>(gens.size());
    std::set<std::vector<int>> found;
    std::vector<int> subset(r - 1);
    auto process = [&](const std::vector<int>& idx) {
        RatMat rows;
        for (int i : idx) rows.push_back(coords[i]);
        auto ns = nullspace(rows);
        if (ns.size() != 1) return;
        const RatVec& h = ns[0];
        int pos = 0, neg = 0;
        std::vector<int> onset;
        for (int i = 0; i < m; ++i) {
            Rat s = dot(coords[i], h);
            if (s > 0)
                ++pos;
            else if (s < 0)
                ++neg;
            else
                onset.push_back(i);
        }
        if (pos > 0 && neg > 0) return;
        RatMat on;
        for (int i : onset) on.push_back(coords[i]);
        if (rank(on) != r - 1) return;
        found.insert(onset);
    };
    std::vector<int> idx;
    std::function<void(int)> rec = [&](int start) {
        if (static_cast<int>(idx.size()) == r - 1) {
            process(idx);
            return;
        }
        for (int i = start; i < m; ++i) {
            idx.push_back(i);
            rec(i + 1);
            idx.pop_back();
        }
    };
    rec(0);
    return {found.begin(), found.end()};
}

}  // namespace detail

// Exact membership test for a (possibly non-simplicial) cone: w is a
// nonnegative combination of the generators iff some linearly independent
// subset carries it with nonnegative coordinates.
inline bool cone_contains(const std::vector<IntVec>& gens, const RatVec& w) {
    bool zero = true;
    for (const Rat& c : w)
        if (c != 0) zero = false;
    if (zero) return true;
    int m = static_cast<int>(gens.size());
    size_t n = w.size();
    std::vector<int> idx;
    std::function<bool(int)> rec = [&](int start) -> bool {
        if (!idx.empty()) {
            RatMat at(n, RatVec(idx.size()));
            for (size_t j = 0; j < idx.size(); ++j)
                for (size_t i = 0; i < n; ++i) at[i][j] = Rat(gens[idx[j]][i]);
            RatVec lam;
            if (solve_rect(at, w, lam)) {
                bool ok = true;
                for (const Rat& l : lam)
                    if (l < 0) ok = false;
                if (ok) return true;
            }
        }
        if (static_cast<int>(idx.size()) == rank_int_rows(gens)) return false;
        for (int i = start; i < m; ++i) {
            idx.push_back(i);
            if (rec(i + 1)) return true;
            idx.pop_back();
        }
        return false;
    };
    return rec(0);
}

// Generators of the normal cone of a face: the primitive normals of every
// facet containing it. For a face of dimension i the cone has dimension n-i.
inline Cone normal_cone(const NewtonPolyhedron& P, int face_id) {
    const Face& F = P.faces().at(face_id);
    Cone c;
    for (int fid : F.active) c.generators.push_back(P.facets()[fid].normal);
    std::sort(c.generators.begin(), c.generators.end(), detail::desc_lex);
    return c;
}

// Triangulation by placement order: the cone is split into simplicial cones
// on subsets of its own generators, recursively coning the first generator
// over the facets that do not contain it. No new rays are introduced, and the
// same generator order always yields the same triangulation.
inline std::vector<std::vector<IntVec>> triangulate(
    const std::vector<IntVec>& gens) {
    if (gens.empty()) return {};
    int r = rank_int_rows(gens);
    if (r == 0) throw std::invalid_argument("cone has no extent");
    if (static_cast<int>(gens.size()) < r)
        throw std::logic_error("generator set below its own rank");
    if (static_cast<int>(gens.size()) == r) return {gens};
    auto facets = detail::cone_facets(gens, r);
    std::vector<std::vector<IntVec>> out;
    for (const auto& onset : facets) {
        if (std::find(onset.begin(), onset.end(), 0) != onset.end()) continue;
        std::vector<IntVec> sub;
        for (int i : onset) sub.push_back(gens[i]);
        for (auto& piece : triangulate(sub)) {
            std::vector<IntVec> cone{gens[0]};
            cone.insert(cone.end(), piece.begin(), piece.end());
            out.push_back(std::move(cone));
        }
    }
    return out;
}

inline std::vector<std::vector<IntVec>> triangulate(const Cone& c) {
    return triangulate(c.generators);
}

}  // namespace newton
