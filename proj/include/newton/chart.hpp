#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "cone.hpp"
#include "linalg.hpp"
#include "polynomial.hpp"
#include "polyhedron.hpp"
#include "rational.hpp"

namespace newton {

// Square integer matrix of a monomial substitution x_j = prod_k z_k^{M[j][k]};
// the pullback exponent of x^alpha is M^T alpha, i.e. its k-th entry is the
// k-th column (= cone generator) paired with alpha.
using MonomialMatrix = std::vector<std::vector<Int>>;

inline MonomialMatrix matrix_from_cone(const std::vector<IntVec>& gens) {
    size_t n = gens.size();
    MonomialMatrix M(n, std::vector<Int>(n));
    for (size_t k = 0; k < n; ++k) {
        if (gens[k].size() != n)
            throw std::invalid_argument("generator dimension mismatch");
        for (size_t j = 0; j < n; ++j) M[j][k] = gens[k][j];
    }
    return M;
}

// One monomializing chart attached to a compact face of dimension i. The
// first n-i cone generators are normals of facets through the face; the rest
// complete them to an invertible matrix. The pullback of f factors as
// z^a * unit where a is supported on the first n-i coordinates and unit is
// divisible by none of them.
struct FaceChart {
    int face_id = -1;
    int face_dim = 0;
    std::vector<IntVec> cone;
    MonomialMatrix map;
    IntVec pullback;
    IntVec jacobian;  // the map's Jacobian is det(map) * z^jacobian
    Polynomial unit;
    Int multiplicity = 0;  // |det map|
};

namespace detail {

inline Int support_min(const NewtonPolyhedron& P, const IntVec& r) {
    bool first = true;
    Int m = 0;
    for (const auto& alpha : P.support()) {
        Int v = dot(r, alpha);
        if (first || v < m) {
            m = v;
            first = false;
        }
    }
    return m;
}

inline bool tight_on_face(const NewtonPolyhedron& P, const IntVec& r,
                          const Face& F, const Int& m) {
    for (int idx : F.members)
        if (dot(r, P.support()[idx]) != m) return false;
    return true;
}

}  // namespace detail

inline FaceChart cone_to_chart(const NewtonPolyhedron& P, int face_id,
                               const std::vector<IntVec>& sigma) {
    int n = P.nvars();
    const Face& F = P.faces().at(face_id);
    if (!F.compact())
        throw std::invalid_argument("charts attach to compact faces");
    if (static_cast<int>(sigma.size()) != n)
        throw std::invalid_argument("cone needs one generator per variable");
    for (const auto& g : sigma) {
        if (static_cast<int>(g.size()) != n)
            throw std::invalid_argument("generator dimension mismatch");
        if (vec_gcd(g) == 0)
            throw std::invalid_argument("cone has a zero generator");
        for (const Int& c : g)
            if (c < 0)
                throw std::invalid_argument(
                    "cone leaves the nonnegative orthant");
        if (primitive(g) != g)
            throw std::invalid_argument("generators must be primitive");
    }
    Int dm = det_int(sigma);
    if (dm == 0) throw std::invalid_argument("cone is not simplicial");

    // all generators must be minimized at a common support point, which puts
    // the cone inside a single cone of the normal fan
    std::vector<int> common;
    for (size_t idx = 0; idx < P.support().size(); ++idx)
        common.push_back(static_cast<int>(idx));
    for (const auto& g : sigma) {
        Int m = detail::support_min(P, g);
        std::vector<int> keep;
        for (int idx : common)
            if (dot(g, P.support()[idx]) == m) keep.push_back(idx);
        common = std::move(keep);
    }
    if (common.empty())
        throw std::invalid_argument("cone lies outside the normal fan");

    int head = n - F.dim;
    FaceChart chart;
    chart.face_id = face_id;
    chart.face_dim = F.dim;
    chart.cone = sigma;
    chart.map = matrix_from_cone(sigma);
    chart.multiplicity = dm < 0 ? -dm : dm;
    chart.pullback.assign(n, 0);
    chart.jacobian.assign(n, 0);
    for (int k = 0; k < n; ++k) {
        Int m = detail::support_min(P, sigma[k]);
        bool tight = detail::tight_on_face(P, sigma[k], F, m);
        if (k < head) {
            if (!tight)
                throw std::invalid_argument(
                    "generators through the face must come first");
            chart.pullback[k] = m;
        }
        Int colsum = 0;
        for (const Int& c : sigma[k]) colsum += c;
        chart.jacobian[k] = colsum - 1;
    }
    Exp a(n);
    for (int k = 0; k < n; ++k) a[k] = chart.pullback[k].convert_to<int>();
    chart.unit = P.poly().compose_monomial(chart.map).divide_monomial(a);
    return chart;
}

// One chart per (compact face, simplicial piece of its normal cone); pieces
// of positive-dimensional faces are completed to full rank with the facet
// normals through the lex-least vertex of the face.
inline std::vector<FaceChart> chart_atlas(const NewtonPolyhedron& P) {
    int n = P.nvars();
    std::vector<FaceChart> out;
    for (int fid : P.compact_face_ids()) {
        const Face& F = P.faces()[fid];
        Cone nc = normal_cone(P, fid);
        if (F.dim == 0) {
            for (auto& piece : triangulate(nc.generators))
                out.push_back(cone_to_chart(P, fid, piece));
            continue;
        }
        int v_idx = *std::min_element(F.vertices.begin(), F.vertices.end());
        const Exp& v = P.vertices()[v_idx];
        std::vector<IntVec> pool;
        for (const auto& facet : P.facets())
            if (dot(facet.normal, v) == facet.offset)
                pool.push_back(facet.normal);
        std::sort(pool.begin(), pool.end(), detail::desc_lex);
        for (auto& piece : triangulate(nc.generators)) {
            std::vector<IntVec> cone = piece;
            for (const auto& r : pool) {
                if (static_cast<int>(cone.size()) == n) break;
                std::vector<IntVec> probe = cone;
                probe.push_back(r);
                if (rank_int_rows(probe) >
                    static_cast<int>(cone.size()))
                    cone = std::move(probe);
            }
            if (static_cast<int>(cone.size()) != n)
                throw std::logic_error(
                    "vertex normals failed to complete the chart cone");
            out.push_back(cone_to_chart(P, fid, cone));
        }
    }
    return out;
}

// The full-dimensional simplicial refinement of the normal fan: the vertex
// cones' triangulations. Their union is the nonnegative orthant and their
// interiors are pairwise disjoint.
inline std::vector<std::vector<IntVec>> atlas_fan(const NewtonPolyhedron& P) {
    std::vector<std::vector<IntVec>> out;
    for (int fid : P.compact_face_ids()) {
        const Face& F = P.faces()[fid];
        if (F.dim != 0) continue;
        for (auto& piece : triangulate(normal_cone(P, fid).generators))
            out.push_back(std::move(piece));
    }
    return out;
}

// Exact check of the ratio bound a_j/(e_j+1) <= d per chart.
struct ChartDistanceReport {
    std::vector<Rat> ratios;
    bool within = true;
    int equality_count = 0;
    bool count_ok = true;  // equality_count <= n - k
};

inline ChartDistanceReport check_distance_relation(const FaceChart& chart,
                                                   const Rat& d, int k) {
    ChartDistanceReport rep;
    int n = static_cast<int>(chart.cone.size());
    for (int j = 0; j < n; ++j) {
        Rat ratio = Rat(chart.pullback[j]) / Rat(chart.jacobian[j] + 1);
        rep.ratios.push_back(ratio);
        if (ratio > d) rep.within = false;
        if (ratio == d) ++rep.equality_count;
    }
    rep.count_ok = rep.equality_count <= n - k;
    return rep;
}

struct AtlasDistanceReport {
    std::vector<ChartDistanceReport> charts;
    bool all_within = true;
    bool counts_ok = true;
    bool attained = false;  // some chart reaches n - k equalities
    // charts with an equality whose face does not sit inside the central face
    std::vector<int> misplaced;
    bool ok() const {
        return all_within && counts_ok && attained && misplaced.empty();
    }
};

inline AtlasDistanceReport check_atlas_distance(
    const NewtonPolyhedron& P, const std::vector<FaceChart>& atlas) {
    AtlasDistanceReport rep;
    Rat d = P.distance();
    int k = P.central_dim();
    int n = P.nvars();
    for (size_t idx = 0; idx < atlas.size(); ++idx) {
        auto r = check_distance_relation(atlas[idx], d, k);
        if (!r.within) rep.all_within = false;
        if (!r.count_ok) rep.counts_ok = false;
        if (r.equality_count == n - k) rep.attained = true;
        if (r.equality_count > 0 &&
            !P.face_subset(atlas[idx].face_id, P.central_face_id()))
            rep.misplaced.push_back(static_cast<int>(idx));
        rep.charts.push_back(std::move(r));
    }
    return rep;
}

// Scale constants for the diagnostic region test: increasing, all above one.
struct SubdivisionConfig {
    std::vector<Rat> C;
    void validate() const {
        if (C.empty()) throw std::invalid_argument("no scale constants");
        Rat prev = 1;
        for (const Rat& c : C) {
            if (c <= prev)
                throw std::invalid_argument(
                    "scale constants must increase from above one");
            prev = c;
        }
    }
};

// Whether a point (in the original coordinates, no zero entries) falls in the
// region the chart parameterizes: writing the coordinate magnitudes as the
// exponential image of a normal-space vector, that vector must lie in the
// chart cone; the cone coordinates along the first n-i generators must be
// past the first scale constant (depth) and along the rest must stay within
// the last one's annulus.
inline bool region_membership(const FaceChart& chart,
                              const SubdivisionConfig& cfg,
                              const std::vector<double>& z) {
    cfg.validate();
    int n = static_cast<int>(chart.cone.size());
    if (static_cast<int>(z.size()) != n)
        throw std::invalid_argument("point dimension mismatch");
    std::vector<double> w(n);
    for (int j = 0; j < n; ++j) {
        double m = std::fabs(z[j]);
        if (m == 0)
            throw std::invalid_argument(
                "zero coordinate has no magnitude vector");
        w[j] = -std::log(m);
    }
    RatMat Mr(n, RatVec(n)), inv;
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) Mr[j][k] = Rat(chart.map[j][k]);
    if (!invert(Mr, inv))
        throw std::logic_error("chart matrix must be invertible");
    std::vector<double> s(n, 0.0);
    for (int k = 0; k < n; ++k)
        for (int j = 0; j < n; ++j) s[k] += to_double(inv[k][j]) * w[j];
    int head = n - chart.face_dim;
    double lo = std::log(to_double(cfg.C.front()));
    double hi = std::log(to_double(cfg.C.back()));
    for (int k = 0; k < n; ++k) {
        if (k < head) {
            if (s[k] < lo) return false;
        } else {
            if (std::fabs(s[k]) > hi) return false;
        }
    }
    return true;
}

}  // namespace newton
