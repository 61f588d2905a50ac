#pragma once

#include <algorithm>
#include <set>
#include <stdexcept>
#include <vector>

#include "newton/linalg.hpp"
#include "newton/polynomial.hpp"

namespace newton {

/// One supporting inequality normal . y >= offset with primitive integer
/// normal. The facet is bounded exactly when the normal is strictly positive.
struct Facet {
    IntVec normal;
    Int offset;

    bool compact() const {
        for (const Int& a : normal)
            if (a == 0) return false;
        return true;
    }
    Rat diagonal_ratio() const {
        Int s = 0;
        for (const Int& a : normal) s += a;
        return Rat(offset, s);
    }
};

/// A nonempty proper face: conv(vertices) + cone(coordinate rays), identified
/// by the full set of facets tight on it.
struct Face {
    std::vector<int> vertices;  // indices into NewtonPolyhedron::vertices()
    std::vector<int> rays;      // coordinate axes in the recession cone
    std::vector<int> active;    // indices of all facets tight on the face
    std::vector<int> members;   // indices of all support points on the face
    int dim = 0;

    bool compact() const { return rays.empty(); }
};

/// Convex hull of the support translated by the nonnegative orthant, with its
/// face lattice and the diagonal invariants.
class NewtonPolyhedron {
  public:
    explicit NewtonPolyhedron(Polynomial f) : f_(std::move(f)), n_(f_.nvars()) {
        if (f_.is_zero()) throw std::invalid_argument("zero polynomial has no polyhedron");
        support_ = f_.support();
        build_facets();
        build_vertices();
        build_faces();
        locate_central();
    }

    int nvars() const { return n_; }
    const Polynomial& poly() const { return f_; }
    const std::vector<Exp>& support() const { return support_; }
    const std::vector<Exp>& vertices() const { return vertices_; }
    const std::vector<Facet>& facets() const { return facets_; }
    const std::vector<Face>& faces() const { return faces_; }

    std::vector<int> compact_face_ids() const {
        std::vector<int> out;
        for (size_t i = 0; i < faces_.size(); ++i)
            if (faces_[i].compact()) out.push_back(static_cast<int>(i));
        return out;
    }

    /// Largest diagonal intersection ratio over the facets.
    Rat distance() const { return d_; }
    int central_face_id() const { return central_id_; }
    int central_dim() const { return faces_[central_id_].dim; }

    /// Face containment through the lattice antitonicity on active sets.
    bool face_subset(int inner, int outer) const {
        const auto& a = faces_[inner].active;
        const auto& b = faces_[outer].active;
        return std::includes(a.begin(), a.end(), b.begin(), b.end());
    }

    Polynomial face_polynomial(int face_id) const {
        const Face& F = faces_[face_id];
        Polynomial out(n_);
        for (int idx : F.members) out.add_term(support_[idx], f_.coeff(support_[idx]));
        return out;
    }

    bool point_on_face(const Exp& a, int face_id) const {
        for (int fi : faces_[face_id].active)
            if (dot(facets_[fi].normal, a) != facets_[fi].offset) return false;
        return true;
    }

  private:
    void build_facets() {
        // Homogenized generators: (alpha, 1) over non-dominated support
        // points plus the coordinate directions (e_j, 0). A facet normal is a
        // primitive vector orthogonal to n independent generators with every
        // generator on its nonnegative side.
        std::vector<IntVec> gens;
        for (const auto& a : support_) {
            bool dominated = false;
            for (const auto& b : support_) {
                if (&a == &b) continue;
                bool le = true, strict = false;
                for (int i = 0; i < n_; ++i) {
                    if (b[i] > a[i]) { le = false; break; }
                    if (b[i] < a[i]) strict = true;
                }
                if (le && strict) { dominated = true; break; }
            }
            if (dominated) continue;
            IntVec g(n_ + 1);
            for (int i = 0; i < n_; ++i) g[i] = a[i];
            g[n_] = 1;
            gens.push_back(std::move(g));
        }
        for (int j = 0; j < n_; ++j) {
            IntVec g(n_ + 1, 0);
            g[j] = 1;
            gens.push_back(std::move(g));
        }

        std::set<std::pair<std::vector<Int>, Int>> seen;
        int m = static_cast<int>(gens.size());
        std::vector<int> idx(n_);
        std::vector<int> pos(n_);
        // enumerate all n-subsets of the generators
        for (int i = 0; i < n_; ++i) pos[i] = i;
        bool done = m < n_;
        while (!done) {
            RatMat rows;
            for (int i = 0; i < n_; ++i) {
                RatVec r(n_ + 1);
                for (int j = 0; j <= n_; ++j) r[j] = Rat(gens[pos[i]][j]);
                rows.push_back(std::move(r));
            }
            auto ns = nullspace(std::move(rows));
            if (ns.size() == 1) try_facet(ns[0], gens, seen);
            // advance combination
            int i = n_ - 1;
            while (i >= 0 && pos[i] == m - n_ + i) --i;
            if (i < 0) break;
            ++pos[i];
            for (int j = i + 1; j < n_; ++j) pos[j] = pos[j - 1] + 1;
        }
        for (auto& [a, b] : seen) facets_.push_back(Facet{a, b});
        std::sort(facets_.begin(), facets_.end(), [](const Facet& x, const Facet& y) {
            return x.normal != y.normal ? x.normal < y.normal : x.offset < y.offset;
        });
        if (facets_.empty()) throw std::logic_error("no facets found");
    }

    void try_facet(const RatVec& u0, const std::vector<IntVec>& gens,
                   std::set<std::pair<std::vector<Int>, Int>>& seen) {
        // clear denominators, make primitive
        Int lcm = 1;
        for (const Rat& x : u0) {
            Int den = rat_den(x);
            lcm = lcm / boost::multiprecision::gcd(lcm, den) * den;
        }
        IntVec u(n_ + 1);
        for (int i = 0; i <= n_; ++i) u[i] = rat_num(u0[i]) * (lcm / rat_den(u0[i]));
        u = primitive(u);
        int side = 0;
        for (const auto& g : gens) {
            Int s = dot(u, g);
            if (s > 0) {
                if (side < 0) return;
                side = 1;
            } else if (s < 0) {
                if (side > 0) return;
                side = -1;
            }
        }
        if (side == 0) return;  // all generators on the hyperplane
        if (side < 0)
            for (Int& x : u) x = -x;
        IntVec a(u.begin(), u.begin() + n_);
        bool all_zero = true;
        for (const Int& x : a)
            if (x != 0) all_zero = false;
        if (all_zero) return;  // the height hyperplane, not a facet of the hull
        seen.insert({a, -u[n_]});
    }

    void build_vertices() {
        for (const auto& a : support_) {
            std::vector<IntVec> act;
            for (const auto& F : facets_)
                if (dot(F.normal, a) == F.offset) act.push_back(F.normal);
            if (static_cast<int>(act.size()) >= n_ && rank_int_rows(act) == n_)
                vertices_.push_back(a);
        }
        std::sort(vertices_.begin(), vertices_.end());
    }

    // Closure of a facet set: the vertices and rays tight on it, then the full
    // set of facets tight on that geometry.
    struct Closure {
        std::vector<int> verts, rays, active;
        bool empty = false;
    };
    Closure close(const std::vector<int>& T) const {
        Closure c;
        for (size_t v = 0; v < vertices_.size(); ++v) {
            bool all = true;
            for (int fi : T)
                if (dot(facets_[fi].normal, vertices_[v]) != facets_[fi].offset) {
                    all = false;
                    break;
                }
            if (all) c.verts.push_back(static_cast<int>(v));
        }
        if (c.verts.empty()) {
            c.empty = true;
            return c;
        }
        for (int j = 0; j < n_; ++j) {
            bool all = true;
            for (int fi : T)
                if (facets_[fi].normal[j] != 0) {
                    all = false;
                    break;
                }
            if (all) c.rays.push_back(j);
        }
        for (size_t fi = 0; fi < facets_.size(); ++fi) {
            bool all = true;
            for (int v : c.verts)
                if (dot(facets_[fi].normal, vertices_[v]) != facets_[fi].offset) {
                    all = false;
                    break;
                }
            for (int j : c.rays)
                if (all && facets_[fi].normal[j] != 0) all = false;
            if (all) c.active.push_back(static_cast<int>(fi));
        }
        return c;
    }

    void build_faces() {
        std::set<std::vector<int>> known;
        std::vector<Closure> queue;
        for (size_t i = 0; i < facets_.size(); ++i) {
            Closure c = close({static_cast<int>(i)});
            if (c.empty) continue;
            if (known.insert(c.active).second) queue.push_back(std::move(c));
        }
        for (size_t head = 0; head < queue.size(); ++head) {
            Closure cur = queue[head];  // copy: queue reallocates below
            for (size_t i = 0; i < facets_.size(); ++i) {
                if (std::binary_search(cur.active.begin(), cur.active.end(),
                                       static_cast<int>(i)))
                    continue;
                std::vector<int> T = cur.active;
                T.push_back(static_cast<int>(i));
                Closure c = close(T);
                if (c.empty) continue;
                if (known.insert(c.active).second) queue.push_back(std::move(c));
            }
        }
        for (auto& c : queue) {
            Face F;
            F.vertices = c.verts;
            F.rays = c.rays;
            F.active = c.active;
            RatMat dirs;
            for (size_t i = 1; i < c.verts.size(); ++i) {
                RatVec u(n_);
                for (int j = 0; j < n_; ++j)
                    u[j] = Rat(vertices_[c.verts[i]][j]) - Rat(vertices_[c.verts[0]][j]);
                dirs.push_back(std::move(u));
            }
            for (int j : c.rays) {
                RatVec u(n_, Rat(0));
                u[j] = 1;
                dirs.push_back(std::move(u));
            }
            F.dim = dirs.empty() ? 0 : rank(std::move(dirs));
            for (size_t s = 0; s < support_.size(); ++s) {
                bool on = true;
                for (int fi : F.active)
                    if (dot(facets_[fi].normal, support_[s]) != facets_[fi].offset) {
                        on = false;
                        break;
                    }
                if (on) F.members.push_back(static_cast<int>(s));
            }
            faces_.push_back(std::move(F));
        }
        std::sort(faces_.begin(), faces_.end(), [](const Face& a, const Face& b) {
            if (a.dim != b.dim) return a.dim < b.dim;
            if (a.vertices != b.vertices) return a.vertices < b.vertices;
            return a.rays < b.rays;
        });
    }

    void locate_central() {
        d_ = facets_[0].diagonal_ratio();
        for (const auto& F : facets_) d_ = std::max(d_, F.diagonal_ratio());
        std::vector<int> tight;
        for (size_t i = 0; i < facets_.size(); ++i)
            if (facets_[i].diagonal_ratio() == d_) tight.push_back(static_cast<int>(i));
        Closure c = close(tight);
        if (c.empty) throw std::logic_error("central face has no vertex");
        central_id_ = -1;
        for (size_t i = 0; i < faces_.size(); ++i)
            if (faces_[i].active == c.active) {
                central_id_ = static_cast<int>(i);
                break;
            }
        if (central_id_ < 0) throw std::logic_error("central face not in the lattice");
    }

    Polynomial f_;
    int n_;
    std::vector<Exp> support_;
    std::vector<Exp> vertices_;
    std::vector<Facet> facets_;
    std::vector<Face> faces_;
    Rat d_;
    int central_id_ = -1;
};

}  // namespace newton
