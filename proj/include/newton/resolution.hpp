#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "newton/chart.hpp"
#include "newton/linalg.hpp"
#include "newton/polyhedron.hpp"
#include "newton/polynomial.hpp"
#include "newton/rational.hpp"
#include "newton/rng.hpp"
#include "newton/series.hpp"
#include "newton/univariate.hpp"

namespace newton {

struct ResolutionConfig {
    int truncation = 12;          // series and residual cutoff (total degree)
    int max_depth = 8;            // tree depth cap, counted in edges
    int certificate_samples = 200;
    double certificate_radius = 0.05;
    double magnitude_band = 100.0;  // unit values stay within this factor
    int rotation_bound = 3;         // direction search box, widened if needed
    std::uint64_t seed = 1;

    void validate() const {
        if (truncation <= 0 || max_depth <= 0 || certificate_samples <= 0 ||
            rotation_bound <= 0)
            throw std::invalid_argument("config counts must be positive");
        if (certificate_radius <= 0 || magnitude_band <= 1)
            throw std::invalid_argument("config sizes out of range");
    }
};

/// One coordinate change.  `images(n)` gives the parent coordinates as
/// polynomials in the new ones, which is all the recursion ever needs.
struct Move {
    enum class Kind { affine, monomial, quasitranslation, dilation };

    Kind kind = Kind::affine;
    RatMat matrix;       // affine: x = matrix * z + shift
    RatVec shift;        // affine
    MonomialMatrix map;  // monomial: x_j = prod_k z_k^{map[j][k]}
    int axis = -1;       // quasitranslation: x_axis = z_axis + series(z')
    Polynomial series{1};
    RatVec scale;  // dilation: x_j = scale_j * z_j

    static Move affine_move(RatMat m, RatVec s) {
        Move mv;
        mv.kind = Kind::affine;
        mv.matrix = std::move(m);
        mv.shift = std::move(s);
        return mv;
    }

    static Move monomial_move(MonomialMatrix m) {
        Move mv;
        mv.kind = Kind::monomial;
        mv.map = std::move(m);
        return mv;
    }

    static Move quasitranslation_move(int axis, Polynomial g) {
        Move mv;
        mv.kind = Kind::quasitranslation;
        mv.axis = axis;
        mv.series = std::move(g);
        return mv;
    }

    static Move dilation_move(RatVec s) {
        Move mv;
        mv.kind = Kind::dilation;
        mv.scale = std::move(s);
        for (const auto& c : mv.scale)
            if (c == 0) throw std::invalid_argument("dilation must be invertible");
        return mv;
    }

    std::vector<Polynomial> images(int n) const {
        std::vector<Polynomial> im;
        im.reserve(n);
        switch (kind) {
            case Kind::affine: {
                if (static_cast<int>(matrix.size()) != n)
                    throw std::invalid_argument("affine move has wrong size");
                for (int j = 0; j < n; ++j) {
                    Polynomial p = Polynomial::constant(n, shift[j]);
                    for (int k = 0; k < n; ++k)
                        if (matrix[j][k] != 0)
                            p += matrix[j][k] * Polynomial::variable(n, k);
                    im.push_back(p);
                }
                break;
            }
            case Kind::monomial: {
                if (static_cast<int>(map.size()) != n)
                    throw std::invalid_argument("monomial move has wrong size");
                for (int j = 0; j < n; ++j) {
                    Exp e(n, 0);
                    for (int k = 0; k < n; ++k)
                        e[k] = static_cast<int>(map[j][k]);
                    im.push_back(Polynomial::monomial(e, 1));
                }
                break;
            }
            case Kind::quasitranslation: {
                for (int j = 0; j < n; ++j) im.push_back(Polynomial::variable(n, j));
                im[axis] += series;
                break;
            }
            case Kind::dilation: {
                if (static_cast<int>(scale.size()) != n)
                    throw std::invalid_argument("dilation move has wrong size");
                for (int j = 0; j < n; ++j)
                    im.push_back(scale[j] * Polynomial::variable(n, j));
                break;
            }
        }
        return im;
    }
};

/// Sampled evidence that a chart map really ends in monomial times unit.
struct Certificate {
    Exp monomial;           // exponent of the pullback's monomial factor
    Exp jacobian_monomial;  // same for the chart map's Jacobian
    double unit_reference = 0;
    double unit_min = 0;
    double unit_max = 0;
    bool unit_in_band = false;
    bool sign_consistent = false;
    bool jacobian_in_band = false;
    bool jacobian_matches_differences = false;
    std::vector<bool> coordinate_monomialized;  // per chart-map component
    std::uint64_t seed = 0;
    int samples = 0;
    double radius = 0;
    bool pass = false;
    std::string witness;  // first failing sample, if any
};

/// Node of the chart tree.  `moves` transform the parent frame into this
/// one; a node with no children and no flag is a finished chart and carries
/// the composed pullback, the chart map and a certificate.
struct ChartNode {
    std::string step;  // rotation | quasitranslation | subresolution |
                       // fan chart | localization | unit
    std::vector<Move> moves;
    std::vector<ChartNode> children;
    int dim = 0;
    int order = -1;             // vanishing order at a quasitranslation node
    bool series_exact = false;  // implicit series closed with zero residual
    int residual_degree = -1;   // lowest degree dropped past the truncation
    std::vector<std::vector<int>> reflections;  // sign vectors sharing a branch
    bool flagged = false;
    std::string flag_reason;
    Polynomial pullback{1};
    std::vector<Polynomial> chart_map;
    Certificate certificate;

    bool is_leaf() const { return children.empty(); }
};

namespace detail {

inline Polynomial project_vars(const Polynomial& p, int d) {
    Polynomial r(d);
    for (const auto& [e, c] : p.terms()) {
        for (int j = d; j < static_cast<int>(e.size()); ++j)
            if (e[j] != 0)
                throw std::logic_error("support escapes the active block");
        r.add_term(Exp(e.begin(), e.begin() + d), c);
    }
    return r;
}

inline Polynomial embed_vars(const Polynomial& p, int n) {
    Polynomial r(n);
    for (const auto& [e, c] : p.terms()) {
        Exp b = e;
        b.resize(n, 0);
        r.add_term(b, c);
    }
    return r;
}

/// Reciprocal of a unit power series, correct through total degree
/// `truncation`.
// (helpers for the recursion below)

/// Distinct real roots of u on the positive axis.  Substituting t = s^2
/// doubles each positive root into a plus-minus pair a Sturm chain can count.
inline int positive_real_roots(UniPoly u) {
    uni_normalize(u);
    std::size_t k = 0;
    while (k < u.size() && u[k] == 0) ++k;
    u.erase(u.begin(), u.begin() + k);
    if (u.size() <= 1) return 0;
    UniPoly radical{Rat(1)};
    for (const UniPoly& part : yun_squarefree(u)) radical = uni_mul(radical, part);
    UniPoly doubled(2 * radical.size() - 1, Rat(0));
    for (std::size_t i = 0; i < radical.size(); ++i) doubled[2 * i] = radical[i];
    return sturm_real_roots(doubled) / 2;
}

}  // namespace detail

struct OrderNormalization {
    int order = 0;
    RatMat rotation;  // unimodular, lower block mixes into the last active axis
    bool rotated = false;
};

/// Minimal vanishing order m of f at the origin, with a linear change of
/// variables after which the pure x_last^m coefficient is nonzero.  Directions
/// (v',1) are searched outward from zero, so the identity wins when it works.
/// Only the first `dim` variables participate; the rest ride along untouched.
inline OrderNormalization min_order_direction(const Polynomial& f, int bound,
                                              int dim = -1) {
    int n = f.nvars();
    if (dim < 0) dim = n;
    if (f.is_zero())
        throw std::domain_error("function vanished to working precision");
    int m = f.min_degree();
    if (m == 0) throw std::invalid_argument("the origin is not a zero");

    Polynomial lead(n);
    for (const auto& [e, c] : f.terms())
        if (total_degree(e) == m) lead.add_term(e, c);

    int D = std::max(bound, (m + 1) / 2);
    std::vector<std::vector<int>> grid;
    std::vector<int> cur(dim - 1, -D);
    if (dim == 1) {
        grid.push_back({});
    } else {
        while (true) {
            grid.push_back(cur);
            int pos = 0;
            while (pos < dim - 1) {
                if (++cur[pos] <= D) break;
                cur[pos] = -D;
                ++pos;
            }
            if (pos == dim - 1) break;
        }
        auto key = [](const std::vector<int>& v) {
            int mx = 0, sum = 0;
            std::vector<int> tie;
            for (int c : v) {
                mx = std::max(mx, std::abs(c));
                sum += std::abs(c);
            }
            for (int c : v) {
                tie.push_back(std::abs(c));
                tie.push_back(c < 0 ? 1 : 0);
            }
            return std::tuple<int, int, std::vector<int>>(mx, sum, tie);
        };
        std::sort(grid.begin(), grid.end(),
                  [&](const std::vector<int>& a, const std::vector<int>& b) {
                      return key(a) < key(b);
                  });
    }

    for (const auto& v : grid) {
        RatVec pt(n, 0);
        for (int j = 0; j + 1 < dim; ++j) pt[j] = v[j];
        pt[dim - 1] = 1;
        if (lead.eval_rational(pt) == 0) continue;
        OrderNormalization out;
        out.order = m;
        out.rotation.assign(n, RatVec(n, 0));
        for (int j = 0; j < n; ++j) out.rotation[j][j] = 1;
        for (int j = 0; j + 1 < dim; ++j) {
            out.rotation[j][dim - 1] = v[j];
            if (v[j] != 0) out.rotated = true;
        }
        return out;
    }
    throw std::logic_error("direction search box too small for the order");
}

/// Shift series g with g(0)=0 making the (m-1)-st pure derivative of f along
/// `dim-1` vanish identically after x_last -> x_last + g, through total
/// degree `truncation`.  Newton iteration on the derivative equation.
inline Polynomial implicit_series(const Polynomial& f, int m, int truncation,
                                  int dim = -1) {
    int n = f.nvars();
    if (dim < 0) dim = n;
    int axis = dim - 1;
    Polynomial pm1 = f;
    for (int i = 0; i + 1 < m; ++i) pm1 = pm1.derivative(axis);
    Polynomial pm = pm1.derivative(axis);
    if (pm.coeff(Exp(n, 0)) == 0)
        throw std::invalid_argument("top derivative vanishes at the origin");
    if (pm1.coeff(Exp(n, 0)) != 0)
        throw std::invalid_argument("shift already nonzero at the origin");

    TruncatedSeries g = TruncatedSeries::zero(n, truncation);
    auto at_g = [&](const Polynomial& p) {
        return TruncatedSeries(p, truncation).substitute_var(axis, g);
    };
    for (int iter = 0; iter < 12; ++iter) {
        TruncatedSeries num = at_g(pm1);
        if (num.poly().is_zero()) return g.poly();
        g = g - num * at_g(pm).reciprocal();
    }
    if (!at_g(pm1).poly().is_zero())
        throw std::domain_error("implicit step did not close; raise truncation");
    return g.poly();
}

/// F written as h_m x_a^m + sum_{p<m-1} h_p(x') x_a^p plus a residual.  The
/// order-(m-1) slice must sit entirely above the truncation degree; it is the
/// tail the truncated shift could not cancel and goes into `residual`.
struct CoefficientSplit {
    int order = 0;
    int axis = 0;
    Polynomial top{1};                 // h_m, unit at the origin
    std::map<int, Polynomial> lower;   // p -> h_p, x_axis-free, h_p(0)=0
    Polynomial residual{1};

    Polynomial clean() const {
        int n = top.nvars();
        Exp e(n, 0);
        e[axis] = order;
        Polynomial r = top * Polynomial::monomial(e, 1);
        for (const auto& [p, h] : lower) {
            Exp ep(n, 0);
            ep[axis] = p;
            r += h * Polynomial::monomial(ep, 1);
        }
        return r;
    }

    Polynomial reassemble() const { return clean() + residual; }
};

inline CoefficientSplit coefficient_split(const Polynomial& F, int m,
                                          int truncation, int dim = -1) {
    int n = F.nvars();
    if (dim < 0) dim = n;
    int axis = dim - 1;
    CoefficientSplit out;
    out.order = m;
    out.axis = axis;
    out.top = Polynomial(n);
    out.residual = Polynomial(n);
    for (const auto& [e, c] : F.terms()) {
        int p = e[axis];
        if (p >= m) {
            Exp d = e;
            d[axis] -= m;
            out.top.add_term(d, c);
        } else if (p == m - 1) {
            if (total_degree(e) <= truncation)
                throw std::domain_error(
                    "order-1 slice survives below the truncation; the shift "
                    "failed");
            out.residual.add_term(e, c);
        } else {
            auto it = out.lower.find(p);
            if (it == out.lower.end())
                it = out.lower.emplace(p, Polynomial(n)).first;
            Exp d = e;
            d[axis] = 0;
            it->second.add_term(d, c);
        }
    }
    if (out.top.coeff(Exp(n, 0)) == 0)
        throw std::domain_error("top coefficient is not a unit");
    for (const auto& [p, h] : out.lower)
        if (h.coeff(Exp(n, 0)) != 0)
            throw std::domain_error("lower coefficient fails to vanish");
    return out;
}

namespace detail {

/// Double-precision view of a polynomial for repeated sampling.
struct SampleTable {
    std::vector<std::pair<Exp, double>> terms;

    explicit SampleTable(const Polynomial& p) {
        for (const auto& [e, c] : p.terms()) terms.emplace_back(e, to_double(c));
    }

    double eval(const std::vector<double>& z) const {
        double s = 0;
        for (const auto& [e, c] : terms) {
            double m = c;
            for (std::size_t j = 0; j < z.size(); ++j)
                if (e[j] > 0)
                    m *= (e[j] > 3) ? std::pow(z[j], e[j])
                                    : (e[j] == 1   ? z[j]
                                       : e[j] == 2 ? z[j] * z[j]
                                                   : z[j] * z[j] * z[j]);
            s += m;
        }
        return s;
    }
};

inline Polynomial poly_mat_det(const std::vector<std::vector<Polynomial>>& M) {
    int k = static_cast<int>(M.size());
    if (k == 1) return M[0][0];
    int n = M[0][0].nvars();
    Polynomial r(n);
    for (int j = 0; j < k; ++j) {
        std::vector<std::vector<Polynomial>> minor;
        for (int a = 1; a < k; ++a) {
            std::vector<Polynomial> row;
            for (int b = 0; b < k; ++b)
                if (b != j) row.push_back(M[a][b]);
            minor.push_back(std::move(row));
        }
        Polynomial term = M[0][j] * poly_mat_det(minor);
        r += (j % 2 == 0) ? term : -term;
    }
    return r;
}

}  // namespace detail

/// Checks that `pullback` equals z^monomial times a bounded nonvanishing unit
/// on a punctured box, and the same for the chart map's Jacobian, with the
/// symbolic Jacobian cross-checked against finite differences.
inline Certificate certify_leaf(const Polynomial& pullback,
                                const std::vector<Polynomial>& chart_map,
                                const Exp& monomial,
                                const ResolutionConfig& cfg,
                                std::uint64_t seed) {
    int n = pullback.nvars();
    Certificate cert;
    cert.monomial = monomial;
    cert.seed = seed;
    cert.samples = cfg.certificate_samples;
    cert.radius = cfg.certificate_radius;

    double r = cfg.certificate_radius;
    double band = cfg.magnitude_band;
    std::uint64_t counter = 0;

    auto draw_coord = [&](double lo_mag) {
        while (true) {
            double v = uniform_in(seed, counter++, -r, r);
            if (std::abs(v) >= lo_mag) return v;
        }
    };
    auto unit_at = [&](const detail::SampleTable& p,
                       const std::vector<double>& z, const Exp& mono) {
        double v = p.eval(z);
        for (int j = 0; j < n; ++j)
            for (int t = 0; t < mono[j]; ++t) v /= z[j];
        return v;
    };

    detail::SampleTable pull_table(pullback);
    std::vector<double> zref(n, r / 2);
    double uref = unit_at(pull_table, zref, monomial);
    cert.unit_reference = uref;
    if (!std::isfinite(uref) || uref == 0) {
        cert.witness = "degenerate unit reference";
        return cert;
    }
    double lo = std::abs(uref) / band, hi = std::abs(uref) * band;

    cert.unit_in_band = true;
    cert.sign_consistent = true;
    cert.unit_min = std::abs(uref);
    cert.unit_max = std::abs(uref);
    std::vector<std::vector<double>> pts;
    for (int i = 0; i < cfg.certificate_samples; ++i) {
        std::vector<double> z(n);
        for (int j = 0; j < n; ++j) z[j] = draw_coord(r / 100);
        pts.push_back(z);
        double u = unit_at(pull_table, z, monomial);
        cert.unit_min = std::min(cert.unit_min, std::abs(u));
        cert.unit_max = std::max(cert.unit_max, std::abs(u));
        bool in_band = std::isfinite(u) && std::abs(u) >= lo && std::abs(u) <= hi;
        bool same_sign = (u > 0) == (uref > 0) && u != 0;
        if ((!in_band || !same_sign) && cert.witness.empty()) {
            std::ostringstream os;
            os << "unit value " << u << " at sample " << i;
            cert.witness = os.str();
        }
        cert.unit_in_band = cert.unit_in_band && in_band;
        cert.sign_consistent = cert.sign_consistent && same_sign;
    }

    std::vector<std::vector<Polynomial>> jac(n, std::vector<Polynomial>(n, Polynomial(n)));
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) jac[j][k] = chart_map[j].derivative(k);
    Polynomial jpoly = detail::poly_mat_det(jac);
    cert.jacobian_monomial = jpoly.is_zero() ? Exp(n, 0) : jpoly.monomial_content();
    detail::SampleTable jac_table(jpoly);
    double jref = unit_at(jac_table, zref, cert.jacobian_monomial);
    if (!std::isfinite(jref) || jref == 0) {
        cert.witness = "degenerate Jacobian reference";
        return cert;
    }
    double jlo = std::abs(jref) / band, jhi = std::abs(jref) * band;
    cert.jacobian_in_band = true;
    for (const auto& z : pts) {
        double w = unit_at(jac_table, z, cert.jacobian_monomial);
        bool ok = std::isfinite(w) && std::abs(w) >= jlo && std::abs(w) <= jhi &&
                  (w > 0) == (jref > 0);
        if (!ok && cert.witness.empty()) cert.witness = "Jacobian unit left band";
        cert.jacobian_in_band = cert.jacobian_in_band && ok;
    }

    cert.jacobian_matches_differences = true;
    std::vector<detail::SampleTable> map_tables;
    for (int j = 0; j < n; ++j) map_tables.emplace_back(chart_map[j]);
    double h = 1e-5;
    for (int t = 0; t < 3; ++t) {
        std::vector<double> z(n);
        for (int j = 0; j < n; ++j) z[j] = draw_coord(r / 2);
        std::vector<std::vector<double>> num(n, std::vector<double>(n));
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) {
                std::vector<double> zp = z, zm = z;
                zp[k] += h;
                zm[k] -= h;
                num[j][k] =
                    (map_tables[j].eval(zp) - map_tables[j].eval(zm)) / (2 * h);
            }
        std::function<double(const std::vector<std::vector<double>>&)> ddet =
            [&](const std::vector<std::vector<double>>& M) -> double {
            int k = static_cast<int>(M.size());
            if (k == 1) return M[0][0];
            double s = 0;
            for (int j = 0; j < k; ++j) {
                std::vector<std::vector<double>> minor;
                for (int a = 1; a < k; ++a) {
                    std::vector<double> row;
                    for (int b = 0; b < k; ++b)
                        if (b != j) row.push_back(M[a][b]);
                    minor.push_back(std::move(row));
                }
                double term = M[0][j] * ddet(minor);
                s += (j % 2 == 0) ? term : -term;
            }
            return s;
        };
        double fd = ddet(num);
        double sym = jac_table.eval(z);
        double scale = std::max({std::abs(fd), std::abs(sym), 1e-12});
        if (std::abs(fd - sym) > 1e-6 * scale) {
            cert.jacobian_matches_differences = false;
            if (cert.witness.empty()) cert.witness = "Jacobian differs from differences";
        }
    }

    for (int j = 0; j < n; ++j) {
        const Polynomial& c = chart_map[j];
        if (c.is_zero()) {
            cert.coordinate_monomialized.push_back(false);
            continue;
        }
        Exp mj = c.monomial_content();
        double ref = unit_at(map_tables[j], zref, mj);
        bool ok = std::isfinite(ref) && ref != 0;
        for (int i = 0; ok && i < 16; ++i) {
            double u = unit_at(map_tables[j], pts[i % pts.size()], mj);
            ok = std::isfinite(u) && std::abs(u) >= std::abs(ref) / band &&
                 std::abs(u) <= std::abs(ref) * band && (u > 0) == (ref > 0);
        }
        cert.coordinate_monomialized.push_back(ok);
    }

    cert.pass = cert.unit_in_band && cert.sign_consistent &&
                cert.jacobian_in_band && cert.jacobian_matches_differences;
    return cert;
}

/// Re-runs the stored leaf's checks from its own recorded seed.
inline Certificate verify_chart(const ChartNode& leaf,
                                const ResolutionConfig& cfg) {
    if (!leaf.is_leaf()) throw std::invalid_argument("not a leaf");
    return certify_leaf(leaf.pullback, leaf.chart_map, leaf.certificate.monomial,
                        cfg, leaf.certificate.seed);
}

namespace detail {

struct Frame {
    Polynomial work{1};  // current decision object, supported on the active block
    std::vector<Polynomial> comp;  // leaf coordinates -> original coordinates
    std::vector<std::vector<Polynomial>> aux;  // carried coefficient groups,
                                               // one per pending subresolution
    Exp resolved;        // exponent of the monomial factor extracted so far;
                         // pull = z^resolved * work * units, up to terms the
                         // truncation dropped
    int dim = 0;         // active block size; higher axes are frozen
    int depth = 0;       // node depth the next step will occupy
    bool tainted = false;  // a move broke the extracted-monomial bookkeeping
    std::string taint_reason;
};

using Graft = std::function<std::vector<ChartNode>(Frame&)>;

struct Builder {
    ResolutionConfig cfg;
    Polynomial f0{1};
    int n = 0;
    std::uint64_t leaf_counter = 0;

    void apply(Frame& fr, const Move& mv) {
        auto im = mv.images(n);
        fr.work = fr.work.compose(im);
        for (auto& c : fr.comp) c = c.compose(im);
        for (auto& group : fr.aux)
            for (auto& a : group) a = a.compose(im);
        track_resolved(fr, mv);
    }

    // Keeps `resolved` meaning the exponent of an extracted monomial factor.
    // A move that smears a coordinate carrying a factor taints the frame
    // rather than guessing.
    void track_resolved(Frame& fr, const Move& mv) {
        switch (mv.kind) {
            case Move::Kind::affine: {
                for (int j = 0; j < n; ++j) {
                    bool rotated_row = false;
                    for (int k = 0; k < n; ++k)
                        if (k != j && mv.matrix[j][k] != 0) rotated_row = true;
                    if (rotated_row && fr.resolved[j] > 0) {
                        fr.tainted = true;
                        fr.taint_reason = "rotation smeared a resolved factor";
                    }
                    if (mv.shift[j] != 0)
                        fr.resolved[j] = 0;  // (z_j + c)^r is a unit near 0
                }
                break;
            }
            case Move::Kind::monomial: {
                Exp next(n, 0);
                for (int k = 0; k < n; ++k)
                    for (int j = 0; j < n; ++j)
                        next[k] += static_cast<int>(mv.map[j][k]) * fr.resolved[j];
                fr.resolved = next;
                break;
            }
            case Move::Kind::quasitranslation: {
                if (fr.resolved[mv.axis] > 0) {
                    fr.tainted = true;
                    fr.taint_reason = "shift smeared a resolved factor";
                }
                break;
            }
            case Move::Kind::dilation:
                break;  // signs fold into the unit
        }
    }

    ChartNode flagged_node(Frame& fr, std::string step, std::vector<Move> moves,
                           std::string reason) {
        ChartNode node;
        node.step = std::move(step);
        node.moves = std::move(moves);
        node.dim = fr.dim;
        node.flagged = true;
        node.flag_reason = std::move(reason);
        return node;
    }

    // Leaf when no continuation is pending, otherwise splice the caller's.
    void finish(ChartNode& node, Frame& fr, const Graft& graft) {
        if (graft) {
            node.children = graft(fr);
            return;
        }
        if (fr.tainted) {
            node.flagged = true;
            node.flag_reason = fr.taint_reason;
            return;
        }
        node.pullback = f0.compose(fr.comp);
        node.chart_map = fr.comp;
        node.certificate =
            certify_leaf(node.pullback, fr.comp, fr.resolved, cfg,
                         splitmix64(cfg.seed) + leaf_counter++);
    }

    std::vector<ChartNode> unit_stop(Frame& fr, const Graft& graft) {
        if (graft) return graft(fr);
        ChartNode node;
        node.step = "unit";
        node.dim = fr.dim;
        finish(node, fr, graft);
        return {std::move(node)};
    }

    std::vector<ChartNode> cycle(Frame fr, const Graft& graft) {
        Exp zero(n, 0);
        if (fr.work.coeff(zero) != 0 || fr.dim == 1)
            return unit_stop(fr, graft);
        if (fr.depth >= cfg.max_depth)
            return {flagged_node(fr, "quasitranslation", {}, "depth cap reached")};

        auto norm = min_order_direction(fr.work, cfg.rotation_bound, fr.dim);
        ChartNode rot;
        if (norm.rotated) {
            rot.step = "rotation";
            rot.dim = fr.dim;
            rot.moves = {Move::affine_move(norm.rotation, RatVec(n, 0))};
            apply(fr, rot.moves[0]);
            fr.depth += 1;
            if (fr.depth >= cfg.max_depth) {
                rot.children = {
                    flagged_node(fr, "quasitranslation", {}, "depth cap reached")};
                return {std::move(rot)};
            }
        }

        Polynomial g =
            implicit_series(fr.work, norm.order, cfg.truncation, fr.dim);
        ChartNode q;
        q.step = "quasitranslation";
        q.dim = fr.dim;
        q.order = norm.order;
        q.moves = {Move::quasitranslation_move(fr.dim - 1, g)};
        apply(fr, q.moves[0]);

        auto split =
            coefficient_split(fr.work, norm.order, cfg.truncation, fr.dim);
        q.series_exact = split.residual.is_zero();
        q.residual_degree =
            q.series_exact ? -1 : split.residual.min_degree();
        Polynomial clean = split.clean();

        if (norm.order == 1) {
            Frame leaf_fr = fr;
            leaf_fr.work = clean;
            leaf_fr.depth = fr.depth + 2;
            if (!graft) leaf_fr.resolved[fr.dim - 1] += 1;  // clean = unit * x_axis
            ChartNode done;
            done.step = "unit";
            done.dim = fr.dim;
            finish(done, leaf_fr, graft);
            q.children = {std::move(done)};
        } else {
            ChartNode s;
            s.step = "subresolution";
            s.dim = fr.dim - 1;

            Frame sub = fr;
            sub.dim = fr.dim - 1;
            sub.depth = fr.depth + 2;
            std::vector<Polynomial> group{clean};
            Polynomial z = Polynomial::constant(n, 1);
            for (int j = 0; j + 1 < fr.dim; ++j)
                z = z * Polynomial::variable(n, j);
            for (const auto& [p, h] : split.lower)
                if (!h.is_zero()) {
                    z = z * h;
                    group.push_back(h);
                }
            sub.work = z;
            sub.aux.push_back(std::move(group));

            int m = norm.order;
            Graft continue_above = [this, m, &graft](Frame& gfr) {
                return resume_product(gfr, m, graft);
            };
            s.children = cycle(std::move(sub), continue_above);
            q.children = {std::move(s)};
        }

        if (norm.rotated) {
            rot.children = {std::move(q)};
            return {std::move(rot)};
        }
        return {std::move(q)};
    }

    // Continuation at a subresolution leaf: the carried coefficients are now
    // monomial times unit, so the block above re-enters with the full object.
    std::vector<ChartNode> resume_product(Frame& gfr, int m,
                                          const Graft& outer) {
        Frame fr = gfr;
        fr.dim += 1;
        if (fr.aux.empty())
            throw std::logic_error("no carried coefficients to resume");
        std::vector<Polynomial> group = std::move(fr.aux.back());
        fr.aux.pop_back();
        fr.work = group[0];
        std::vector<Polynomial> hs(group.begin() + 1, group.end());

        Exp zero(n, 0);
        if (fr.work.coeff(zero) != 0) return unit_stop(fr, outer);

        bool constant_coefficient = false;
        for (const auto& h : hs)
            if (h.coeff(zero) != 0) constant_coefficient = true;

        if (constant_coefficient) {
            // Some coefficient became a unit, so the vanishing order already
            // dropped below m; run the cycle again at this very point.
            ChartNode loc;
            loc.step = "localization";
            loc.dim = fr.dim;
            if (fr.depth >= cfg.max_depth)
                return {flagged_node(fr, "localization", {}, "depth cap reached")};
            Frame in = fr;
            in.depth = fr.depth + 1;
            loc.children = cycle(std::move(in), outer);
            if (!loc.children.empty()) {
                int ord = deepest_first_order(loc.children);
                if (ord >= 0 && ord >= m) {
                    loc.flagged = true;
                    loc.flag_reason = "vanishing order failed to drop";
                }
            }
            return {std::move(loc)};
        }
        return fan_expand(fr, m, outer);
    }

    static int deepest_first_order(const std::vector<ChartNode>& kids) {
        for (const auto& k : kids) {
            if (k.order >= 0) return k.order;
            int o = deepest_first_order(k.children);
            if (o >= 0) return o;
        }
        return -1;
    }

    std::vector<ChartNode> fan_expand(Frame& fr, int m, const Graft& outer) {
        int d = fr.dim;
        std::vector<ChartNode> out;
        if (fr.depth + 1 >= cfg.max_depth) {
            out.push_back(
                flagged_node(fr, "fan chart", {}, "depth cap reached"));
            return out;
        }

        // One branch per sign pattern on the active block, deduplicated when
        // reflection leaves the function unchanged up to scale.
        std::map<std::string, std::vector<std::vector<int>>> buckets;
        std::vector<std::string> bucket_order;
        for (int mask = 0; mask < (1 << d); ++mask) {
            std::vector<int> s(d, 1);
            for (int j = 0; j < d; ++j)
                if (mask & (1 << j)) s[j] = -1;
            Polynomial flipped(n);
            for (const auto& [e, c] : fr.work.terms()) {
                int neg = 0;
                for (int j = 0; j < d; ++j)
                    if (s[j] < 0 && e[j] % 2 == 1) neg ^= 1;
                flipped.add_term(e, neg ? -c : c);
            }
            Rat leadc = flipped.terms().begin()->second;
            std::string key = ((1 / leadc) * flipped).str();
            auto it = buckets.find(key);
            if (it == buckets.end()) {
                buckets.emplace(key, std::vector<std::vector<int>>{s});
                bucket_order.push_back(key);
            } else {
                it->second.push_back(s);
            }
        }

        for (const auto& key : bucket_order) {
            const auto& bucket = buckets.at(key);
            const auto& s0 = bucket.front();
            RatVec scale(n, 1);
            for (int j = 0; j < d; ++j) scale[j] = s0[j];
            Move dil = Move::dilation_move(scale);
            Frame fs = fr;
            apply(fs, dil);

            NewtonPolyhedron NP(detail::project_vars(fs.work, d));
            auto atlas = chart_atlas(NP);
            for (const auto& ch : atlas) {
                ChartNode node;
                node.step = "fan chart";
                node.dim = d;
                node.reflections = bucket;
                MonomialMatrix M(n, std::vector<Int>(n, 0));
                for (int j = 0; j < n; ++j) M[j][j] = 1;
                for (int j = 0; j < d; ++j)
                    for (int k = 0; k < d; ++k) M[j][k] = ch.map[j][k];
                node.moves = {dil, Move::monomial_move(M)};

                Frame fc = fs;
                apply(fc, node.moves[1]);
                fc.depth = fr.depth + 1;
                // On the outermost chain the chart just pulled z^a out of the
                // pull itself; inner chains extract from the carried product.
                if (!outer)
                    for (int j = 0; j < d; ++j)
                        fc.resolved[j] += static_cast<int>(ch.pullback[j]);

                Polynomial U = detail::embed_vars(ch.unit, n);
                if (ch.face_dim == 0) {
                    Frame leaf_fr = fc;
                    leaf_fr.work = U;
                    finish(node, leaf_fr, outer);
                    out.push_back(std::move(node));
                    continue;
                }
                if (ch.face_dim == 1) {
                    expand_edge(node, fc, U, m, outer);
                    out.push_back(std::move(node));
                    continue;
                }
                expand_torus(node, fc, U, ch.face_dim, m, outer);
                out.push_back(std::move(node));
            }
        }
        return out;
    }

    // Tail zeros of the unit on a one-dimensional torus block: localize at
    // each positive rational zero, finish everywhere the unit stays away
    // from zero.
    void expand_edge(ChartNode& node, Frame& fc, const Polynomial& U, int m,
                     const Graft& outer) {
        int d = fc.dim;
        int tail = d - 1;
        int deg = U.degree_in(tail);
        UniPoly u(deg + 1, Rat(0));
        for (const auto& [e, c] : U.terms()) {
            bool pure = true;
            for (int j = 0; j < n; ++j)
                if (j != tail && e[j] != 0) pure = false;
            if (pure) u[e[tail]] += c;
        }
        uni_normalize(u);
        if (u.empty()) {
            node.flagged = true;
            node.flag_reason = "unit restriction vanished";
            return;
        }

        std::vector<Rat> zeros;
        for (const Rat& r : rational_roots(u))
            if (r > 0) zeros.push_back(r);
        std::sort(zeros.begin(), zeros.end());

        if (detail::positive_real_roots(u) != static_cast<int>(zeros.size())) {
            node.flagged = true;
            node.flag_reason = "irrational localization center";
        }

        for (const Rat& z : zeros) {
            ChartNode loc;
            loc.step = "localization";
            loc.dim = d;
            RatMat I(n, RatVec(n, 0));
            for (int j = 0; j < n; ++j) I[j][j] = 1;
            RatVec shift(n, 0);
            shift[tail] = z;
            loc.moves = {Move::affine_move(I, shift)};
            if (fc.depth + 1 >= cfg.max_depth) {
                loc.flagged = true;
                loc.flag_reason = "depth cap reached";
                node.children.push_back(std::move(loc));
                continue;
            }
            Frame fl = fc;
            apply(fl, loc.moves[0]);
            fl.work = U.compose(loc.moves[0].images(n));
            fl.depth = fc.depth + 1;
            loc.children = cycle(std::move(fl), outer);
            int ord = deepest_first_order(loc.children);
            if (ord >= 0 && ord >= m) {
                loc.flagged = true;
                loc.flag_reason = "vanishing order failed to drop";
            }
            node.children.push_back(std::move(loc));
        }

        for (const Rat& t : {Rat(1), Rat(1, 2), Rat(2)}) {
            if (uni_eval(u, t) == 0) continue;
            ChartNode pt;
            pt.step = "localization";
            pt.dim = d;
            RatMat I(n, RatVec(n, 0));
            for (int j = 0; j < n; ++j) I[j][j] = 1;
            RatVec shift(n, 0);
            shift[tail] = t;
            pt.moves = {Move::affine_move(I, shift)};
            Frame fl = fc;
            apply(fl, pt.moves[0]);
            fl.depth = fc.depth + 1;
            finish(pt, fl, outer);
            node.children.push_back(std::move(pt));
        }
    }

    // Two or more torus directions: scan a grid for near-zeros of the unit.
    // Away from them a sample point finishes the chart; otherwise flag.
    void expand_torus(ChartNode& node, Frame& fc, const Polynomial& U, int i,
                      int m, const Graft& outer) {
        (void)m;
        int d = fc.dim;
        std::vector<double> levels = {0.6, 0.8, 1.0, 1.2, 1.4};
        double min_abs = 1e300;
        std::vector<int> idx(i, 0);
        while (true) {
            std::vector<double> z(n, 0.0);
            for (int j = 0; j < i; ++j) z[d - i + j] = levels[idx[j]];
            min_abs = std::min(min_abs, std::abs(U.eval_real(z)));
            int pos = 0;
            while (pos < i) {
                if (++idx[pos] < static_cast<int>(levels.size())) break;
                idx[pos] = 0;
                ++pos;
            }
            if (pos == i) break;
        }
        if (min_abs < 1e-3) {
            node.flagged = true;
            node.flag_reason = "unit nearly vanishes on the torus block";
            return;
        }
        ChartNode pt;
        pt.step = "localization";
        pt.dim = d;
        RatMat I(n, RatVec(n, 0));
        for (int j = 0; j < n; ++j) I[j][j] = 1;
        RatVec shift(n, 0);
        for (int j = d - i; j < d; ++j) shift[j] = 1;
        pt.moves = {Move::affine_move(I, shift)};
        Frame fl = fc;
        apply(fl, pt.moves[0]);
        fl.depth = fc.depth + 1;
        finish(pt, fl, outer);
        node.children.push_back(std::move(pt));
    }
};

}  // namespace detail

/// Full resolution tree for f around the origin.
inline ChartNode resolve(const Polynomial& f, const ResolutionConfig& cfg) {
    cfg.validate();
    int n = f.nvars();
    if (f.is_zero()) throw std::invalid_argument("nothing to resolve");
    if (f.coeff(Exp(n, 0)) != 0)
        throw std::invalid_argument("the origin must be a zero");

    detail::Builder b;
    b.cfg = cfg;
    b.f0 = f;
    b.n = n;
    detail::Frame fr;
    fr.work = f;
    fr.dim = n;
    fr.depth = 0;
    fr.resolved.assign(n, 0);
    for (int j = 0; j < n; ++j) fr.comp.push_back(Polynomial::variable(n, j));

    auto roots = b.cycle(std::move(fr), nullptr);
    if (roots.size() != 1)
        throw std::logic_error("root expansion produced a forest");
    return std::move(roots[0]);
}

inline void collect_leaves(const ChartNode& node,
                           std::vector<const ChartNode*>& out) {
    if (node.is_leaf()) {
        out.push_back(&node);
        return;
    }
    for (const auto& c : node.children) collect_leaves(c, out);
}

inline std::vector<const ChartNode*> collect_leaves(const ChartNode& root) {
    std::vector<const ChartNode*> out;
    collect_leaves(root, out);
    return out;
}

inline int tree_depth(const ChartNode& node) {
    int d = 0;
    for (const auto& c : node.children) d = std::max(d, 1 + tree_depth(c));
    return d;
}

inline bool tree_complete(const ChartNode& node) {
    if (node.flagged) return false;
    for (const auto& c : node.children)
        if (!tree_complete(c)) return false;
    return true;
}

namespace detail {

inline bool orders_decrease_walk(const ChartNode& node,
                                 std::map<int, int> bound) {
    if (node.step == "quasitranslation" && node.order >= 0) {
        auto it = bound.find(node.dim);
        if (it != bound.end() && node.order >= it->second) return false;
        bound[node.dim] = node.order;
    }
    if (node.step == "subresolution") {
        for (auto it = bound.begin(); it != bound.end();)
            it = (it->first <= node.dim) ? bound.erase(it) : std::next(it);
    }
    for (const auto& c : node.children)
        if (!orders_decrease_walk(c, bound)) return false;
    return true;
}

}  // namespace detail

/// True when along every path the vanishing order strictly drops each time
/// the same block is re-entered (fresh subresolutions reset their block).
inline bool orders_strictly_decrease(const ChartNode& root) {
    return detail::orders_decrease_walk(root, {});
}

/// Forward-maps positive sample boxes of two finished charts and checks the
/// image clouds stay apart.
inline bool sampled_images_disjoint(const ChartNode& a, const ChartNode& b,
                                    const ResolutionConfig& cfg) {
    if (!a.is_leaf() || !b.is_leaf())
        throw std::invalid_argument("disjointness check wants leaves");
    int n = static_cast<int>(a.chart_map.size());
    double r = cfg.certificate_radius;
    auto cloud = [&](const ChartNode& leaf, std::uint64_t key) {
        std::vector<std::vector<double>> pts;
        std::uint64_t counter = 0;
        for (int i = 0; i < 25; ++i) {
            std::vector<double> z(n), x(n);
            for (int j = 0; j < n; ++j)
                z[j] = uniform_in(key, counter++, r / 2, r);
            for (int j = 0; j < n; ++j) x[j] = leaf.chart_map[j].eval_real(z);
            pts.push_back(x);
        }
        return pts;
    };
    auto pa = cloud(a, splitmix64(cfg.seed ^ 0xa5a5a5a5ull));
    auto pb = cloud(b, splitmix64(cfg.seed ^ 0x5a5a5a5aull));
    for (const auto& x : pa)
        for (const auto& y : pb) {
            double dist = 0;
            for (int j = 0; j < n; ++j)
                dist = std::max(dist, std::abs(x[j] - y[j]));
            if (dist < 1e-9) return false;
        }
    return true;
}

}  // namespace newton
