#pragma once

#include <algorithm>
#include <complex>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "newton/linalg.hpp"
#include "newton/rational.hpp"

namespace newton {

/// Multi-index of nonnegative exponents, one entry per variable.
using Exp = std::vector<int>;

inline int total_degree(const Exp& e) {
    int d = 0;
    for (int x : e) d += x;
    return d;
}

/// Ascending total degree, ties broken by descending lex, so x1^2 + x2^3
/// prints in that order and x1 precedes x2 within a degree.
struct TermOrder {
    bool operator()(const Exp& a, const Exp& b) const {
        int da = total_degree(a), db = total_degree(b);
        if (da != db) return da < db;
        return a > b;
    }
};

namespace detail {

using ZTermMap = std::map<Exp, Int, TermOrder>;

/// Schoolbook product of integer term maps. With four or fewer variables the
/// exponents ride in 16-bit lanes of one word, so the accumulator hashes a
/// single integer instead of comparing exponent vectors.
inline ZTermMap zpoly_mul(const ZTermMap& a, const ZTermMap& b, int nvars) {
    ZTermMap out;
    if (a.empty() || b.empty()) return out;
    int maxa = 0, maxb = 0;
    for (auto& [e, c] : a)
        for (int x : e) maxa = std::max(maxa, x);
    for (auto& [e, c] : b)
        for (int x : e) maxb = std::max(maxb, x);
    if (nvars <= 4 && maxa + maxb < (1 << 16)) {
        auto pack = [nvars](const Exp& e) {
            std::uint64_t k = 0;
            for (int i = 0; i < nvars; ++i)
                k |= static_cast<std::uint64_t>(e[i]) << (16 * i);
            return k;
        };
        std::vector<std::pair<std::uint64_t, const Int*>> ta, tb;
        ta.reserve(a.size());
        tb.reserve(b.size());
        for (auto& [e, c] : a) ta.emplace_back(pack(e), &c);
        for (auto& [e, c] : b) tb.emplace_back(pack(e), &c);
        std::unordered_map<std::uint64_t, Int> acc;
        acc.reserve(a.size() + b.size());
        for (auto& [ka, ca] : ta)
            for (auto& [kb, cb] : tb) acc[ka + kb] += *ca * *cb;
        Exp e(nvars);
        for (auto& [k, v] : acc) {
            for (int i = 0; i < nvars; ++i)
                e[i] = static_cast<int>((k >> (16 * i)) & 0xffff);
            out.emplace(e, std::move(v));
        }
        return out;
    }
    Exp e(nvars);
    for (auto& [ea, ca] : a)
        for (auto& [eb, cb] : b) {
            for (int i = 0; i < nvars; ++i) e[i] = ea[i] + eb[i];
            out[e] += ca * cb;
        }
    return out;
}

}  // namespace detail

/// Exact sparse multivariate polynomial over Q. Zero coefficients are never
/// stored; all exponent vectors have length nvars.
class Polynomial {
  public:
    using TermMap = std::map<Exp, Rat, TermOrder>;

    Polynomial() : nvars_(0) {}
    explicit Polynomial(int nvars) : nvars_(nvars) {
        if (nvars < 1) throw std::invalid_argument("nvars must be positive");
    }

    static Polynomial constant(int nvars, const Rat& c) {
        Polynomial p(nvars);
        p.add_term(Exp(nvars, 0), c);
        return p;
    }
    static Polynomial monomial(const Exp& e, const Rat& c) {
        Polynomial p(static_cast<int>(e.size()));
        p.add_term(e, c);
        return p;
    }
    static Polynomial variable(int nvars, int var) {
        Exp e(nvars, 0);
        e.at(var) = 1;
        return monomial(e, 1);
    }

    int nvars() const { return nvars_; }
    const TermMap& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    size_t term_count() const { return terms_.size(); }

    Rat coeff(const Exp& e) const {
        auto it = terms_.find(e);
        return it == terms_.end() ? Rat(0) : it->second;
    }

    void add_term(const Exp& e, const Rat& c) {
        if (static_cast<int>(e.size()) != nvars_)
            throw std::invalid_argument("exponent length mismatch");
        for (int x : e)
            if (x < 0) throw std::invalid_argument("negative exponent");
        if (c == 0) return;
        auto [it, fresh] = terms_.emplace(e, c);
        if (!fresh) {
            it->second += c;
            if (it->second == 0) terms_.erase(it);
        }
    }

    int degree() const {
        int d = 0;
        for (auto& [e, c] : terms_) d = std::max(d, total_degree(e));
        return d;
    }
    int min_degree() const {
        if (terms_.empty()) return 0;
        return total_degree(terms_.begin()->first);  // order is degree-ascending
    }
    int degree_in(int var) const {
        int d = 0;
        for (auto& [e, c] : terms_) d = std::max(d, e[var]);
        return d;
    }

    std::vector<Exp> support() const {
        std::vector<Exp> s;
        s.reserve(terms_.size());
        for (auto& [e, c] : terms_) s.push_back(e);
        return s;
    }

    Polynomial operator-() const {
        Polynomial r(*this);
        for (auto& [e, c] : r.terms_) c = -c;
        return r;
    }
    Polynomial& operator+=(const Polynomial& o) {
        check_same(o);
        for (auto& [e, c] : o.terms_) add_term(e, c);
        return *this;
    }
    Polynomial& operator-=(const Polynomial& o) {
        check_same(o);
        for (auto& [e, c] : o.terms_) add_term(e, -c);
        return *this;
    }
    friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
    friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }

    /// Schoolbook product. Denominators are cleared up front so the inner
    /// loop runs over Z; every cpp_rational operation pays a gcd, which
    /// dominates once the factors reach a few hundred terms.
    friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
        a.check_same(b);
        Int da = 1, db = 1;
        for (auto& [e, c] : a.terms_) da = boost::multiprecision::lcm(da, rat_den(c));
        for (auto& [e, c] : b.terms_) db = boost::multiprecision::lcm(db, rat_den(c));
        detail::ZTermMap ma, mb;
        for (auto& [e, c] : a.terms_)
            ma.emplace_hint(ma.end(), e, rat_num(c) * (da / rat_den(c)));
        for (auto& [e, c] : b.terms_)
            mb.emplace_hint(mb.end(), e, rat_num(c) * (db / rat_den(c)));
        detail::ZTermMap acc = detail::zpoly_mul(ma, mb, a.nvars_);
        Polynomial r(a.nvars_);
        Int den = da * db;
        for (auto& [ee, v] : acc)
            if (v != 0) r.terms_.emplace_hint(r.terms_.end(), ee, Rat(v, den));
        return r;
    }
    friend Polynomial operator*(const Rat& c, const Polynomial& p) {
        Polynomial r(p.nvars_);
        if (c == 0) return r;
        for (auto& [e, pc] : p.terms_) r.terms_.emplace(e, c * pc);
        return r;
    }

    bool operator==(const Polynomial& o) const {
        return nvars_ == o.nvars_ && terms_ == o.terms_;
    }

    /// Exact formal partial derivative; var is zero-based.
    Polynomial derivative(int var) const {
        if (var < 0 || var >= nvars_) throw std::out_of_range("variable index");
        Polynomial r(nvars_);
        for (auto& [e, c] : terms_) {
            if (e[var] == 0) continue;
            Exp d = e;
            d[var] -= 1;
            r.add_term(d, c * e[var]);
        }
        return r;
    }

    double eval_real(const std::vector<double>& x) const {
        if (static_cast<int>(x.size()) != nvars_)
            throw std::invalid_argument("point length mismatch");
        double s = 0;
        for (auto& [e, c] : terms_) {
            double t = to_double(c);
            for (int i = 0; i < nvars_; ++i) t *= powi(x[i], e[i]);
            s += t;
        }
        return s;
    }

    std::complex<double> eval_complex(const std::vector<std::complex<double>>& x) const {
        if (static_cast<int>(x.size()) != nvars_)
            throw std::invalid_argument("point length mismatch");
        std::complex<double> s = 0;
        for (auto& [e, c] : terms_) {
            std::complex<double> t = to_double(c);
            for (int i = 0; i < nvars_; ++i) t *= powi(x[i], e[i]);
            s += t;
        }
        return s;
    }

    Rat eval_rational(const RatVec& x) const {
        Rat s = 0;
        for (auto& [e, c] : terms_) {
            Rat t = c;
            for (int i = 0; i < nvars_; ++i)
                for (int k = 0; k < e[i]; ++k) t *= x[i];
            s += t;
        }
        return s;
    }

    /// Componentwise minimum exponent over the support: the largest monomial
    /// dividing every term.
    Exp monomial_content() const {
        if (terms_.empty()) return Exp(nvars_, 0);
        Exp m = terms_.begin()->first;
        for (auto& [e, c] : terms_)
            for (int i = 0; i < nvars_; ++i) m[i] = std::min(m[i], e[i]);
        return m;
    }

    /// Exact division by x^m; throws unless m divides every term.
    Polynomial divide_monomial(const Exp& m) const {
        Polynomial r(nvars_);
        for (auto& [e, c] : terms_) {
            Exp d(nvars_);
            for (int i = 0; i < nvars_; ++i) {
                d[i] = e[i] - m[i];
                if (d[i] < 0) throw std::domain_error("monomial does not divide");
            }
            r.terms_.emplace(d, c);
        }
        return r;
    }

    bool divisible_by_var(int var) const {
        if (terms_.empty()) return false;
        for (auto& [e, c] : terms_)
            if (e[var] == 0) return false;
        return true;
    }

    /// Drops every term of total degree above maxdeg.
    Polynomial truncate(int maxdeg) const {
        Polynomial r(nvars_);
        for (auto& [e, c] : terms_)
            if (total_degree(e) <= maxdeg) r.terms_.emplace(e, c);
        return r;
    }

    /// General substitution x_j = images[j]; all images share a variable count.
    /// The whole substitution runs over cleared integers and converts back
    /// once at the end; round-tripping through rationals at each step pays a
    /// gcd for every intermediate coefficient.
    Polynomial compose(const std::vector<Polynomial>& images) const {
        if (static_cast<int>(images.size()) != nvars_)
            throw std::invalid_argument("one image per variable required");
        int zn = images[0].nvars();
        for (const auto& im : images)
            if (im.nvars() != zn)
                throw std::invalid_argument("images disagree on variable count");
        struct Scaled {
            detail::ZTermMap num;
            Int den = 1;
        };
        auto cleared = [](const Polynomial& p, int vars) {
            Scaled s;
            for (auto& [e, c] : p.terms_)
                s.den = boost::multiprecision::lcm(s.den, rat_den(c));
            for (auto& [e, c] : p.terms_)
                s.num.emplace(e, rat_num(c) * (s.den / rat_den(c)));
            if (p.terms_.empty()) s.num.emplace(Exp(vars, 0), 0);
            return s;
        };
        std::vector<std::vector<Scaled>> pows(nvars_);
        for (int i = 0; i < nvars_; ++i) {
            pows[i].push_back(Scaled{{{Exp(zn, 0), 1}}, 1});
            pows[i].push_back(cleared(images[i], zn));
        }
        std::vector<std::pair<Scaled, Rat>> parts;
        Int den = 1;
        for (auto& [e, c] : terms_) {
            Scaled t{{{Exp(zn, 0), 1}}, 1};
            for (int i = 0; i < nvars_; ++i) {
                while (static_cast<int>(pows[i].size()) <= e[i]) {
                    const Scaled& base = pows[i][1];
                    const Scaled& prev = pows[i].back();
                    pows[i].push_back(
                        Scaled{detail::zpoly_mul(prev.num, base.num, zn),
                               prev.den * base.den});
                }
                if (e[i] == 0) continue;
                const Scaled& q = pows[i][e[i]];
                t.num = t.num.size() == 1 && t.num.begin()->second == 1 &&
                                total_degree(t.num.begin()->first) == 0
                            ? q.num
                            : detail::zpoly_mul(t.num, q.num, zn);
                t.den *= q.den;
            }
            den = boost::multiprecision::lcm(den, t.den * rat_den(c));
            parts.emplace_back(std::move(t), c);
        }
        detail::ZTermMap acc;
        for (auto& [t, c] : parts) {
            Int scale = rat_num(c) * (den / (t.den * rat_den(c)));
            if (scale == 0) continue;
            for (auto& [e, v] : t.num) acc[e] += v * scale;
        }
        Polynomial r(zn);
        for (auto& [e, v] : acc)
            if (v != 0) r.terms_.emplace_hint(r.terms_.end(), e, Rat(v, den));
        return r;
    }

    /// Substitutes x_j = prod_k z_k^{M[j][k]}; each exponent maps to M^T a.
    Polynomial compose_monomial(const std::vector<std::vector<Int>>& M) const {
        if (static_cast<int>(M.size()) != nvars_)
            throw std::invalid_argument("monomial map dimension mismatch");
        int zn = static_cast<int>(M[0].size());
        Polynomial r(zn);
        for (auto& [e, c] : terms_) {
            Exp img(zn, 0);
            for (int k = 0; k < zn; ++k) {
                Int s = 0;
                for (int j = 0; j < nvars_; ++j) s += M[j][k] * e[j];
                if (s < 0) throw std::domain_error("negative pullback exponent");
                img[k] = s.convert_to<int>();
            }
            r.add_term(img, c);
        }
        return r;
    }

    /// Canonical text form, parseable by parse_polynomial.
    std::string str() const {
        if (terms_.empty()) return "0";
        std::string out;
        bool first = true;
        for (auto& [e, c] : terms_) {
            Rat a = c;
            if (first) {
                if (a < 0) {
                    out += "-";
                    a = -a;
                }
            } else {
                out += a < 0 ? " - " : " + ";
                if (a < 0) a = -a;
            }
            first = false;
            bool has_vars = total_degree(e) > 0;
            if (a != 1 || !has_vars) {
                out += rat_str(a);
                if (has_vars) out += "*";
            }
            bool star = false;
            for (int i = 0; i < nvars_; ++i) {
                if (e[i] == 0) continue;
                if (star) out += "*";
                star = true;
                out += "x" + std::to_string(i + 1);
                if (e[i] > 1) out += "^" + std::to_string(e[i]);
            }
        }
        return out;
    }

  private:
    static double powi(double b, int e) {
        double r = 1;
        while (e-- > 0) r *= b;
        return r;
    }
    static std::complex<double> powi(std::complex<double> b, int e) {
        std::complex<double> r = 1;
        while (e-- > 0) r *= b;
        return r;
    }
    void check_same(const Polynomial& o) const {
        if (nvars_ != o.nvars_) throw std::invalid_argument("nvars mismatch");
    }

    int nvars_;
    TermMap terms_;
};

inline Polynomial pow(const Polynomial& p, int e) {
    Polynomial r = Polynomial::constant(p.nvars(), 1);
    for (int i = 0; i < e; ++i) r = r * p;
    return r;
}

}  // namespace newton
