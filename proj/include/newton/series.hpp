#pragma once

#include <stdexcept>

#include "newton/polynomial.hpp"

namespace newton {

/// Polynomial truncated at a fixed total degree. Arithmetic drops every term
/// of total degree above the truncation order, so products stay exact up to
/// that order.
class TruncatedSeries {
  public:
    TruncatedSeries(Polynomial p, int order) : order_(order), p_(std::move(p)) {
        truncate();
    }
    static TruncatedSeries zero(int nvars, int order) {
        return TruncatedSeries(Polynomial(nvars), order);
    }

    const Polynomial& poly() const { return p_; }
    int order() const { return order_; }
    int nvars() const { return p_.nvars(); }

    TruncatedSeries& operator+=(const TruncatedSeries& o) {
        p_ += o.p_;
        truncate();
        return *this;
    }
    TruncatedSeries& operator-=(const TruncatedSeries& o) {
        p_ -= o.p_;
        truncate();
        return *this;
    }
    friend TruncatedSeries operator+(TruncatedSeries a, const TruncatedSeries& b) { return a += b; }
    friend TruncatedSeries operator-(TruncatedSeries a, const TruncatedSeries& b) { return a -= b; }
    friend TruncatedSeries operator*(const TruncatedSeries& a, const TruncatedSeries& b) {
        return TruncatedSeries(a.p_ * b.p_, std::min(a.order_, b.order_));
    }
    friend TruncatedSeries operator*(const Rat& c, const TruncatedSeries& s) {
        return TruncatedSeries(c * s.p_, s.order_);
    }

    /// Multiplicative inverse; requires a nonzero constant term. Computed by
    /// Newton doubling, r <- r(2 - u r).
    TruncatedSeries reciprocal() const {
        Rat c0 = p_.coeff(Exp(p_.nvars(), 0));
        if (c0 == 0) throw std::domain_error("series has no constant term");
        TruncatedSeries r(Polynomial::constant(p_.nvars(), 1 / c0), order_);
        TruncatedSeries two(Polynomial::constant(p_.nvars(), 2), order_);
        for (int k = 1; k < order_ + 1; k *= 2) r = r * (two - *this * r);
        return r;
    }

    /// Substitutes the given variable by a series in the same variables.
    TruncatedSeries substitute_var(int var, const TruncatedSeries& g) const {
        if (g.nvars() != nvars()) throw std::invalid_argument("nvars mismatch");
        int n = nvars();
        // Cache powers of g up to the highest exponent of var present.
        int maxe = p_.degree_in(var);
        std::vector<Polynomial> gpow;
        gpow.push_back(Polynomial::constant(n, 1));
        for (int k = 1; k <= maxe; ++k)
            gpow.push_back(TruncatedSeries(gpow.back() * g.p_, order_).p_);
        Polynomial out(n);
        for (auto& [e, c] : p_.terms()) {
            Exp rest = e;
            int k = rest[var];
            rest[var] = 0;
            out += Polynomial::monomial(rest, c) * gpow[k];
        }
        return TruncatedSeries(out, order_);
    }

    /// Substitutes x_j = sum_k A[j][k] z_k (exact linear change of variables).
    TruncatedSeries compose_linear(const RatMat& A) const {
        int n = nvars();
        if (static_cast<int>(A.size()) != n) throw std::invalid_argument("matrix size");
        std::vector<Polynomial> img;
        for (int j = 0; j < n; ++j) {
            Polynomial lj(n);
            for (int k = 0; k < n; ++k)
                if (A[j][k] != 0) lj += A[j][k] * Polynomial::variable(n, k);
            img.push_back(lj);
        }
        Polynomial out(n);
        for (auto& [e, c] : p_.terms()) {
            Polynomial t = Polynomial::constant(n, c);
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < e[j]; ++k)
                    t = TruncatedSeries(t * img[j], order_).p_;
            out += t;
        }
        return TruncatedSeries(out, order_);
    }

  private:
    void truncate() {
        Polynomial q(p_.nvars());
        for (auto& [e, c] : p_.terms())
            if (total_degree(e) <= order_) q.add_term(e, c);
        p_ = std::move(q);
    }

    int order_;
    Polynomial p_;
};

}  // namespace newton
