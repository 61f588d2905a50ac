#pragma once

#include <numeric>
#include <vector>

#include "newton/rational.hpp"

namespace newton {

using RatVec = std::vector<Rat>;
using RatMat = std::vector<RatVec>;
using IntVec = std::vector<Int>;

inline Rat dot(const RatVec& a, const RatVec& b) {
    Rat s = 0;
    for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline Int dot(const IntVec& a, const IntVec& b) {
    Int s = 0;
    for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline Int dot(const IntVec& a, const std::vector<int>& b) {
    Int s = 0;
    for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline Int vec_gcd(const IntVec& v) {
    Int g = 0;
    for (const Int& x : v) g = boost::multiprecision::gcd(g, x);
    return g;
}

/// Scales to coprime integer entries; orientation (sign) is preserved.
inline IntVec primitive(IntVec v) {
    Int g = vec_gcd(v);
    if (g > 1)
        for (Int& x : v) x /= g;
    return v;
}

/// Row echelon in place; returns rank. Rows keep exact rational entries.
inline int row_reduce(RatMat& m) {
    if (m.empty()) return 0;
    size_t rows = m.size(), cols = m[0].size();
    size_t r = 0;
    for (size_t c = 0; c < cols && r < rows; ++c) {
        size_t piv = r;
        while (piv < rows && m[piv][c] == 0) ++piv;
        if (piv == rows) continue;
        std::swap(m[r], m[piv]);
        Rat inv = Rat(1) / m[r][c];
        for (size_t j = c; j < cols; ++j) m[r][j] *= inv;
        for (size_t i = 0; i < rows; ++i) {
            if (i == r || m[i][c] == 0) continue;
            Rat f = m[i][c];
            for (size_t j = c; j < cols; ++j) m[i][j] -= f * m[r][j];
        }
        ++r;
    }
    return static_cast<int>(r);
}

inline int rank(RatMat m) { return row_reduce(m); }

inline int rank_int_rows(const std::vector<IntVec>& rows) {
    RatMat m;
    for (const auto& r : rows) {
        RatVec q(r.size());
        for (size_t i = 0; i < r.size(); ++i) q[i] = Rat(r[i]);
        m.push_back(std::move(q));
    }
    return rank(std::move(m));
}

inline Rat det(RatMat m) {
    size_t n = m.size();
    Rat d = 1;
    for (size_t c = 0; c < n; ++c) {
        size_t piv = c;
        while (piv < n && m[piv][c] == 0) ++piv;
        if (piv == n) return 0;
        if (piv != c) {
            std::swap(m[c], m[piv]);
            d = -d;
        }
        d *= m[c][c];
        Rat inv = Rat(1) / m[c][c];
        for (size_t i = c + 1; i < n; ++i) {
            if (m[i][c] == 0) continue;
            Rat f = m[i][c] * inv;
            for (size_t j = c; j < n; ++j) m[i][j] -= f * m[c][j];
        }
    }
    return d;
}

inline Int det_int(const std::vector<IntVec>& m) {
    RatMat q;
    for (const auto& r : m) {
        RatVec row(r.size());
        for (size_t i = 0; i < r.size(); ++i) row[i] = Rat(r[i]);
        q.push_back(std::move(row));
    }
    Rat d = det(std::move(q));
    return rat_num(d);  // determinant of an integer matrix is an integer
}

/// Solves A x = b. Returns false when the system is singular/inconsistent.
inline bool solve(RatMat a, RatVec b, RatVec& x) {
    size_t n = a.size();
    for (size_t i = 0; i < n; ++i) a[i].push_back(b[i]);
    size_t cols = n + 1;
    size_t r = 0;
    std::vector<size_t> pivot_col(n, cols);
    for (size_t c = 0; c < n && r < n; ++c) {
        size_t piv = r;
        while (piv < n && a[piv][c] == 0) ++piv;
        if (piv == n) continue;
        std::swap(a[r], a[piv]);
        Rat inv = Rat(1) / a[r][c];
        for (size_t j = c; j < cols; ++j) a[r][j] *= inv;
        for (size_t i = 0; i < n; ++i) {
            if (i == r || a[i][c] == 0) continue;
            Rat f = a[i][c];
            for (size_t j = c; j < cols; ++j) a[i][j] -= f * a[r][j];
        }
        pivot_col[r] = c;
        ++r;
    }
    for (size_t i = r; i < n; ++i)
        if (a[i][n] != 0) return false;
    if (r < n) return false;  // demand a unique solution
    x.assign(n, Rat(0));
    for (size_t i = 0; i < r; ++i) x[pivot_col[i]] = a[i][n];
    return true;
}

/// Solves a possibly non-square A x = b, demanding consistency and full
/// column rank. Returns false otherwise.
inline bool solve_rect(RatMat a, const RatVec& b, RatVec& x) {
    size_t rows = a.size();
    if (rows == 0) return false;
    size_t n = a[0].size();
    for (size_t i = 0; i < rows; ++i) a[i].push_back(b[i]);
    int r = row_reduce(a);
    std::vector<size_t> pivot_col;
    size_t rr = 0;
    for (size_t c = 0; c <= n && rr < static_cast<size_t>(r); ++c) {
        if (a[rr][c] != 0) {
            pivot_col.push_back(c);
            ++rr;
        }
    }
    if (!pivot_col.empty() && pivot_col.back() == n) return false;  // inconsistent
    if (pivot_col.size() < n) return false;                         // free columns
    x.assign(n, Rat(0));
    for (size_t i = 0; i < n; ++i) x[pivot_col[i]] = a[i][n];
    return true;
}

/// Basis of the right nullspace of m (rows = equations).
inline std::vector<RatVec> nullspace(RatMat m) {
    if (m.empty()) return {};
    size_t cols = m[0].size();
    row_reduce(m);
    std::vector<long> pivot_of_col(cols, -1);
    size_t r = 0;
    for (size_t c = 0; c < cols && r < m.size(); ++c) {
        if (m[r][c] != 0) {
            pivot_of_col[c] = static_cast<long>(r);
            ++r;
        }
    }
    std::vector<RatVec> basis;
    for (size_t c = 0; c < cols; ++c) {
        if (pivot_of_col[c] != -1) continue;
        RatVec v(cols, Rat(0));
        v[c] = 1;
        for (size_t cc = 0; cc < cols; ++cc)
            if (pivot_of_col[cc] != -1) v[cc] = -m[pivot_of_col[cc]][c];
        basis.push_back(std::move(v));
    }
    return basis;
}

inline bool invert(RatMat a, RatMat& out) {
    size_t n = a.size();
    RatMat aug = a;
    for (size_t i = 0; i < n; ++i) {
        aug[i].resize(2 * n, Rat(0));
        aug[i][n + i] = 1;
    }
    for (size_t c = 0; c < n; ++c) {
        size_t piv = c;
        while (piv < n && aug[piv][c] == 0) ++piv;
        if (piv == n) return false;
        std::swap(aug[c], aug[piv]);
        Rat inv = Rat(1) / aug[c][c];
        for (size_t j = 0; j < 2 * n; ++j) aug[c][j] *= inv;
        for (size_t i = 0; i < n; ++i) {
            if (i == c || aug[i][c] == 0) continue;
            Rat f = aug[i][c];
            for (size_t j = 0; j < 2 * n; ++j) aug[i][j] -= f * aug[c][j];
        }
    }
    out.assign(n, RatVec(n));
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j) out[i][j] = aug[i][n + j];
    return true;
}

}  // namespace newton
