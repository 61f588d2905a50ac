#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "newton/accum.hpp"
#include "newton/modular.hpp"
#include "newton/polynomial.hpp"
#include "newton/rational.hpp"

namespace newton {

/// Normalized divisibility counts N_l = #{x mod p^l : p^l | f(x)} / p^{ln}
/// for l = 1..values.size().
struct CountSeries {
    std::uint64_t p = 0;
    std::vector<Rat> values;
};

/// Normalized character sums S_l = p^{-ln} sum_x e^{2 pi i f(x)/p^l}.
struct ExpSumSeries {
    std::uint64_t p = 0;
    std::vector<std::complex<double>> values;
};

enum class CountStrategy { brute, hensel };

struct CountConfig {
    Int brute_cap{1000000};         // largest p^{ln} enumerated directly
    long long node_cap = 2000000;   // explicit nodes in the lifting tree
    std::uint64_t class_cap = 1u << 24;  // largest p^l kept as a value table
};

/// Full count report; `exact` drops when the node budget truncated descent,
/// in which case `solutions` is a lower bound.
struct CountResult {
    Int solutions;
    Rat normalized;
    long long expanded = 0;
    bool exact = true;
};

namespace detail {

inline void require_integer_coefficients(const Polynomial& f) {
    for (auto& [e, c] : f.terms())
        if (rat_den(c) != 1)
            throw std::invalid_argument("integer coefficients required");
}

inline void require_prime(std::uint64_t p) {
    if (p < 2) throw std::invalid_argument("p must be a prime");
    for (std::uint64_t q = 2; q <= p / q; ++q)
        if (p % q == 0) throw std::invalid_argument("p must be a prime");
}

/// p^l as a 64-bit modulus; throws once the power leaves the safe range.
inline std::uint64_t checked_power(std::uint64_t p, int l) {
    std::uint64_t m = 1;
    for (int i = 0; i < l; ++i) {
        if (m > (std::uint64_t(1) << 62) / p)
            throw std::invalid_argument("p^l exceeds the 64-bit modulus range");
        m *= p;
    }
    return m;
}

inline Int int_power(std::uint64_t p, long long e) {
    Int r = 1, b = p;
    while (e > 0) {
        if (e & 1) r *= b;
        b *= b;
        e >>= 1;
    }
    return r;
}

/// Odometer over {0..radix-1}^n; returns false after the last tuple.
inline bool next_tuple(std::vector<std::uint64_t>& x, std::uint64_t radix) {
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (++x[i] < radix) return true;
        x[i] = 0;
    }
    return false;
}

/// One level of the lifting tree: solutions of f = 0 mod p^{j+1} above a
/// solution mod p^j, found by scanning the p^n children.
struct LiftScan {
    std::uint64_t p;
    int n;
    std::vector<ModularEvaluator> levels;  // levels[j] evaluates mod p^{j+1}

    LiftScan(const Polynomial& f, std::uint64_t p_, int l) : p(p_), n(f.nvars()) {
        for (int j = 1; j <= l; ++j) levels.emplace_back(f, checked_power(p, j));
    }
    const ModularEvaluator& at_level(int j) const { return levels[j - 1]; }
};

}  // namespace detail

/// Exact substitution x_i -> p^{a_i} x_i; the Theorem-style pre-scaling that
/// pushes every coefficient into a high power of p.
inline Polynomial scale_variables(const Polynomial& f, std::uint64_t p,
                                  const std::vector<int>& a) {
    if (static_cast<int>(a.size()) != f.nvars())
        throw std::invalid_argument("one exponent per variable required");
    Polynomial r(f.nvars());
    for (auto& [e, c] : f.terms()) {
        long long s = 0;
        for (int i = 0; i < f.nvars(); ++i) {
            if (a[i] < 0) throw std::invalid_argument("scaling exponents must be nonnegative");
            s += static_cast<long long>(a[i]) * e[i];
        }
        r.add_term(e, c * Rat(detail::int_power(p, s)));
    }
    return r;
}

/// Exact solution count of f = 0 mod p^l. Brute enumerates the whole residue
/// space. The lifting strategy walks solutions level by level: above a
/// solution with a unit partial derivative mod p the fiber contributes
/// exactly p^{(n-1)(l-j)} lifts in closed form, and only the degenerate
/// branches are enumerated.
inline CountResult count_detail(const Polynomial& f, std::uint64_t p, int l,
                                CountStrategy strategy,
                                const CountConfig& cfg = {}) {
    detail::require_integer_coefficients(f);
    detail::require_prime(p);
    if (l < 1) throw std::invalid_argument("level must be at least 1");
    int n = f.nvars();
    Int space = detail::int_power(p, static_cast<long long>(l) * n);

    if (strategy == CountStrategy::brute) {
        if (space > cfg.brute_cap)
            throw std::runtime_error("p^{ln} exceeds the brute-force cap");
        std::uint64_t m = detail::checked_power(p, l);
        ModularEvaluator ev(f, m);
        std::vector<std::uint64_t> x(n, 0);
        Int cnt = 0;
        long long seen = 0;
        do {
            ++seen;
            if (ev(x) == 0) ++cnt;
        } while (detail::next_tuple(x, m));
        return {cnt, Rat(cnt, space), seen, true};
    }

    detail::LiftScan scan(f, p, l);
    std::vector<ModularEvaluator> grads;
    for (int i = 0; i < n; ++i) grads.emplace_back(f.derivative(i), p);
    auto unit_gradient = [&](const std::vector<std::uint64_t>& x) {
        std::vector<std::uint64_t> r(n);
        for (int i = 0; i < n; ++i) r[i] = x[i] % p;
        for (int i = 0; i < n; ++i)
            if (grads[i](r) != 0) return true;
        return false;
    };

    std::uint64_t child_count = detail::checked_power(p, n);
    if (static_cast<long long>(child_count) > cfg.node_cap)
        throw std::runtime_error("level-1 enumeration exceeds the node budget");
    std::vector<std::vector<std::uint64_t>> frontier;
    std::vector<std::uint64_t> x(n, 0);
    long long expanded = 0;
    bool exact = true;
    do {
        ++expanded;
        if (scan.at_level(1)(x) == 0) frontier.push_back(x);
    } while (detail::next_tuple(x, p));

    Int closed = 0;
    for (int j = 1; j < l; ++j) {
        std::vector<std::vector<std::uint64_t>> next;
        std::uint64_t step = detail::checked_power(p, j);
        for (auto& sol : frontier) {
            if (unit_gradient(sol)) {
                closed += detail::int_power(
                    p, static_cast<long long>(n - 1) * (l - j));
                continue;
            }
            if (expanded + static_cast<long long>(child_count) > cfg.node_cap) {
                exact = false;
                continue;
            }
            expanded += static_cast<long long>(child_count);
            std::vector<std::uint64_t> t(n, 0);
            do {
                std::vector<std::uint64_t> child(n);
                for (int i = 0; i < n; ++i) child[i] = sol[i] + step * t[i];
                if (scan.at_level(j + 1)(child) == 0) next.push_back(std::move(child));
            } while (detail::next_tuple(t, p));
        }
        frontier.swap(next);
    }
    Int cnt = closed + Int(frontier.size());
    return {cnt, Rat(cnt, space), expanded, exact};
}

/// The normalized count N_l; throws instead of returning a truncated value.
inline Rat count_divisibility(const Polynomial& f, std::uint64_t p, int l,
                              CountStrategy strategy,
                              const CountConfig& cfg = {}) {
    CountResult r = count_detail(f, p, l, strategy, cfg);
    if (!r.exact)
        throw std::runtime_error("lifting tree exceeded the node budget");
    return r.normalized;
}

inline CountSeries count_series(const Polynomial& f, std::uint64_t p,
                                int levels, CountStrategy strategy,
                                const CountConfig& cfg = {}) {
    CountSeries s;
    s.p = p;
    for (int l = 1; l <= levels; ++l)
        s.values.push_back(count_divisibility(f, p, l, strategy, cfg));
    return s;
}

/// Exact value distribution cnt[v] = #{x mod p^l : f(x) = v mod p^l}.
/// Brute enumerates; the lifting strategy reuses the unit-gradient fibers,
/// which distribute uniformly over the residue class of f mod p^j, and only
/// enumerates the degenerate branches. Throws rather than approximating when
/// the budget runs out.
inline std::vector<Int> value_spectrum(const Polynomial& f, std::uint64_t p,
                                       int l, CountStrategy strategy,
                                       const CountConfig& cfg = {}) {
    detail::require_integer_coefficients(f);
    detail::require_prime(p);
    if (l < 1) throw std::invalid_argument("level must be at least 1");
    int n = f.nvars();
    std::uint64_t m = detail::checked_power(p, l);
    if (m > cfg.class_cap)
        throw std::runtime_error("p^l exceeds the value-table cap");
    std::vector<Int> spec(m, Int(0));

    if (strategy == CountStrategy::brute) {
        Int space = detail::int_power(p, static_cast<long long>(l) * n);
        if (space > cfg.brute_cap)
            throw std::runtime_error("p^{ln} exceeds the brute-force cap");
        ModularEvaluator ev(f, m);
        std::vector<std::uint64_t> x(n, 0);
        do {
            spec[ev(x)] += 1;
        } while (detail::next_tuple(x, m));
        return spec;
    }

    detail::LiftScan scan(f, p, l);
    std::vector<ModularEvaluator> grads;
    for (int i = 0; i < n; ++i) grads.emplace_back(f.derivative(i), p);
    auto unit_gradient = [&](const std::vector<std::uint64_t>& x) {
        std::vector<std::uint64_t> r(n);
        for (int i = 0; i < n; ++i) r[i] = x[i] % p;
        for (int i = 0; i < n; ++i)
            if (grads[i](r) != 0) return true;
        return false;
    };

    std::uint64_t child_count = detail::checked_power(p, n);
    if (static_cast<long long>(child_count) > cfg.node_cap)
        throw std::runtime_error("level-1 enumeration exceeds the node budget");
    std::vector<std::vector<std::uint64_t>> frontier;
    std::vector<std::uint64_t> x(n, 0);
    long long expanded = 0;
    do {
        ++expanded;
        frontier.push_back(x);
    } while (detail::next_tuple(x, p));

    for (int j = 1; j <= l; ++j) {
        std::vector<std::vector<std::uint64_t>> next;
        std::uint64_t step = detail::checked_power(p, j);
        std::uint64_t block = detail::checked_power(p, l - j);  // classes above f mod p^j
        for (auto& sol : frontier) {
            if (j == l) {
                spec[scan.at_level(l)(sol)] += 1;
                continue;
            }
            if (unit_gradient(sol)) {
                Int mass = detail::int_power(
                    p, static_cast<long long>(n - 1) * (l - j));
                std::uint64_t base = scan.at_level(j)(sol);
                for (std::uint64_t t = 0; t < block; ++t)
                    spec[base + t * step] += mass;
                continue;
            }
            if (expanded + static_cast<long long>(child_count) > cfg.node_cap)
                throw std::runtime_error(
                    "value spectrum exceeded the node budget");
            expanded += static_cast<long long>(child_count);
            std::vector<std::uint64_t> t(n, 0);
            do {
                std::vector<std::uint64_t> child(n);
                for (int i = 0; i < n; ++i) child[i] = sol[i] + step * t[i];
                next.push_back(std::move(child));
            } while (detail::next_tuple(t, p));
        }
        frontier.swap(next);
    }
    return spec;
}

namespace detail {

inline std::complex<double> spectrum_sum(const std::vector<Int>& spec,
                                         std::uint64_t u, std::uint64_t m,
                                         double norm) {
    Kahan re, im;
    constexpr double tau = 6.283185307179586476925286766559;
    for (std::uint64_t v = 0; v < m; ++v) {
        if (spec[v] == 0) continue;
        double w = to_double(spec[v]);
        double phase = tau * static_cast<double>(mulmod(u, v, m)) / static_cast<double>(m);
        re.add(w * std::cos(phase));
        im.add(w * std::sin(phase));
    }
    return {re.sum * norm, im.sum * norm};
}

}  // namespace detail

/// Normalized character sum S_l = p^{-ln} sum_x e^{2 pi i f(x)/p^l}, exact up
/// to float accumulation. Small instances run by direct enumeration; larger
/// ones go through the exact value spectrum, and when neither fits the caps
/// the call refuses rather than sampling.
inline std::complex<double> exp_sum(const Polynomial& f, std::uint64_t p,
                                    int l, const CountConfig& cfg = {}) {
    detail::require_integer_coefficients(f);
    detail::require_prime(p);
    if (l < 1) throw std::invalid_argument("level must be at least 1");
    int n = f.nvars();
    Int space = detail::int_power(p, static_cast<long long>(l) * n);
    std::uint64_t m = detail::checked_power(p, l);
    double norm = 1.0 / to_double(space);

    if (space <= cfg.brute_cap) {
        ModularEvaluator ev(f, m);
        detail::Kahan re, im;
        constexpr double tau = 6.283185307179586476925286766559;
        std::vector<double> cosv(m), sinv(m);
        for (std::uint64_t v = 0; v < m; ++v) {
            cosv[v] = std::cos(tau * static_cast<double>(v) / static_cast<double>(m));
            sinv[v] = std::sin(tau * static_cast<double>(v) / static_cast<double>(m));
        }
        std::vector<std::uint64_t> x(n, 0);
        do {
            std::uint64_t v = ev(x);
            re.add(cosv[v]);
            im.add(sinv[v]);
        } while (detail::next_tuple(x, m));
        return {re.sum * norm, im.sum * norm};
    }
    std::vector<Int> spec =
        value_spectrum(f, p, l, CountStrategy::hensel, cfg);
    return detail::spectrum_sum(spec, 1, m, norm);
}

inline ExpSumSeries exp_sum_series(const Polynomial& f, std::uint64_t p,
                                   int levels, const CountConfig& cfg = {}) {
    ExpSumSeries s;
    s.p = p;
    for (int l = 1; l <= levels; ++l) s.values.push_back(exp_sum(f, p, l, cfg));
    return s;
}

/// Orthogonality check N_l = p^{-l} sum_u E_l(u) with E_l(u) the u-twisted
/// normalized sum; an implementation bug detector, not a theorem test.
struct CrossCheck {
    Rat count_side;
    std::complex<double> sum_side;
    double error = 0;
    bool pass = false;
};

inline CrossCheck cross_check_identity(const Polynomial& f, std::uint64_t p,
                                       int l, double tol = 1e-9,
                                       const CountConfig& cfg = {}) {
    CrossCheck r;
    r.count_side = count_divisibility(f, p, l, CountStrategy::brute, cfg);
    std::uint64_t m = detail::checked_power(p, l);
    Int space = detail::int_power(p, static_cast<long long>(l) * f.nvars());
    double norm = 1.0 / to_double(space);
    std::vector<Int> spec = value_spectrum(f, p, l, CountStrategy::brute, cfg);
    detail::Kahan re, im;
    for (std::uint64_t u = 0; u < m; ++u) {
        std::complex<double> e = detail::spectrum_sum(spec, u, m, norm);
        re.add(e.real());
        im.add(e.imag());
    }
    r.sum_side = {re.sum / static_cast<double>(m), im.sum / static_cast<double>(m)};
    r.error = std::abs(r.sum_side - std::complex<double>(to_double(r.count_side), 0));
    r.pass = r.error <= tol;
    return r;
}

}  // namespace newton
