#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "newton/polynomial.hpp"

namespace newton {

inline uint64_t mulmod(uint64_t a, uint64_t b, uint64_t m) {
    return static_cast<uint64_t>((static_cast<unsigned __int128>(a) * b) % m);
}

inline uint64_t powmod(uint64_t b, uint64_t e, uint64_t m) {
    uint64_t r = 1 % m;
    b %= m;
    while (e) {
        if (e & 1) r = mulmod(r, b, m);
        b = mulmod(b, b, m);
        e >>= 1;
    }
    return r;
}

/// Extended-gcd inverse of a mod m; throws when gcd(a, m) != 1.
inline uint64_t invmod(uint64_t a, uint64_t m) {
    int64_t t = 0, nt = 1;
    int64_t r = static_cast<int64_t>(m), nr = static_cast<int64_t>(a % m);
    while (nr != 0) {
        int64_t q = r / nr;
        t -= q * nt;
        std::swap(t, nt);
        r -= q * nr;
        std::swap(r, nr);
    }
    if (r != 1) throw std::domain_error("not invertible");
    if (t < 0) t += static_cast<int64_t>(m);
    return static_cast<uint64_t>(t);
}

inline uint64_t pow_u64(uint64_t b, int e) {
    uint64_t r = 1;
    while (e-- > 0) r *= b;
    return r;
}

/// Reduces a rational mod m; the denominator must be a unit mod m.
inline uint64_t rat_mod(const Rat& c, uint64_t m) {
    Int num = rat_num(c) % Int(m);
    Int den = rat_den(c) % Int(m);
    if (num < 0) num += Int(m);
    uint64_t n = num.convert_to<uint64_t>();
    uint64_t d = den.convert_to<uint64_t>();
    return mulmod(n, invmod(d, m), m);
}

/// Fixed-modulus evaluator: coefficients reduced once, reused per point.
class ModularEvaluator {
  public:
    ModularEvaluator(const Polynomial& f, uint64_t m) : nvars_(f.nvars()), m_(m) {
        for (auto& [e, c] : f.terms()) {
            uint64_t r = rat_mod(c, m);
            if (r != 0) terms_.push_back({e, r});
        }
    }

    uint64_t operator()(const std::vector<uint64_t>& x) const {
        uint64_t s = 0;
        for (auto& [e, c] : terms_) {
            uint64_t t = c;
            for (int i = 0; i < nvars_; ++i)
                for (int k = 0; k < e[i]; ++k) t = mulmod(t, x[i] % m_, m_);
            s = (s + t) % m_;
        }
        return s;
    }

    uint64_t modulus() const { return m_; }

  private:
    int nvars_;
    uint64_t m_;
    std::vector<std::pair<Exp, uint64_t>> terms_;
};

}  // namespace newton
