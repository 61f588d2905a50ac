#pragma once

#include <cctype>
#include <stdexcept>
#include <string>

#include "newton/polynomial.hpp"

namespace newton {

/// Raised on malformed input; pos is the zero-based offset of the offending
/// character in the original string.
struct ParseError : std::runtime_error {
    size_t pos;
    ParseError(const std::string& msg, size_t p)
        : std::runtime_error(msg + " at position " + std::to_string(p)), pos(p) {}
};

namespace detail {

class PolyParser {
  public:
    PolyParser(const std::string& s, int nvars) : s_(s), nvars_(nvars) {}

    Polynomial run() {
        Polynomial p(nvars_);
        skip_ws();
        bool neg = consume_sign();
        p += term(neg);
        for (;;) {
            skip_ws();
            if (pos_ >= s_.size()) break;
            char c = s_[pos_];
            if (c != '+' && c != '-') throw ParseError("expected '+' or '-'", pos_);
            ++pos_;
            p += term(c == '-');
        }
        if (p.nvars() != nvars_) throw ParseError("variable count mismatch", 0);
        return p;
    }

  private:
    void skip_ws() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }

    bool consume_sign() {
        skip_ws();
        if (pos_ < s_.size() && (s_[pos_] == '+' || s_[pos_] == '-'))
            return s_[pos_++] == '-';
        return false;
    }

    Polynomial term(bool neg) {
        skip_ws();
        if (pos_ >= s_.size()) throw ParseError("expected term", pos_);
        Rat c = 1;
        Exp e(nvars_, 0);
        bool any = false;
        if (std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
            c = rational();
            any = true;
            skip_ws();
            if (pos_ < s_.size() && s_[pos_] == '*') {
                ++pos_;
                factors(e);
            }
        } else {
            factors(e);
            any = true;
        }
        if (!any) throw ParseError("empty term", pos_);
        return Polynomial::monomial(e, neg ? -c : c);
    }

    void factors(Exp& e) {
        factor(e);
        for (;;) {
            skip_ws();
            if (pos_ >= s_.size() || s_[pos_] != '*') break;
            ++pos_;
            factor(e);
        }
    }

    void factor(Exp& e) {
        skip_ws();
        if (pos_ >= s_.size() || s_[pos_] != 'x')
            throw ParseError("expected variable", pos_);
        ++pos_;
        size_t at = pos_;
        long idx = integer();
        if (idx < 1 || idx > nvars_)
            throw ParseError("variable index out of range", at);
        int exp = 1;
        skip_ws();
        if (pos_ < s_.size() && s_[pos_] == '^') {
            ++pos_;
            skip_ws();
            at = pos_;
            exp = static_cast<int>(integer());
            if (exp < 0) throw ParseError("negative exponent", at);
        }
        e[idx - 1] += exp;
    }

    Rat rational() {
        Int num = unsigned_int();
        skip_ws();
        if (pos_ < s_.size() && s_[pos_] == '/') {
            ++pos_;
            skip_ws();
            size_t at = pos_;
            Int den = unsigned_int();
            if (den == 0) throw ParseError("zero denominator", at);
            return Rat(num, den);
        }
        return Rat(num);
    }

    Int unsigned_int() {
        skip_ws();
        if (pos_ >= s_.size() || !std::isdigit(static_cast<unsigned char>(s_[pos_])))
            throw ParseError("expected number", pos_);
        Int v = 0;
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
            v = v * 10 + (s_[pos_] - '0');
            ++pos_;
        }
        return v;
    }

    long integer() {
        Int v = unsigned_int();
        return v.convert_to<long>();
    }

    const std::string& s_;
    int nvars_;
    size_t pos_ = 0;
};

}  // namespace detail

/// Parses e.g. "x1^2*x2 - 3/2*x2^3 + 1" with variables x1..x<nvars>.
inline Polynomial parse_polynomial(const std::string& text, int nvars) {
    return detail::PolyParser(text, nvars).run();
}

}  // namespace newton
