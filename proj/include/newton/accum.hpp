#pragma once

namespace newton {
namespace detail {

/// Compensated accumulator for long sums of same-scale terms.
struct Kahan {
    double sum = 0, carry = 0;
    void add(double x) {
        double y = x - carry;
        double t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
};

}  // namespace detail
}  // namespace newton
