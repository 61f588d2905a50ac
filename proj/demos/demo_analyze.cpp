// Minimal tour: parse a polynomial and print it back in canonical form.
// Grows alongside the library; see README for the full CLI.
#include <iostream>

#include "newton/parser.hpp"

int main() {
    auto f = newton::parse_polynomial("x1^2 + x2^3", 2);
    std::cout << f.str() << "\n";
    return 0;
}
