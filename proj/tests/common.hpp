#pragma once

#include "dynpred/diophantine.hpp"

#include <cstdint>

namespace dynpred::testing {

// u_{n+3} = 6u_{n+2} - 13u_{n+1} + 10u_n, u = 2, 4, 7, ...
inline Recurrence example() { return Recurrence::make({6, -13, 10}, {2, 4, 7}); }
inline Recurrence fibonacci() { return Recurrence::make({1, 1}, {0, 1}); }

// Re((2+i)^n) + 2^n with Gaussian integers, independent of the recurrence code
inline Int example_closed_form(unsigned n) {
    Int re = 1, im = 0;
    for (unsigned k = 0; k < n; ++k) {
        Int nr = 2 * re - im;
        Int ni = re + 2 * im;
        re = nr;
        im = ni;
    }
    Int p = 1;
    mpz_mul_2exp(p.get_mpz_t(), p.get_mpz_t(), n);
    return re + p;
}

// (2+i)^d exactly
inline std::pair<Int, Int> gauss_pow(unsigned d) {
    Int re = 1, im = 0;
    for (unsigned k = 0; k < d; ++k) {
        Int nr = 2 * re - im, ni = re + 2 * im;
        re = nr;
        im = ni;
    }
    return {re, im};
}

// {x in (-pi/2, pi/2) : gamma < Re(lambda^d) - Im(lambda^d) tan x < delta} for lambda = 2+i,
// from exact powers
inline CircleInterval j_oracle(unsigned d, const Rat& gamma, const Rat& delta, int bits) {
    auto [re, im] = gauss_pow(d);
    auto edge = [&](const Rat& eta) { return atan(Real(Rat(re - eta) / Rat(im), bits)); };
    Real a = edge(delta), b = edge(gamma);
    return im > 0 ? CircleInterval::make(a, b) : CircleInterval::make(b, a);
}

}  // namespace dynpred::testing
