#pragma once
// Dense univariate polynomials over Z and Q, coefficients stored low degree first.

#include "dynpred/mp.hpp"

#include <vector>

namespace dynpred {

using IntPoly = std::vector<Int>;
using RatPoly = std::vector<Rat>;
using RatMatrix = std::vector<std::vector<Rat>>;
using IntMatrix = std::vector<std::vector<Int>>;

namespace poly {

template <class P>
void trim(P& p) {
    while (!p.empty() && p.back() == 0) p.pop_back();
}

template <class P>
int degree(const P& p) {
    int d = static_cast<int>(p.size()) - 1;
    while (d >= 0 && p[static_cast<size_t>(d)] == 0) --d;
    return d;
}

RatPoly to_rat(const IntPoly& p);
// primitive integer multiple with positive leading coefficient
IntPoly primitive(const RatPoly& p);
IntPoly primitive(const IntPoly& p);

IntPoly derivative(const IntPoly& p);
RatPoly derivative(const RatPoly& p);

RatPoly add(const RatPoly& a, const RatPoly& b);
RatPoly sub(const RatPoly& a, const RatPoly& b);
RatPoly mul(const RatPoly& a, const RatPoly& b);
IntPoly mul(const IntPoly& a, const IntPoly& b);
void divmod(const RatPoly& a, const RatPoly& b, RatPoly& q, RatPoly& r);
RatPoly mod(const RatPoly& a, const RatPoly& b);
RatPoly monic(const RatPoly& p);
RatPoly gcd(const RatPoly& a, const RatPoly& b);
// inverse of a modulo m, which must be coprime to a
RatPoly inverse_mod(const RatPoly& a, const RatPoly& m);
// exact division test: true and quotient in q if b | a
bool divides(const IntPoly& b, const IntPoly& a, IntPoly* q = nullptr);

Rat eval(const RatPoly& p, const Rat& x);
Int eval(const IntPoly& p, const Int& x);
Complex eval(const IntPoly& p, const Complex& x);
Complex eval(const RatPoly& p, const Complex& x);

// square-free factors f_1, f_2, ... with p = lc * prod f_i^i (Yun); f_i primitive
std::vector<IntPoly> squarefree_decomposition(const IntPoly& p);
bool is_squarefree(const IntPoly& p);

// characteristic polynomial det(X I - A), monic
RatPoly charpoly(const RatMatrix& a);

// Bareiss fraction-free determinant
Int determinant(IntMatrix a);

// Mahler-style sum: log|lc| + sum log max(1, |z_i|) given numerical roots
Real log_mahler(const IntPoly& p, const std::vector<Complex>& roots);

}  // namespace poly

}  // namespace dynpred
