#pragma once
// Certified complex root isolation for integer polynomials.

#include "dynpred/poly.hpp"

#include <vector>

namespace dynpred {

struct RootEnclosure {
    Complex center;
    Real radius;        // the root lies in the closed disk D(center, radius)
    int multiplicity = 1;
    bool exact = false; // center is the exact (rational) root
    Rat exact_value;    // valid when exact

    Real modulus() const { return abs(center); }
};

// All distinct roots of p (degree >= 1), each disk certified to contain exactly
// one root of the square-free part and disks pairwise disjoint.  Radii are
// driven below 2^-bits.  Sorted by decreasing modulus, then decreasing imag part.
std::vector<RootEnclosure> isolate_roots(const IntPoly& p, int bits);

}  // namespace dynpred
