#pragma once
// Heights, Matveev's lower bound, circle distance and orbit searches on the
// irrational rotation x -> x + theta.

#include "dynpred/lrs.hpp"

#include <optional>
#include <string>
#include <vector>

namespace dynpred {

struct AlgebraicNumber {
    IntPoly minpoly;              // primitive, irreducible, positive leading coefficient
    RootEnclosure root;           // the selected root
    std::vector<Complex> conjugates;  // all roots of minpoly, selected one included

    int degree() const { return poly::degree(minpoly); }
    static AlgebraicNumber rational(const Rat& q, int bits = 128);
};

// Smallest factor of p with integer coefficients having the given root among its
// roots; roots must be the isolated roots of p.
AlgebraicNumber minimal_polynomial_of_root(const IntPoly& p, const std::vector<RootEnclosure>& roots,
                                           std::size_t index);

Real weil_height(const AlgebraicNumber& a);
// h from any integer polynomial P whose roots are the conjugates of a repeated e times
Real height_from_poly(const IntPoly& p, const std::vector<Complex>& roots);

enum class HeightOp { sum, product, power, inverse };
// h(a_1 + ... + a_k) <= log k + sum h, h(a_1 ... a_k) <= sum h, h(a^n) = |n| h, h(1/a) = h
Real height_arith_bound(HeightOp op, const std::vector<Real>& heights, long exponent = 1);

struct MatveevInstance {
    int D = 1;                   // degree of a number field containing all multiplicands
    std::vector<Real> heights;   // h(a_j)
    std::vector<Real> abs_logs;  // |log a_j| (principal branch)
    Int B = 1;                   // max |b_j|
};

// A = 3 * 30^{M+4} (M+1)^{5.5} D^2 (1 + log D) prod h'(a_j),
// with h'(a) = max(D h(a), |log a|, 0.16); log|Lambda| > -A (1 + log(M B)).
Real matveev_constant(const MatveevInstance& inst);
Real matveev_log_lower(const MatveevInstance& inst);
// c with |Lambda| > B^{-c} for every B >= 2 (B = 1 must be handled by the caller)
Real matveev_exponent(const MatveevInstance& inst);

// Lower bound for |cos(m theta + phi)| valid for all m >= 1 whenever it is nonzero:
// log|cos| > -A (1 + log(M m)) - log 2.
struct CosineBound {
    Real A;
    int M = 0;
    int D = 0;
    Real h_lambda, h_alpha;
    bool alpha_rational = false;
    double log_lower(double m) const;  // the right-hand side at index m (upper-rounded magnitude)
};
CosineBound cosine_lower_bound(const Recurrence& rec, const DominantDecomposition& dd);

// Named constants for certificates.
struct BoundConstant {
    std::string name;
    Real value;
    std::string mode;    // "rigorous" or "surrogate"
    std::string recipe;
};

// distance from x to the nearest multiple of 2 pi, in [0, pi]
Real circle_distance(const Real& x);

// least k >= 0 with lo <= (a k + c) mod m <= hi; the window wraps when lo > hi
std::optional<Int> first_hit_mod(const Int& a, const Int& c, const Int& m, const Int& lo, const Int& hi);

// Orbit y_k = start + k * step of the rotation by `step` turns (mod 1).  Both are
// enclosures; searches are conservative in the requested direction.
class OrbitScan {
public:
    OrbitScan(const Real& start, const Real& step, const Real& start_rad, const Real& step_rad, int bits);

    // least k in [from, to) whose point may lie within `halfwidth` turns of 0;
    // every k it skips is certified outside the window
    std::optional<Int> first_possible(const Real& halfwidth, const Int& from, const Int& to) const;
    // least k in [from, to) whose point is certainly inside (lo, hi) (turns, may wrap)
    std::optional<Int> first_certain(const Real& lo, const Real& hi, const Int& from, const Int& to) const;
    // general window (lo, hi) in turns; expand = possible hits, otherwise certain hits
    std::optional<Int> search(const Real& lo, const Real& hi, const Int& from, const Int& to, bool expand) const;
    int bits() const { return bits_; }

private:
    Real start_, step_, start_rad_, step_rad_;
    int bits_;
};

// Open arc from lo counterclockwise to hi (0 < hi - lo <= 2 pi), or empty.
struct CircleInterval {
    Real lo, hi;
    bool empty = true;

    static CircleInterval make(Real lo, Real hi);
    static CircleInterval none() { return {}; }
    Real length() const;
    Real center() const;
    // 1 inside, 0 outside, -1 undecided for a point known up to +- err
    int contains(const Real& x, const Real& err) const;
    // true if (a, b) (as an arc) is certainly inside this arc
    bool contains_arc(const CircleInterval& o) const;
};

// least n >= n_min, n = t (mod T), with n theta + phi in the open arc I.  Every
// candidate is re-checked with an error-bounded evaluation; throws
// precision-exhausted when theta/phi are too coarse to decide.
Int rotation_hit(const Real& theta, const Real& phi, const Real& radius, const CircleInterval& I,
                 std::uint64_t T, std::uint64_t t, const Int& n_min);

}  // namespace dynpred
