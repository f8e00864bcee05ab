#pragma once
// Integer linear recurrences: exact terms, characteristic roots, classification,
// dominant-pair decomposition and eventual periodicity modulo M.

#include "dynpred/roots.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace dynpred {

// u_{n+d} = c_1 u_{n+d-1} + ... + c_d u_n
struct Recurrence {
    std::vector<Int> coeffs;    // c_1 .. c_d, c_d != 0
    std::vector<Int> initials;  // u_0 .. u_{d-1}

    int order() const { return static_cast<int>(coeffs.size()); }

    // validates shape and minimality; throws Error otherwise
    static Recurrence make(std::vector<Int> coeffs, std::vector<Int> initials);
};

bool is_minimal(const Recurrence& rec);

Int eval_term(const Recurrence& rec, std::uint64_t n);
Int eval_term(const Recurrence& rec, const Int& n);
// u_0 .. u_{count-1}
std::vector<Int> eval_prefix(const Recurrence& rec, std::size_t count);

// G with alpha_k = G(lambda_k) / F'(lambda_k) for a simple characteristic polynomial F
IntPoly coefficient_numerator(const Recurrence& rec);

// X^d - c_1 X^{d-1} - ... - c_d, low degree first
IntPoly char_poly(const Recurrence& rec);

struct Classification {
    bool simple = false;
    bool degenerate = false;
    int dominant_count = 0;
    bool admissible = false;
    int degenerate_order = 0;  // k with two roots sharing k-th powers, 0 if none
    std::string reason;
    std::vector<RootEnclosure> roots;
};

Classification classify(const Recurrence& rec, int bits = 256);

struct DominantDecomposition {
    int bits = 0;
    Real radius;          // common error radius on the real quantities below
    Complex lambda;       // dominant root, Im > 0
    Complex alpha_raw;    // its coefficient in the closed form
    Complex alpha;        // alpha_raw / (2|alpha_raw|), so |alpha| = 1/2
    Real scale;           // 2|alpha_raw|
    Real modulus;         // |lambda|
    Real log_modulus;
    Real theta;           // arg lambda in (0, pi)
    Real phi;             // arg alpha in (-pi, pi]
    struct Term {
        Complex root;
        Complex coeff;
    };
    std::vector<Term> nondominant;
    // |u_n - scale |lambda|^n cos(n theta + phi)| <= r R^n for all n >= 0
    Rat r, R;
    std::vector<RootEnclosure> roots;
    std::vector<Complex> coeffs;  // coefficient of each root, aligned with roots
};

DominantDecomposition dominant_decomposition(const Recurrence& rec, int bits);

// u_n mod M splits into a prefix and a cycle repeated forever
struct ModularCycle {
    std::uint64_t modulus = 0;
    std::vector<std::uint64_t> prefix;
    std::vector<std::uint64_t> cycle;

    std::uint64_t preperiod() const { return prefix.size(); }
    std::uint64_t period() const { return cycle.size(); }
    std::uint64_t residue(std::uint64_t n) const;
    std::uint64_t residue(const Int& n) const;
};

ModularCycle modular_sequence(const Recurrence& rec, std::uint64_t modulus,
                              std::uint64_t step_budget = 400000000ULL);

std::uint64_t euler_phi(std::uint64_t k);

}  // namespace dynpred
