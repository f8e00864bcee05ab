#pragma once
// Circle intervals J_d(gamma, delta) of the rotation by theta, their length and
// location bounds, pattern frames built from them, and witnesses for patterns of
// consecutive positive values.

#include "dynpred/enumeration.hpp"

#include <optional>
#include <string>
#include <vector>

namespace dynpred {

// J_d(gamma, delta) = {x in (-pi/2, pi/2) : gamma cos x < |lambda|^d cos(x + d theta) < delta cos x}
struct JSpec {
    long d = 1;
    Real gamma, delta;
};

struct JInterval {
    long d = 0;
    Real gamma, delta;
    CircleInterval arc;  // endpoints at working precision
    Real radius;         // bound on the error of each endpoint

    Real length() const { return arc.length(); }
    CircleInterval inner() const;  // certainly inside J
    CircleInterval outer() const;  // certainly contains J
};

// Working precision is dd.bits when bits == 0.  Throws precision-exhausted when
// lambda is too coarse for the requested d.
JInterval j_interval(const DominantDecomposition& dd, const JSpec& spec, int bits = 0);

struct LengthBounds {
    Real lower, upper;
    Real C5;  // upper = C5 (delta - gamma) / |lambda|^d, uniform in d >= 1
};
LengthBounds j_length_bounds(const DominantDecomposition& dd, const JSpec& spec);

struct Anchor {
    long d = 0;
    Real point;   // the point of -d theta +- pi/2 lying in (-pi/2, pi/2]
    Real radius;  // J_d(gamma, delta) lies within this distance for 0 <= gamma < delta <= delta_max
};
// delta_max defaults (when zero) to sqrt|lambda|
Anchor j_anchor(const DominantDecomposition& dd, const Int& d, const Real& delta_max = Real(0L));
Anchor j_anchor(const DominantDecomposition& dd, long d, const Real& delta_max = Real(0L));

// upper bound on sum_{d >= D} |J_d(1, delta)|: the first `explicit_terms` summands
// from certified endpoints, the rest by a geometric series
Real tail_bound(const DominantDecomposition& dd, long D, const Real& delta, int explicit_terms = 64);

// {x : cos x > 1/|lambda|}, shrunk by the enclosure radius
CircleInterval base_interval(const DominantDecomposition& dd);

struct FrameOptions {
    std::vector<Real> deltas;        // delta_2 .. delta_l; empty: geometric schedule in (1, sqrt|lambda|)
    long candidate_horizon = 400;    // d range reported in the per-stage candidate lists
    long b_budget = 10000000;        // largest b tried at any stage
    int bits = 1024;                 // minimum working precision for the construction
};

struct FrameStage {
    long b = 0;
    CircleInterval I;              // I_j (certified inside the previous stage)
    long D = 0;                    // least D with tail(D, delta_l) < |I_j| and exclusion below D
    std::vector<long> candidates;  // {0} and all d <= horizon with J_d(1, delta_l) meeting I_{j-1}
};

struct PatternFrame {
    int ell = 1;
    std::uint64_t T = 1;
    std::vector<std::uint64_t> t;  // t_1 .. t_l
    std::vector<long> b;           // b_2 .. b_l
    std::vector<Real> delta;       // delta_2 .. delta_l
    CircleInterval I;
    Int D = 1;
    Real tail;                     // certified upper bound on sum_{d >= D} |J_d(1, delta_l)|
    std::vector<FrameStage> stages;
    int bits = 0;
};

// least D >= 1 with tail_bound(D, delta) < |I|
long tail_horizon(const DominantDecomposition& dd, const CircleInterval& I, const Real& delta);

// every d in [lo, hi) outside `skip` whose J_d(1, delta) may meet I (anchor prefilter
// by orbit search, then certified endpoint tests)
std::vector<long> blockers(const DominantDecomposition& dd, const CircleInterval& I, const Real& delta,
                           const std::vector<long>& skip, long lo, long hi);
std::vector<Int> blockers(const DominantDecomposition& dd, const CircleInterval& I, const Real& delta,
                          const std::vector<long>& skip, const Int& lo, const Int& hi);

PatternFrame select_pattern_frame(const DominantDecomposition& dd, int ell, std::uint64_t T,
                                  const std::vector<std::uint64_t>& t, const FrameOptions& opt = {});

struct FrameCheck {
    bool residues = false;     // (a)
    bool containment = false;  // (b)
    bool exclusion = false;    // (c)
    bool tail = false;         // (d)
    bool base = false;         // I inside {cos x > 1/|lambda|}
    bool ok() const { return residues && containment && exclusion && tail && base; }
};
// re-derives every frame invariant from the frame alone
FrameCheck check_frame(const DominantDecomposition& dd, const PatternFrame& f);

// sub-frame with |I'| = eps and D' > eps^{-1/2}; throws epsilon-too-large
PatternFrame shrink_subinterval(const DominantDecomposition& dd, const PatternFrame& frame, const Real& eps);

enum class WitnessMode { rigorous, empirical };

struct VerificationReport {
    bool ok = false;
    std::optional<Int> counterexample;  // offending index m
    std::string method;                 // "stream" or "analytic"
    std::string detail;
    int bits = 0;
    // stream method: ranks of n_1 .. n_l
    std::vector<std::uint64_t> ranks;
    // analytic method: d <= d_direct checked one by one, (d_direct, d_scan] by orbit scans,
    // beyond d_scan by the cosine lower bound; d in [-k_direct, 0) directly, below by magnitude
    long k_direct = 0;
    long d_direct = 0;
    Int d_scan = 0;
    bool complete = false;  // every index m >= 0 accounted for
};

struct PatternWitness {
    std::vector<Int> n;  // n_1 .. n_l
    std::vector<long> b;  // b_2 .. b_l
    WitnessMode mode = WitnessMode::rigorous;
    VerificationReport record;
};

struct WitnessOptions {
    FrameOptions frame;
    std::uint64_t rank_budget = 50000000;   // empirical: ranks scanned
    int tries = 64;                         // rigorous: rotation hits tried
    Int stream_limit = 100000000;           // verify: largest index handled by the stream method
    long d_direct = 256;
    EnumOptions enumeration;
};

PatternWitness find_witness(const DominantDecomposition& dd, const Recurrence& rec, int ell, std::uint64_t T,
                            const std::vector<std::uint64_t>& t, const Int& N, WitnessMode mode,
                            const WitnessOptions& opt = {});

// certifies that u_{n_1} < ... < u_{n_l} are positive and that no other index m has
// u_{n_1} < u_m < u_{n_l}
VerificationReport verify_witness(const DominantDecomposition& dd, const Recurrence& rec,
                                  const std::vector<Int>& n, const WitnessOptions& opt = {});

// C5, C6, C8 and the Matveev exponent for this context
std::vector<BoundConstant> interval_constants(const DominantDecomposition& dd, const Recurrence& rec,
                                              const Real& delta);

}  // namespace dynpred
