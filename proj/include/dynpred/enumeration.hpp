#pragma once
// Certified sign/magnitude keys for u_n, a certified comparator, and the
// increasing enumeration of the non-negative values of the sequence.

#include "dynpred/diophantine.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <queue>
#include <unordered_set>
#include <vector>

namespace dynpred {

enum class Exactness : std::uint8_t { certified_float, exact_integer };

// log|u_n| = n L + offset, |error| <= err, where L = log|lambda|
struct TermKey {
    std::uint64_t n = 0;
    int sign = 0;
    double offset = 0;
    double err = 0;
    Exactness exactness = Exactness::certified_float;
    std::uint8_t level = 0;  // 0 fast kernel, 1..3 multiprecision rungs, 4 exact

    double log_magnitude(double L) const { return static_cast<double>(n) * L + offset; }
};

struct EnumOptions {
    std::uint64_t block = 1u << 16;
    std::uint64_t exact_limit = 2048;  // exact bigints for n <= this
    bool parallel = true;
    int threads = 0;  // 0: OpenMP default
};

class TermEvaluator {
public:
    explicit TermEvaluator(const Recurrence& rec, const EnumOptions& opt = {});

    const Recurrence& recurrence() const { return rec_; }
    const DominantDecomposition& decomposition() const { return dd_; }
    double log_modulus() const { return L_hi_; }
    double log_scale() const { return log_scale_; }
    std::uint64_t exact_limit() const { return exact_limit_; }

    // certified sign and a log-magnitude enclosure tighter than `tol`
    TermKey key(std::uint64_t n, double tol = 1e-9) const;
    // the fast double-precision kernel alone (may be loose; sign valid iff err < huge)
    TermKey fast_key(std::uint64_t n) const;
    // multiprecision rung: level 1 = 128, 2 = 256, 3 = 1024 bits
    TermKey precise_key(std::uint64_t n, int level) const;
    const Int& exact(std::uint64_t n) const;  // n <= exact_limit
    Int exact_any(std::uint64_t n) const;

    // certified three-way comparison of the values u_{a.n} and u_{b.n}
    int compare(const TermKey& a, const TermKey& b) const;
    // multiprecision evaluations so far (process-wide)
    static std::uint64_t escalations();

    // keys for [lo, hi) written to out[0 .. hi-lo)
    void block_serial(std::uint64_t lo, std::uint64_t hi, std::vector<TermKey>& out) const;
    void block_parallel(std::uint64_t lo, std::uint64_t hi, std::vector<TermKey>& out, int threads = 0) const;

    // log bound on the non-dominant part relative to |lambda|^n, i.e. log(r (R/|lambda|)^n)
    double log_rho(std::uint64_t n) const { return log_r_ + static_cast<double>(n) * log_ratio_; }
    const CosineBound& cosine_bound() const { return cb_; }

private:
    int compare_precise(const TermKey& a, const TermKey& b, int level) const;
    Real precise_w(std::uint64_t n, mpfr_prec_t p, Real& err) const;

    Recurrence rec_;
    DominantDecomposition dd_;
    CosineBound cb_;
    std::uint64_t exact_limit_;
    std::vector<Int> exact_;
    std::vector<double> exact_offset_;
    unsigned __int128 beta_ = 0, gamma_ = 0;  // theta/2pi and phi/2pi as 128-bit fractions
    double L_hi_ = 0, L_lo_ = 0, log_scale_ = 0, scale_ = 0, log_r_ = 0, log_ratio_ = 0;
};

// smallest n with 2 r (R/|lambda|)^n < scale 2^-24; 0 without non-dominant roots
std::uint64_t order_threshold(const TermEvaluator& ev);

struct EnumEntry {
    std::uint64_t rank = 0;
    std::uint64_t n = 0;
    TermKey key;
};

struct EnumStats {
    std::uint64_t processed = 0;        // all indices below this are accounted for
    std::uint64_t exceptional = 0;      // indices pulled forward by the frontier scan
    std::uint64_t certificates = 0;
    std::vector<std::pair<std::uint64_t, std::uint64_t>> duplicates;  // (kept n, dropped n)
    double frontier = 0;                // log-value below which emission is certified
};

// Streaming enumeration of P = {u_n} intersected with the naturals, increasing.
class PositiveEnumerator {
public:
    explicit PositiveEnumerator(std::shared_ptr<const TermEvaluator> ev, const EnumOptions& opt = {});
    explicit PositiveEnumerator(const Recurrence& rec, const EnumOptions& opt = {});

    std::optional<EnumEntry> next();
    const EnumStats& stats() const { return stats_; }
    const TermEvaluator& evaluator() const { return *ev_; }

private:
    struct Greater {
        const TermEvaluator* ev;
        bool operator()(const TermKey& a, const TermKey& b) const;
    };
    void advance();
    void certify();

    std::shared_ptr<const TermEvaluator> ev_;
    EnumOptions opt_;
    std::priority_queue<TermKey, std::vector<TermKey>, Greater> heap_;
    std::unordered_set<std::uint64_t> pulled_;  // exceptional indices already queued
    std::vector<TermKey> buf_;
    std::uint64_t next_index_ = 0;
    double frontier_ = -1e300;  // certified: every unqueued index has log|u| > frontier
    bool have_last_ = false;
    TermKey last_;
    std::uint64_t rank_ = 0;
    EnumStats stats_;
};

std::vector<EnumEntry> enumerate_positive(const Recurrence& rec, std::size_t count, const EnumOptions& opt = {});

struct SparsityResult {
    std::uint64_t M = 0;                // p_{m+1} - p_m >= gap for all checked m >= M
    std::uint64_t checked_through = 0;  // ranks examined
};
SparsityResult sparsity_horizon(const Recurrence& rec, const Int& gap, std::uint64_t ranks, const EnumOptions& opt = {});

}  // namespace dynpred
