#include "dynpred/enumeration.hpp"

#include "dynpred/error.hpp"

#include <omp.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>

namespace dynpred {

namespace {

using u128 = unsigned __int128;
using i128 = __int128;

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kTwoPi = 6.283185307179586476925286766559;
const int kLevelBits[4] = {0, 128, 256, 1024};

u128 to_u128(const Int& z) {
    Int lo, hi;
    mpz_fdiv_r_2exp(lo.get_mpz_t(), z.get_mpz_t(), 64);
    mpz_fdiv_q_2exp(hi.get_mpz_t(), z.get_mpz_t(), 64);
    mpz_fdiv_r_2exp(hi.get_mpz_t(), hi.get_mpz_t(), 64);
    auto word = [](const Int& w) {
        std::uint64_t v = 0;
        mpz_export(&v, nullptr, -1, sizeof v, 0, 0, w.get_mpz_t());
        return v;
    };
    return (static_cast<u128>(word(hi)) << 64) | word(lo);
}

// floor(frac(x) * 2^128)
u128 frac128(const Real& x) {
    Real f = x - floor(x);
    return to_u128(mul_2exp(f, 128).floor_int());
}

double log_abs(const Int& z) {
    long e = 0;
    double d = mpz_get_d_2exp(&e, z.get_mpz_t());
    return std::log(std::fabs(d)) + static_cast<double>(e) * 0.69314718055994530942;
}

std::atomic<std::uint64_t>& escalation_counter() {
    static std::atomic<std::uint64_t> c{0};
    return c;
}

}  // namespace

TermEvaluator::TermEvaluator(const Recurrence& rec, const EnumOptions& opt)
    : rec_(rec), dd_(dominant_decomposition(rec, 1200)), cb_(cosine_lower_bound(rec, dd_)),
      exact_limit_(opt.exact_limit) {
    const mpfr_prec_t W = dd_.lambda.bits();
    Real tp = mul_2exp(Real::pi(W), 1);
    beta_ = frac128(dd_.theta / tp);
    gamma_ = frac128(dd_.phi / tp);
    L_hi_ = dd_.log_modulus.to_double();
    L_lo_ = (dd_.log_modulus - Real(L_hi_)).to_double();
    scale_ = dd_.scale.to_double();
    log_scale_ = log(dd_.scale).to_double();
    Real r(dd_.r, 128), R(dd_.R, 128);
    log_r_ = log(r).to_double();
    log_r_ += 1e-12 * (std::fabs(log_r_) + 1);
    if (dd_.nondominant.empty()) {
        log_ratio_ = -L_hi_;
    } else {
        log_ratio_ = (log(R) - Real::with_bits(128, dd_.log_modulus)).to_double();
        log_ratio_ += 1e-13 * std::fabs(log_ratio_);
    }
    exact_ = eval_prefix(rec_, static_cast<std::size_t>(exact_limit_ + 1));
    exact_offset_.resize(exact_.size());
    Real Lm = Real::with_bits(256, dd_.log_modulus);
    for (std::size_t n = 0; n < exact_.size(); ++n) {
        if (exact_[n] == 0) {
            exact_offset_[n] = -kInf;
            continue;
        }
        Real lg = log(abs(Real(exact_[n], 256 + static_cast<mpfr_prec_t>(mpz_sizeinbase(exact_[n].get_mpz_t(), 2)))));
        exact_offset_[n] = (lg - Lm * Real(static_cast<unsigned long>(n))).to_double();
    }
}

std::uint64_t TermEvaluator::escalations() { return escalation_counter().load(); }

const Int& TermEvaluator::exact(std::uint64_t n) const {
    if (n > exact_limit_) throw Error(Errc::invalid_input, "index beyond the exact cache");
    return exact_[n];
}

Int TermEvaluator::exact_any(std::uint64_t n) const {
    if (n <= exact_limit_) return exact_[n];
    if (n > 200000000ULL) throw Error(Errc::precision_exhausted, "exact evaluation out of reach");
    return eval_term(rec_, n);
}

TermKey TermEvaluator::fast_key(std::uint64_t n) const {
    TermKey k;
    k.n = n;
    if (n <= exact_limit_) {
        const Int& u = exact_[n];
        k.sign = sgn(u);
        k.offset = exact_offset_[n];
        k.err = k.sign ? 1e-15 * (std::fabs(k.offset) + 1) : 0;
        k.exactness = Exactness::exact_integer;
        k.level = 4;
        return k;
    }
    // x_n / 2pi = frac(n beta + gamma); cos x = sin(2 pi (1/4 - |y|)) keeps relative accuracy near zeros
    u128 v = static_cast<u128>(n) * beta_ + gamma_;
    u128 w = (v >> 127) ? static_cast<u128>(0) - v : v;
    i128 z = (static_cast<i128>(1) << 126) - static_cast<i128>(w);
    double zd = std::ldexp(static_cast<double>(z), -128);
    double c = std::sin(kTwoPi * zd);
    double a = std::fabs(c);
    double abs_err = a * 1.2e-15 + static_cast<double>(n + 2) * 3e-38 + std::exp(log_rho(n) - log_scale_) * 1.000001;
    if (!(a > 2 * abs_err)) {
        k.err = kInf;
        return k;
    }
    k.sign = c > 0 ? 1 : -1;
    double la = std::log(a);
    k.offset = log_scale_ + la;
    k.err = 2 * abs_err / a + 4e-16 * (std::fabs(log_scale_) + std::fabs(la) + 1);
    return k;
}

Real TermEvaluator::precise_w(std::uint64_t n, mpfr_prec_t p, Real& err) const {
    const mpfr_prec_t nb = 64;
    const mpfr_prec_t W = p + 64 + nb;
    Int N(static_cast<unsigned long>(n));
    Real x = mul_int(Real::with_bits(W, dd_.theta), N) + Real::with_bits(W, dd_.phi);
    Real w = Real::with_bits(W, dd_.scale) * cos(x);
    Real e = Real::with_bits(64, dd_.radius) * Real(static_cast<double>(n) * 4 + 8) +
             Real::two_pow(-static_cast<long>(p) - 8, 64) * Real(8L);
    double lr = log_rho(n);
    if (lr < -static_cast<double>(p + 16) * 0.6931) {
        e += exp(Real::with_bits(64, Real(lr)));
    } else {
        Real lm = Real::with_bits(W, dd_.modulus);
        for (const auto& t : dd_.nondominant) {
            Complex q = pow(with_bits(W, t.root) / lm, n);
            w += (with_bits(W, t.coeff) * q).re;
        }
        e += Real::two_pow(-static_cast<long>(p) + 8, 64) * Real(static_cast<double>(n) + 1) * exp(Real::with_bits(64, Real(lr)));
    }
    err = e;
    return w;
}

TermKey TermEvaluator::precise_key(std::uint64_t n, int level) const {
    TermKey k;
    k.n = n;
    k.level = static_cast<std::uint8_t>(level);
    escalation_counter().fetch_add(1, std::memory_order_relaxed);
    Real err;
    Real w = precise_w(n, kLevelBits[level], err);
    Real a = abs(w);
    if (!(a > mul_2exp(err, 1))) {
        k.err = kInf;
        return k;
    }
    k.sign = w.sign();
    Real la = log(a);
    k.offset = la.to_double();
    k.err = (mul_2exp(err, 1) / a).to_double() * 1.0001 + 2.3e-16 * (std::fabs(k.offset) + 1);
    return k;
}

TermKey TermEvaluator::key(std::uint64_t n, double tol) const {
    TermKey k = fast_key(n);
    auto good = [&](const TermKey& t) { return t.err <= tol || (t.sign < 0 && t.err < kInf); };
    if (good(k)) return k;
    for (int level = 1; level <= 3; ++level) {
        k = precise_key(n, level);
        if (good(k)) return k;
    }
    Int u = exact_any(n);
    k.sign = sgn(u);
    k.offset = k.sign ? log_abs(u) - static_cast<double>(n) * L_hi_ : -kInf;
    k.err = 1e-9;
    k.exactness = Exactness::exact_integer;
    k.level = 4;
    return k;
}

int TermEvaluator::compare_precise(const TermKey& a, const TermKey& b, int level) const {
    const mpfr_prec_t p = kLevelBits[level];
    Real ea, eb;
    Real wa = precise_w(a.n, p, ea), wb = precise_w(b.n, p, eb);
    Real aa = abs(wa), ab = abs(wb);
    if (!(aa > mul_2exp(ea, 1)) || !(ab > mul_2exp(eb, 1))) return 2;
    const mpfr_prec_t W = p + 128;
    Real dn = Real(static_cast<double>(static_cast<std::int64_t>(a.n - b.n)));
    Real la = log(aa), lb = log(ab);
    Real d = Real::with_bits(W, dd_.log_modulus) * dn + la - lb;
    Real e = mul_2exp(ea, 1) / aa + mul_2exp(eb, 1) / ab +
             Real::two_pow(-static_cast<long>(p) + 6, 64) * (abs(la) + abs(lb) + abs(dn) + Real(1L));
    if (d > e) return 1;
    if (-d > e) return -1;
    return 2;
}

int TermEvaluator::compare(const TermKey& a, const TermKey& b) const {
    if (a.n == b.n) return 0;
    if (a.sign != b.sign) return a.sign < b.sign ? -1 : 1;
    if (a.sign == 0) return 0;
    const int s = a.sign;
    if (a.n <= exact_limit_ && b.n <= exact_limit_) {
        int c = cmp(exact_[a.n], exact_[b.n]);
        return c < 0 ? -1 : c > 0 ? 1 : 0;
    }
    // log|u_a| - log|u_b| = (a.n - b.n) L + (a.off - b.off), double-double for the long product
    double dn = static_cast<double>(static_cast<std::int64_t>(a.n - b.n));
    double p = dn * L_hi_;
    double e = std::fma(dn, L_hi_, -p);
    double t = dn * L_lo_;
    double doff = a.offset - b.offset;
    double q = e + t + doff;
    double bound = (a.err + b.err) * 1.0000001 +
                   4.5e-16 * (std::fabs(e) + std::fabs(t) + std::fabs(a.offset) + std::fabs(b.offset)) +
                   std::fabs(dn) * std::fabs(L_hi_) * 1e-31 + 1e-300;
    double d = p + q;
    if (d > bound) return s;
    if (-d > bound) return -s;
    for (int level = 1; level <= 3; ++level) {
        int c = compare_precise(a, b, level);
        if (c != 2) return c * s;
    }
    int c = cmp(exact_any(a.n), exact_any(b.n));
    return c < 0 ? -1 : c > 0 ? 1 : 0;
}

void TermEvaluator::block_serial(std::uint64_t lo, std::uint64_t hi, std::vector<TermKey>& out) const {
    out.resize(hi - lo);
    for (std::uint64_t n = lo; n < hi; ++n) out[n - lo] = key(n);
}

void TermEvaluator::block_parallel(std::uint64_t lo, std::uint64_t hi, std::vector<TermKey>& out, int threads) const {
    out.resize(hi - lo);
    const std::int64_t count = static_cast<std::int64_t>(hi - lo);
    const int nt = threads > 0 ? threads : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 4096) num_threads(nt)
    for (std::int64_t i = 0; i < count; ++i) out[static_cast<std::size_t>(i)] = key(lo + static_cast<std::uint64_t>(i));
}

std::uint64_t order_threshold(const TermEvaluator& ev) {
    const auto& dd = ev.decomposition();
    if (dd.nondominant.empty()) return 0;
    // 2 r (R/|lambda|)^n < scale 2^-24
    double target = ev.log_scale() - 24 * 0.6931471805599453 - 0.6931471805599453;
    std::uint64_t n = 0;
    while (ev.log_rho(n) >= target) ++n;
    return n;
}

bool PositiveEnumerator::Greater::operator()(const TermKey& a, const TermKey& b) const {
    int c = ev->compare(a, b);
    return c > 0 || (c == 0 && a.n > b.n);
}

PositiveEnumerator::PositiveEnumerator(std::shared_ptr<const TermEvaluator> ev, const EnumOptions& opt)
    : ev_(std::move(ev)), opt_(opt), heap_(Greater{ev_.get()}) {}

PositiveEnumerator::PositiveEnumerator(const Recurrence& rec, const EnumOptions& opt)
    : PositiveEnumerator(std::make_shared<TermEvaluator>(rec, opt), opt) {}

void PositiveEnumerator::advance() {
    std::uint64_t lo = next_index_;
    std::uint64_t hi = lo == 0 ? ev_->exact_limit() + 1 : lo + opt_.block;
    if (opt_.parallel)
        ev_->block_parallel(lo, hi, buf_, opt_.threads);
    else
        ev_->block_serial(lo, hi, buf_);
    for (const auto& k : buf_) {
        if (!pulled_.empty()) {
            auto it = pulled_.find(k.n);
            if (it != pulled_.end()) {
                pulled_.erase(it);
                continue;
            }
        }
        if (k.sign >= 0) heap_.push(k);
    }
    next_index_ = hi;
    stats_.processed = hi;
    certify();
}

void PositiveEnumerator::certify() {
    // Claim: every index m >= E not yet queued has log|u_m| > F = E L + log scale - 20 log 2.
    // From |u_m| >= |lambda|^m (scale |cos x_m| - rho_m) it suffices that
    // |cos x_m| >= need(m) = 2^-20 e^{-(m-E)L} + rho_m / scale; indices failing this are
    // located by orbit scans (pulled forward and queued), and past m_B the cosine lower
    // bound from linear forms in logarithms exceeds need(m).
    const std::uint64_t E = next_index_;
    const double L = ev_->log_modulus();
    const double ls = ev_->log_scale();
    const double lw0 = -20 * 0.6931471805599453;
    auto log_need = [&](double m) {
        double t1 = lw0 - (m - static_cast<double>(E)) * L;
        double t2 = ev_->log_rho(static_cast<std::uint64_t>(std::min(m, 1.8e19))) - ls;
        double hi = std::max(t1, t2), lo = std::min(t1, t2);
        return hi + std::log1p(std::exp(lo - hi)) + 1e-9;
    };
    const auto& cb = ev_->cosine_bound();
    const double rate = std::min(L, -ev_->log_rho(1) + ev_->log_rho(0));
    double mB = std::max(static_cast<double>(E) + 64, 4 * cb.A.to_double() * 1.0001 / rate);
    while (log_need(mB) >= cb.log_lower(mB) - 1) mB *= 2;
    if (mB > 1.8e19) throw Error(Errc::precision_exhausted, "frontier tail bound exceeds 64-bit indices");

    const auto& dd = ev_->decomposition();
    const int P = 320;
    const mpfr_prec_t Wb = 448;
    Real pi = Real::pi(Wb);
    Real start = (Real::with_bits(Wb, dd.phi) - mul_2exp(pi, -1)) / pi;
    Real step = Real::with_bits(Wb, dd.theta) / pi;
    Real rad = Real::with_bits(Wb, dd.radius) * Real(2L);
    OrbitScan scan(start, step, rad + Real::two_pow(-P, Wb), rad + Real::two_pow(-P, Wb), P);

    const Int mBi(std::to_string(static_cast<unsigned long long>(mB)));
    Int a(static_cast<unsigned long>(E));
    Int len(64);
    while (a < mBi) {
        Int b = a + len;
        if (b > mBi) b = mBi;
        double ln = log_need(a.get_d());
        Real hw = ln >= 0 ? Real(1L) : mul_2exp(exp(Real::with_bits(64, Real(ln))), -1) * Real(1.000001);
        Int from = a;
        for (;;) {
            auto hit = scan.first_possible(hw, from, b);
            if (!hit) break;
            std::uint64_t m = hit->get_ui();
            if (!pulled_.count(m)) {
                TermKey k = ev_->key(m);
                double rel = (static_cast<double>(static_cast<std::int64_t>(m - E))) * L + k.offset - k.err;
                if (k.sign < 0 || rel <= ls + lw0) {
                    pulled_.insert(m);
                    ++stats_.exceptional;
                    if (k.sign >= 0) heap_.push(k);
                }
            }
            from = *hit + 1;
        }
        a = b;
        len *= 2;
    }
    frontier_ = ls + lw0;  // relative to E L
    stats_.frontier = static_cast<double>(E) * L + frontier_;
    ++stats_.certificates;
}

std::optional<EnumEntry> PositiveEnumerator::next() {
    const double L = ev_->log_modulus();
    for (;;) {
        while (!heap_.empty()) {
            const TermKey& top = heap_.top();
            double rel = top.sign == 0 ? -kInf
                                       : static_cast<double>(static_cast<std::int64_t>(top.n - next_index_)) * L +
                                             top.offset + top.err;
            if (next_index_ == 0 || !(rel < frontier_)) break;
            TermKey k = top;
            heap_.pop();
            if (have_last_ && ev_->compare(last_, k) == 0) {
                stats_.duplicates.push_back({last_.n, k.n});
                continue;
            }
            last_ = k;
            have_last_ = true;
            return EnumEntry{rank_++, k.n, k};
        }
        advance();
    }
}

std::vector<EnumEntry> enumerate_positive(const Recurrence& rec, std::size_t count, const EnumOptions& opt) {
    std::vector<EnumEntry> out;
    if (count == 0) return out;
    PositiveEnumerator en(rec, opt);
    while (out.size() < count) out.push_back(*en.next());
    return out;
}

SparsityResult sparsity_horizon(const Recurrence& rec, const Int& gap, std::uint64_t ranks, const EnumOptions& opt) {
    PositiveEnumerator en(rec, opt);
    const auto& ev = en.evaluator();
    SparsityResult res;
    std::optional<EnumEntry> prev;
    const double lg = gap > 0 ? log_abs(gap) : -kInf;
    for (std::uint64_t m = 0; m < ranks; ++m) {
        auto e = en.next();
        if (prev) {
            bool ok;
            const std::uint64_t a = prev->n, b = e->n;
            if (a <= ev.exact_limit() && b <= ev.exact_limit()) {
                ok = ev.exact(b) - ev.exact(a) >= gap;
            } else {
                // u_b - u_a = u_a (e^D - 1) with D = log u_b - log u_a
                double L = ev.log_modulus();
                double D = static_cast<double>(static_cast<std::int64_t>(b - a)) * L + e->key.offset - prev->key.offset;
                double Dlo = D - e->key.err - prev->key.err - 1e-12 * (std::fabs(D) + 1);
                double la = static_cast<double>(a) * L + prev->key.offset - prev->key.err - 1e-9;
                if (prev->key.sign == 0) ok = e->key.log_magnitude(L) - e->key.err > lg + 1e-9;
                else if (Dlo > 0 && la + std::log(std::expm1(Dlo)) > lg + 1e-9) ok = true;
                else ok = ev.exact_any(b) - ev.exact_any(a) >= gap;
            }
            if (!ok) res.M = m;
        }
        prev = e;
    }
    res.checked_through = ranks;
    return res;
}

}  // namespace dynpred
