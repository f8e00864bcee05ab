#include "dynpred/interval_engine.hpp"

#include "dynpred/error.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <exception>
#include <memory>

namespace dynpred {

namespace {

mpfr_prec_t work_bits(const DominantDecomposition& dd, int bits) { return bits > 0 ? bits : dd.bits; }

Real two_pi(mpfr_prec_t w) { return mul_2exp(Real::pi(w), 1); }
Real half_pi(mpfr_prec_t w) { return mul_2exp(Real::pi(w), -1); }

long bitlen(const Int& z) { return static_cast<long>(mpz_sizeinbase(z.get_mpz_t(), 2)); }

// error radius on theta, |lambda| and the components of lambda
Real dd_err(const DominantDecomposition& dd, mpfr_prec_t w) {
    return Real::with_bits(w, dd.radius) * Real(2L) + Real::two_pow(-w + 4, w);
}
Real modulus_lo(const DominantDecomposition& dd, mpfr_prec_t w) { return Real::with_bits(w, dd.modulus) - dd_err(dd, w); }
Real modulus_hi(const DominantDecomposition& dd, mpfr_prec_t w) { return Real::with_bits(w, dd.modulus) + dd_err(dd, w); }

Real up(const Real& x, mpfr_prec_t w) { return x + abs(x) * Real::two_pow(-w + 8, w); }
Real down(const Real& x, mpfr_prec_t w) { return x - abs(x) * Real::two_pow(-w + 8, w); }

// lambda^d with a bound on the error of each component
struct Power {
    Complex z;
    Real err;
};

Power lambda_power(const DominantDecomposition& dd, long d, mpfr_prec_t w) {
    Complex lam = with_bits(w, dd.lambda);
    Real e1 = dd_err(dd, w) * Real(2L) / modulus_lo(dd, w);
    unsigned long a = static_cast<unsigned long>(d < 0 ? -d : d);
    if (Real(a) * e1 > Real(0.25))
        throw Error(Errc::precision_exhausted, "lambda too coarse for exponent " + std::to_string(d));
    Complex base = lam;
    if (d < 0) base = Complex(Real::with_bits(w, Real(1L))) / lam;
    Power p{pow(base, static_cast<std::uint64_t>(a)), Real(w, 0)};
    Real rel = Real(a) * e1 * Real(2L) +
               Real(8.0 * std::log2(static_cast<double>(a) + 1.0) + 16.0) * Real::two_pow(-w, w);
    p.err = up(rel * abs(p.z) * Real(1.01), w);
    return p;
}

// some arcs can meet; false only when certainly disjoint
bool may_meet(const CircleInterval& A, const CircleInterval& B) {
    if (A.empty || B.empty) return false;
    Real tp = two_pi(std::max(A.lo.bits(), B.lo.bits()) + 16);
    Real y = fmod_pos(B.lo - A.lo, tp);
    Real z = fmod_pos(A.lo - B.lo, tp);
    return !(y >= A.length() && z >= B.length());
}

double log2_modulus(const DominantDecomposition& dd) { return dd.log_modulus.to_double() / std::log(2.0); }

// largest d for which J_d endpoints are resolved at precision w
long explicit_limit(const DominantDecomposition& dd, mpfr_prec_t w) {
    return static_cast<long>(static_cast<double>(w - 96) / log2_modulus(dd));
}

// a certainly-containing arc for J_d(gamma, delta), d >= 1
CircleInterval outer_j(const DominantDecomposition& dd, const Int& d, const Real& gamma, const Real& delta) {
    mpfr_prec_t w = dd.bits;
    if (d <= explicit_limit(dd, w)) return j_interval(dd, {d.get_si(), gamma, delta}).outer();
    Anchor a = j_anchor(dd, d, delta);
    return CircleInterval::make(a.point - a.radius, a.point + a.radius);
}

// uncovered parts of I after removing the arcs in `cut`, as offsets from I.lo
std::vector<std::pair<Real, Real>> gaps(const CircleInterval& I, const std::vector<CircleInterval>& cut) {
    mpfr_prec_t w = I.lo.bits() + 16;
    Real tp = two_pi(w), len = I.length();
    std::vector<std::pair<Real, Real>> seg;
    for (const auto& B : cut) {
        if (B.empty) continue;
        Real s = fmod_pos(B.lo - I.lo, tp), bl = B.length();
        Real e = s + bl;
        if (s < len) seg.push_back({s, min(e, len)});
        if (e > tp) seg.push_back({Real(w, 0), min(e - tp, len)});
    }
    std::sort(seg.begin(), seg.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    std::vector<std::pair<Real, Real>> out;
    Real cur(w, 0);
    for (const auto& [s, e] : seg) {
        if (s > cur) out.push_back({cur, s});
        if (e > cur) cur = e;
    }
    if (cur < len) out.push_back({cur, len});
    return out;
}

// Calls f(d) for every d = r (mod T), lo <= d < hi, d >= 1, whose anchor may lie
// within `half` + anchor radius of c; f returns true to stop.
template <class F>
void anchor_scan(const DominantDecomposition& dd, const Real& c, const Real& half, const Real& delta, const Int& lo,
                 const Int& hi, std::uint64_t T, std::uint64_t r, F&& f) {
    const mpfr_prec_t w = dd.bits;
    const int P = static_cast<int>(w) - 64;
    const Real pi = Real::pi(w + 64);
    Real th = Real::with_bits(w + 64, dd.theta);
    Int Ti(static_cast<unsigned long>(T)), ri(static_cast<unsigned long>(r));
    Real start = (mul_int(th, ri) + Real::with_bits(w + 64, c) - mul_2exp(pi, -1)) / pi;
    Real step = mul_int(th, Ti) / pi;
    Real terr = dd_err(dd, w + 64) / pi;
    OrbitScan scan(start, step, terr * Real(Int(ri + 1), w) + Real::two_pow(-P, w), terr * Real(Ti, w) + Real::two_pow(-P, w), P);

    auto k_of = [&](const Int& d) {  // least k with r + k T >= d
        Int k = d - ri;
        if (k <= 0) return Int(0);
        return Int((k + Ti - 1) / Ti);
    };
    Int a = lo < 1 ? Int(1) : lo;
    Int len = 64;
    while (a < hi) {
        Int b = a + len;
        if (b > hi) b = hi;
        Anchor an = j_anchor(dd, a, delta);
        Real hw = (half + an.radius) / pi * Real(1.000001);
        Int from = k_of(a), to = k_of(b);
        while (from < to) {
            auto k = scan.first_possible(hw, from, to);
            if (!k) break;
            Int d = ri + *k * Ti;
            if (d >= 1 && f(d)) return;
            from = *k + 1;
        }
        a = b;
        if (len < a) len *= 2;
    }
}

struct Iv {
    Real lo, hi;
};

// positive [A_lo, A_hi] times v
Iv scale_iv(const Real& A_lo, const Real& A_hi, const Iv& v, mpfr_prec_t w) {
    Iv r;
    r.lo = down(v.lo.sign() >= 0 ? A_lo * v.lo : A_hi * v.lo, w);
    r.hi = up(v.hi.sign() >= 0 ? A_hi * v.hi : A_lo * v.hi, w);
    return r;
}

Real exp_clamped(double lg, mpfr_prec_t w) {
    // clamped from below: the result stays an upper bound
    return exp(Real::with_bits(w, Real(std::max(lg, -1e8))));
}

}  // namespace

CircleInterval JInterval::inner() const {
    if (arc.empty) return arc;
    return CircleInterval::make(arc.lo + radius, arc.hi - radius);
}

CircleInterval JInterval::outer() const {
    if (arc.empty) return arc;
    return CircleInterval::make(arc.lo - radius, arc.hi + radius);
}

JInterval j_interval(const DominantDecomposition& dd, const JSpec& spec, int bits) {
    const mpfr_prec_t w = work_bits(dd, bits);
    JInterval J;
    J.d = spec.d;
    J.gamma = spec.gamma;
    J.delta = spec.delta;
    J.radius = Real(w, 0);
    if (!(spec.gamma < spec.delta)) return J;
    if (spec.d == 0) {
        if (spec.gamma < Real(1L) && Real(1L) < spec.delta) J.arc = CircleInterval::make(-half_pi(w), half_pi(w));
        return J;
    }
    Power p = lambda_power(dd, spec.d, w);
    if (abs(p.z.im) <= mul_2exp(p.err, 1))
        throw Error(Errc::precision_exhausted, "Im lambda^d not separated from zero");
    Real rad(w, 0);
    auto edge = [&](const Real& eta) {
        Real num = p.z.re - Real::with_bits(w, eta);
        Real x = atan(num / p.z.im);
        Real dist = sqrt(num * num + p.z.im * p.z.im) - mul_2exp(p.err, 1);
        if (dist.sign() <= 0) throw Error(Errc::precision_exhausted, "J endpoint not resolved");
        Real r = up(p.err * Real(1.5) / dist, w) + Real::two_pow(-w + 3, w);
        if (r > rad) rad = r;
        return x;
    };
    Real xd = edge(spec.delta), xg = edge(spec.gamma);
    J.arc = p.z.im.sign() > 0 ? CircleInterval::make(xd, xg) : CircleInterval::make(xg, xd);
    J.radius = rad;
    return J;
}

LengthBounds j_length_bounds(const DominantDecomposition& dd, const JSpec& spec) {
    if (spec.d < 1) throw Error(Errc::invalid_input, "length bounds need d >= 1");
    if (!(spec.gamma < spec.delta) || spec.gamma.sign() < 0) throw Error(Errc::invalid_input, "need 0 <= gamma < delta");
    const mpfr_prec_t w = dd.bits;
    Power p = lambda_power(dd, spec.d, w);
    Real g = Real::with_bits(w, spec.gamma), dl = Real::with_bits(w, spec.delta), width = dl - g;
    Real M_lo = abs(p.z.im) - p.err, M_hi = abs(p.z.im) + p.err;
    if (M_lo.sign() <= 0) throw Error(Errc::precision_exhausted, "Im lambda^d not separated from zero");
    Real R_lo = p.z.re - p.err, R_hi = p.z.re + p.err;

    // |J| = int_gamma^delta |M| / ((R - eta)^2 + M^2) d eta
    Real near = max(Real(w, 0), max(g - R_hi, R_lo - dl));
    Real far = max(abs(R_lo - g), max(abs(R_hi - g), max(abs(R_lo - dl), abs(R_hi - dl))));
    LengthBounds lb;
    lb.upper = up(width * M_hi / (near * near + M_lo * M_lo), w);
    lb.lower = down(width * M_lo / (far * far + M_hi * M_hi), w);

    Real m = modulus_lo(dd, w);
    if (dl < m) {
        Real q = Real(1L) - dl / m;
        lb.C5 = up(Real(1L) / (q * q), w);
        Real uni = up(lb.C5 * width / pow(m, static_cast<unsigned long>(spec.d)), w);
        if (uni < lb.upper) lb.upper = uni;
    } else {
        lb.C5 = Real(w, 0);  // no uniform constant outside delta < |lambda|
    }
    return lb;
}

Anchor j_anchor(const DominantDecomposition& dd, const Int& d, const Real& delta_max) {
    const mpfr_prec_t w = dd.bits;
    const mpfr_prec_t W = w + bitlen(d) + 8;
    Anchor a;
    a.d = d.fits_slong_p() ? d.get_si() : 0;
    Real pi = Real::pi(W), hp = mul_2exp(pi, -1);
    Real x = hp - mul_int(Real::with_bits(W, dd.theta), d);
    Real y = fmod_pos(x + hp, pi) - hp;
    a.point = Real::with_bits(w, y);
    Int ad = abs(d) + 1;
    Real err = dd_err(dd, w) * Real(ad, w) + Real::two_pow(-w + 4, w);
    if (d < 1) {
        a.radius = Real::pi(w) + err;
        return a;
    }
    // J_d(0, s) spans from the anchor to the delta = s edge; its width is at most
    // s |lambda|^d / (|lambda|^d - s)^2 with s = sqrt|lambda|
    Real s = up(sqrt(modulus_hi(dd, w)), w);
    if (delta_max > s) s = Real::with_bits(w, delta_max);
    Real lg = log(s) - Real(d, w) * log(modulus_lo(dd, w));
    Real q = exp(lg);
    if (q >= Real(0.5)) {
        a.radius = Real::pi(w) + err;
        return a;
    }
    Real one_m = Real(1L) - q;
    a.radius = up(q / (one_m * one_m), w) + err;
    return a;
}

Anchor j_anchor(const DominantDecomposition& dd, long d, const Real& delta_max) { return j_anchor(dd, Int(d), delta_max); }

Real tail_bound(const DominantDecomposition& dd, long D, const Real& delta, int explicit_terms) {
    if (D < 1) throw Error(Errc::invalid_input, "tail bound needs D >= 1");
    const mpfr_prec_t w = dd.bits;
    Real one = Real::with_bits(w, Real(1L));
    if (!(one < delta)) return Real(w, 0);
    Real sum(w, 0);
    Real m = modulus_lo(dd, w);
    long lim = explicit_limit(dd, w);
    long d = D;
    for (int k = 0; k < explicit_terms && d <= lim; ++k, ++d) {
        JInterval J = j_interval(dd, {d, one, delta});
        sum += J.length() + mul_2exp(J.radius, 1);
    }
    // geometric remainder from E = d: C5(E) (delta - 1) |lambda|^-E / (1 - 1/|lambda|)
    Real lgE = -Real(d) * log(m);
    Real qE = exp(lgE) * Real::with_bits(w, delta);
    if (qE >= Real(0.5)) throw Error(Errc::precision_exhausted, "tail bound starts below the geometric regime");
    Real c5 = Real(1L) / ((Real(1L) - qE) * (Real(1L) - qE));
    Real rest = c5 * (Real::with_bits(w, delta) - one) * exp(lgE) / (Real(1L) - Real(1L) / m);
    if (rest.is_zero()) rest = Real::two_pow(-100000000L, w);
    return up(sum + rest, w);
}

namespace {

Real tail_bound_big(const DominantDecomposition& dd, const Int& D, const Real& delta) {
    if (D.fits_slong_p()) return tail_bound(dd, D.get_si(), delta);
    const mpfr_prec_t w = dd.bits;
    Real m = modulus_lo(dd, w);
    Real lgE = -Real(D, w) * log(m);
    Real e = exp(lgE);
    Real qE = e * Real::with_bits(w, delta);
    Real c5 = Real(1L) / ((Real(1L) - qE) * (Real(1L) - qE));
    Real rest = c5 * (Real::with_bits(w, delta) - Real(1L)) * e / (Real(1L) - Real(1L) / m);
    if (rest.is_zero()) rest = Real::two_pow(-100000000L, w);
    return up(rest, w);
}

Int tail_horizon_len(const DominantDecomposition& dd, const Real& len, const Real& delta) {
    if (tail_bound(dd, 1, delta) < len) return 1;
    Int lo = 1, hi = 2;
    while (!(tail_bound_big(dd, hi, delta) < len)) {
        lo = hi;
        hi *= 2;
    }
    while (hi - lo > 1) {
        Int mid = (lo + hi) / 2;
        if (tail_bound_big(dd, mid, delta) < len) hi = mid;
        else lo = mid;
    }
    return hi;
}

}  // namespace

CircleInterval base_interval(const DominantDecomposition& dd) {
    const mpfr_prec_t w = dd.bits;
    Real a = acos(Real(1L) / modulus_lo(dd, w)) - Real::two_pow(-w + 4, w);
    return CircleInterval::make(-a, a);
}

long tail_horizon(const DominantDecomposition& dd, const CircleInterval& I, const Real& delta) {
    return tail_horizon_len(dd, I.length(), delta).get_si();
}

std::vector<Int> blockers(const DominantDecomposition& dd, const CircleInterval& I, const Real& delta,
                          const std::vector<long>& skip, const Int& lo, const Int& hi) {
    std::vector<Int> out;
    if (I.empty) return out;
    const mpfr_prec_t w = dd.bits;
    Real one = Real::with_bits(w, Real(1L));
    auto skipped = [&](const Int& d) {
        return d.fits_slong_p() && std::find(skip.begin(), skip.end(), d.get_si()) != skip.end();
    };
    Int a = lo < 1 ? Int(1) : lo;
    // direct range, in parallel with an ordered reduction
    Int lim = std::min(hi, Int(explicit_limit(dd, w) + 1));
    if (a < lim) {
        long s = a.get_si(), e = lim.get_si();
        std::vector<char> hit(static_cast<std::size_t>(e - s), 0);
        std::exception_ptr err;
#pragma omp parallel for schedule(dynamic, 8)
        for (long d = s; d < e; ++d) {
            try {
                if (may_meet(I, j_interval(dd, {d, one, delta}).outer())) hit[static_cast<std::size_t>(d - s)] = 1;
            } catch (...) {
#pragma omp critical
                err = std::current_exception();
            }
        }
        if (err) std::rethrow_exception(err);
        for (long d = s; d < e; ++d)
            if (hit[static_cast<std::size_t>(d - s)] && !skipped(Int(d))) out.push_back(Int(d));
        a = lim;
    }
    if (a < hi) {
        anchor_scan(dd, I.center(), mul_2exp(I.length(), -1), delta, a, hi, 1, 0, [&](const Int& d) {
            if (!skipped(d) && may_meet(I, outer_j(dd, d, one, delta))) out.push_back(d);
            return false;
        });
    }
    return out;
}

std::vector<long> blockers(const DominantDecomposition& dd, const CircleInterval& I, const Real& delta,
                           const std::vector<long>& skip, long lo, long hi) {
    std::vector<long> out;
    for (const auto& d : blockers(dd, I, delta, skip, Int(lo), Int(hi))) out.push_back(d.get_si());
    return out;
}

namespace {

std::vector<Real> delta_schedule(const DominantDecomposition& dd, int ell, const FrameOptions& opt) {
    const mpfr_prec_t w = dd.bits;
    std::vector<Real> del;
    if (ell < 2) return del;
    if (!opt.deltas.empty()) {
        if (static_cast<int>(opt.deltas.size()) != ell - 1)
            throw Error(Errc::invalid_input, "need exactly l - 1 ratio bounds");
        for (const auto& x : opt.deltas) del.push_back(Real::with_bits(w, x));
    } else {
        for (int j = 2; j <= ell; ++j)
            del.push_back(exp(dd.log_modulus * Real(static_cast<long>(j - 1)) / Real(static_cast<long>(2 * ell))));
    }
    Real m = modulus_lo(dd, w);
    Real prev = Real::with_bits(w, Real(1L));
    for (const auto& x : del) {
        if (!(prev < x)) throw Error(Errc::invalid_input, "ratio bounds must increase from 1");
        prev = x;
    }
    if (!(prev < m)) throw Error(Errc::invalid_input, "ratio bounds must stay below |lambda|");
    return del;
}

CircleInterval sub_arc(const CircleInterval& I, const Real& s, const Real& e) {
    return CircleInterval::make(I.lo + s, I.lo + e);
}

}  // namespace

PatternFrame select_pattern_frame(const DominantDecomposition& dd, int ell, std::uint64_t T,
                                  const std::vector<std::uint64_t>& t, const FrameOptions& opt) {
    if (ell < 1 || static_cast<int>(t.size()) != ell || T == 0)
        throw Error(Errc::invalid_input, "pattern needs l >= 1 residues and T >= 1");
    if (dd.bits < opt.bits)
        throw Error(Errc::construction_stalled, "stage 1: context precision " + std::to_string(dd.bits) +
                                                    " below the requested " + std::to_string(opt.bits));
    const mpfr_prec_t w = dd.bits;
    PatternFrame f;
    f.ell = ell;
    f.T = T;
    f.t = t;
    f.bits = static_cast<int>(w);
    f.delta = delta_schedule(dd, ell, opt);

    CircleInterval I = base_interval(dd);
    Real one = Real::with_bits(w, Real(1L));
    if (ell >= 2) {
        // base case: the whole tail must fit inside I_1
        int shrinks = 0;
        while (!(tail_bound(dd, 1, f.delta.back()) < I.length())) {
            if (++shrinks > 40) throw Error(Errc::construction_stalled, "stage 1: base tail inequality fails");
            for (auto& x : f.delta) x = sqrt(x);
        }
    }
    f.stages.push_back({0, I, ell >= 2 ? tail_horizon(dd, I, f.delta.back()) : 1, {}});

    for (int j = 2; j <= ell; ++j) {
        const Real& dlo = j == 2 ? one : f.delta[static_cast<std::size_t>(j - 3)];
        const Real& dhi = f.delta[static_cast<std::size_t>(j - 2)];
        const Real& dl = f.delta.back();
        FrameStage st;
        st.candidates.push_back(0);
        for (long d : blockers(dd, I, dl, {}, 1L, opt.candidate_horizon + 1)) st.candidates.push_back(d);

        std::uint64_t r = ((t[static_cast<std::size_t>(j - 1)] % T) + T - (t[0] % T)) % T;
        long found = 0;
        CircleInterval next;
        anchor_scan(dd, I.center(), mul_2exp(I.length(), -1), dhi, Int(1), Int(opt.b_budget + 1), T, r, [&](const Int& db) {
            long b = db.get_si();
            if (std::find(f.b.begin(), f.b.end(), b) != f.b.end()) return false;
            JInterval Jb = j_interval(dd, {b, dlo, dhi});
            if (!I.contains_arc(Jb.outer())) return false;
            found = b;
            next = Jb.inner();
            return true;
        });
        if (found == 0)
            throw Error(Errc::construction_stalled, "stage " + std::to_string(j) + ": no admissible b within budget");
        f.b.push_back(found);
        I = next;
        st.b = found;
        st.I = I;
        st.D = tail_horizon(dd, I, dl);
        f.stages.push_back(std::move(st));
    }

    if (ell == 1) {
        f.I = I;
        f.D = 1;
        f.tail = Real(w, 0);
        return f;
    }
    const Real& dl = f.delta.back();
    for (int iter = 0;; ++iter) {
        if (iter > 64) throw Error(Errc::construction_stalled, "final stage: exclusion does not settle");
        Int D = tail_horizon_len(dd, I.length(), dl);
        auto bl = blockers(dd, I, dl, f.b, Int(1), D);
        if (bl.empty()) {
            f.I = I;
            f.D = D;
            f.tail = tail_bound_big(dd, D, dl);
            return f;
        }
        std::vector<CircleInterval> cut;
        for (const auto& d : bl) cut.push_back(outer_j(dd, d, one, dl));
        auto g = gaps(I, cut);
        if (g.empty()) throw Error(Errc::construction_stalled, "final stage: blockers cover the interval");
        auto best = std::max_element(g.begin(), g.end(), [](const auto& x, const auto& y) {
            return x.second - x.first < y.second - y.first;
        });
        Real m = (best->second - best->first) * Real::two_pow(-40, w);
        I = sub_arc(I, best->first + m, best->second - m);
    }
}

FrameCheck check_frame(const DominantDecomposition& dd, const PatternFrame& f) {
    FrameCheck c;
    const mpfr_prec_t w = dd.bits;
    Real one = Real::with_bits(w, Real(1L));
    c.residues = f.T > 0 && static_cast<int>(f.t.size()) == f.ell && static_cast<int>(f.b.size()) == f.ell - 1;
    for (std::size_t j = 0; c.residues && j < f.b.size(); ++j) {
        long b = f.b[j];
        std::int64_t want = static_cast<std::int64_t>(f.t[j + 1] % f.T) - static_cast<std::int64_t>(f.t[0] % f.T);
        std::int64_t diff = (b - want) % static_cast<std::int64_t>(f.T);
        c.residues = b >= 1 && diff == 0 && std::count(f.b.begin(), f.b.end(), b) == 1;
    }
    c.base = !f.I.empty && base_interval(dd).contains_arc(f.I);
    c.containment = !f.I.empty;
    for (std::size_t j = 0; c.containment && j < f.b.size(); ++j) {
        const Real& dlo = j == 0 ? one : f.delta[j - 1];
        c.containment = j_interval(dd, {f.b[j], dlo, f.delta[j]}).inner().contains_arc(f.I);
    }
    if (f.ell == 1) {
        c.exclusion = c.tail = true;
        return c;
    }
    c.exclusion = blockers(dd, f.I, f.delta.back(), f.b, Int(1), f.D).empty();
    c.tail = tail_bound_big(dd, f.D, f.delta.back()) < f.I.length();
    return c;
}

PatternFrame shrink_subinterval(const DominantDecomposition& dd, const PatternFrame& frame, const Real& eps) {
    const mpfr_prec_t w = dd.bits;
    if (!(eps.sign() > 0)) throw Error(Errc::invalid_input, "epsilon must be positive");
    Real len = frame.I.length();
    if (!(eps < len)) throw Error(Errc::epsilon_too_large, "epsilon not below |I|");
    Real one = Real::with_bits(w, Real(1L));
    Real e = Real::with_bits(w, eps);
    Int k = sqrt(Real(1L) / e).floor_int() + 1;  // D' > eps^{-1/2}
    Int Dp = std::max(k, frame.D);
    std::vector<CircleInterval> cut;
    if (frame.ell >= 2) {
        const Real& dl = frame.delta.back();
        Dp = std::max(Dp, tail_horizon_len(dd, e, dl));
        for (const auto& d : blockers(dd, frame.I, dl, frame.b, frame.D, Dp)) cut.push_back(outer_j(dd, d, one, dl));
    }
    Real need = e + mul_2exp(e, -30);
    for (const auto& [s, t] : gaps(frame.I, cut)) {
        if (t - s < need) continue;
        PatternFrame f = frame;
        Real m = mul_2exp(t - s - e, -1);
        f.I = sub_arc(frame.I, s + m, s + m + e);
        f.D = Dp;
        if (frame.ell >= 2) {
            f.tail = tail_bound_big(dd, Dp, frame.delta.back());
            if (!(f.tail < f.I.length())) throw Error(Errc::epsilon_too_large, "tail does not fit below epsilon");
        }
        return f;
    }
    throw Error(Errc::epsilon_too_large, "no gap of length epsilon between the blocking intervals");
}

namespace {

VerificationReport verify_stream(const Recurrence& rec, const std::vector<Int>& n, const WitnessOptions& opt) {
    VerificationReport rep;
    rep.method = "stream";
    auto ev = std::make_shared<TermEvaluator>(rec, opt.enumeration);
    rep.bits = 1024;
    std::vector<TermKey> k;
    for (const auto& x : n) k.push_back(ev->key(x.get_ui()));
    if (k[0].sign <= 0) {
        rep.counterexample = n[0];
        rep.detail = "first value is not positive";
        return rep;
    }
    for (std::size_t j = 1; j < n.size(); ++j)
        if (ev->compare(k[j - 1], k[j]) >= 0) {
            rep.counterexample = n[j];
            rep.detail = "values not strictly increasing";
            return rep;
        }
    PositiveEnumerator en(ev, opt.enumeration);
    const std::uint64_t n1 = n[0].get_ui();
    for (;;) {
        auto e = en.next();
        if (!e) throw Error(Errc::horizon_exhausted, "enumeration ended");
        if (e->n == n1) {
            rep.ranks.push_back(e->rank);
            break;
        }
        if (ev->compare(e->key, k[0]) > 0) throw Error(Errc::horizon_exhausted, "stream passed the first value");
    }
    for (std::size_t j = 1; j < n.size(); ++j) {
        auto e = en.next();
        if (e->n != n[j].get_ui()) {
            rep.counterexample = Int(static_cast<unsigned long>(e->n));
            rep.detail = "value strictly between the pattern values";
            return rep;
        }
        rep.ranks.push_back(e->rank);
    }
    rep.ok = rep.complete = true;
    return rep;
}

VerificationReport verify_analytic(const DominantDecomposition& dd, const Recurrence& rec, const std::vector<Int>& n,
                                   const WitnessOptions& opt) {
    VerificationReport rep;
    rep.method = "analytic";
    const mpfr_prec_t w = dd.bits;
    rep.bits = static_cast<int>(w);
    const Int& n1 = n[0];
    const mpfr_prec_t W = w + bitlen(n1) + 16;
    const Real pi = Real::pi(W);
    Real th = Real::with_bits(W, dd.theta), ph = Real::with_bits(W, dd.phi);
    Real terr = dd_err(dd, w);
    Real x = mul_int(th, n1) + ph;
    Real xerr = terr * Real(Int(n1 + 2), w) + Real::two_pow(-w + 4, w);
    Real m_lo = modulus_lo(dd, w), m_hi = modulus_hi(dd, w);

    const double L = dd.log_modulus.to_double();
    const double log_sr = std::log(Real(dd.r, 64).to_double() + 1e-300) - std::log(dd.scale.to_double());
    const double log_q = dd.R.get_d() > 0 ? std::log(dd.R.get_d()) - L : -1e300;
    auto log_eps = [&](const Int& m) { return log_sr + m.get_d() * log_q + 1e-9; };

    // enclosure of u_{n1+d} / (scale |lambda|^{n1})
    auto value = [&](long d) {
        Int m = n1 + d;
        Real c = cos(x + mul_int(th, Int(d)));
        Real e = xerr + terr * Real(std::labs(d) + 1) + Real::two_pow(-w + 4, w) + exp_clamped(log_eps(m), w);
        Real A_lo, A_hi;
        if (d >= 0) {
            A_lo = pow(m_lo, static_cast<unsigned long>(d));
            A_hi = pow(m_hi, static_cast<unsigned long>(d));
        } else {
            A_lo = Real(1L) / pow(m_hi, static_cast<unsigned long>(-d));
            A_hi = Real(1L) / pow(m_lo, static_cast<unsigned long>(-d));
        }
        return scale_iv(A_lo, A_hi, Iv{c - e, c + e}, w);
    };

    std::vector<long> b;
    for (std::size_t j = 1; j < n.size(); ++j) {
        Int bj = n[j] - n1;
        if (!bj.fits_slong_p() || bj == 0) throw Error(Errc::invalid_input, "pattern offsets out of range");
        b.push_back(bj.get_si());
    }
    Iv v0 = value(0);
    if (v0.hi.sign() <= 0) {
        rep.counterexample = n1;
        rep.detail = "first value is not positive";
        return rep;
    }
    if (v0.lo.sign() <= 0) throw Error(Errc::precision_exhausted, "sign of the first value undecided");
    Iv prev = v0, last = v0;
    for (std::size_t j = 0; j < b.size(); ++j) {
        Iv v = value(b[j]);
        if (!(prev.hi < v.lo)) {
            if (prev.lo >= v.hi) {
                rep.counterexample = n[j + 1];
                rep.detail = "values not strictly increasing";
                return rep;
            }
            throw Error(Errc::precision_exhausted, "order of the pattern values undecided");
        }
        prev = v;
    }
    last = prev;

    auto is_b = [&](long d) { return std::find(b.begin(), b.end(), d) != b.end(); };
    // true when certainly outside (v0, last); records a counterexample when certainly inside
    auto check = [&](long d) {
        Iv v = value(d);
        if (v.hi <= v0.lo || v.lo >= last.hi) return true;
        if (v.lo > v0.hi && v.hi < last.lo) {
            rep.counterexample = n1 + d;
            rep.detail = "value strictly between the pattern values";
            return false;
        }
        throw Error(Errc::precision_exhausted, "position of u_{n+" + std::to_string(d) + "} undecided");
    };

    // earlier indices: |u_m| <= (scale + r) |lambda|^m, so m <= n1 - K is below u_{n1}
    double log_bound = std::log1p(std::exp(log_sr));
    double lv0 = log(v0.lo).to_double();
    long K = static_cast<long>(std::ceil((log_bound - lv0) / L)) + 2;
    if (K < 1) K = 1;
    rep.k_direct = K;
    for (long d = -1; d >= -K && n1 + d >= 0; --d)
        if (!check(d)) return rep;

    rep.d_direct = opt.d_direct;
    for (long d = 1; d <= opt.d_direct; ++d)
        if (!is_b(d) && !check(d)) return rep;

    // between means |cos x_{n1+d}| < need(d) = |lambda|^-d last.hi + eps_{n1+d}
    const double llast = log(last.hi).to_double();
    auto log_need = [&](const Int& d) {
        double t1 = llast - d.get_d() * L, t2 = log_eps(n1 + d);
        double hi = std::max(t1, t2), lo = std::min(t1, t2);
        return hi + std::log1p(std::exp(lo - hi)) + 1e-9;
    };
    CosineBound cb = cosine_lower_bound(rec, dd);
    const double A = cb.A.to_double();
    const double rate = std::min(L, -log_q);
    Int d0 = std::max<long>(opt.d_direct + 1, 64);
    for (;;) {
        double m = Int(n1 + d0).get_d();
        if (log_need(d0) < cb.log_lower(m) - 1 && rate * m > A * 1.0001) break;
        d0 *= 2;
    }
    rep.d_scan = d0;

    const int P = static_cast<int>(w) - 64;
    Real start = (x - mul_2exp(pi, -1)) / pi;
    Real step = th / pi;
    OrbitScan scan(start, step, xerr / pi + Real::two_pow(-P, w), terr / pi + Real::two_pow(-P, w), P);
    Int a = opt.d_direct + 1;
    Int len = 64;
    while (a < d0) {
        Int e = a + len;
        if (e > d0) e = d0;
        double ln = log_need(a);
        if (ln >= 0) throw Error(Errc::precision_exhausted, "scan window too wide");
        Real hw = mul_2exp(exp(Real::with_bits(64, Real(ln))), -1) * Real(1.000001);
        Int from = a;
        while (from < e) {
            auto k = scan.first_possible(hw, from, e);
            if (!k) break;
            if (!k->fits_slong_p()) throw Error(Errc::precision_exhausted, "candidate offset beyond direct evaluation");
            long d = k->get_si();
            if (!is_b(d) && !check(d)) return rep;
            from = *k + 1;
        }
        a = e;
        if (len < a) len *= 2;
    }
    rep.ok = rep.complete = true;
    return rep;
}

}  // namespace

VerificationReport verify_witness(const DominantDecomposition& dd, const Recurrence& rec, const std::vector<Int>& n,
                                  const WitnessOptions& opt) {
    if (n.empty()) throw Error(Errc::invalid_input, "empty witness");
    Int top = 0;
    for (const auto& x : n) {
        if (x < 0) throw Error(Errc::invalid_input, "negative index");
        top = std::max(top, x);
    }
    for (std::size_t i = 0; i < n.size(); ++i)
        for (std::size_t j = i + 1; j < n.size(); ++j)
            if (n[i] == n[j]) throw Error(Errc::invalid_input, "repeated index");
    if (top <= opt.stream_limit) return verify_stream(rec, n, opt);
    return verify_analytic(dd, rec, n, opt);
}

PatternWitness find_witness(const DominantDecomposition& dd, const Recurrence& rec, int ell, std::uint64_t T,
                            const std::vector<std::uint64_t>& t, const Int& N, WitnessMode mode,
                            const WitnessOptions& opt) {
    if (ell < 1 || static_cast<int>(t.size()) != ell || T == 0)
        throw Error(Errc::invalid_input, "pattern needs l >= 1 residues and T >= 1");
    PatternWitness pw;
    pw.mode = mode;
    if (mode == WitnessMode::empirical) {
        // consecutive stream entries whose indices fall in the prescribed classes
        PositiveEnumerator en(rec, opt.enumeration);
        std::deque<EnumEntry> win;
        for (std::uint64_t r = 0; r < opt.rank_budget; ++r) {
            auto e = en.next();
            if (!e) break;
            win.push_back(*e);
            if (static_cast<int>(win.size()) > ell) win.pop_front();
            if (static_cast<int>(win.size()) < ell) continue;
            const std::uint64_t n1 = win[0].n;
            if (Int(static_cast<unsigned long>(n1)) < N) continue;
            bool ok = true;
            for (int j = 0; j < ell && ok; ++j) {
                ok = win[static_cast<std::size_t>(j)].n % T == t[static_cast<std::size_t>(j)] % T;
                if (j > 0) ok = ok && win[static_cast<std::size_t>(j)].n > n1;
            }
            if (!ok) continue;
            for (const auto& x : win) {
                pw.n.push_back(Int(static_cast<unsigned long>(x.n)));
                pw.record.ranks.push_back(x.rank);
            }
            for (int j = 1; j < ell; ++j) pw.b.push_back(static_cast<long>(win[static_cast<std::size_t>(j)].n - n1));
            pw.record.method = "stream";
            pw.record.ok = pw.record.complete = true;
            pw.record.detail = "adjacent in the certified enumeration";
            return pw;
        }
        throw Error(Errc::horizon_exhausted, "no occurrence within " + std::to_string(opt.rank_budget) + " ranks");
    }

    PatternFrame f = select_pattern_frame(dd, ell, T, t, opt.frame);
    Real rad = dd_err(dd, dd.bits);
    Int from = N;
    for (int k = 0; k < opt.tries; ++k) {
        Int n1 = rotation_hit(dd.theta, dd.phi, rad, f.I, T, t[0] % T, from);
        std::vector<Int> ns{n1};
        for (long b : f.b) ns.push_back(n1 + b);
        VerificationReport rep = verify_witness(dd, rec, ns, opt);
        if (rep.ok) {
            pw.n = ns;
            pw.b = f.b;
            pw.record = rep;
            return pw;
        }
        from = n1 + 1;
    }
    throw Error(Errc::construction_stalled, "no verified hit among " + std::to_string(opt.tries) + " candidates");
}

std::vector<BoundConstant> interval_constants(const DominantDecomposition& dd, const Recurrence& rec,
                                              const Real& delta) {
    const mpfr_prec_t w = dd.bits;
    Real m = modulus_lo(dd, w);
    std::vector<BoundConstant> out;
    Real d = Real::with_bits(w, delta);
    if (d < m) {
        Real q = Real(1L) - d / m;
        out.push_back({"C5", up(Real(1L) / (q * q), w), "rigorous",
                       "|J_d(g,e)| <= C5 (e-g)/|lambda|^d with C5 = (1 - delta/|lambda|)^-2"});
    }
    out.push_back({"C6", Real(w, 0), "rigorous",
                   "per instance: |J_d(g,e)| >= (e-g) |Im lambda^d| / max_eta |lambda^d - eta|^2"});
    Real s = sqrt(modulus_hi(dd, w));
    Real q = Real(1L) - s / m;
    out.push_back({"C8", up(s / (q * q), w), "rigorous",
                   "J_d lies within C8 |lambda|^-d of -d theta + pi/2, C8 = sqrt|lambda| (1 - 1/sqrt|lambda|)^-2"});
    CosineBound cb = cosine_lower_bound(rec, dd);
    Real c = cb.A * (Real(1L) + (Real(1L) + log(Real(static_cast<long>(cb.M)))) / log(Real(2L)));
    out.push_back({"c1", c, "rigorous", "exponent from the Matveev constant of the cosine linear form"});
    return out;
}

}  // namespace dynpred
