#include "dynpred/diophantine.hpp"

#include "dynpred/error.hpp"

#include <algorithm>
#include <cmath>

namespace dynpred {

namespace {

Int fdiv_r(const Int& a, const Int& m) {
    Int r;
    mpz_fdiv_r(r.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t());
    return r;
}

Int cdiv(const Int& a, const Int& b) {
    Int q;
    mpz_cdiv_q(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return q;
}

// least k >= 0 with l <= a k mod m <= r, where 0 <= l <= r < m
std::optional<Int> first_hit(Int a, const Int& m, const Int& l, const Int& r) {
    if (l == 0) return Int(0);
    a = fdiv_r(a, m);
    if (a == 0) return std::nullopt;
    // reflect so that a <= m/2; keeps the descent Euclid-like
    if (2 * a > m) return first_hit(m - a, m, m - r, m - l);
    Int k = cdiv(l, a);
    if (a * k <= r) return k;
    // [l, r] holds no multiple of a, so a k - m y lands in it iff (-m y) mod a does
    auto y = first_hit(a - fdiv_r(m, a), a, fdiv_r(l, a), fdiv_r(r, a));
    if (!y) return std::nullopt;
    return cdiv(l + m * *y, a);
}

Real two_pi(mpfr_prec_t bits) { return mul_2exp(Real::pi(bits), 1); }

// conjugation classes of an isolated root list: singletons for real roots, pairs otherwise
std::vector<std::vector<size_t>> conjugate_classes(const std::vector<RootEnclosure>& roots) {
    std::vector<std::vector<size_t>> out;
    std::vector<bool> used(roots.size(), false);
    for (size_t i = 0; i < roots.size(); ++i) {
        if (used[i]) continue;
        used[i] = true;
        if (roots[i].center.im.is_zero() || abs(roots[i].center.im) <= roots[i].radius) {
            out.push_back({i});
            continue;
        }
        size_t best = roots.size();
        Real bd;
        for (size_t j = 0; j < roots.size(); ++j) {
            if (used[j]) continue;
            Real dist = abs(roots[j].center - roots[i].center.conj());
            if (best == roots.size() || dist < bd) {
                best = j;
                bd = dist;
            }
        }
        if (best == roots.size()) throw Error(Errc::precision_unreachable, "unpaired complex root");
        used[best] = true;
        out.push_back({i, best});
    }
    return out;
}

}  // namespace

CircleInterval CircleInterval::make(Real lo, Real hi) {
    CircleInterval c;
    if (hi <= lo) return c;
    c.lo = std::move(lo);
    c.hi = std::move(hi);
    c.empty = false;
    return c;
}

Real CircleInterval::length() const {
    if (empty) return Real(0L);
    Real l = hi - lo;
    Real tp = two_pi(l.bits());
    return l > tp ? tp : l;
}

Real CircleInterval::center() const { return mul_2exp(lo + hi, -1); }

int CircleInterval::contains(const Real& x, const Real& err) const {
    if (empty) return 0;
    mpfr_prec_t b = std::max(x.bits(), lo.bits());
    Real tp = two_pi(b + 16);
    Real y = fmod_pos(x - lo, tp);
    Real len = length();
    if (y > err && y + err < len) return 1;
    if (y > len + err && y + err < tp) return 0;
    return -1;
}

bool CircleInterval::contains_arc(const CircleInterval& o) const {
    if (o.empty) return true;
    if (empty) return false;
    Real tp = two_pi(std::max(lo.bits(), o.lo.bits()) + 16);
    Real y = fmod_pos(o.lo - lo, tp);
    return y + o.length() <= length();
}

AlgebraicNumber AlgebraicNumber::rational(const Rat& q, int bits) {
    AlgebraicNumber a;
    a.minpoly = poly::primitive(IntPoly{-q.get_num(), q.get_den()});
    a.root.center = Complex(Real(q, bits));
    a.root.radius = Real(bits, 0);
    a.root.exact = true;
    a.root.exact_value = q;
    a.conjugates = {a.root.center};
    return a;
}

AlgebraicNumber minimal_polynomial_of_root(const IntPoly& p, const std::vector<RootEnclosure>& roots,
                                           size_t index) {
    if (index >= roots.size()) throw Error(Errc::invalid_input, "root index out of range");
    auto classes = conjugate_classes(roots);
    size_t own = 0;
    for (size_t c = 0; c < classes.size(); ++c)
        for (size_t i : classes[c])
            if (i == index) own = c;
    std::vector<size_t> others;
    for (size_t c = 0; c < classes.size(); ++c)
        if (c != own) others.push_back(c);
    if (others.size() > 20) throw Error(Errc::invalid_input, "too many conjugate classes for factor search");

    IntPoly target = p;
    auto sf = poly::squarefree_decomposition(p);
    if (!sf.empty()) {
        target = IntPoly{1};
        for (const auto& f : sf) target = poly::mul(target, f);
    }
    mpfr_prec_t bits = roots[index].center.bits();
    // subsets of the other classes ordered by the degree they add
    std::vector<std::pair<int, std::uint32_t>> masks;
    for (std::uint32_t m = 0; m < (1u << others.size()); ++m) {
        int deg = 0;
        for (size_t j = 0; j < others.size(); ++j)
            if (m >> j & 1u) deg += static_cast<int>(classes[others[j]].size());
        masks.push_back({deg, m});
    }
    std::stable_sort(masks.begin(), masks.end());
    for (const auto& [deg, mask] : masks) {
        std::vector<size_t> pick = classes[own];
        for (size_t j = 0; j < others.size(); ++j)
            if (mask >> j & 1u) pick.insert(pick.end(), classes[others[j]].begin(), classes[others[j]].end());
        std::vector<Complex> prod{Complex(Real::with_bits(bits, Real(1L)))};
        for (size_t i : pick) {
            std::vector<Complex> next(prod.size() + 1, Complex(Real(bits, 0), Real(bits, 0)));
            for (size_t k = 0; k < prod.size(); ++k) {
                next[k + 1] += prod[k];
                next[k] -= prod[k] * roots[i].center;
            }
            prod = std::move(next);
        }
        IntPoly q;
        bool ok = true;
        Real tol = Real::two_pow(-static_cast<long>(bits) / 3, bits);
        for (const auto& c : prod) {
            Int z = c.re.round_int();
            if (abs(c.re - Real(z, bits)) > tol || abs(c.im) > tol) {
                ok = false;
                break;
            }
            q.push_back(z);
        }
        if (!ok || !poly::divides(q, target)) continue;
        AlgebraicNumber a;
        a.minpoly = poly::primitive(q);
        a.root = roots[index];
        for (size_t i : pick) a.conjugates.push_back(roots[i].center);
        return a;
    }
    throw Error(Errc::precision_unreachable, "no integer factor found for the root");
}

Real height_from_poly(const IntPoly& p, const std::vector<Complex>& roots) {
    Real lm = poly::log_mahler(p, roots);
    return lm / Real(static_cast<long>(roots.size()));
}

Real weil_height(const AlgebraicNumber& a) { return height_from_poly(a.minpoly, a.conjugates); }

Real height_arith_bound(HeightOp op, const std::vector<Real>& heights, long exponent) {
    Real s(0L);
    for (const auto& h : heights) s += h;
    switch (op) {
        case HeightOp::sum: return s + log(Real(static_cast<long>(heights.size())));
        case HeightOp::product: return s;
        case HeightOp::power: return s * Real(std::labs(exponent));
        case HeightOp::inverse: return s;
    }
    return s;
}

Real matveev_constant(const MatveevInstance& inst) {
    const long M = static_cast<long>(inst.heights.size());
    if (M == 0 || inst.abs_logs.size() != inst.heights.size())
        throw Error(Errc::invalid_input, "malformed linear form");
    mp::PrecisionScope ps(128);
    Real D(static_cast<long>(inst.D));
    Real a = Real(3L) * pow(Real(30L), static_cast<unsigned long>(M + 4)) *
             exp(Real(5.5) * log(Real(M + 1))) * D * D * (Real(1L) + log(D));
    for (long j = 0; j < M; ++j) {
        Real hp = max(D * inst.heights[static_cast<size_t>(j)], inst.abs_logs[static_cast<size_t>(j)]);
        a *= max(hp, Real(0.16));
    }
    return a;
}

Real matveev_log_lower(const MatveevInstance& inst) {
    Real a = matveev_constant(inst);
    Real mb = Real(static_cast<long>(inst.heights.size())) * Real(inst.B, 128);
    return -(a * (Real(1L) + log(mb)));
}

Real matveev_exponent(const MatveevInstance& inst) {
    Real a = matveev_constant(inst);
    Real lm = log(Real(static_cast<long>(inst.heights.size())));
    return a * (Real(1L) + (Real(1L) + lm) / log(Real(2L)));
}

double CosineBound::log_lower(double m) const {
    double a = A.to_double() * (1 + 1e-12);
    return -(a * (1 + std::log(M * std::max(m, 1.0)))) - std::log(2.0) - 1e-9;
}

CosineBound cosine_lower_bound(const Recurrence& rec, const DominantDecomposition& dd) {
    IntPoly f = char_poly(rec);
    size_t li = dd.roots[0].center.im.sign() > 0 ? 0 : 1;
    AlgebraicNumber lam = minimal_polynomial_of_root(f, dd.roots, li);
    const int k = lam.degree();
    CosineBound cb;
    cb.h_lambda = weil_height(lam);
    cb.D = k == 2 ? 2 : k * (k - 1);

    // alpha = G(lambda) / F'(lambda) as an element of Q[X]/(m_lambda)
    RatPoly ml = poly::to_rat(lam.minpoly);
    RatPoly g = poly::mod(poly::to_rat(coefficient_numerator(rec)), ml);
    RatPoly fp = poly::mod(poly::to_rat(poly::derivative(f)), ml);
    RatPoly ap = poly::mod(poly::mul(g, poly::inverse_mod(fp, ml)), ml);
    cb.alpha_rational = poly::degree(ap) <= 0;
    if (cb.alpha_rational) {
        Rat q = ap.empty() ? Rat(0) : ap[0];
        Int num = abs(q.get_num()), den = abs(q.get_den());
        Int hi = num > den ? num : den;
        cb.h_alpha = log(Real(hi, 128));
    } else {
        size_t n = static_cast<size_t>(k);
        RatMatrix mat(n, std::vector<Rat>(n));
        RatPoly col = ap;
        for (size_t j = 0; j < n; ++j) {
            for (size_t i = 0; i < n; ++i) mat[i][j] = i < col.size() ? col[i] : Rat(0);
            col = poly::mod(poly::mul(col, RatPoly{0, 1}), ml);
        }
        IntPoly chi = poly::primitive(poly::charpoly(mat));
        std::vector<Complex> vals;
        for (const auto& z : lam.conjugates) vals.push_back(poly::eval(ap, z));
        cb.h_alpha = height_from_poly(chi, vals);
    }

    MatveevInstance inst;
    inst.D = cb.D;
    Real pi = Real::pi(128);
    inst.heights.push_back(mul_2exp(cb.h_lambda, 1));  // lambda / conj(lambda)
    inst.abs_logs.push_back(abs(reduce_angle(mul_2exp(Real::with_bits(128, dd.theta), 1))));
    inst.heights.push_back(Real(0L));  // -1
    inst.abs_logs.push_back(pi);
    if (!cb.alpha_rational) {
        inst.heights.push_back(mul_2exp(cb.h_alpha, 1));  // alpha / conj(alpha)
        inst.abs_logs.push_back(abs(reduce_angle(mul_2exp(Real::with_bits(128, dd.phi), 1))));
    }
    cb.M = static_cast<int>(inst.heights.size());
    cb.A = matveev_constant(inst);
    return cb;
}

Real circle_distance(const Real& x) { return abs(reduce_angle(x)); }

std::optional<Int> first_hit_mod(const Int& a, const Int& c, const Int& m, const Int& lo, const Int& hi) {
    if (m <= 0) throw Error(Errc::invalid_input, "modulus must be positive");
    Int count = fdiv_r(hi - lo, m) + 1;
    Int L = fdiv_r(lo - c, m);
    Int end = L + count - 1;
    Int aa = fdiv_r(a, m);
    if (end < m) return first_hit(aa, m, L, end);
    auto k1 = first_hit(aa, m, L, m - 1);
    auto k2 = first_hit(aa, m, Int(0), end - m);
    if (!k1) return k2;
    if (!k2) return k1;
    return *k1 < *k2 ? k1 : k2;
}

OrbitScan::OrbitScan(const Real& start, const Real& step, const Real& start_rad, const Real& step_rad, int bits)
    : start_(start), step_(step), start_rad_(start_rad), step_rad_(step_rad), bits_(bits) {}

std::optional<Int> OrbitScan::search(const Real& lo, const Real& hi, const Int& from, const Int& to,
                                     bool expand) const {
    if (from >= to) return std::nullopt;
    const mpfr_prec_t w = bits_ + 64;
    Int m = 1;
    mpz_mul_2exp(m.get_mpz_t(), m.get_mpz_t(), static_cast<mp_bitcnt_t>(bits_));
    Int A = fdiv_r(mul_2exp(Real::with_bits(w, step_), bits_).round_int(), m);
    Int S0 = mul_2exp(Real::with_bits(w, start_), bits_).round_int();
    Int C = fdiv_r(S0 + from * A, m);

    Real ulp = Real::two_pow(-bits_, w);
    Real E = Real(to, w) * (ulp + step_rad_) + ulp + start_rad_;
    Real l = expand ? lo - E : lo + E;
    Real h = expand ? hi + E : hi - E;
    Int L, H;
    if (expand) {
        if (h - l >= Real(1L)) return from;
        L = floor(mul_2exp(l, bits_)).floor_int();
        H = mul_2exp(h, bits_).floor_int() + 1;
    } else {
        if (l >= h) return std::nullopt;
        L = mul_2exp(l, bits_).floor_int() + 1;
        H = -((-mul_2exp(h, bits_)).floor_int()) - 1;
        if (H < L) return std::nullopt;
    }
    auto k = first_hit_mod(A, C, m, fdiv_r(L, m), fdiv_r(H, m));
    if (!k || from + *k >= to) return std::nullopt;
    return from + *k;
}

std::optional<Int> OrbitScan::first_possible(const Real& halfwidth, const Int& from, const Int& to) const {
    return search(-halfwidth, halfwidth, from, to, true);
}

std::optional<Int> OrbitScan::first_certain(const Real& lo, const Real& hi, const Int& from, const Int& to) const {
    return search(lo, hi, from, to, false);
}

Int rotation_hit(const Real& theta, const Real& phi, const Real& radius, const CircleInterval& I, std::uint64_t T,
                 std::uint64_t t, const Int& n_min) {
    if (I.empty) throw Error(Errc::invalid_input, "empty target interval");
    if (T == 0) throw Error(Errc::invalid_input, "modulus must be positive");
    const int P = static_cast<int>(theta.bits());
    Int n0 = n_min < 0 ? Int(0) : n_min;
    {
        Int r = fdiv_r(Int(static_cast<unsigned long>(t)) - n0, Int(static_cast<unsigned long>(T)));
        n0 += r;
    }
    const mpfr_prec_t W = P + static_cast<mpfr_prec_t>(mpz_sizeinbase(n0.get_mpz_t(), 2)) + 96;
    Real tp = two_pi(W);
    Real th = Real::with_bits(W, theta), ph = Real::with_bits(W, phi);
    Real start = (mul_int(th, n0) + ph) / tp;
    Real step = mul_int(th, Int(static_cast<unsigned long>(T))) / tp;
    Real rad = Real::with_bits(W, radius) / tp * Real(1.0001);
    Real start_rad = Real(Int(n0 + 1), W) * rad + Real::two_pow(-P, W);
    Real step_rad = Real(static_cast<unsigned long>(T)) * rad + Real::two_pow(-P, W);
    OrbitScan scan(start, step, start_rad, step_rad, P);

    Real lo = I.lo / tp, hi = I.hi / tp;
    Real len = hi - lo;
    // past k_to the expansion would exceed a quarter of the arc
    Real per = Real::two_pow(-P, W) + step_rad;
    Int k_to = (len / mul_2exp(per, 2)).floor_int();
    if (k_to < 1) throw Error(Errc::precision_exhausted, "angle precision too coarse for the target arc");

    Int from = 0;
    for (;;) {
        auto k = scan.search(lo, hi, from, k_to, true);
        if (!k) throw Error(Errc::precision_exhausted, "no decidable hit within the precision horizon");
        Int n = n0 + *k * static_cast<unsigned long>(T);
        Real x = mul_int(th, n) + ph;
        Real err = Real(Int(n + 1), W) * Real::with_bits(W, radius) + Real::two_pow(-P, W);
        int in = I.contains(x, err);
        if (in == 1) return n;
        if (in == -1) throw Error(Errc::precision_exhausted, "hit too close to the arc boundary");
        from = *k + 1;
    }
}

}  // namespace dynpred
