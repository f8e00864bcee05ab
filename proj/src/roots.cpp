#include "dynpred/roots.hpp"

#include "dynpred/error.hpp"

#include <algorithm>
#include <cmath>

namespace dynpred {

namespace {

// Aberth-Ehrlich simultaneous iteration at the precision of the seeds.
void aberth(const IntPoly& f, std::vector<Complex>& z, int max_iter) {
    IntPoly fp = poly::derivative(f);
    size_t m = z.size();
    mpfr_prec_t b = z.front().bits();
    Real tol = Real::two_pow(-(static_cast<long>(b) - 12), b);
    for (int it = 0; it < max_iter; ++it) {
        Real worst(b, 0);
        for (size_t k = 0; k < m; ++k) {
            Complex fv = poly::eval(f, z[k]);
            if (fv.re.is_zero() && fv.im.is_zero()) continue;
            Complex dv = poly::eval(fp, z[k]);
            Complex n = fv / dv;
            Complex s(Real(b, 0), Real(b, 0));
            for (size_t j = 0; j < m; ++j)
                if (j != k) {
                    Complex diff = z[k] - z[j];
                    if (diff.re.is_zero() && diff.im.is_zero()) continue;
                    Complex one(Real::with_bits(b, Real(1L)), Real(b, 0));
                    s += one / diff;
                }
            Complex one(Real::with_bits(b, Real(1L)), Real(b, 0));
            Complex w = n / (one - n * s);
            z[k] -= w;
            Real rel = abs(w) / max(Real::with_bits(b, Real(1L)), abs(z[k]));
            if (rel > worst) worst = rel;
        }
        if (worst < tol) break;
    }
}

std::vector<Complex> seeds(const IntPoly& f, mpfr_prec_t b) {
    size_t m = static_cast<size_t>(poly::degree(f));
    Real lc = abs(Real(f.back(), b));
    Real bound = Real::with_bits(b, Real(1L));
    for (size_t i = 0; i < m; ++i) {
        Real c = abs(Real(f[i], b)) / lc;
        if (c + Real(1L) > bound) bound = c + Real(1L);
    }
    // start inside the Cauchy disk, off any symmetry axis
    Real rad = bound * Real(0.7);
    std::vector<Complex> z;
    Real twopi = mul_2exp(Real::pi(b), 1);
    for (size_t k = 0; k < m; ++k) {
        Real ang = twopi * Real(static_cast<long>(k)) / Real(static_cast<long>(m)) + Real(0.4);
        z.push_back({rad * cos(ang), rad * sin(ang)});
    }
    return z;
}

struct Candidate {
    Complex z;
    Real rho;
    int mult;
    bool exact = false;
    Rat q;
};

bool try_factor(const IntPoly& f, int mult, mpfr_prec_t w, std::vector<Candidate>& out) {
    size_t m = static_cast<size_t>(poly::degree(f));
    if (m == 1) {
        Rat q(-f[0], f[1]);
        q.canonicalize();
        Candidate c{Complex(Real(q, w)), Real(w, 0), mult, true, q};
        out.push_back(c);
        return true;
    }
    std::vector<Complex> z = seeds(f, w);
    aberth(f, z, 400);
    Real lc(f.back(), w);
    Real slack = Real::two_pow(-(static_cast<long>(w) - 16), w);
    std::vector<Candidate> cs;
    for (size_t k = 0; k < m; ++k) {
        Complex fv = poly::eval(f, z[k]);
        Complex den(lc, Real(w, 0));
        for (size_t j = 0; j < m; ++j)
            if (j != k) den *= z[k] - z[j];
        if (den.re.is_zero() && den.im.is_zero()) return false;
        Real wk = abs(fv / den);
        // Gerschgorin on the Weierstrass matrix: radius (m-1)|W_k| around z_k - W_k
        Real rho = wk * Real(static_cast<long>(m)) * Real(1.001) +
                   slack * (Real(1L) + abs(z[k]));
        cs.push_back({z[k], rho, mult, false, Rat()});
    }
    for (size_t i = 0; i < m; ++i)
        for (size_t j = i + 1; j < m; ++j)
            if (abs(cs[i].z - cs[j].z) <= cs[i].rho + cs[j].rho) return false;
    for (size_t k = 0; k < m; ++k) {
        auto& c = cs[k];
        bool lone = abs(c.z.im) <= c.rho;
        for (size_t j = 0; j < m && lone; ++j)
            if (j != k && abs(c.z.conj() - cs[j].z) <= c.rho + cs[j].rho) lone = false;
        if (lone) {
            // the mirror disk meets no other disk, so the root equals its conjugate
            c.rho += abs(c.z.im);
            c.z.im = Real(w, 0);
            Int l = f.back();
            Rat q(mul_int(c.z.re, l).round_int(), l);
            q.canonicalize();
            if (poly::eval(poly::to_rat(f), q) == 0) {
                c.exact = true;
                c.q = q;
                c.z = Complex(Real(q, w));
                c.rho = Real(w, 0);
            }
        }
        out.push_back(c);
    }
    return true;
}

}  // namespace

std::vector<RootEnclosure> isolate_roots(const IntPoly& p, int bits) {
    if (poly::degree(p) < 1) throw Error(Errc::invalid_input, "root isolation needs degree >= 1");
    auto factors = poly::squarefree_decomposition(p);
    mpfr_prec_t w = std::max<mpfr_prec_t>(128, bits + 64);
    for (int attempt = 0; attempt < 6; ++attempt, w *= 2) {
        std::vector<Candidate> all;
        bool ok = true;
        for (size_t i = 0; i < factors.size() && ok; ++i)
            if (poly::degree(factors[i]) >= 1) ok = try_factor(factors[i], static_cast<int>(i) + 1, w, all);
        if (!ok) continue;
        for (size_t i = 0; i < all.size() && ok; ++i)
            for (size_t j = i + 1; j < all.size() && ok; ++j)
                if (abs(all[i].z - all[j].z) <= all[i].rho + all[j].rho) ok = false;
        Real target = Real::two_pow(-bits, w);
        for (const auto& c : all)
            if (c.rho > target) ok = false;
        if (!ok) continue;
        std::vector<RootEnclosure> out;
        for (auto& c : all) {
            RootEnclosure r;
            r.center = c.z;
            r.radius = c.rho;
            r.multiplicity = c.mult;
            r.exact = c.exact;
            r.exact_value = c.q;
            out.push_back(std::move(r));
        }
        std::sort(out.begin(), out.end(), [](const RootEnclosure& a, const RootEnclosure& b) {
            double ma = a.modulus().to_double(), mb = b.modulus().to_double();
            if (std::fabs(ma - mb) > 1e-12 * (1 + ma)) return ma > mb;
            if (a.center.im != b.center.im) return a.center.im > b.center.im;
            return a.center.re > b.center.re;
        });
        return out;
    }
    throw Error(Errc::precision_unreachable, "root isolation failed to separate roots");
}

}  // namespace dynpred
