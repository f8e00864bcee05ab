#include "dynpred/poly.hpp"

#include "dynpred/error.hpp"

#include <algorithm>

namespace dynpred {

const char* errc_name(Errc c) {
    switch (c) {
        case Errc::invalid_input: return "invalid-input";
        case Errc::non_minimal: return "non-minimal";
        case Errc::not_admissible: return "not-admissible";
        case Errc::precision_unreachable: return "precision-unreachable";
        case Errc::precision_exhausted: return "precision-exhausted";
        case Errc::construction_stalled: return "construction-stalled";
        case Errc::horizon_exhausted: return "horizon-exhausted";
        case Errc::epsilon_too_large: return "epsilon-too-large";
        case Errc::unsatisfiable_pattern: return "unsatisfiable-pattern";
        case Errc::letter_not_in_alphabet: return "letter-not-in-alphabet";
        case Errc::stabilization_budget_exhausted: return "stabilization-budget-exhausted";
        case Errc::not_disjunctive: return "not-disjunctive";
    }
    return "error";
}

namespace poly {

RatPoly to_rat(const IntPoly& p) {
    RatPoly r(p.size());
    for (size_t i = 0; i < p.size(); ++i) r[i] = p[i];
    return r;
}

IntPoly primitive(const IntPoly& p) {
    IntPoly r = p;
    trim(r);
    if (r.empty()) return r;
    Int g = 0;
    for (auto& c : r) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), c.get_mpz_t());
    if (r.back() < 0) g = -g;
    for (auto& c : r) c /= g;
    return r;
}

IntPoly primitive(const RatPoly& p) {
    Int l = 1;
    for (const auto& c : p) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), c.get_den_mpz_t());
    IntPoly r(p.size());
    for (size_t i = 0; i < p.size(); ++i) {
        Rat t = p[i] * l;
        r[i] = t.get_num();
    }
    return primitive(r);
}

IntPoly derivative(const IntPoly& p) {
    IntPoly r;
    for (size_t i = 1; i < p.size(); ++i) r.push_back(p[i] * static_cast<unsigned long>(i));
    trim(r);
    return r;
}

RatPoly derivative(const RatPoly& p) {
    RatPoly r;
    for (size_t i = 1; i < p.size(); ++i) r.push_back(p[i] * static_cast<unsigned long>(i));
    trim(r);
    return r;
}

RatPoly add(const RatPoly& a, const RatPoly& b) {
    RatPoly r(std::max(a.size(), b.size()));
    for (size_t i = 0; i < a.size(); ++i) r[i] += a[i];
    for (size_t i = 0; i < b.size(); ++i) r[i] += b[i];
    trim(r);
    return r;
}

RatPoly sub(const RatPoly& a, const RatPoly& b) {
    RatPoly r(std::max(a.size(), b.size()));
    for (size_t i = 0; i < a.size(); ++i) r[i] += a[i];
    for (size_t i = 0; i < b.size(); ++i) r[i] -= b[i];
    trim(r);
    return r;
}

RatPoly mul(const RatPoly& a, const RatPoly& b) {
    if (a.empty() || b.empty()) return {};
    RatPoly r(a.size() + b.size() - 1);
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
    trim(r);
    return r;
}

IntPoly mul(const IntPoly& a, const IntPoly& b) {
    if (a.empty() || b.empty()) return {};
    IntPoly r(a.size() + b.size() - 1);
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
    trim(r);
    return r;
}

void divmod(const RatPoly& a, const RatPoly& b, RatPoly& q, RatPoly& r) {
    int db = degree(b);
    if (db < 0) throw Error(Errc::invalid_input, "polynomial division by zero");
    r = a;
    trim(r);
    int dr = degree(r);
    q.assign(dr >= db ? static_cast<size_t>(dr - db + 1) : 0, Rat(0));
    const Rat& lb = b[static_cast<size_t>(db)];
    while (dr >= db) {
        Rat c = r[static_cast<size_t>(dr)] / lb;
        q[static_cast<size_t>(dr - db)] = c;
        for (int i = 0; i <= db; ++i) r[static_cast<size_t>(dr - db + i)] -= c * b[static_cast<size_t>(i)];
        trim(r);
        dr = degree(r);
    }
    trim(q);
}

RatPoly mod(const RatPoly& a, const RatPoly& b) {
    RatPoly q, r;
    divmod(a, b, q, r);
    return r;
}

RatPoly monic(const RatPoly& p) {
    RatPoly r = p;
    trim(r);
    if (r.empty()) return r;
    Rat l = r.back();
    for (auto& c : r) c /= l;
    return r;
}

RatPoly gcd(const RatPoly& a, const RatPoly& b) {
    RatPoly x = a, y = b;
    trim(x);
    trim(y);
    while (!y.empty()) {
        RatPoly r = mod(x, y);
        x = std::move(y);
        y = std::move(r);
    }
    return monic(x);
}

RatPoly inverse_mod(const RatPoly& a, const RatPoly& m) {
    // extended Euclid tracking the coefficient of a
    RatPoly r0 = m, r1 = mod(a, m);
    RatPoly s0, s1{Rat(1)};
    while (degree(r1) > 0) {
        RatPoly q, r;
        divmod(r0, r1, q, r);
        RatPoly s = sub(s0, mul(q, s1));
        r0 = std::move(r1);
        r1 = std::move(r);
        s0 = std::move(s1);
        s1 = std::move(s);
    }
    if (degree(r1) != 0) throw Error(Errc::invalid_input, "polynomial not invertible modulo m");
    RatPoly inv = s1;
    for (auto& c : inv) c /= r1[0];
    return mod(inv, m);
}

bool divides(const IntPoly& b, const IntPoly& a, IntPoly* q) {
    RatPoly qq, rr;
    divmod(to_rat(a), to_rat(b), qq, rr);
    if (!rr.empty()) return false;
    for (const auto& c : qq)
        if (c.get_den() != 1) return false;
    if (q) {
        q->clear();
        for (const auto& c : qq) q->push_back(c.get_num());
    }
    return true;
}

Rat eval(const RatPoly& p, const Rat& x) {
    Rat r = 0;
    for (size_t i = p.size(); i-- > 0;) r = r * x + p[i];
    return r;
}

Int eval(const IntPoly& p, const Int& x) {
    Int r = 0;
    for (size_t i = p.size(); i-- > 0;) r = r * x + p[i];
    return r;
}

Complex eval(const IntPoly& p, const Complex& x) {
    mpfr_prec_t b = x.bits();
    Complex r(Real(b, 0), Real(b, 0));
    for (size_t i = p.size(); i-- > 0;) {
        r = r * x;
        r.re += Real(p[i], b);
    }
    return r;
}

Complex eval(const RatPoly& p, const Complex& x) {
    mpfr_prec_t b = x.bits();
    Complex r(Real(b, 0), Real(b, 0));
    for (size_t i = p.size(); i-- > 0;) {
        r = r * x;
        r.re += Real(p[i], b);
    }
    return r;
}

std::vector<IntPoly> squarefree_decomposition(const IntPoly& p) {
    RatPoly f = monic(to_rat(p));
    std::vector<IntPoly> out;
    if (degree(f) <= 0) return out;
    RatPoly fp = derivative(f);
    RatPoly a = gcd(f, fp);
    RatPoly q, rem;
    divmod(f, a, q, rem);
    RatPoly b = q;
    divmod(fp, a, q, rem);
    RatPoly c = q;
    RatPoly dd = sub(c, derivative(b));
    while (degree(b) > 0) {
        RatPoly g = gcd(b, dd);
        out.push_back(primitive(g));
        divmod(b, g, q, rem);
        b = q;
        divmod(dd, g, q, rem);
        c = q;
        dd = sub(c, derivative(b));
    }
    while (!out.empty() && degree(out.back()) <= 0) out.pop_back();
    return out;
}

bool is_squarefree(const IntPoly& p) {
    RatPoly f = to_rat(p);
    return degree(gcd(f, derivative(f))) == 0;
}

RatPoly charpoly(const RatMatrix& a) {
    // Faddeev-LeVerrier; exact over Q
    size_t n = a.size();
    RatPoly c(n + 1);
    c[n] = 1;
    RatMatrix m(n, std::vector<Rat>(n));
    for (size_t k = 1; k <= n; ++k) {
        RatMatrix am(n, std::vector<Rat>(n));
        for (size_t i = 0; i < n; ++i)
            for (size_t j = 0; j < n; ++j) {
                Rat s = 0;
                for (size_t l = 0; l < n; ++l) s += a[i][l] * m[l][j];
                am[i][j] = s;
            }
        // M_k = A M_{k-1} + c_{n-k+1} I
        for (size_t i = 0; i < n; ++i) am[i][i] += c[n - k + 1];
        m = am;
        Rat tr = 0;
        for (size_t i = 0; i < n; ++i)
            for (size_t l = 0; l < n; ++l) tr += a[i][l] * m[l][i];
        c[n - k] = -tr / static_cast<unsigned long>(k);
    }
    return c;
}

Int determinant(IntMatrix a) {
    size_t n = a.size();
    if (n == 0) return 1;
    Int prev = 1;
    int sign = 1;
    for (size_t k = 0; k + 1 < n; ++k) {
        if (a[k][k] == 0) {
            size_t s = k + 1;
            while (s < n && a[s][k] == 0) ++s;
            if (s == n) return 0;
            std::swap(a[k], a[s]);
            sign = -sign;
        }
        for (size_t i = k + 1; i < n; ++i)
            for (size_t j = k + 1; j < n; ++j) {
                Int t = a[i][j] * a[k][k] - a[i][k] * a[k][j];
                mpz_divexact(t.get_mpz_t(), t.get_mpz_t(), prev.get_mpz_t());
                a[i][j] = t;
            }
        prev = a[k][k];
    }
    return sign * a[n - 1][n - 1];
}

Real log_mahler(const IntPoly& p, const std::vector<Complex>& roots) {
    mpfr_prec_t b = roots.empty() ? mp::default_bits() : roots.front().bits();
    Real s = log(abs(Real(p.back(), b)));
    for (const auto& z : roots) {
        Real m = abs(z);
        if (m > Real(1L)) s += log(m);
    }
    return s;
}

}  // namespace poly

}  // namespace dynpred
