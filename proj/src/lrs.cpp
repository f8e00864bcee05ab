#include "dynpred/lrs.hpp"

#include "dynpred/error.hpp"

#include <algorithm>
#include <unordered_map>

namespace dynpred {

namespace {

IntMatrix companion(const IntPoly& monic_poly) {
    size_t d = static_cast<size_t>(poly::degree(monic_poly));
    IntMatrix c(d, std::vector<Int>(d, Int(0)));
    for (size_t i = 0; i + 1 < d; ++i) c[i + 1][i] = 1;
    for (size_t i = 0; i < d; ++i) c[i][d - 1] = -monic_poly[i];
    return c;
}

IntMatrix matmul(const IntMatrix& a, const IntMatrix& b) {
    size_t n = a.size();
    IntMatrix r(n, std::vector<Int>(n, Int(0)));
    for (size_t i = 0; i < n; ++i)
        for (size_t l = 0; l < n; ++l) {
            if (a[i][l] == 0) continue;
            for (size_t j = 0; j < n; ++j) r[i][j] += a[i][l] * b[l][j];
        }
    return r;
}

bool conjugate_pair(const RootEnclosure& a, const RootEnclosure& b) {
    return abs(a.center - b.center.conj()) <= a.radius + b.radius;
}

// X^e mod F as coefficient vector of length d (F monic of degree d)
std::vector<Int> x_pow_mod(const Recurrence& rec, const Int& e) {
    size_t d = static_cast<size_t>(rec.order());
    auto reduce = [&](std::vector<Int> p) {
        // X^d = c_1 X^{d-1} + ... + c_d
        for (size_t k = p.size(); k-- > d;) {
            if (p[k] == 0) continue;
            for (size_t i = 1; i <= d; ++i) p[k - i] += p[k] * rec.coeffs[i - 1];
            p[k] = 0;
        }
        p.resize(d);
        return p;
    };
    auto mulmod = [&](const std::vector<Int>& a, const std::vector<Int>& b) {
        std::vector<Int> p(2 * d, Int(0));
        for (size_t i = 0; i < d; ++i)
            if (a[i] != 0)
                for (size_t j = 0; j < d; ++j) p[i + j] += a[i] * b[j];
        return reduce(std::move(p));
    };
    std::vector<Int> result(d, Int(0)), base(d, Int(0));
    if (d == 1) {
        result[0] = 1;
        base[0] = rec.coeffs[0];
    } else {
        result[0] = 1;
        base[1] = 1;
    }
    size_t nb = mpz_sizeinbase(e.get_mpz_t(), 2);
    for (size_t i = 0; i < nb; ++i) {
        if (mpz_tstbit(e.get_mpz_t(), i)) result = mulmod(result, base);
        if (i + 1 < nb) base = mulmod(base, base);
    }
    return result;
}

}  // namespace

Recurrence Recurrence::make(std::vector<Int> coeffs, std::vector<Int> initials) {
    if (coeffs.empty()) throw Error(Errc::invalid_input, "recurrence order must be at least 1");
    if (coeffs.size() != initials.size())
        throw Error(Errc::invalid_input, "need exactly one initial value per coefficient");
    if (coeffs.back() == 0) throw Error(Errc::invalid_input, "last coefficient must be nonzero");
    Recurrence rec{std::move(coeffs), std::move(initials)};
    if (!is_minimal(rec)) throw Error(Errc::non_minimal, "a shorter recurrence generates the same sequence");
    return rec;
}

bool is_minimal(const Recurrence& rec) {
    size_t d = static_cast<size_t>(rec.order());
    auto u = eval_prefix(rec, 2 * d - 1);
    IntMatrix h(d, std::vector<Int>(d));
    for (size_t i = 0; i < d; ++i)
        for (size_t j = 0; j < d; ++j) h[i][j] = u[i + j];
    return poly::determinant(h) != 0;
}

std::vector<Int> eval_prefix(const Recurrence& rec, std::size_t count) {
    size_t d = static_cast<size_t>(rec.order());
    std::vector<Int> u(rec.initials.begin(), rec.initials.end());
    u.reserve(std::max(count, d));
    while (u.size() < count) {
        size_t n = u.size();
        Int s = 0;
        for (size_t i = 1; i <= d; ++i) s += rec.coeffs[i - 1] * u[n - i];
        u.push_back(std::move(s));
    }
    u.resize(count);
    return u;
}

Int eval_term(const Recurrence& rec, std::uint64_t n) {
    if (n < 4096) return eval_prefix(rec, static_cast<size_t>(n) + 1).back();
    return eval_term(rec, Int(static_cast<unsigned long>(n)));
}

Int eval_term(const Recurrence& rec, const Int& n) {
    if (n < 0) throw Error(Errc::invalid_input, "negative index");
    if (n < 4096) return eval_prefix(rec, n.get_ui() + 1).back();
    auto a = x_pow_mod(rec, n);
    Int s = 0;
    for (size_t j = 0; j < a.size(); ++j) s += a[j] * rec.initials[j];
    return s;
}

IntPoly char_poly(const Recurrence& rec) {
    size_t d = static_cast<size_t>(rec.order());
    IntPoly f(d + 1);
    f[d] = 1;
    for (size_t i = 1; i <= d; ++i) f[d - i] = -rec.coeffs[i - 1];
    return f;
}

std::uint64_t euler_phi(std::uint64_t k) {
    std::uint64_t r = k;
    for (std::uint64_t p = 2; p * p <= k; ++p)
        if (k % p == 0) {
            while (k % p == 0) k /= p;
            r -= r / p;
        }
    if (k > 1) r -= r / k;
    return r;
}

Classification classify(const Recurrence& rec, int bits) {
    Classification c;
    IntPoly f = char_poly(rec);
    c.simple = poly::is_squarefree(f);

    // k-th power collisions among distinct roots show up as a repeated root of
    // the characteristic polynomial of C^k, C the companion of the radical
    RatPoly fr = poly::to_rat(f);
    RatPoly q, rem;
    poly::divmod(fr, poly::gcd(fr, poly::derivative(fr)), q, rem);
    IntPoly radical = poly::primitive(q);
    int m = poly::degree(radical);
    std::uint64_t dd = static_cast<std::uint64_t>(m) * static_cast<std::uint64_t>(m > 0 ? m - 1 : 0);
    if (m >= 2) {
        IntMatrix cm = companion(radical);
        IntMatrix pk = cm;
        for (std::uint64_t k = 2; k <= 2 * dd * dd + 2; ++k) {
            pk = matmul(pk, cm);
            if (euler_phi(k) > dd) continue;
            RatMatrix a(pk.size(), std::vector<Rat>(pk.size()));
            for (size_t i = 0; i < pk.size(); ++i)
                for (size_t j = 0; j < pk.size(); ++j) a[i][j] = pk[i][j];
            RatPoly fk = poly::charpoly(a);
            if (poly::degree(poly::gcd(fk, poly::derivative(fk))) > 0) {
                c.degenerate = true;
                c.degenerate_order = static_cast<int>(k);
                break;
            }
        }
    }

    for (int b = bits;; b *= 2) {
        c.roots = isolate_roots(f, b);
        const auto& r = c.roots;
        Real top = r.front().modulus();
        std::vector<size_t> cls;
        bool ambiguous = false;
        for (size_t i = 0; i < r.size(); ++i) {
            Real gap = abs(r[i].modulus() - top);
            if (gap <= r[i].radius + r.front().radius) {
                cls.push_back(i);
                if (i > 0 && !conjugate_pair(r[i], r.front()) && !(r[i].exact && r.front().exact)) ambiguous = true;
            }
        }
        c.dominant_count = static_cast<int>(cls.size());
        if (!ambiguous || b >= 4096) break;
    }

    c.admissible = c.simple && !c.degenerate && c.dominant_count == 2;
    if (!c.simple)
        c.reason = "characteristic polynomial has a repeated root";
    else if (c.degenerate)
        c.reason = "two roots have a ratio that is a root of unity of order " + std::to_string(c.degenerate_order);
    else if (c.dominant_count != 2)
        c.reason = "expected exactly two roots of maximal modulus, found " + std::to_string(c.dominant_count);
    return c;
}

IntPoly coefficient_numerator(const Recurrence& rec) {
    size_t d = static_cast<size_t>(rec.order());
    // G(X) = sum_j p_j X^{d-1-j},  p_j = u_j - sum_{i=1..j} c_i u_{j-i}
    IntPoly g(d);
    for (size_t j = 0; j < d; ++j) {
        Int p = rec.initials[j];
        for (size_t i = 1; i <= j; ++i) p -= rec.coeffs[i - 1] * rec.initials[j - i];
        g[d - 1 - j] = p;
    }
    return g;
}

DominantDecomposition dominant_decomposition(const Recurrence& rec, int bits) {
    Classification cl = classify(rec, std::min(bits, 256));
    if (!cl.admissible) throw Error(Errc::not_admissible, cl.reason);

    const int work = bits + 64;
    DominantDecomposition dd;
    dd.bits = bits;
    dd.radius = Real::two_pow(-bits, work);
    IntPoly f = char_poly(rec);
    IntPoly fp = poly::derivative(f);
    dd.roots = isolate_roots(f, work - 16);

    IntPoly g = coefficient_numerator(rec);
    for (auto& root : dd.roots) {
        Complex z = with_bits(work, root.center);
        Complex fpz = poly::eval(fp, z);
        if (abs(fpz) < Real::two_pow(-24, work))
            throw Error(Errc::precision_unreachable, "ill-conditioned root; increase precision");
        dd.coeffs.push_back(poly::eval(g, z) / fpz);
    }
    // the dominant pair occupies the first two slots, upper half-plane first
    size_t li = dd.roots[0].center.im.sign() > 0 ? 0 : 1;
    dd.lambda = with_bits(work, dd.roots[li].center);
    dd.alpha_raw = dd.coeffs[li];
    dd.scale = mul_2exp(abs(dd.alpha_raw), 1);
    dd.alpha = dd.alpha_raw / dd.scale;
    dd.modulus = abs(dd.lambda);
    dd.log_modulus = log(dd.modulus);
    dd.theta = arg(dd.lambda);
    dd.phi = arg(dd.alpha);

    Real rmax(work, 0), rsum(work, 0);
    for (size_t k = 2; k < dd.roots.size(); ++k) {
        dd.nondominant.push_back({with_bits(work, dd.roots[k].center), dd.coeffs[k]});
        Real mk = abs(dd.roots[k].center) + dd.roots[k].radius;
        if (mk > rmax) rmax = mk;
        rsum += abs(dd.coeffs[k]);
    }
    if (dd.nondominant.empty()) {
        dd.R = 1;
        dd.r = Rat(1, 1);
        mpq_div_2exp(dd.r.get_mpq_t(), dd.r.get_mpq_t(), 64);
    } else {
        Real gap = dd.modulus - rmax;
        Real pad = min(Real::two_pow(-40, work), gap / Real(4L));
        dd.R = rat_above(rmax + pad, 64);
        dd.r = rat_above(rsum * (Real(1L) + Real::two_pow(-40, work)) + Real::two_pow(-40, work), 64);
        if (Real(dd.R, work) >= dd.modulus) throw Error(Errc::precision_unreachable, "cannot separate dominant modulus");
    }
    return dd;
}

std::uint64_t ModularCycle::residue(std::uint64_t n) const {
    if (n < prefix.size()) return prefix[n];
    return cycle[(n - prefix.size()) % cycle.size()];
}

std::uint64_t ModularCycle::residue(const Int& n) const {
    if (n < Int(static_cast<unsigned long>(prefix.size()))) return prefix[n.get_ui()];
    Int t = n - static_cast<unsigned long>(prefix.size());
    Int r;
    mpz_fdiv_r_ui(r.get_mpz_t(), t.get_mpz_t(), static_cast<unsigned long>(cycle.size()));
    return cycle[r.get_ui()];
}

ModularCycle modular_sequence(const Recurrence& rec, std::uint64_t modulus, std::uint64_t step_budget) {
    if (modulus < 1) throw Error(Errc::invalid_input, "modulus must be positive");
    size_t d = static_cast<size_t>(rec.order());
    using u128 = unsigned __int128;
    std::vector<std::uint64_t> cs(d);
    for (size_t i = 0; i < d; ++i) {
        Int r;
        mpz_fdiv_r_ui(r.get_mpz_t(), rec.coeffs[i].get_mpz_t(), modulus);
        cs[i] = r.get_ui();
    }
    using State = std::vector<std::uint64_t>;
    State s0(d);
    for (size_t i = 0; i < d; ++i) {
        Int r;
        mpz_fdiv_r_ui(r.get_mpz_t(), rec.initials[i].get_mpz_t(), modulus);
        s0[i] = r.get_ui();
    }
    auto step = [&](State& s) {
        u128 acc = 0;
        for (size_t i = 1; i <= d; ++i) acc = (acc + static_cast<u128>(cs[i - 1]) * s[d - i]) % modulus;
        for (size_t i = 0; i + 1 < d; ++i) s[i] = s[i + 1];
        s[d - 1] = static_cast<std::uint64_t>(acc);
    };
    // Brent: period first, then the preperiod
    std::uint64_t power = 1, lam = 1, steps = 0;
    State tort = s0, hare = s0;
    step(hare);
    while (tort != hare) {
        if (power == lam) {
            tort = hare;
            power *= 2;
            lam = 0;
        }
        step(hare);
        ++lam;
        if (++steps > step_budget) throw Error(Errc::horizon_exhausted, "modular period exceeds the step budget");
    }
    tort = s0;
    hare = s0;
    for (std::uint64_t i = 0; i < lam; ++i) step(hare);
    std::uint64_t mu = 0;
    while (tort != hare) {
        step(tort);
        step(hare);
        ++mu;
    }
    ModularCycle mc;
    mc.modulus = modulus;
    State s = s0;
    for (std::uint64_t i = 0; i < mu; ++i) {
        mc.prefix.push_back(s[0]);
        step(s);
    }
    for (std::uint64_t i = 0; i < lam; ++i) {
        mc.cycle.push_back(s[0]);
        step(s);
    }
    return mc;
}

}  // namespace dynpred
