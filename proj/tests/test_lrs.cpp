#include <doctest.h>

#include "common.hpp"
#include "dynpred/error.hpp"

#include <cmath>

using namespace dynpred;
using dynpred::testing::example;
using dynpred::testing::fibonacci;

namespace {

bool near(const Complex& z, double re, double im, double tol) {
    return std::fabs(z.re.to_double() - re) < tol && std::fabs(z.im.to_double() - im) < tol;
}

}  // namespace

TEST_CASE("eval_term on the running example") {
    auto rec = example();
    CHECK(eval_term(rec, 0) == 2);
    CHECK(eval_term(rec, 5) == -6);
    CHECK(eval_term(rec, 10) == 787);
    CHECK(eval_term(rec, 11) == 4690);
    const long expected[] = {10, 9, -6, -53, -150, -271, -206, 787, 4690, 15849, 41994, 92827, 169530, 230369, 106594};
    for (unsigned n = 3; n <= 17; ++n) CHECK(eval_term(rec, n) == expected[n - 3]);
}

TEST_CASE("eval_term constant sequence") {
    auto rec = Recurrence::make({1}, {7});
    CHECK(eval_term(rec, 100) == 7);
    CHECK(eval_term(rec, 1000000) == 7);
}

TEST_CASE("eval_term matrix-power path matches closed form") {
    auto rec = example();
    for (unsigned n : {4095u, 4096u, 5000u, 12345u}) CHECK(eval_term(rec, n) == testing::example_closed_form(n));
    auto fib = fibonacci();
    CHECK(eval_term(fib, 5000) == eval_prefix(fib, 5001).back());
}

TEST_CASE("recurrence validation") {
    CHECK_THROWS_AS(Recurrence::make({}, {}), Error);
    CHECK_THROWS_AS(Recurrence::make({1, 0}, {1, 2}), Error);
    CHECK_THROWS_AS(Recurrence::make({1, 1}, {1}), Error);
    // 1, 1, 1, ... also satisfies u_{n+1} = u_n
    try {
        Recurrence::make({3, -2}, {1, 1});
        FAIL("expected rejection");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::non_minimal);
    }
    CHECK_THROWS_AS(Recurrence::make({1}, {0}), Error);
}

TEST_CASE("char_poly") {
    CHECK(char_poly(example()) == IntPoly{-10, 13, -6, 1});
    CHECK(char_poly(Recurrence::make({2}, {1})) == IntPoly{-2, 1});
    CHECK(char_poly(fibonacci()) == IntPoly{-1, -1, 1});
}

TEST_CASE("isolate_roots") {
    auto roots = isolate_roots({-10, 13, -6, 1}, 128);
    REQUIRE(roots.size() == 3);
    CHECK(near(roots[0].center, 2, 1, 1e-30));
    CHECK(near(roots[1].center, 2, -1, 1e-30));
    CHECK(roots[2].exact);
    CHECK(roots[2].exact_value == 2);
    for (const auto& r : roots) CHECK(r.radius < Real::two_pow(-128, 256));

    auto one = isolate_roots({-1, 1}, 64);
    REQUIRE(one.size() == 1);
    CHECK(one[0].exact);
    CHECK(one[0].exact_value == 1);

    auto sq = isolate_roots({-2, 0, 1}, 50);
    REQUIRE(sq.size() == 2);
    for (const auto& r : sq) {
        CHECK(r.radius < Real::two_pow(-50, 128));
        CHECK(r.center.im.is_zero());
        // squaring the enclosure must land on 2
        Real s = r.center.re * r.center.re;
        CHECK(abs(s - Real(2L)) < Real::two_pow(-48, 128));
    }
    CHECK(sq[0].center.re.sign() * sq[1].center.re.sign() == -1);
}

TEST_CASE("isolate_roots with multiplicity") {
    // (X-1)^2 (X^2+1)
    IntPoly p = poly::mul(poly::mul(IntPoly{-1, 1}, IntPoly{-1, 1}), IntPoly{1, 0, 1});
    auto roots = isolate_roots(p, 64);
    REQUIRE(roots.size() == 3);
    int total = 0;
    for (const auto& r : roots) total += r.multiplicity;
    CHECK(total == 4);
}

TEST_CASE("classify") {
    auto c = classify(example());
    CHECK(c.simple);
    CHECK_FALSE(c.degenerate);
    CHECK(c.dominant_count == 2);
    CHECK(c.admissible);
    CHECK(near(c.roots[0].center, 2, 1, 1e-20));
    CHECK(near(c.roots[1].center, 2, -1, 1e-20));

    auto f = classify(fibonacci());
    CHECK(f.dominant_count == 1);
    CHECK_FALSE(f.admissible);

    auto g = classify(Recurrence::make({0, -1}, {1, 1}));
    CHECK(g.degenerate);
    CHECK(g.degenerate_order == 2);
    CHECK_FALSE(g.admissible);

    // (X^2 - X + 1) has primitive 6th roots of unity
    auto h = classify(Recurrence::make({1, -1}, {1, 2}));
    CHECK(h.degenerate);

    // repeated root
    auto k = classify(Recurrence::make({4, -4}, {1, 3}));
    CHECK_FALSE(k.simple);
    CHECK_FALSE(k.admissible);
}

TEST_CASE("classify is stable under precision") {
    std::vector<Recurrence> recs = {example(), fibonacci(), Recurrence::make({0, -1}, {1, 1}),
                                    Recurrence::make({2, -5}, {1, 0}), Recurrence::make({1, -3, 5, 2}, {0, 1, 0, 3})};
    for (const auto& rec : recs) {
        auto a = classify(rec, 64), b = classify(rec, 256), c = classify(rec, 1024);
        CHECK(a.simple == b.simple);
        CHECK(b.simple == c.simple);
        CHECK(a.degenerate == b.degenerate);
        CHECK(b.degenerate == c.degenerate);
        CHECK(a.dominant_count == b.dominant_count);
        CHECK(b.dominant_count == c.dominant_count);
        CHECK(a.admissible == c.admissible);
    }
}

TEST_CASE("dominant_decomposition of the running example") {
    auto dd = dominant_decomposition(example(), 256);
    CHECK(near(dd.lambda, 2, 1, 1e-60));
    CHECK(near(dd.alpha, 0.5, 0, 1e-60));
    CHECK(abs(dd.alpha_raw - Complex(Real(0.5), Real(0L))) < Real::two_pow(-200, 320));
    CHECK(abs(abs(dd.alpha) - Real(0.5)) < Real::two_pow(-200, 320));
    CHECK(abs(dd.phi) < Real::two_pow(-200, 320));
    CHECK(abs(dd.theta - atan(Real::with_bits(320, Real(0.5)))) < Real::two_pow(-200, 320));
    CHECK(abs(dd.modulus - sqrt(Real::with_bits(320, Real(5L)))) < Real::two_pow(-200, 320));
    // r_n = 2^n: (1, 2) is valid, ours may only be slightly looser
    CHECK(dd.r >= 1);
    CHECK(dd.R >= 2);
    CHECK(dd.r < Rat(1001, 1000));
    CHECK(dd.R < Rat(2001, 1000));
    REQUIRE(dd.nondominant.size() == 1);
    CHECK(near(dd.nondominant[0].coeff, 1, 0, 1e-60));
}

TEST_CASE("dominant_decomposition rejects inadmissible input") {
    try {
        dominant_decomposition(fibonacci(), 128);
        FAIL("expected not-admissible");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::not_admissible);
    }
    CHECK_THROWS_AS(dominant_decomposition(Recurrence::make({0, -1}, {1, 1}), 128), Error);
}

TEST_CASE("modular_sequence examples") {
    auto mc = modular_sequence(example(), 5);
    CHECK(mc.preperiod() == 1);
    CHECK(mc.period() == 4);
    CHECK(mc.prefix == std::vector<std::uint64_t>{2});
    // n = 1, 2, 3, 4 -> 4, 2, 0, 4
    CHECK(mc.cycle == std::vector<std::uint64_t>{4, 2, 0, 4});
    for (std::uint64_t n = 1; n < 200; ++n) {
        std::uint64_t want = n % 4 == 3 ? 0 : n % 4 == 2 ? 2 : 4;
        CHECK(mc.residue(n) == want);
    }
    auto c7 = modular_sequence(Recurrence::make({1}, {7}), 3);
    CHECK(c7.preperiod() == 0);
    CHECK(c7.cycle == std::vector<std::uint64_t>{1});
}

TEST_CASE("modular cycles reproduce exact residues") {
    auto rec = example();
    auto u = eval_prefix(rec, 10001);
    for (std::uint64_t m = 2; m <= 50; ++m) {
        auto mc = modular_sequence(rec, m);
        bool ok = true;
        for (std::uint64_t n = 0; n <= 10000 && ok; ++n) {
            Int r;
            mpz_fdiv_r_ui(r.get_mpz_t(), u[n].get_mpz_t(), m);
            ok = r.get_ui() == mc.residue(n);
        }
        CHECK_MESSAGE(ok, "modulus " << m);
        // minimality: no shorter period and no shorter preperiod fits the exact data
        for (std::uint64_t p = 1; p < mc.period(); ++p) {
            if (mc.period() % p) continue;
            bool fits = true;
            for (std::uint64_t n = mc.preperiod(); n < mc.preperiod() + 2 * mc.period() && fits; ++n)
                fits = mc.residue(n) == mc.residue(n + p);
            CHECK_FALSE(fits);
        }
        if (mc.preperiod() > 0) {
            std::uint64_t n = mc.preperiod() - 1;
            CHECK(mc.residue(n) != mc.residue(n + mc.period()));
        }
    }
}

TEST_CASE("exponential-polynomial identity") {
    auto rec = example();
    auto u = eval_prefix(rec, 2001);
    auto dd = dominant_decomposition(rec, 2600);
    bool ok = true;
    std::vector<Complex> pw(dd.roots.size(), Complex(Real::with_bits(2700, Real(1L))));
    for (unsigned n = 0; n <= 2000 && ok; ++n) {
        Complex s(Real(2700, 0), Real(2700, 0));
        for (size_t k = 0; k < dd.roots.size(); ++k) {
            s += dd.coeffs[k] * pw[k];
            pw[k] = pw[k] * dd.roots[k].center;
        }
        ok = s.re.round_int() == u[n] && abs(s.im) < Real(0.25);
        CHECK_MESSAGE(ok, "n = " << n);
    }
}

TEST_CASE("non-dominant part is bounded by r R^n") {
    auto rec = example();
    auto u = eval_prefix(rec, 10001);
    const int bits = 3600;
    auto dd = dominant_decomposition(rec, bits);
    bool ok = true;
    for (unsigned n = 0; n <= 10000 && ok; n += (n < 300 ? 1 : 7)) {
        // |u_n / |lambda|^n - scale cos(x_n)| <= r (R/|lambda|)^n
        Real ln = pow(dd.modulus, n);
        Real x = mul_int(dd.theta, Int(n)) + dd.phi;
        Real lhs = abs(Real(u[n], bits + 64) / ln - dd.scale * cos(x));
        Real rhs = Real(dd.r, bits + 64) * pow(Real(dd.R, bits + 64) / dd.modulus, n);
        ok = lhs <= rhs;
        CHECK_MESSAGE(ok, "n = " << n);
    }
}

TEST_CASE("both signs occur often") {
    auto u = eval_prefix(example(), 10000);
    int pos = 0, neg = 0;
    for (const auto& v : u) {
        if (v > 0) ++pos;
        if (v < 0) ++neg;
    }
    CHECK(pos >= 1000);
    CHECK(neg >= 1000);
}
