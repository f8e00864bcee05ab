#include <doctest.h>

#include "common.hpp"
#include "dynpred/error.hpp"
#include "dynpred/modular_profile.hpp"

#include <algorithm>

using namespace dynpred;
using testing::example;

TEST_CASE("residue profile modulo 5") {
    auto p = residue_profile(example(), 5);
    CHECK(p.S == std::vector<std::uint64_t>{0, 2, 4});
    CHECK(p.N == 0);
    CHECK(p.T == 4);
    CHECK(p.class_map.at(0) == std::vector<std::uint64_t>{3});
    CHECK(p.class_map.at(2) == std::vector<std::uint64_t>{2});
    CHECK(p.class_map.at(4) == std::vector<std::uint64_t>{0, 1});
}

TEST_CASE("residue word prefix modulo 5") {
    const std::vector<std::uint64_t> shown = {2, 4, 2, 4, 0, 2, 0, 4, 4, 2, 4, 0, 4, 4, 4, 2,
                                              0, 4, 2, 4, 2, 0, 4, 4, 4, 2, 0, 0, 4, 4, 2};
    CHECK(residue_word(example(), 5, 0, 31) == shown);
    CHECK(residue_word(example(), 5, 0, 0).empty());
    CHECK(residue_word(example(), 5, 10, 5) == std::vector<std::uint64_t>(shown.begin() + 10, shown.begin() + 15));
}

TEST_CASE("find_factor small cases") {
    CHECK(find_factor(example(), 5, {2}).rank == 0);
    auto h = find_factor(example(), 5, {4, 4});
    CHECK(h.rank == 7);
    CHECK(h.indices.size() == 2);
    CHECK(find_factor(example(), 5, {4, 4}, 8).rank > 8);
    try {
        find_factor(example(), 5, {1});
        FAIL("expected letter rejection");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::letter_not_in_alphabet);
    }
    try {
        find_factor(example(), 5, {0, 0, 0}, 0, 100000);
        FAIL("expected budget exhaustion");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::horizon_exhausted);
    }
}

TEST_CASE("stream residues match exact residues for M <= 25") {
    auto ents = enumerate_positive(example(), 10001);
    std::uint64_t top = 0;
    for (const auto& e : ents) top = std::max(top, e.n);
    auto u = eval_prefix(example(), top + 1);
    for (std::uint64_t M = 2; M <= 25; ++M) {
        auto p = residue_profile(example(), M);
        ResidueStream rs(example(), M);
        bool ok = true, inS = true;
        for (std::size_t m = 0; m <= 10000; ++m) {
            auto it = rs.next();
            Int r;
            mpz_fdiv_r_ui(r.get_mpz_t(), u[it.n].get_mpz_t(), M);
            ok = ok && it.n == ents[m].n && r.get_ui() == it.residue;
            if (m >= p.N) inS = inS && p.in_S(it.residue);
        }
        CHECK_MESSAGE(ok, "M = " << M);
        CHECK_MESSAGE(inS, "M = " << M);
        // N_M is tight: the rank just below it carries a letter outside S
        if (p.N > 0) CHECK_FALSE(p.in_S(residue_word(example(), M, p.N - 1, 1)[0]));
    }
}

TEST_CASE("class map holds on long stretches") {
    for (std::uint64_t M : {3, 5, 7, 12, 25}) {
        auto p = residue_profile(example(), M);
        // direct iteration mod M, independent of cycle detection
        std::vector<std::int64_t> r = {2, 4, 7};
        std::size_t need = 6000 + 1000 * p.T;
        while (r.size() < need) {
            std::size_t k = r.size();
            std::int64_t v = 6 * r[k - 1] - 13 * r[k - 2] + 10 * r[k - 3];
            v %= static_cast<std::int64_t>(M);
            if (v < 0) v += static_cast<std::int64_t>(M);
            r.push_back(v);
        }
        for (auto& x : r) x %= static_cast<std::int64_t>(M);
        for (const auto& [s, ts] : p.class_map)
            for (auto t : ts)
                for (std::uint64_t k = 5000 / p.T; k < 5000 / p.T + 1000; ++k)
                    CHECK(static_cast<std::uint64_t>(r[k * p.T + t]) == s);
    }
}

TEST_CASE("no 000 in the first million residues, and 4 outnumbers 2") {
    ResidueStream rs(example(), 5);
    int run = 0;
    bool seen = false;
    std::uint64_t c2 = 0, c4 = 0;
    for (int m = 0; m < 1000000; ++m) {
        auto it = rs.next();
        run = it.residue == 0 ? run + 1 : 0;
        if (run >= 3) seen = true;
        c2 += it.residue == 2;
        c4 += it.residue == 4;
    }
    CHECK_FALSE(seen);
    double ratio = static_cast<double>(c4) / static_cast<double>(c2);
    CHECK(ratio >= 1.5);
    CHECK(ratio <= 2.5);
}
