#include <doctest.h>

#include "common.hpp"
#include "omega_oracle.hpp"
#include "dynpred/error.hpp"
#include "dynpred/modular_profile.hpp"
#include "dynpred/omega_automata.hpp"

#include <algorithm>
#include <random>
#include <set>

using namespace dynpred;
using testing::example;
using testing::doubling_simulation;
using testing::names;
using testing::random_automaton;

namespace {

StateSet as_set(const std::set<State>& s) { return StateSet(s.begin(), s.end()); }

// states seen while simulating steps [from, to) letter by letter
StateSet simulate_window(const MullerAutomaton& A, const UPWord& w, std::uint64_t from, std::uint64_t to) {
    std::set<State> seen;
    State q = A.initial;
    for (std::uint64_t i = 0; i < to; ++i) {
        q = A.step(q, w.at(i));
        if (i >= from) seen.insert(q);
    }
    return as_set(seen);
}

// every subset of Q as the accepting family
std::vector<StateSet> power_set(std::size_t Q) {
    std::vector<StateSet> F;
    for (std::uint64_t mask = 1; mask < (1ULL << Q); ++mask) {
        StateSet s;
        for (State q = 0; q < Q; ++q)
            if (mask >> q & 1) s.push_back(q);
        F.push_back(s);
    }
    return F;
}

}  // namespace

TEST_CASE("run_finite") {
    std::mt19937_64 rng(1);
    auto A = random_automaton(rng, 5, 2);
    CHECK(run_finite(A, {}) == std::vector<State>{A.initial});
    auto one = MullerAutomaton::make({"a", "b"}, {"q"}, 0, {{0, 0}}, {});
    CHECK(run_finite(one, {0, 1, 1, 0, 1}) == std::vector<State>(6, 0));
    for (int t = 0; t < 20; ++t) {
        auto B = random_automaton(rng, 5, 3);
        Word w(20);
        for (auto& a : w) a = static_cast<Letter>(rng() % 3);
        auto run = run_finite(B, w);
        REQUIRE(run.size() == 21);
        State q = B.initial;
        bool same = run[0] == q;
        for (std::size_t i = 0; i < w.size(); ++i) same = same && run[i + 1] == (q = B.delta[q][w[i]]);
        CHECK(same);
    }
    CHECK_THROWS_AS(A.letter("7"), Error);
    try {
        run_finite(A, {0, 5});
    } catch (const Error& e) {
        CHECK(e.code() == Errc::letter_not_in_alphabet);
    }
}

TEST_CASE("automaton validation") {
    CHECK_THROWS(MullerAutomaton::make({"a"}, {"p", "q"}, 0, {{1}}, {}));          // missing row
    CHECK_THROWS(MullerAutomaton::make({"a", "b"}, {"p"}, 0, {{0}}, {}));          // not total
    CHECK_THROWS(MullerAutomaton::make({"a"}, {"p"}, 0, {{3}}, {}));               // target
    CHECK_THROWS(MullerAutomaton::make({"a"}, {"p"}, 0, {{0}}, {{0, 4}}));         // accepting set
    CHECK_THROWS(MullerAutomaton::make({"a", "a"}, {"p"}, 0, {{0, 0}}, {}));       // repeated letter
    auto A = MullerAutomaton::make({"a"}, {"p", "q"}, 0, {{1}, {0}}, {{1, 0, 1}});
    CHECK(A.accepts_set({0, 1}));
}

TEST_CASE("UPWord normalization") {
    UPWord w{{0, 1, 1}, {0, 1, 0, 1}};
    auto n = w.normalized();
    CHECK(n.u == Word{0, 1});
    CHECK(n.v == Word{1, 0});
    for (std::uint64_t i = 0; i < 40; ++i) CHECK(n.at(i) == w.at(i));
    CHECK(UPWord{{}, {2, 2, 2}}.normalized().v == Word{2});
}

TEST_CASE("inf_set_up examples") {
    auto one = MullerAutomaton::make({"a", "b"}, {"q"}, 0, {{0, 0}}, {{0}});
    CHECK(inf_set_up(one, {{1, 0}, {0, 1, 1}}) == StateSet{0});
    CHECK(accepts_up(one, {{}, {0}}));
    // parity of the number of letters read
    auto parity = MullerAutomaton::make({"a", "b"}, {"even", "odd"}, 0, {{1, 1}, {0, 0}}, {});
    CHECK(inf_set_up(parity, {{}, {0, 1}}) == StateSet{0, 1});
    // parity of the number of a's on (ab)^omega needs two cycles of the (state, phase) pair
    auto count_a = MullerAutomaton::make({"a", "b"}, {"even", "odd"}, 0, {{1, 0}, {0, 1}}, {});
    CHECK(inf_set_up(count_a, {{}, {0, 1}}) == StateSet{0, 1});
    CHECK(inf_set_up(count_a, {{0}, {1}}) == StateSet{1});
}

TEST_CASE("inf_set_up agrees with long simulation on random instances") {
    std::mt19937_64 rng(11);
    int agree = 0;
    for (int t = 0; t < 100; ++t) {
        std::size_t Q = 1 + rng() % 8, sigma = 1 + rng() % 3;
        auto A = random_automaton(rng, Q, sigma);
        UPWord w;
        w.u.resize(rng() % 10);
        w.v.resize(1 + rng() % 7);
        for (auto& a : w.u) a = static_cast<Letter>(rng() % sigma);
        for (auto& a : w.v) a = static_cast<Letter>(rng() % sigma);
        agree += inf_set_up(A, w) == simulate_window(A, w, 5000, 10000);
    }
    CHECK(agree == 100);
}

TEST_CASE("inf_set_up is invariant under re-rotation") {
    std::mt19937_64 rng(12);
    for (int t = 0; t < 200; ++t) {
        std::size_t Q = 1 + rng() % 6, sigma = 2;
        auto A = random_automaton(rng, Q, sigma);
        UPWord w;
        w.u.resize(rng() % 6);
        w.v.resize(1 + rng() % 5);
        for (auto& a : w.u) a = static_cast<Letter>(rng() % sigma);
        for (auto& a : w.v) a = static_cast<Letter>(rng() % sigma);
        UPWord longer{w.u, w.v};
        longer.u.insert(longer.u.end(), w.v.begin(), w.v.end());
        UPWord doubled{w.u, w.v};
        doubled.v.insert(doubled.v.end(), w.v.begin(), w.v.end());
        auto base = inf_set_up(A, w);
        CHECK(inf_set_up(A, longer) == base);
        CHECK(inf_set_up(A, doubled) == base);
        CHECK(inf_set_up(A, w.normalized()) == base);
    }
}

TEST_CASE("transduce") {
    // identity
    auto id = Transducer::make({"a", "b"}, {"a", "b"}, {"s"}, 0, {{{0, {0}}, {0, {1}}}});
    Word in{0, 1, 1, 0, 1, 0, 0};
    CHECK(transduce_finite(id, in) == in);
    std::size_t i = 0;
    auto src = transduce(id, [&]() { return in[i++ % in.size()]; });
    for (std::size_t k = 0; k < 21; ++k) CHECK(src() == in[k % in.size()]);
    // letter doubling
    auto dbl = Transducer::make({"a", "b"}, {"a", "b"}, {"s"}, 0, {{{0, {0, 0}}, {0, {1, 1}}}});
    CHECK(transduce_finite(dbl, {0, 1}) == Word{0, 0, 1, 1});
    auto up = transduce_up(dbl, {{1}, {0, 1}});
    CHECK(up.u == Word{1, 1});
    CHECK(up.v == Word{0, 0, 1, 1});
    auto silent = Transducer::make({"a"}, {"a"}, {"s"}, 0, {{{0, {}}}});
    CHECK_THROWS(transduce_up(silent, {{}, {0}}));
}

TEST_CASE("contraction_params examples") {
    // letter 0 first, then 1
    auto three = MullerAutomaton::make({"0", "1"}, names(3, "q"), 0, {{1, 0}, {2, 0}, {0, 0}}, {});
    auto p = contraction_params(three);
    CHECK(p.M == 3);
    CHECK(p.N == 0);
    // cycles (0 1) and (2 3 4), tail 6 -> 5 -> 2
    auto two = MullerAutomaton::make({"0", "1"}, names(7, "q"), 0,
                                     {{1, 0}, {0, 0}, {3, 0}, {4, 0}, {2, 0}, {2, 0}, {5, 0}}, {});
    p = contraction_params(two);
    CHECK(p.M == 6);
    CHECK(p.N == 2);
    auto loops = MullerAutomaton::make({"0", "1"}, names(4, "q"), 0, {{0, 1}, {1, 2}, {2, 3}, {3, 0}}, {});
    p = contraction_params(loops);
    CHECK(p.M == 1);
    CHECK(p.N == 0);
    CHECK_THROWS(contraction_params(MullerAutomaton::make({"a", "b", "c"}, {"q"}, 0, {{0, 0, 0}}, {})));
}

TEST_CASE("padded_run window") {
    ContractionParams a;
    a.M = 1;
    a.N = 0;
    for (std::uint64_t r = 0; r < 5; ++r) CHECK(padded_run(a, r) == 2);
    ContractionParams b;
    b.M = 4;
    b.N = 1;
    CHECK(padded_run(b, 2) == 6);
    std::mt19937_64 rng(3);
    for (int t = 0; t < 500; ++t) {
        ContractionParams c;
        c.M = 1 + rng() % 30;
        c.N = rng() % 20;
        std::uint64_t r = rng() % 1000;
        int hits = 0;
        std::uint64_t last = 0;
        for (std::uint64_t k = c.M + c.N + 1; k <= 2 * c.M + c.N; ++k)
            if (k % c.M == r % c.M) ++hits, last = k;
        CHECK(hits == 1);
        CHECK(padded_run(c, r) == last);
    }
}

TEST_CASE("0-graph pumping") {
    std::mt19937_64 rng(21);
    for (int t = 0; t < 50; ++t) {
        auto A = random_automaton(rng, 1 + rng() % 9, 2);
        auto p = contraction_params(A);
        for (State q = 0; q < A.size(); ++q) {
            auto walk = [&](std::uint64_t n) {
                std::set<State> vis;
                State x = q;
                for (std::uint64_t i = 0; i < n; ++i) vis.insert(x = A.step(x, 0));
                return std::make_pair(x, as_set(vis));
            };
            for (std::uint64_t n = p.M + p.N; n <= 2 * (p.M + p.N); ++n) {
                auto base = walk(n);
                for (std::uint64_t d = 1; d <= 3; ++d) CHECK(walk(n + d * p.M) == base);
                auto z = read_zeros(A, p, q, Int(static_cast<unsigned long>(n + 7 * p.M)));
                CHECK(z.end == base.first);
                CHECK(z.visited == base.second);
            }
            for (std::uint64_t n = 0; n < p.M + p.N; ++n) {
                auto z = read_zeros(A, p, q, Int(static_cast<unsigned long>(n)));
                CHECK(std::make_pair(z.end, z.visited) == walk(n));
            }
        }
    }
}

TEST_CASE("gap transducer on the example residue stream") {
    ContractionParams p;
    p.M = 4;
    p.N = 1;
    auto B = gap_transducer(p, 4);
    ResidueStream rs(example(), 4);
    auto out = transduce(B, [&]() { return static_cast<Letter>(rs.next().residue); });
    // oracle: the smallest distinct non-negative values, and k found by scanning the window
    auto u = eval_prefix(example(), 60);
    std::set<Int> vals;
    for (const auto& v : u)
        if (v >= 0) vals.insert(v);
    std::vector<Int> P(vals.begin(), vals.end());
    for (int m = 0; m < 10; ++m) {
        Int g = P[m + 1] - P[m] - 1;
        std::uint64_t k = 6;
        while (Int(Int(k) - g) % 4 != 0) ++k;
        Word want(k, 0);
        want.push_back(1);
        Word got;
        for (std::size_t i = 0; i <= k; ++i) got.push_back(out());
        CHECK_MESSAGE(got == want, "m = " << m);
    }
    CHECK_THROWS(gap_transducer(p, 6));
}

TEST_CASE("accepts_disjunctive examples") {
    // input ignored: a single absorbing state
    auto abs_yes = MullerAutomaton::make(names(5), {"q"}, 0, {{0, 0, 0, 0, 0}}, {{0}});
    auto abs_no = MullerAutomaton::make(names(5), {"q"}, 0, {{0, 0, 0, 0, 0}}, {});
    auto stream = [] {
        auto rs = std::make_shared<ResidueStream>(example(), 5);
        return DisjunctiveStream{[rs]() { return static_cast<Letter>(rs->next().residue); }, {0, 2, 4}, 0};
    };
    CHECK(accepts_disjunctive(abs_yes, stream()).accept);
    CHECK_FALSE(accepts_disjunctive(abs_no, stream()).accept);

    // last letter read, start state "none"
    std::vector<std::vector<State>> delta(6, std::vector<State>(5));
    for (auto& row : delta)
        for (State a = 0; a < 5; ++a) row[a] = a;
    auto last = MullerAutomaton::make(names(5), {"l0", "l1", "l2", "l3", "l4", "none"}, 5, delta, {{0, 2, 4}});
    auto r = accepts_disjunctive(last, stream());
    CHECK(r.inf == StateSet{0, 2, 4});
    CHECK(r.accept);
    auto prof = residue_profile(example(), 5);
    CHECK(prof.S == std::vector<std::uint64_t>{0, 2, 4});
    CHECK(prof.N == 0);
    // every factor of length 1 and 2 over S occurs early in the stream
    auto word = residue_word(example(), 5, 0, 2000);
    std::set<std::pair<std::uint64_t, std::uint64_t>> pairs;
    for (std::size_t i = 0; i + 1 < word.size(); ++i) pairs.insert({word[i], word[i + 1]});
    CHECK(pairs.size() == 9);
}

TEST_CASE("accepts_disjunctive guard on ultimately periodic input") {
    // P -a-> Q, P -b-> R, Q -a-> P, Q -b-> R, R -a-> R, R -b-> P
    auto trap = MullerAutomaton::make({"a", "b"}, {"P", "Q", "R"}, 0, {{1, 2}, {0, 2}, {2, 0}}, {{0, 1, 2}});
    // (ab)^omega visits all three states, which is also the {a, b}-core
    auto r = accepts_disjunctive(trap, UPWord{{}, {0, 1}});
    CHECK(r.inf == StateSet{0, 1, 2});
    CHECK(r.accept);
    // b^omega over S = {b}: core {P, R}
    CHECK(accepts_disjunctive(trap, UPWord{{}, {1, 1}}).inf == StateSet{0, 2});
    // (bab)^omega never returns to Q although Q lies in the {a, b}-core
    CHECK(inf_set_up(trap, {{}, {1, 0, 1}}) == StateSet{0, 2});
    try {
        accepts_disjunctive(trap, UPWord{{}, {1, 0, 1}});
        CHECK_MESSAGE(false, "guard did not fire");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::not_disjunctive);
    }
    // a sink reached through "ba"
    auto sink = MullerAutomaton::make({"a", "b"}, {"A", "B", "C"}, 0, {{0, 1}, {2, 1}, {2, 2}}, {});
    CHECK(accepts_disjunctive(sink, UPWord{{}, {0, 1, 1}}).inf == StateSet{2});
    CHECK(accepts_disjunctive(sink, UPWord{{}, {1}}).inf == StateSet{1});
}

TEST_CASE("accepts_disjunctive matches long simulation on the example stream") {
    const std::uint64_t ranks = 1000000, from = 900000;
    auto word = residue_word(example(), 5, 0, ranks);
    REQUIRE(word.size() == ranks);
    // length-k factors present in the window, as base-5 codes
    const int k = 8;
    std::uint64_t top = 1;
    for (int e = 1; e < k; ++e) top *= 5;
    auto code = [&](std::uint64_t at) {  // word[at - k + 1 .. at]
        std::uint64_t c = 0;
        for (std::uint64_t i = at + 1 - k; i <= at; ++i) c = 5 * c + word[i];
        return c;
    };
    std::set<std::uint64_t> factors;
    for (std::uint64_t i = from - 1; i < ranks; ++i) factors.insert(code(i));
    CHECK_FALSE(factors.count(0));  // 0^k; 000 first occurs at rank 8479226
    std::mt19937_64 rng(77);
    int agree = 0, explained = 0;
    for (int t = 0; t < 100; ++t) {
        auto A = random_automaton(rng, 2 + rng() % 7, 5);
        std::set<State> seen;
        State q = A.initial, at_window = 0;
        for (std::uint64_t i = 0; i < ranks; ++i) {
            if (i == from) at_window = q;
            q = A.step(q, static_cast<Letter>(word[i]));
            if (i >= from) seen.insert(q);
        }
        std::uint64_t i = 0;
        DisjunctiveStream s{[&]() { return static_cast<Letter>(word.at(i++)); }, {0, 2, 4}, 0};
        auto r = accepts_disjunctive(A, s, ranks);
        if (r.inf == as_set(seen)) {
            ++agree;
            continue;
        }
        // A core state the window missed must be out of reach of every walk that only uses
        // length-k factors the window contains: closure over (state, last k-1 letters).
        using Node = std::pair<State, std::uint64_t>;
        std::set<Node> done{{at_window, code(from - 1) % top}};
        std::vector<Node> todo(done.begin(), done.end());
        std::set<State> reach;
        while (!todo.empty()) {
            auto [x, tail] = todo.back();
            todo.pop_back();
            for (std::uint64_t c : {0, 2, 4}) {
                if (!factors.count(5 * tail + c)) continue;
                Node n{A.step(x, static_cast<Letter>(c)), (5 * tail + c) % top};
                reach.insert(n.first);
                if (done.insert(n).second) todo.push_back(n);
            }
        }
        bool ok = std::includes(r.inf.begin(), r.inf.end(), seen.begin(), seen.end());
        for (State x : r.inf)
            if (!seen.count(x)) ok = ok && !reach.count(x);
        CHECK_MESSAGE(ok, "t = " << t);
        explained += ok;
    }
    MESSAGE("exact agreement " << agree << ", window-limited " << explained);
    CHECK(agree + explained == 100);
    CHECK(agree >= 90);
}

TEST_CASE("contraction preserves the Inf set on sparse periodic predicates") {
    std::mt19937_64 rng(31);
    int checked = 0, accepted = 0;
    for (int t = 0; t < 50; ++t) {
        auto A = random_automaton(rng, 1 + rng() % 6, 2);
        auto p = contraction_params(A);
        PeriodicPredicate P;
        Int x = rng() % 5;
        for (int h = 0, H = static_cast<int>(rng() % 6); h < H; ++h) {
            P.head.push_back(x);
            x += 1 + rng() % (2 * (p.M + p.N) + 3);
        }
        P.start = x;
        P.step = p.M + p.N + 1 + rng() % (p.M + 5);
        auto c = contract(A, P);
        auto chi = P.characteristic();
        auto exact = inf_set_up(A, chi);
        CHECK(inf_set_up(A, c.word) == exact);
        // with the true Inf in the family half the time
        std::vector<StateSet> F{exact};
        auto B = MullerAutomaton::make(A.alphabet, A.states, A.initial, A.delta, t % 2 ? F : std::vector<StateSet>{});
        CHECK(accepts_up(B, c.word) == accepts_up(B, chi));
        CHECK(accepts_up(A, c.word) == accepts_up(A, chi));
        accepted += accepts_up(B, c.word);
        // prefix through p_K is copied verbatim
        Word pre(chi.u.begin(), chi.u.begin() + static_cast<long>(std::min(chi.u.size(), c.w_init.size())));
        CHECK(Word(c.w_init.begin(), c.w_init.begin() + static_cast<long>(pre.size())) == pre);
        ++checked;
    }
    CHECK(checked == 50);
    CHECK(accepted == 25);

    // multiples of 7 against a 2-cycle counter
    auto two = MullerAutomaton::make({"0", "1"}, {"e", "o"}, 0, {{1, 0}, {0, 1}}, {{0, 1}});
    PeriodicPredicate sevens;
    sevens.start = 0;
    sevens.step = 7;
    auto c = contract(two, sevens);
    CHECK(inf_set_up(two, c.word) == inf_set_up(two, sevens.characteristic()));
    CHECK(accepts_up(two, c.word));
}

TEST_CASE("decide_predicate_acceptance") {
    auto rec = example();
    PipelineOptions opt;
    opt.sparsity_ranks = 20000;
    // 0 -> z, 1 -> o: infinitely many 1s and 0s
    auto detector = MullerAutomaton::make({"0", "1"}, {"z", "o"}, 0, {{0, 1}, {0, 1}}, {{0, 1}});
    auto r = decide_predicate_acceptance(detector, rec, opt);
    CHECK(r.accept);
    CHECK(r.inf == StateSet{0, 1});
    CHECK(doubling_simulation(detector, 3000, 2000) == r.inf);

    std::mt19937_64 rng(41);
    for (int t = 0; t < 3; ++t) {
        std::size_t Q = 2 + rng() % 4;
        auto A = random_automaton(rng, Q, 2);
        auto all = MullerAutomaton::make(A.alphabet, A.states, A.initial, A.delta, power_set(Q));
        CHECK(decide_predicate_acceptance(all, rec, opt).accept);
        auto none = MullerAutomaton::make(A.alphabet, A.states, A.initial, A.delta, {});
        CHECK_FALSE(decide_predicate_acceptance(none, rec, opt).accept);
    }

    int agree = 0;
    for (int t = 0; t < 10; ++t) {
        auto A = random_automaton(rng, 2 + rng() % 5, 2);
        auto res = decide_predicate_acceptance(A, rec, opt);
        auto sim = doubling_simulation(A, 3000, 2000);
        agree += res.inf == sim;
        CHECK(res.accept == A.accepts_set(sim));
        CHECK(res.stabilization_rank >= res.params.K + 1);
    }
    CHECK(agree == 10);
}
