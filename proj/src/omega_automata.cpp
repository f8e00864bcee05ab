#include "dynpred/omega_automata.hpp"

#include "dynpred/error.hpp"
#include "dynpred/modular_profile.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <memory>
#include <numeric>

namespace dynpred {

namespace {

template <class Names>
std::uint32_t find_name(const Names& names, const std::string& s, Errc code, const char* what) {
    auto it = std::find(names.begin(), names.end(), s);
    if (it == names.end()) throw Error(code, std::string(what) + " '" + s + "'");
    return static_cast<std::uint32_t>(it - names.begin());
}

void check_distinct(const std::vector<std::string>& names, const char* what) {
    std::vector<std::string> s = names;
    std::sort(s.begin(), s.end());
    if (std::adjacent_find(s.begin(), s.end()) != s.end())
        throw Error(Errc::invalid_input, std::string("repeated ") + what);
}

StateSet normalize_set(StateSet s) {
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
    return s;
}

// Components of the graph on [0, n) with successors succ(v, k) for k < degree;
// bottom[c] when no edge leaves component c.
struct Components {
    std::vector<std::uint32_t> comp;
    std::vector<bool> bottom;
    std::vector<std::vector<std::uint32_t>> members;
};

template <class Succ>
Components components(std::uint32_t n, std::size_t degree, Succ succ) {
    // iterative Tarjan
    const std::uint32_t none = UINT32_MAX;
    std::vector<std::uint32_t> index(n, none), low(n, 0), stack;
    std::vector<bool> on(n, false);
    Components c;
    c.comp.assign(n, none);
    std::uint32_t counter = 0;
    struct Frame {
        std::uint32_t v;
        std::size_t k;
    };
    for (std::uint32_t root = 0; root < n; ++root) {
        if (index[root] != none) continue;
        std::vector<Frame> call{{root, 0}};
        index[root] = low[root] = counter++;
        stack.push_back(root);
        on[root] = true;
        while (!call.empty()) {
            auto& f = call.back();
            if (f.k < degree) {
                std::uint32_t w = succ(f.v, f.k++);
                if (index[w] == none) {
                    index[w] = low[w] = counter++;
                    stack.push_back(w);
                    on[w] = true;
                    call.push_back({w, 0});
                } else if (on[w]) {
                    low[f.v] = std::min(low[f.v], index[w]);
                }
                continue;
            }
            std::uint32_t v = f.v;
            call.pop_back();
            if (!call.empty()) low[call.back().v] = std::min(low[call.back().v], low[v]);
            if (low[v] == index[v]) {
                auto id = static_cast<std::uint32_t>(c.members.size());
                c.members.emplace_back();
                std::uint32_t w;
                do {
                    w = stack.back();
                    stack.pop_back();
                    on[w] = false;
                    c.comp[w] = id;
                    c.members.back().push_back(w);
                } while (w != v);
                std::sort(c.members.back().begin(), c.members.back().end());
            }
        }
    }
    c.bottom.assign(c.members.size(), true);
    for (std::uint32_t v = 0; v < n; ++v)
        for (std::size_t k = 0; k < degree; ++k)
            if (c.comp[succ(v, k)] != c.comp[v]) c.bottom[c.comp[v]] = false;
    return c;
}

std::uint64_t checked_lcm(std::uint64_t a, std::uint64_t b) {
    std::uint64_t g = std::gcd(a, b);
    unsigned __int128 l = static_cast<unsigned __int128>(a / g) * b;
    if (l > (std::uint64_t(1) << 40)) throw Error(Errc::invalid_input, "0-cycle lengths have an unmanageable lcm");
    return static_cast<std::uint64_t>(l);
}

std::uint64_t residue_modulus(std::uint64_t M, std::uint64_t multiple) {
    if (multiple == 0) throw Error(Errc::invalid_input, "modulus multiple must be positive");
    return (M >= 2 ? M : 2 * M) * multiple;
}

Letter binary_letter(const MullerAutomaton& A, const char* s) {
    if (A.alphabet.size() != 2) throw Error(Errc::invalid_input, "contraction needs the alphabet {0, 1}");
    return A.letter(s);
}

}  // namespace

// ---- automata ----

MullerAutomaton MullerAutomaton::make(std::vector<std::string> alphabet, std::vector<std::string> states,
                                      State initial, std::vector<std::vector<State>> delta,
                                      std::vector<StateSet> accepting) {
    if (alphabet.empty()) throw Error(Errc::invalid_input, "empty alphabet");
    if (states.empty()) throw Error(Errc::invalid_input, "no states");
    check_distinct(alphabet, "letter");
    check_distinct(states, "state");
    if (initial >= states.size()) throw Error(Errc::invalid_input, "initial state out of range");
    if (delta.size() != states.size()) throw Error(Errc::invalid_input, "transition table has wrong row count");
    for (const auto& row : delta) {
        if (row.size() != alphabet.size()) throw Error(Errc::invalid_input, "transition table is not total");
        for (State q : row)
            if (q >= states.size()) throw Error(Errc::invalid_input, "transition target out of range");
    }
    MullerAutomaton A;
    A.alphabet = std::move(alphabet);
    A.states = std::move(states);
    A.initial = initial;
    A.delta = std::move(delta);
    for (auto& F : accepting) {
        for (State q : F)
            if (q >= A.states.size()) throw Error(Errc::invalid_input, "accepting set names an unknown state");
        A.accepting.insert(normalize_set(std::move(F)));
    }
    return A;
}

Letter MullerAutomaton::letter(const std::string& name) const {
    return find_name(alphabet, name, Errc::letter_not_in_alphabet, "letter");
}

State MullerAutomaton::state(const std::string& name) const {
    return find_name(states, name, Errc::invalid_input, "unknown state");
}

Transducer Transducer::make(std::vector<std::string> in_alphabet, std::vector<std::string> out_alphabet,
                            std::vector<std::string> states, State initial, std::vector<std::vector<Edge>> delta) {
    if (in_alphabet.empty() || states.empty()) throw Error(Errc::invalid_input, "empty transducer");
    check_distinct(in_alphabet, "input letter");
    check_distinct(out_alphabet, "output letter");
    check_distinct(states, "state");
    if (initial >= states.size()) throw Error(Errc::invalid_input, "initial state out of range");
    if (delta.size() != states.size()) throw Error(Errc::invalid_input, "transition table has wrong row count");
    for (const auto& row : delta) {
        if (row.size() != in_alphabet.size()) throw Error(Errc::invalid_input, "transition table is not total");
        for (const auto& e : row) {
            if (e.next >= states.size()) throw Error(Errc::invalid_input, "transition target out of range");
            for (Letter a : e.out)
                if (a >= out_alphabet.size()) throw Error(Errc::invalid_input, "output letter out of range");
        }
    }
    Transducer B;
    B.in_alphabet = std::move(in_alphabet);
    B.out_alphabet = std::move(out_alphabet);
    B.states = std::move(states);
    B.initial = initial;
    B.delta = std::move(delta);
    return B;
}

Letter Transducer::letter(const std::string& name) const {
    return find_name(in_alphabet, name, Errc::letter_not_in_alphabet, "letter");
}

UPWord UPWord::normalized() const {
    if (v.empty()) throw Error(Errc::invalid_input, "empty cycle");
    UPWord w = *this;
    const std::size_t n = v.size();
    for (std::size_t p = 1; p <= n; ++p) {
        if (n % p) continue;
        bool ok = true;
        for (std::size_t i = p; i < n && ok; ++i) ok = v[i] == v[i - p];
        if (ok) {
            w.v.resize(p);
            break;
        }
    }
    // x (y a)^omega = x' with a moved into the cycle when x ends in a
    while (!w.u.empty() && w.u.back() == w.v.back()) {
        w.u.pop_back();
        std::rotate(w.v.rbegin(), w.v.rbegin() + 1, w.v.rend());
    }
    return w;
}

std::vector<State> run_finite(const MullerAutomaton& A, const Word& w, State from) {
    std::vector<State> run{from};
    run.reserve(w.size() + 1);
    for (Letter a : w) {
        if (a >= A.alphabet.size()) throw Error(Errc::letter_not_in_alphabet, "letter index " + std::to_string(a));
        run.push_back(A.step(run.back(), a));
    }
    return run;
}

std::vector<State> run_finite(const MullerAutomaton& A, const Word& w) { return run_finite(A, w, A.initial); }

StateSet inf_set_up(const MullerAutomaton& A, const UPWord& w, State from) {
    if (w.v.empty()) throw Error(Errc::invalid_input, "empty cycle");
    State q = run_finite(A, w.u, from).back();
    // block starts repeat after at most |Q| blocks
    std::map<State, std::size_t> seen;
    std::vector<State> starts;
    while (!seen.count(q)) {
        seen[q] = starts.size();
        starts.push_back(q);
        q = run_finite(A, w.v, q).back();
    }
    std::vector<State> inf;
    for (std::size_t i = seen[q]; i < starts.size(); ++i) {
        auto r = run_finite(A, w.v, starts[i]);
        inf.insert(inf.end(), r.begin() + 1, r.end());
    }
    return normalize_set(std::move(inf));
}

StateSet inf_set_up(const MullerAutomaton& A, const UPWord& w) { return inf_set_up(A, w, A.initial); }

// ---- transducers ----

LetterSource transduce(const Transducer& B, LetterSource in) {
    struct St {
        const Transducer* B;
        LetterSource in;
        State q;
        std::deque<Letter> buf;
    };
    auto st = std::make_shared<St>(St{&B, std::move(in), B.initial, {}});
    return [st]() -> Letter {
        std::uint64_t idle = 0;
        while (st->buf.empty()) {
            Letter a = st->in();
            if (a >= st->B->in_alphabet.size())
                throw Error(Errc::letter_not_in_alphabet, "letter index " + std::to_string(a));
            const auto& e = st->B->delta[st->q][a];
            st->q = e.next;
            st->buf.insert(st->buf.end(), e.out.begin(), e.out.end());
            // a transducer that falls silent for good yields a finite word
            if (++idle > 100000000ULL) throw Error(Errc::horizon_exhausted, "transducer produced no output");
        }
        Letter a = st->buf.front();
        st->buf.pop_front();
        return a;
    };
}

Word transduce_finite(const Transducer& B, const Word& w) {
    Word out;
    State q = B.initial;
    for (Letter a : w) {
        if (a >= B.in_alphabet.size()) throw Error(Errc::letter_not_in_alphabet, "letter index " + std::to_string(a));
        const auto& e = B.delta[q][a];
        out.insert(out.end(), e.out.begin(), e.out.end());
        q = e.next;
    }
    return out;
}

UPWord transduce_up(const Transducer& B, const UPWord& w) {
    if (w.v.empty()) throw Error(Errc::invalid_input, "empty cycle");
    UPWord r;
    State q = B.initial;
    auto block = [&](const Word& x, Word& out) {
        for (Letter a : x) {
            if (a >= B.in_alphabet.size())
                throw Error(Errc::letter_not_in_alphabet, "letter index " + std::to_string(a));
            const auto& e = B.delta[q][a];
            out.insert(out.end(), e.out.begin(), e.out.end());
            q = e.next;
        }
    };
    block(w.u, r.u);
    std::map<State, std::size_t> seen;
    std::vector<Word> outs;
    while (!seen.count(q)) {
        seen[q] = outs.size();
        outs.emplace_back();
        block(w.v, outs.back());
    }
    const std::size_t c = seen[q];
    for (std::size_t i = 0; i < c; ++i) r.u.insert(r.u.end(), outs[i].begin(), outs[i].end());
    for (std::size_t i = c; i < outs.size(); ++i) r.v.insert(r.v.end(), outs[i].begin(), outs[i].end());
    if (r.v.empty()) throw Error(Errc::invalid_input, "transducer output is finite");
    return r;
}

// ---- disjunctive acceptance ----

namespace {

struct Stabilized {
    std::uint32_t state;
    std::uint64_t rank;
    std::vector<std::uint32_t> core;
};

// run from `q` (the next letter read has rank `rank`) until rank >= N and the state sits
// in a bottom component of the S-restricted graph
template <class Step>
Stabilized stabilize(std::uint32_t n, const std::vector<Letter>& S, std::uint64_t N, std::uint32_t q,
                           std::uint64_t rank, const LetterSource& next, std::uint64_t budget, Step step) {
    if (S.empty()) throw Error(Errc::invalid_input, "empty letter set");
    auto comps = components(n, S.size(), [&](std::uint32_t v, std::size_t k) { return step(v, S[k]); });
    std::vector<bool> inS;
    for (Letter a : S) {
        if (a >= inS.size()) inS.resize(a + 1, false);
        inS[a] = true;
    }
    const std::uint64_t stop = std::max(rank, N) + budget;
    while (rank < N || !comps.bottom[comps.comp[q]]) {
        if (rank >= stop)
            throw Error(Errc::stabilization_budget_exhausted, "no stabilization after " + std::to_string(rank) + " letters");
        Letter a = next();
        if (rank >= N && (a >= inS.size() || !inS[a]))
            throw Error(Errc::not_disjunctive, "letter outside S at rank " + std::to_string(rank));
        q = step(q, a);
        ++rank;
    }
    return {q, rank, comps.members[comps.comp[q]]};
}

}  // namespace

DisjunctiveResult accepts_disjunctive(const MullerAutomaton& A, const DisjunctiveStream& w, std::uint64_t budget) {
    for (Letter a : w.S)
        if (a >= A.alphabet.size()) throw Error(Errc::letter_not_in_alphabet, "letter index " + std::to_string(a));
    auto st = stabilize(static_cast<std::uint32_t>(A.size()), w.S, w.N, A.initial, 0, w.next, budget,
                        [&](std::uint32_t q, Letter a) { return A.step(q, a); });
    DisjunctiveResult r;
    r.inf = st.core;
    r.stabilization_rank = st.rank;
    r.accept = A.accepts_set(r.inf);
    return r;
}

DisjunctiveResult accepts_disjunctive(const MullerAutomaton& A, const UPWord& w) {
    UPWord x = w.normalized();
    DisjunctiveStream s;
    s.S = x.v;
    std::sort(s.S.begin(), s.S.end());
    s.S.erase(std::unique(s.S.begin(), s.S.end()), s.S.end());
    s.N = x.u.size();
    auto i = std::make_shared<std::uint64_t>(0);
    s.next = [x, i]() { return x.at((*i)++); };
    // the core is reached within |u| + |Q| |v| letters when it is reached at all
    auto r = accepts_disjunctive(A, s, A.size() * x.v.size() + 1);
    if (r.inf != inf_set_up(A, x))
        throw Error(Errc::not_disjunctive, "ultimately periodic word: stabilized core differs from the exact Inf set");
    return r;
}

// ---- contraction ----

ContractionParams contraction_params(const MullerAutomaton& A) {
    const Letter z = binary_letter(A, "0");
    binary_letter(A, "1");
    const std::size_t n = A.size();
    ContractionParams p;
    p.M = 1;
    p.N = 0;
    // in a functional graph every walk reaches its cycle within n steps
    for (State q = 0; q < n; ++q) {
        std::vector<std::int64_t> at(n, -1);
        State x = q;
        std::int64_t t = 0;
        while (at[x] < 0) {
            at[x] = t++;
            x = A.step(x, z);
        }
        auto tail = static_cast<std::uint64_t>(at[x]);
        auto len = static_cast<std::uint64_t>(t - at[x]);
        p.N = std::max(p.N, tail);
        p.M = checked_lcm(p.M, len);
    }
    return p;
}

ContractionParams contraction_params(const MullerAutomaton& A, const Recurrence& rec, std::uint64_t ranks,
                                     const EnumOptions& opt) {
    ContractionParams p = contraction_params(A);
    auto s = sparsity_horizon(rec, Int(static_cast<unsigned long>(p.M + p.N + 1)), ranks, opt);
    p.K = s.M;
    p.K_checked = s.checked_through;
    return p;
}

ZeroRun read_zeros(const MullerAutomaton& A, const ContractionParams& p, State q, const Int& n) {
    if (n < 0) throw Error(Errc::invalid_input, "negative run length");
    const Letter z = binary_letter(A, "0");
    const std::uint64_t base = p.M + p.N;
    std::uint64_t steps;
    if (n >= Int(static_cast<unsigned long>(base))) {
        Int r = Int(n - base) % Int(static_cast<unsigned long>(p.M));
        steps = base + r.get_ui();
    } else {
        steps = n.get_ui();
    }
    ZeroRun r;
    r.end = q;
    for (std::uint64_t i = 0; i < steps; ++i) {
        r.end = A.step(r.end, z);
        r.visited.push_back(r.end);
    }
    r.visited = normalize_set(std::move(r.visited));
    return r;
}

std::uint64_t padded_run(const ContractionParams& p, std::uint64_t zero_run_mod_M) {
    const std::uint64_t lo = p.M + p.N + 1;
    const std::uint64_t r = zero_run_mod_M % p.M;
    return lo + (r + p.M - lo % p.M) % p.M;
}

Transducer gap_transducer(const ContractionParams& p, std::uint64_t modulus) {
    if (modulus == 0 || modulus % p.M) throw Error(Errc::invalid_input, "residue modulus must be a multiple of M");
    std::vector<std::string> in, states{"start"};
    for (std::uint64_t s = 0; s < modulus; ++s) {
        in.push_back(std::to_string(s));
        states.push_back(std::to_string(s));
    }
    std::vector<std::vector<Transducer::Edge>> delta(modulus + 1, std::vector<Transducer::Edge>(modulus));
    for (std::uint64_t s = 0; s < modulus; ++s) delta[0][s].next = static_cast<State>(s + 1);
    for (std::uint64_t s = 0; s < modulus; ++s)
        for (std::uint64_t s2 = 0; s2 < modulus; ++s2) {
            auto& e = delta[s + 1][s2];
            e.next = static_cast<State>(s2 + 1);
            // p_{m+1} - p_m - 1 mod M is fixed by the two residues since M | modulus
            std::uint64_t run = (s2 + 2 * modulus - s - 1) % modulus;
            e.out.assign(padded_run(p, run), 0);
            e.out.push_back(1);
        }
    return Transducer::make(std::move(in), {"0", "1"}, std::move(states), 0, std::move(delta));
}

Int PeriodicPredicate::element(std::uint64_t m) const {
    if (m < head.size()) return head[m];
    return start + Int(static_cast<unsigned long>(step)) * Int(static_cast<unsigned long>(m - head.size()));
}

UPWord PeriodicPredicate::characteristic() const {
    if (step == 0) throw Error(Errc::invalid_input, "step must be positive");
    if (start < 0 || start > 10000000) throw Error(Errc::invalid_input, "start out of range");
    Int prev = -1;
    for (const auto& h : head) {
        if (h <= prev) throw Error(Errc::invalid_input, "head must be increasing and non-negative");
        prev = h;
    }
    if (start <= prev) throw Error(Errc::invalid_input, "start must exceed the head");
    UPWord w;
    w.u.assign(start.get_ui() + 1, 0);
    for (const auto& h : head) w.u[h.get_ui()] = 1;
    w.u.back() = 1;
    w.v.assign(step, 0);
    w.v.back() = 1;
    return w;
}

Contraction contract(const MullerAutomaton& A, const PeriodicPredicate& P) {
    Contraction c;
    c.params = contraction_params(A);
    const auto& p = c.params;
    const std::uint64_t gap = p.M + p.N + 1;
    if (P.step < gap) throw Error(Errc::invalid_input, "predicate is not sparse for this automaton");
    const std::uint64_t h = P.head.size();
    // last m whose gap p_{m+1} - p_m is short
    for (std::uint64_t m = 0; m < h; ++m)
        if (P.element(m + 1) - P.element(m) < Int(static_cast<unsigned long>(gap))) c.params.K = m + 1;
    c.params.K_checked = h + 1;
    c.modulus = residue_modulus(p.M, 1);
    UPWord chi = P.characteristic();
    const std::uint64_t pK = P.element(c.params.K).get_ui();
    for (std::uint64_t i = 0; i <= pK; ++i) c.w_init.push_back(chi.at(i));
    // residues of p_K, p_{K+1}, ...: explicit through the head, then periodic with period modulus
    UPWord res;
    const std::uint64_t tail0 = std::max<std::uint64_t>(c.params.K, h);
    auto mod = [&](std::uint64_t m) {
        return static_cast<Letter>(Int(P.element(m) % Int(static_cast<unsigned long>(c.modulus))).get_ui());
    };
    for (std::uint64_t m = c.params.K; m < tail0; ++m) res.u.push_back(mod(m));
    for (std::uint64_t m = tail0; m < tail0 + c.modulus; ++m) res.v.push_back(mod(m));
    UPWord out = transduce_up(gap_transducer(c.params, c.modulus), res);
    c.word.u = c.w_init;
    c.word.u.insert(c.word.u.end(), out.u.begin(), out.u.end());
    c.word.v = out.v;
    return c;
}

PipelineReport decide_predicate_acceptance(const MullerAutomaton& A, const Recurrence& rec,
                                           const PipelineOptions& opt) {
    PipelineReport rep;
    rep.params = contraction_params(A, rec, opt.sparsity_ranks, opt.enumeration);
    const auto& p = rep.params;
    const Letter one = A.letter("1");
    rep.modulus = residue_modulus(p.M, opt.modulus_multiple);
    const std::uint64_t mod = rep.modulus;
    auto prof = residue_profile(rec, mod, opt.enumeration);
    rep.S = prof.S;
    rep.N_modulus = prof.N;

    ResidueStream rs(rec, mod, opt.enumeration);
    const auto& ev = rs.enumerator().evaluator();
    // hard-coded initial segment 0^{p_0} 1 0^{p_1 - p_0 - 1} 1 ... 1 through p_K
    State q = A.initial;
    Int prev = -1;
    ResidueStream::Item it{};
    for (std::uint64_t m = 0; m <= p.K; ++m) {
        it = rs.next();
        Int v = ev.exact_any(it.n);
        q = A.step(read_zeros(A, p, q, Int(v - prev - 1)).end, one);
        prev = v;
    }
    rep.init_state = q;

    // product of A with the gap transducer after its first letter: (q, s) -> q * mod + s
    const auto n = static_cast<std::uint32_t>(A.size() * mod);
    std::vector<std::uint32_t> next_state(static_cast<std::size_t>(n) * mod);
    std::vector<StateSet> visited(static_cast<std::size_t>(n) * mod);
    const Letter z = A.letter("0");
    for (State a = 0; a < A.size(); ++a)
        for (std::uint64_t s = 0; s < mod; ++s)
            for (std::uint64_t s2 = 0; s2 < mod; ++s2) {
                std::uint64_t k = padded_run(p, (s2 + 2 * mod - s - 1) % mod);
                StateSet vis;
                State x = a;
                for (std::uint64_t i = 0; i < k; ++i) vis.push_back(x = A.step(x, z));
                vis.push_back(x = A.step(x, one));
                std::size_t e = (a * mod + s) * mod + s2;
                next_state[e] = static_cast<std::uint32_t>(x * mod + s2);
                visited[e] = normalize_set(std::move(vis));
            }

    std::vector<Letter> S(prof.S.begin(), prof.S.end());
    LetterSource src = [&rs]() { return static_cast<Letter>(rs.next().residue); };
    auto st = stabilize(n, S, prof.N, static_cast<std::uint32_t>(q * mod + it.residue), p.K + 1, src, opt.budget,
                        [&](std::uint32_t v, Letter a) { return next_state[static_cast<std::size_t>(v) * mod + a]; });
    rep.stabilization_rank = st.rank;
    // every S-edge inside the core is taken infinitely often
    StateSet inf;
    for (auto v : st.core)
        for (Letter a : S) {
            const auto& vis = visited[static_cast<std::size_t>(v) * mod + a];
            inf.insert(inf.end(), vis.begin(), vis.end());
        }
    rep.inf = normalize_set(std::move(inf));
    rep.accept = A.accepts_set(rep.inf);
    return rep;
}

}  // namespace dynpred
