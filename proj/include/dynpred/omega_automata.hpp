#pragma once
// Deterministic Muller automata and finite transducers, acceptance of ultimately
// periodic and disjunctive words, and the contraction of a sparse predicate's
// characteristic word into a transduced residue stream.

#include "dynpred/enumeration.hpp"

#include <cstdint>
#include <functional>
#include <set>
#include <string>
#include <vector>

namespace dynpred {

using State = std::uint32_t;
using Letter = std::uint32_t;  // index into an alphabet
using Word = std::vector<Letter>;
using StateSet = std::vector<State>;  // sorted, no repeats

struct MullerAutomaton {
    std::vector<std::string> alphabet;
    std::vector<std::string> states;
    State initial = 0;
    std::vector<std::vector<State>> delta;  // delta[q][a]
    std::set<StateSet> accepting;

    // validates totality, range and the accepting family (sorts each member)
    static MullerAutomaton make(std::vector<std::string> alphabet, std::vector<std::string> states, State initial,
                                std::vector<std::vector<State>> delta, std::vector<StateSet> accepting);

    std::size_t size() const { return states.size(); }
    State step(State q, Letter a) const { return delta[q][a]; }
    Letter letter(const std::string& name) const;  // throws letter-not-in-alphabet
    State state(const std::string& name) const;
    bool accepts_set(const StateSet& inf) const { return accepting.count(inf) > 0; }
};

struct Transducer {
    struct Edge {
        State next = 0;
        Word out;
    };
    std::vector<std::string> in_alphabet, out_alphabet, states;
    State initial = 0;
    std::vector<std::vector<Edge>> delta;  // delta[q][a]

    static Transducer make(std::vector<std::string> in_alphabet, std::vector<std::string> out_alphabet,
                           std::vector<std::string> states, State initial, std::vector<std::vector<Edge>> delta);
    Letter letter(const std::string& name) const;
};

// u v^omega
struct UPWord {
    Word u, v;
    // minimal period, then the shortest prefix
    UPWord normalized() const;
    Letter at(std::uint64_t i) const { return i < u.size() ? u[i] : v[(i - u.size()) % v.size()]; }
};

// states after 0, 1, ..., |w| letters
std::vector<State> run_finite(const MullerAutomaton& A, const Word& w);
std::vector<State> run_finite(const MullerAutomaton& A, const Word& w, State from);

StateSet inf_set_up(const MullerAutomaton& A, const UPWord& w);
StateSet inf_set_up(const MullerAutomaton& A, const UPWord& w, State from);
inline bool accepts_up(const MullerAutomaton& A, const UPWord& w) { return A.accepts_set(inf_set_up(A, w)); }

// letters pulled in rank order
using LetterSource = std::function<Letter()>;

LetterSource transduce(const Transducer& B, LetterSource in);
// B(u v^omega) is again ultimately periodic; throws invalid-input when B emits nothing on the cycle
UPWord transduce_up(const Transducer& B, const UPWord& w);
Word transduce_finite(const Transducer& B, const Word& w);

// a computable word whose letters from rank N on lie in S and in which every finite
// word over S occurs (the caller vouches for the second part)
struct DisjunctiveStream {
    LetterSource next;
    std::vector<Letter> S;
    std::uint64_t N = 0;
};

struct DisjunctiveResult {
    bool accept = false;
    StateSet inf;
    std::uint64_t stabilization_rank = 0;  // letters read when the run entered its final core
};

// Once past rank N the run is inside a bottom component of the S-restricted graph,
// every state of that component recurs, and nothing else does.
DisjunctiveResult accepts_disjunctive(const MullerAutomaton& A, const DisjunctiveStream& w,
                                      std::uint64_t budget = 100000000ULL);
// guard: an ultimately periodic word handed in as a disjunctive stream over the letters
// of its cycle; throws not-disjunctive when the stabilized core disagrees with the exact Inf
DisjunctiveResult accepts_disjunctive(const MullerAutomaton& A, const UPWord& w);

// letter "0" / "1" of a binary automaton
struct ContractionParams {
    std::uint64_t M = 1;  // lcm of the cycle lengths of the 0-graph
    std::uint64_t N = 0;  // longest path into a cycle
    std::uint64_t K = 0;  // p_{m+1} - p_m >= M + N + 1 for all m >= K
    std::uint64_t K_checked = 0;  // ranks over which K was established
};

ContractionParams contraction_params(const MullerAutomaton& A);
ContractionParams contraction_params(const MullerAutomaton& A, const Recurrence& rec,
                                     std::uint64_t ranks = 100000, const EnumOptions& opt = {});

// (end state, visited states) after reading 0^n from q, with n reduced by the pumping rule
struct ZeroRun {
    State end = 0;
    StateSet visited;  // excluding q itself
};
ZeroRun read_zeros(const MullerAutomaton& A, const ContractionParams& p, State q, const Int& n);

// the unique k in (M + N, 2M + N] with k = zero_run (mod M)
std::uint64_t padded_run(const ContractionParams& p, std::uint64_t zero_run_mod_M);

// reads residues p_m mod modulus (modulus a multiple of M) and writes 0^{k_m} 1 for
// each consecutive pair; the first letter only sets the state
Transducer gap_transducer(const ContractionParams& p, std::uint64_t modulus);

// P = head together with start, start + step, start + 2 step, ...
struct PeriodicPredicate {
    std::vector<Int> head;  // increasing, below start
    Int start = 0;
    std::uint64_t step = 1;

    Int element(std::uint64_t m) const;
    UPWord characteristic() const;  // exact characteristic word over {0, 1}
};

struct Contraction {
    ContractionParams params;
    std::uint64_t modulus = 0;
    Word w_init;   // characteristic prefix through position p_K
    UPWord word;   // w_init followed by the gap transducer's output
};
Contraction contract(const MullerAutomaton& A, const PeriodicPredicate& P);

struct PipelineOptions {
    std::uint64_t modulus_multiple = 1;  // residues are taken mod the least multiple of M that is >= 2, times this
    std::uint64_t sparsity_ranks = 100000;
    std::uint64_t budget = 10000000;     // ranks read while waiting for stabilization
    EnumOptions enumeration;
};

struct PipelineReport {
    bool accept = false;
    ContractionParams params;
    std::uint64_t modulus = 0;
    std::vector<std::uint64_t> S;
    std::uint64_t N_modulus = 0;
    State init_state = 0;                   // after w_init
    std::uint64_t stabilization_rank = 0;
    StateSet inf;
};

PipelineReport decide_predicate_acceptance(const MullerAutomaton& A, const Recurrence& rec,
                                           const PipelineOptions& opt = {});

}  // namespace dynpred
