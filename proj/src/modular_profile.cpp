#include "dynpred/modular_profile.hpp"

#include "dynpred/error.hpp"

#include <algorithm>
#include <deque>
#include <cmath>
#include <set>

namespace dynpred {

bool ResidueProfile::in_S(std::uint64_t s) const { return std::binary_search(S.begin(), S.end(), s); }

ResidueProfile residue_profile(const Recurrence& rec, std::uint64_t M, const EnumOptions& opt) {
    if (M < 2) throw Error(Errc::invalid_input, "modulus must be at least 2");
    ResidueProfile p;
    p.M = M;
    ModularCycle mc = modular_sequence(rec, M);
    p.T = mc.period();
    p.preperiod = mc.preperiod();
    // every class t has cos(n theta + phi) > 0 for infinitely many n = t (mod T) because
    // T theta / pi is irrational, so all cycle residues recur among positive terms
    std::set<std::uint64_t> S(mc.cycle.begin(), mc.cycle.end());
    p.S.assign(S.begin(), S.end());
    p.class_residue.resize(p.T);
    for (std::uint64_t t = 0; t < p.T; ++t) {
        std::uint64_t n = t;
        while (n < p.preperiod) n += p.T;
        p.class_residue[t] = mc.residue(n);
        p.class_map[p.class_residue[t]].push_back(t);
    }
    // N_M: one past the last rank holding a residue outside S; only prefix indices can
    TermEvaluator ev(rec, opt);
    std::vector<std::uint64_t> bad;
    for (std::uint64_t n = 0; n < p.preperiod; ++n)
        if (!p.in_S(mc.residue(n)) && ev.key(n).sign >= 0) bad.push_back(n);
    if (bad.empty()) return p;
    Int vmax = 0;
    for (auto n : bad) {
        Int v = ev.exact_any(n);
        if (v > vmax) vmax = v;
    }
    double lv = -1e300;
    if (vmax > 0) {
        long e = 0;
        double d = mpz_get_d_2exp(&e, vmax.get_mpz_t());
        lv = std::log(d) + static_cast<double>(e) * 0.6931471805599453;
    }
    ResidueStream rs(rec, M, opt);
    // the stream is sorted: once it passes vmax every bad value has been seen
    for (;;) {
        auto it = rs.next();
        if (!p.in_S(it.residue)) p.N = it.rank + 1;
        bool past = it.n <= ev.exact_limit()
                        ? ev.exact(it.n) > vmax
                        : ev.key(it.n).log_magnitude(ev.log_modulus()) - 1e-6 > lv;
        if (past) break;
    }
    return p;
}

ResidueStream::ResidueStream(const Recurrence& rec, std::uint64_t M, const EnumOptions& opt)
    : mc_(modular_sequence(rec, M)), en_(rec, opt) {}

ResidueStream::ResidueStream(std::shared_ptr<const TermEvaluator> ev, std::uint64_t M, const EnumOptions& opt)
    : mc_(modular_sequence(ev->recurrence(), M)), en_(std::move(ev), opt) {}

ResidueStream::Item ResidueStream::next() {
    auto e = en_.next();
    return {e->rank, e->n, mc_.residue(e->n)};
}

std::vector<std::uint64_t> residue_word(const Recurrence& rec, std::uint64_t M, std::uint64_t from_rank,
                                        std::uint64_t count, const EnumOptions& opt) {
    std::vector<std::uint64_t> w;
    if (count == 0) return w;
    ResidueStream rs(rec, M, opt);
    for (std::uint64_t m = 0; m < from_rank + count; ++m) {
        auto it = rs.next();
        if (m >= from_rank) w.push_back(it.residue);
    }
    return w;
}

FactorHit find_factor(ResidueStream& stream, const std::vector<std::uint64_t>& factor, std::uint64_t from_rank,
                      std::uint64_t index_budget) {
    if (factor.empty()) throw Error(Errc::invalid_input, "empty factor");
    for (auto s : factor)
        if (std::find(stream.cycle().cycle.begin(), stream.cycle().cycle.end(), s) == stream.cycle().cycle.end())
            throw Error(Errc::letter_not_in_alphabet, "factor letter " + std::to_string(s) + " does not recur");
    const std::size_t k = factor.size();
    std::deque<ResidueStream::Item> win;
    FactorHit hit;
    for (;;) {
        auto it = stream.next();
        hit.scanned_ranks = it.rank + 1;
        hit.scanned_indices = stream.enumerator().stats().processed;
        if (it.rank < from_rank) continue;
        win.push_back(it);
        if (win.size() > k) win.pop_front();
        if (win.size() == k) {
            bool eq = true;
            for (std::size_t i = 0; i < k && eq; ++i) eq = win[i].residue == factor[i];
            if (eq) {
                hit.rank = win.front().rank;
                for (const auto& w : win) hit.indices.push_back(w.n);
                return hit;
            }
        }
        if (hit.scanned_indices > index_budget)
            throw Error(Errc::horizon_exhausted, "factor not found within " + std::to_string(hit.scanned_ranks) +
                                                     " ranks (" + std::to_string(hit.scanned_indices) + " indices)");
    }
}

FactorHit find_factor(const Recurrence& rec, std::uint64_t M, const std::vector<std::uint64_t>& factor,
                      std::uint64_t from_rank, std::uint64_t index_budget, const EnumOptions& opt) {
    ResidueStream rs(rec, M, opt);
    return find_factor(rs, factor, from_rank, index_budget);
}

}  // namespace dynpred
