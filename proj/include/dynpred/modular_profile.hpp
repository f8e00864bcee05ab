#pragma once
// Residues of the sorted positive stream modulo M: the eventually occurring
// letters S_M, the rank threshold N_M, the index classes and factor search.

#include "dynpred/enumeration.hpp"

#include <map>

namespace dynpred {

struct ResidueProfile {
    std::uint64_t M = 0;
    std::vector<std::uint64_t> S;  // sorted
    std::uint64_t N = 0;           // ranks m >= N all carry residues in S
    std::uint64_t T = 0;           // period of u mod M
    std::uint64_t preperiod = 0;   // u-index threshold: n >= preperiod follows the cycle
    // s -> classes t in [0, T) with u_{kT+t} = s (mod M) once kT+t >= preperiod
    std::map<std::uint64_t, std::vector<std::uint64_t>> class_map;
    std::vector<std::uint64_t> class_residue;  // t -> s

    bool in_S(std::uint64_t s) const;
};

ResidueProfile residue_profile(const Recurrence& rec, std::uint64_t M, const EnumOptions& opt = {});

// (rank, source index, residue) triples in rank order
class ResidueStream {
public:
    ResidueStream(const Recurrence& rec, std::uint64_t M, const EnumOptions& opt = {});
    ResidueStream(std::shared_ptr<const TermEvaluator> ev, std::uint64_t M, const EnumOptions& opt = {});

    struct Item {
        std::uint64_t rank, n, residue;
    };
    Item next();
    const ModularCycle& cycle() const { return mc_; }
    PositiveEnumerator& enumerator() { return en_; }

private:
    ModularCycle mc_;
    PositiveEnumerator en_;
};

std::vector<std::uint64_t> residue_word(const Recurrence& rec, std::uint64_t M, std::uint64_t from_rank,
                                        std::uint64_t count, const EnumOptions& opt = {});

struct FactorHit {
    std::uint64_t rank = 0;                // first rank of the occurrence
    std::vector<std::uint64_t> indices;    // source indices of the matched entries
    std::uint64_t scanned_ranks = 0;
    std::uint64_t scanned_indices = 0;
};

// least rank >= from_rank where `factor` occurs; throws horizon-exhausted once the
// stream has consumed more than `index_budget` source indices
FactorHit find_factor(ResidueStream& stream, const std::vector<std::uint64_t>& factor, std::uint64_t from_rank,
                      std::uint64_t index_budget = 20000000ULL);
FactorHit find_factor(const Recurrence& rec, std::uint64_t M, const std::vector<std::uint64_t>& factor,
                      std::uint64_t from_rank = 0, std::uint64_t index_budget = 20000000ULL,
                      const EnumOptions& opt = {});

}  // namespace dynpred
