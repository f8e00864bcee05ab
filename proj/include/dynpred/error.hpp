#pragma once

#include <stdexcept>
#include <string>

namespace dynpred {

enum class Errc {
    invalid_input,
    non_minimal,
    not_admissible,
    precision_unreachable,
    precision_exhausted,
    construction_stalled,
    horizon_exhausted,
    epsilon_too_large,
    unsatisfiable_pattern,
    letter_not_in_alphabet,
    stabilization_budget_exhausted,
    not_disjunctive,
};

const char* errc_name(Errc c);

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what) : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}
    Errc code() const { return code_; }

private:
    Errc code_;
};

}  // namespace dynpred
