#pragma once
// JSON forms of recurrences, automata, transducers, reports and certificates.
// Integers travel as decimal strings; reals as decimal strings with an error radius.

#include "dynpred/interval_engine.hpp"
#include "dynpred/modular_profile.hpp"
#include "dynpred/omega_automata.hpp"

#include <json.hpp>

namespace dynpred {

using json = nlohmann::json;

inline constexpr const char* kSchemaRecurrence = "dynpred.recurrence/1";
inline constexpr const char* kSchemaAnalysis = "dynpred.analysis/1";
inline constexpr const char* kSchemaProfile = "dynpred.profile/1";
inline constexpr const char* kSchemaWitness = "dynpred.witness/1";
inline constexpr const char* kSchemaVerification = "dynpred.verification/1";
inline constexpr const char* kSchemaDecision = "dynpred.decision/1";
inline constexpr const char* kSchemaAutomaton = "dynpred.automaton/1";
inline constexpr const char* kSchemaTransducer = "dynpred.transducer/1";

// accepts decimal strings or JSON integers; throws invalid-input
Int int_from_json(const json& j);
json int_to_json(const Int& z);
json real_to_json(const Real& x, int digits = 0);
Real real_from_json(const json& j, int bits);

Recurrence recurrence_from_json(const json& j);
json recurrence_to_json(const Recurrence& rec);

// delta values must be single state names; arrays (nondeterminism) are rejected
MullerAutomaton automaton_from_json(const json& j);
json automaton_to_json(const MullerAutomaton& A);
Transducer transducer_from_json(const json& j);
json transducer_to_json(const Transducer& B);

json classification_to_json(const Classification& c);
json decomposition_to_json(const DominantDecomposition& dd);
json profile_to_json(const ResidueProfile& p);
json frame_to_json(const PatternFrame& f);
PatternFrame frame_from_json(const json& j);
json verification_to_json(const VerificationReport& r);
json pipeline_to_json(const MullerAutomaton& A, const PipelineReport& r);

// parse a file; throws invalid-input on I/O or syntax errors
json read_json_file(const std::string& path);

}  // namespace dynpred
