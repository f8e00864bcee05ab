#include "dynpred/io.hpp"

#include "dynpred/error.hpp"

#include <fstream>
#include <sstream>

namespace dynpred {

namespace {

[[noreturn]] void bad(const std::string& what) { throw Error(Errc::invalid_input, what); }

const json& field(const json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) bad(std::string("missing field '") + key + "'");
    return j.at(key);
}

std::string name_of(const json& j, const char* what) {
    if (j.is_string()) return j.get<std::string>();
    if (j.is_number_integer()) return std::to_string(j.get<long long>());
    bad(std::string(what) + " must be a string or integer");
}

std::vector<std::string> names(const json& j, const char* what) {
    if (!j.is_array()) bad(std::string(what) + " must be an array");
    std::vector<std::string> v;
    for (const auto& x : j) v.push_back(name_of(x, what));
    return v;
}

json complex_to_json(const Complex& z, const Real& radius) {
    return {{"re", z.re.str()}, {"im", z.im.str()}, {"radius", radius.str(6)}};
}

json arc_to_json(const CircleInterval& I) {
    if (I.empty) return nullptr;
    return {{"lo", I.lo.str()}, {"hi", I.hi.str()}};
}

CircleInterval arc_from_json(const json& j, int bits) {
    if (j.is_null()) return CircleInterval::none();
    return CircleInterval::make(real_from_json(field(j, "lo"), bits), real_from_json(field(j, "hi"), bits));
}

}  // namespace

Int int_from_json(const json& j) {
    if (j.is_number_integer()) return Int(std::to_string(j.get<long long>()));
    if (j.is_string()) {
        try {
            return parse_int(j.get<std::string>());
        } catch (const std::exception&) {
            bad("not a decimal integer: '" + j.get<std::string>() + "'");
        }
    }
    bad("integer expected");
}

json int_to_json(const Int& z) { return to_string(z); }

json real_to_json(const Real& x, int digits) { return x.str(digits); }

Real real_from_json(const json& j, int bits) {
    if (j.is_number()) return Real::with_bits(bits, Real(j.get<double>()));
    if (j.is_string()) {
        try {
            return Real::parse(j.get<std::string>(), bits);
        } catch (const std::exception&) {
            bad("not a decimal real: '" + j.get<std::string>() + "'");
        }
    }
    bad("real expected");
}

Recurrence recurrence_from_json(const json& j) {
    std::vector<Int> c, u;
    const auto& jc = field(j, "coeffs");
    const auto& ju = field(j, "initials");
    if (!jc.is_array() || !ju.is_array()) bad("coeffs and initials must be arrays");
    for (const auto& x : jc) c.push_back(int_from_json(x));
    for (const auto& x : ju) u.push_back(int_from_json(x));
    return Recurrence::make(std::move(c), std::move(u));
}

json recurrence_to_json(const Recurrence& rec) {
    json c = json::array(), u = json::array();
    for (const auto& x : rec.coeffs) c.push_back(int_to_json(x));
    for (const auto& x : rec.initials) u.push_back(int_to_json(x));
    return {{"schema", kSchemaRecurrence}, {"coeffs", c}, {"initials", u}};
}

MullerAutomaton automaton_from_json(const json& j) {
    auto alphabet = names(field(j, "alphabet"), "letter");
    auto states = names(field(j, "states"), "state");
    auto index = [](const std::vector<std::string>& v, const std::string& s, const char* what) {
        auto it = std::find(v.begin(), v.end(), s);
        if (it == v.end()) bad(std::string("unknown ") + what + " '" + s + "'");
        return static_cast<State>(it - v.begin());
    };
    const State init = index(states, name_of(field(j, "initial"), "state"), "state");
    const auto& jd = field(j, "delta");
    if (!jd.is_object()) bad("delta must be an object");
    std::vector<std::vector<State>> delta(states.size(), std::vector<State>(alphabet.size()));
    std::vector<std::vector<bool>> set(states.size(), std::vector<bool>(alphabet.size(), false));
    for (auto it = jd.begin(); it != jd.end(); ++it) {
        const State q = index(states, it.key(), "state");
        if (!it.value().is_object()) bad("delta['" + it.key() + "'] must be an object");
        for (auto jt = it.value().begin(); jt != it.value().end(); ++jt) {
            const auto a = static_cast<Letter>(index(alphabet, jt.key(), "letter"));
            if (jt.value().is_array()) bad("nondeterministic transition from '" + it.key() + "' on '" + jt.key() + "'");
            delta[q][a] = index(states, name_of(jt.value(), "state"), "state");
            set[q][a] = true;
        }
    }
    for (std::size_t q = 0; q < states.size(); ++q)
        for (std::size_t a = 0; a < alphabet.size(); ++a)
            if (!set[q][a]) bad("transition missing for state '" + states[q] + "' and letter '" + alphabet[a] + "'");
    std::vector<StateSet> F;
    if (j.contains("accepting_family")) {
        const auto& jf = j.at("accepting_family");
        if (!jf.is_array()) bad("accepting_family must be an array");
        for (const auto& s : jf) {
            StateSet x;
            for (const auto& name : names(s, "state")) x.push_back(index(states, name, "state"));
            F.push_back(x);
        }
    }
    return MullerAutomaton::make(alphabet, states, init, delta, F);
}

json automaton_to_json(const MullerAutomaton& A) {
    json delta = json::object();
    for (State q = 0; q < A.size(); ++q)
        for (Letter a = 0; a < A.alphabet.size(); ++a) delta[A.states[q]][A.alphabet[a]] = A.states[A.delta[q][a]];
    json F = json::array();
    for (const auto& s : A.accepting) {
        json x = json::array();
        for (State q : s) x.push_back(A.states[q]);
        F.push_back(x);
    }
    return {{"schema", kSchemaAutomaton}, {"alphabet", A.alphabet}, {"states", A.states},
            {"initial", A.states[A.initial]}, {"delta", delta}, {"accepting_family", F}};
}

Transducer transducer_from_json(const json& j) {
    auto in = names(field(j, "input_alphabet"), "letter");
    auto out = names(field(j, "output_alphabet"), "letter");
    auto states = names(field(j, "states"), "state");
    auto index = [](const std::vector<std::string>& v, const std::string& s, const char* what) {
        auto it = std::find(v.begin(), v.end(), s);
        if (it == v.end()) bad(std::string("unknown ") + what + " '" + s + "'");
        return static_cast<std::uint32_t>(it - v.begin());
    };
    const State init = index(states, name_of(field(j, "initial"), "state"), "state");
    std::vector<std::vector<Transducer::Edge>> delta(states.size(), std::vector<Transducer::Edge>(in.size()));
    std::vector<std::vector<bool>> set(states.size(), std::vector<bool>(in.size(), false));
    const auto& jd = field(j, "delta");
    if (!jd.is_object()) bad("delta must be an object");
    for (auto it = jd.begin(); it != jd.end(); ++it) {
        const State q = index(states, it.key(), "state");
        for (auto jt = it.value().begin(); jt != it.value().end(); ++jt) {
            const Letter a = index(in, jt.key(), "letter");
            const auto& e = jt.value();
            auto& edge = delta[q][a];
            edge.next = index(states, name_of(field(e, "next"), "state"), "state");
            for (const auto& o : names(field(e, "output"), "letter")) edge.out.push_back(index(out, o, "letter"));
            set[q][a] = true;
        }
    }
    for (std::size_t q = 0; q < states.size(); ++q)
        for (std::size_t a = 0; a < in.size(); ++a)
            if (!set[q][a]) bad("transition missing for state '" + states[q] + "' and letter '" + in[a] + "'");
    return Transducer::make(in, out, states, init, delta);
}

json transducer_to_json(const Transducer& B) {
    json delta = json::object();
    for (State q = 0; q < B.states.size(); ++q)
        for (Letter a = 0; a < B.in_alphabet.size(); ++a) {
            const auto& e = B.delta[q][a];
            json out = json::array();
            for (Letter o : e.out) out.push_back(B.out_alphabet[o]);
            delta[B.states[q]][B.in_alphabet[a]] = {{"next", B.states[e.next]}, {"output", out}};
        }
    return {{"schema", kSchemaTransducer}, {"input_alphabet", B.in_alphabet}, {"output_alphabet", B.out_alphabet},
            {"states", B.states}, {"initial", B.states[B.initial]}, {"delta", delta}};
}

json classification_to_json(const Classification& c) {
    json roots = json::array();
    for (const auto& r : c.roots) {
        json x = complex_to_json(r.center, r.radius);
        x["multiplicity"] = r.multiplicity;
        x["modulus"] = r.modulus().str(20);
        if (r.exact) x["exact"] = to_string(r.exact_value);
        roots.push_back(x);
    }
    return {{"simple", c.simple},
            {"degenerate", c.degenerate},
            {"dominant_count", c.dominant_count},
            {"admissible", c.admissible},
            {"degenerate_order", c.degenerate_order},
            {"reason", c.reason},
            {"roots", roots}};
}

json decomposition_to_json(const DominantDecomposition& dd) {
    json nd = json::array();
    for (const auto& t : dd.nondominant) nd.push_back(complex_to_json(t.root, dd.radius));
    return {{"bits", dd.bits},
            {"radius", dd.radius.str(6)},
            {"lambda", complex_to_json(dd.lambda, dd.radius)},
            {"alpha", complex_to_json(dd.alpha, dd.radius)},
            {"modulus", dd.modulus.str()},
            {"theta", dd.theta.str()},
            {"phi", dd.phi.str()},
            {"scale", dd.scale.str()},
            {"r", to_string(dd.r)},
            {"R", to_string(dd.R)},
            {"nondominant_roots", nd}};
}

json profile_to_json(const ResidueProfile& p) {
    json cm = json::object();
    for (const auto& [s, ts] : p.class_map) cm[std::to_string(s)] = ts;
    return {{"schema", kSchemaProfile}, {"M", p.M},   {"S_M", p.S},
            {"N_M", p.N},               {"T", p.T},   {"preperiod", p.preperiod},
            {"class_map", cm}};
}

json frame_to_json(const PatternFrame& f) {
    json deltas = json::array(), stages = json::array();
    for (const auto& d : f.delta) deltas.push_back(d.str());
    for (const auto& s : f.stages)
        stages.push_back({{"b", s.b}, {"D", s.D}, {"candidates", s.candidates}, {"I", arc_to_json(s.I)}});
    return {{"ell", f.ell},           {"T", f.T},
            {"t", f.t},               {"b", f.b},
            {"delta", deltas},        {"I", arc_to_json(f.I)},
            {"I_length", f.I.empty ? std::string("0") : f.I.length().str(12)},
            {"D", int_to_json(f.D)},  {"tail", f.tail.str(12)},
            {"bits", f.bits},         {"stages", stages}};
}

PatternFrame frame_from_json(const json& j) {
    PatternFrame f;
    f.bits = field(j, "bits").get<int>();
    f.ell = field(j, "ell").get<int>();
    f.T = field(j, "T").get<std::uint64_t>();
    f.t = field(j, "t").get<std::vector<std::uint64_t>>();
    f.b = field(j, "b").get<std::vector<long>>();
    for (const auto& d : field(j, "delta")) f.delta.push_back(real_from_json(d, f.bits));
    f.I = arc_from_json(field(j, "I"), f.bits);
    f.D = int_from_json(field(j, "D"));
    f.tail = real_from_json(field(j, "tail"), f.bits);
    for (const auto& s : field(j, "stages")) {
        FrameStage st;
        st.b = field(s, "b").get<long>();
        st.D = field(s, "D").get<long>();
        st.candidates = field(s, "candidates").get<std::vector<long>>();
        st.I = arc_from_json(field(s, "I"), f.bits);
        f.stages.push_back(st);
    }
    return f;
}

json verification_to_json(const VerificationReport& r) {
    json j = {{"ok", r.ok},
              {"method", r.method},
              {"detail", r.detail},
              {"bits", r.bits},
              {"complete", r.complete}};
    if (r.counterexample) j["counterexample"] = int_to_json(*r.counterexample);
    if (r.method == "stream") j["ranks"] = r.ranks;
    if (r.method == "analytic") {
        j["k_direct"] = r.k_direct;
        j["d_direct"] = r.d_direct;
        j["d_scan"] = int_to_json(r.d_scan);
    }
    return j;
}

json pipeline_to_json(const MullerAutomaton& A, const PipelineReport& r) {
    json inf = json::array();
    for (State q : r.inf) inf.push_back(A.states[q]);
    return {{"schema", kSchemaDecision},
            {"accept", r.accept},
            {"M", r.params.M},
            {"N", r.params.N},
            {"K", r.params.K},
            {"K_checked_ranks", r.params.K_checked},
            {"modulus", r.modulus},
            {"S", r.S},
            {"N_modulus", r.N_modulus},
            {"state_after_prefix", A.states[r.init_state]},
            {"stabilization_rank", r.stabilization_rank},
            {"inf", inf}};
}

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) bad("cannot open '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    try {
        return json::parse(ss.str());
    } catch (const json::exception& e) {
        bad("malformed JSON in '" + path + "': " + e.what());
    }
}

}  // namespace dynpred
