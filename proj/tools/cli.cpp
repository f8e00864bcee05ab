#include "cli.hpp"

#include "dynpred/error.hpp"
#include "dynpred/io.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <random>
#include <sstream>

namespace dynpred {

namespace {

struct RunConfig {
    int precision = 256;
    std::string mode;
    std::uint64_t horizon_index = 20000000;
    std::uint64_t horizon_rank = 50000000;
    std::string format;
    std::string out;
    std::uint64_t seed = 1;
};

int exit_code(Errc c) {
    switch (c) {
        case Errc::not_admissible:
            return 2;
        case Errc::horizon_exhausted:
        case Errc::stabilization_budget_exhausted:
        case Errc::precision_exhausted:
        case Errc::precision_unreachable:
        case Errc::construction_stalled:
            return 3;
        default:
            return 1;
    }
}

std::vector<std::uint64_t> parse_list(const std::string& s) {
    std::vector<std::uint64_t> v;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty() || item.find_first_not_of("0123456789") != std::string::npos)
            throw Error(Errc::invalid_input, "bad list entry '" + item + "'");
        v.push_back(std::stoull(item));
    }
    return v;
}

void require_format(const RunConfig& cfg, std::initializer_list<const char*> allowed) {
    for (const char* f : allowed)
        if (cfg.format == f) return;
    throw Error(Errc::invalid_input, "format '" + cfg.format + "' is not available for this command");
}

int cmd_analyze(RunConfig cfg, const std::string& file, std::ostream& o) {
    if (cfg.format.empty()) cfg.format = "json";
    require_format(cfg, {"json", "text"});
    auto rec = recurrence_from_json(read_json_file(file));
    auto c = classify(rec, cfg.precision);
    json j = {{"schema", kSchemaAnalysis}, {"recurrence", recurrence_to_json(rec)},
              {"classification", classification_to_json(c)}};
    std::optional<DominantDecomposition> dd;
    if (c.admissible) {
        dd = dominant_decomposition(rec, cfg.precision);
        j["decomposition"] = decomposition_to_json(*dd);
    }
    if (cfg.format == "json") {
        o << j.dump(2) << "\n";
    } else {
        o << "simple: " << (c.simple ? "yes" : "no") << "\n"
          << "degenerate: " << (c.degenerate ? "yes" : "no") << "\n"
          << "dominant roots: " << c.dominant_count << "\n"
          << "admissible: " << (c.admissible ? "yes" : "no") << "\n";
        if (!c.reason.empty()) o << "reason: " << c.reason << "\n";
        if (dd)
            o << "lambda: " << dd->lambda.re.str(20) << " + " << dd->lambda.im.str(20) << " i\n"
              << "theta: " << dd->theta.str(20) << "\n";
    }
    return c.admissible ? 0 : 2;
}

int cmd_enumerate(RunConfig cfg, const std::string& file, std::uint64_t count, const std::string& moduli,
                  bool with_log, std::ostream& o) {
    if (cfg.format.empty()) cfg.format = "csv";
    require_format(cfg, {"csv"});
    auto rec = recurrence_from_json(read_json_file(file));
    std::vector<std::uint64_t> Ms = moduli.empty() ? std::vector<std::uint64_t>{} : parse_list(moduli);
    std::vector<ModularCycle> cycles;
    for (auto M : Ms) {
        if (M < 2) throw Error(Errc::invalid_input, "moduli must be at least 2");
        cycles.push_back(modular_sequence(rec, M));
    }
    o << "m,n";
    for (auto M : Ms) o << ",residue_mod_" << M;
    if (with_log) o << ",log_magnitude";
    o << "\n";
    if (count == 0) return 0;
    PositiveEnumerator en(rec);
    const double L = en.evaluator().log_modulus();
    for (std::uint64_t m = 0; m < count; ++m) {
        auto e = en.next();
        o << e->rank << "," << e->n;
        for (const auto& c : cycles) o << "," << c.residue(e->n);
        if (with_log) {
            if (e->key.sign == 0) o << ",-inf";
            else o << "," << std::setprecision(12) << e->key.log_magnitude(L);
        }
        o << "\n";
    }
    return 0;
}

int cmd_profile(RunConfig cfg, const std::string& file, std::uint64_t M, std::uint64_t word_count,
                std::uint64_t word_from, std::ostream& o) {
    if (cfg.format.empty()) cfg.format = "json";
    require_format(cfg, {"json", "text"});
    auto rec = recurrence_from_json(read_json_file(file));
    auto p = residue_profile(rec, M);
    json j = profile_to_json(p);
    std::vector<std::uint64_t> word;
    if (word_count) word = residue_word(rec, M, word_from, word_count);
    if (cfg.format == "json") {
        if (word_count) j["word"] = {{"from_rank", word_from}, {"letters", word}};
        o << j.dump(2) << "\n";
    } else {
        for (std::size_t i = 0; i < word.size(); ++i) o << (i ? " " : "") << word[i];
        if (word_count) o << "\n";
    }
    return 0;
}

// class tuples t_1..t_l realizing the residue pattern, in lexicographic order
std::vector<std::vector<std::uint64_t>> class_tuples(const ResidueProfile& p, const std::vector<std::uint64_t>& pat) {
    std::vector<std::vector<std::uint64_t>> out{{}};
    for (auto s : pat) {
        std::vector<std::vector<std::uint64_t>> next;
        for (const auto& pre : out)
            for (auto t : p.class_map.at(s)) {
                auto x = pre;
                x.push_back(t);
                next.push_back(x);
            }
        out = std::move(next);
        if (out.size() > 4096) throw Error(Errc::invalid_input, "pattern has too many class choices");
    }
    return out;
}

WitnessOptions witness_options(const RunConfig& cfg, const std::string& deltas, int tries) {
    WitnessOptions w;
    w.rank_budget = cfg.horizon_rank;
    w.tries = tries;
    w.frame.bits = std::max(1024, cfg.precision);
    if (!deltas.empty()) {
        std::stringstream ss(deltas);
        std::string item;
        while (std::getline(ss, item, ',')) w.frame.deltas.push_back(Real::parse(item, w.frame.bits));
    }
    return w;
}

int cmd_find_pattern(RunConfig cfg, const std::string& file, std::uint64_t M, const std::string& pattern,
                     std::uint64_t from, const std::string& deltas, int tries, std::ostream& o) {
    if (cfg.format.empty()) cfg.format = "json";
    require_format(cfg, {"json"});
    const std::string mode = cfg.mode.empty() ? "scan" : cfg.mode;
    auto rec = recurrence_from_json(read_json_file(file));
    auto pat = parse_list(pattern);
    if (pat.empty()) throw Error(Errc::invalid_input, "empty pattern");
    auto prof = residue_profile(rec, M);
    for (auto s : pat)
        if (!prof.in_S(s))
            throw Error(Errc::unsatisfiable_pattern,
                        "letter " + std::to_string(s) + " is not among the recurring residues mod " + std::to_string(M));
    json cert = {{"schema", kSchemaWitness},
                 {"recurrence", recurrence_to_json(rec)},
                 {"modulus", M},
                 {"pattern", pat},
                 {"mode", mode},
                 {"precision", cfg.precision}};
    if (mode == "scan") {
        auto hit = find_factor(rec, M, pat, from, cfg.horizon_index);
        json n = json::array();
        for (auto x : hit.indices) n.push_back(std::to_string(x));
        cert["rank"] = hit.rank;
        cert["witness"] = {{"n", n}};
        cert["scanned"] = {{"ranks", hit.scanned_ranks}, {"indices", hit.scanned_indices}};
        auto dd = dominant_decomposition(rec, cfg.precision);
        std::vector<Int> ns;
        for (auto x : hit.indices) ns.push_back(Int(std::to_string(x)));
        cert["verification"] = verification_to_json(verify_witness(dd, rec, ns));
        o << cert.dump(2) << "\n";
        return 0;
    }
    WitnessMode wm;
    if (mode == "rigorous") wm = WitnessMode::rigorous;
    else if (mode == "empirical") wm = WitnessMode::empirical;
    else throw Error(Errc::invalid_input, "mode must be scan, empirical or rigorous");
    auto opt = witness_options(cfg, deltas, tries);
    auto dd = dominant_decomposition(rec, opt.frame.bits);
    const int ell = static_cast<int>(pat.size());
    std::optional<Error> last;
    for (const auto& t : class_tuples(prof, pat)) {
        try {
            auto w = find_witness(dd, rec, ell, prof.T, t, Int(std::to_string(from)), wm, opt);
            json n = json::array();
            for (const auto& x : w.n) n.push_back(int_to_json(x));
            cert["T"] = prof.T;
            cert["t"] = t;
            cert["witness"] = {{"n", n}, {"b", w.b}};
            if (wm == WitnessMode::rigorous) cert["frame"] = frame_to_json(select_pattern_frame(dd, ell, prof.T, t, opt.frame));
            cert["verification"] = verification_to_json(w.record);
            o << cert.dump(2) << "\n";
            return 0;
        } catch (const Error& e) {
            if (e.code() != Errc::construction_stalled && e.code() != Errc::horizon_exhausted) throw;
            last = e;
        }
    }
    throw *last;
}

int cmd_verify(RunConfig cfg, const std::string& file, std::ostream& o) {
    if (cfg.format.empty()) cfg.format = "json";
    require_format(cfg, {"json"});
    json cert = read_json_file(file);
    if (!cert.contains("schema") || cert["schema"] != kSchemaWitness)
        throw Error(Errc::invalid_input, "not a witness certificate");
    auto rec = recurrence_from_json(cert.at("recurrence"));
    const auto M = cert.at("modulus").get<std::uint64_t>();
    const auto pat = cert.at("pattern").get<std::vector<std::uint64_t>>();
    std::vector<Int> n;
    for (const auto& x : cert.at("witness").at("n")) n.push_back(int_from_json(x));
    if (n.size() != pat.size()) throw Error(Errc::invalid_input, "witness and pattern lengths differ");
    json rep = {{"schema", kSchemaVerification}};
    // residues of the values
    auto mc = modular_sequence(rec, M);
    bool residues = true;
    for (std::size_t j = 0; j < n.size(); ++j) residues = residues && mc.residue(n[j]) == pat[j];
    rep["residues"] = residues;
    int bits = std::max(cfg.precision, cert.contains("frame") ? cert["frame"].at("bits").get<int>() : 0);
    auto dd = dominant_decomposition(rec, std::max(bits, 1024));
    auto v = verify_witness(dd, rec, n);
    rep["verification"] = verification_to_json(v);
    bool ok = residues && v.ok;
    if (cert.contains("T")) {
        const auto T = cert["T"].get<std::uint64_t>();
        const auto t = cert["t"].get<std::vector<std::uint64_t>>();
        bool classes = t.size() == n.size();
        for (std::size_t j = 0; classes && j < n.size(); ++j)
            classes = Int(n[j] % Int(std::to_string(T))) == Int(std::to_string(t[j]));
        rep["classes"] = classes;
        ok = ok && classes;
    }
    if (cert.contains("frame")) {
        auto f = frame_from_json(cert["frame"]);
        auto fc = check_frame(dd, f);
        rep["frame"] = {{"residues", fc.residues}, {"containment", fc.containment}, {"exclusion", fc.exclusion},
                        {"tail", fc.tail}, {"base", fc.base}};
        // n_1 theta + phi inside the frame interval
        const int w = dd.bits;
        Real x = mul_int(Real::with_bits(w + 256, dd.theta), n[0]) + dd.phi;
        Real err = dd.radius * Real(Int(abs(n[0]) + 1), w) + Real::two_pow(-w + 8, w);
        int in = f.I.contains(x, err);
        rep["frame"]["hit"] = in == 1;
        ok = ok && fc.ok() && in == 1;
    }
    if (cert.contains("rank") && v.method == "stream" && !v.ranks.empty()) {
        bool rank = v.ranks.front() == cert["rank"].get<std::uint64_t>();
        rep["rank"] = rank;
        ok = ok && rank;
    }
    rep["ok"] = ok;
    o << rep.dump(2) << "\n";
    return ok ? 0 : 1;
}

int cmd_intervals(RunConfig cfg, const std::string& file, const std::string& range, const std::string& gamma,
                  const std::string& delta, int check, std::ostream& o) {
    if (cfg.format.empty()) cfg.format = "csv";
    require_format(cfg, {"csv"});
    auto rec = recurrence_from_json(read_json_file(file));
    auto colon = range.find(':');
    if (colon == std::string::npos) throw Error(Errc::invalid_input, "d-range must look like a:b");
    long lo, hi;
    try {
        lo = std::stol(range.substr(0, colon));
        hi = std::stol(range.substr(colon + 1));
    } catch (const std::exception&) {
        throw Error(Errc::invalid_input, "d-range must look like a:b");
    }
    const int bits = std::max(cfg.precision, 128);
    auto dd = dominant_decomposition(rec, bits);
    Real g = Real::parse(gamma, bits), d = Real::parse(delta, bits);
    o << "d,lo,hi,length,length_lower,length_upper,anchor,anchor_radius";
    if (check) o << ",spot_check";
    o << "\n";
    std::mt19937_64 rng(cfg.seed);
    const int digits = 20;
    for (long k = lo; k <= hi; ++k) {
        auto J = j_interval(dd, {k, g, d});
        auto A = j_anchor(dd, k, d);
        o << k << ",";
        if (J.arc.empty) o << ",,0";
        else o << J.arc.lo.str(digits) << "," << J.arc.hi.str(digits) << "," << J.length().str(digits);
        std::string lb, ub;
        if (k >= 1 && g < d && g.sign() >= 0) {
            try {
                auto L = j_length_bounds(dd, {k, g, d});
                lb = L.lower.str(8);
                ub = L.upper.str(8);
            } catch (const Error&) {
            }
        }
        o << "," << lb << "," << ub << "," << A.point.str(digits) << "," << A.radius.str(8);
        if (check) {
            // random interior points must satisfy gamma cos x < |lambda|^k cos(x + k theta) < delta cos x,
            // evaluated independently at doubled precision
            bool ok = true;
            if (!J.arc.empty && k >= 0) {
                const int w = 2 * bits;
                Real mk = pow(Real::with_bits(w, dd.modulus), static_cast<unsigned long>(k));
                Real kt = mul_int(Real::with_bits(w, dd.theta), Int(k));
                std::uniform_real_distribution<double> U(0.02, 0.98);
                for (int s = 0; s < check && ok; ++s) {
                    Real x = J.arc.lo + (J.arc.hi - J.arc.lo) * Real(U(rng));
                    Real v = mk * cos(x + kt), c = cos(x);
                    ok = g * c < v && v < d * c;
                }
            }
            o << "," << (ok ? "ok" : "FAIL");
        }
        o << "\n";
    }
    return 0;
}

int cmd_decide(RunConfig cfg, const std::string& afile, const std::string& rfile, std::uint64_t sparsity,
               std::ostream& o) {
    if (cfg.format.empty()) cfg.format = "json";
    require_format(cfg, {"json", "text"});
    auto A = automaton_from_json(read_json_file(afile));
    auto rec = recurrence_from_json(read_json_file(rfile));
    auto c = classify(rec, cfg.precision);
    if (!c.admissible) throw Error(Errc::not_admissible, c.reason);
    PipelineOptions opt;
    opt.sparsity_ranks = sparsity;
    opt.budget = cfg.horizon_rank;
    auto r = decide_predicate_acceptance(A, rec, opt);
    if (cfg.format == "json") o << pipeline_to_json(A, r).dump(2) << "\n";
    else o << (r.accept ? "accept" : "reject") << "\n";
    return 0;
}

}  // namespace

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Dynamical predicates of linear recurrences with two dominant roots"};
    app.require_subcommand(1);
    app.fallthrough();
    RunConfig cfg;
    if (const char* env = std::getenv("DYNPRED_PRECISION")) {
        try {
            cfg.precision = std::stoi(env);
        } catch (const std::exception&) {
            err << "error: DYNPRED_PRECISION is not an integer\n";
            return 1;
        }
    }
    app.add_option("--precision", cfg.precision, "working precision in bits (default $DYNPRED_PRECISION or 256)")
        ->check(CLI::Range(64, 1 << 20));
    app.add_option("--mode", cfg.mode, "scan | empirical | rigorous (find-pattern)");
    app.add_option("--horizon-index", cfg.horizon_index, "index budget for scans")->check(CLI::PositiveNumber);
    app.add_option("--horizon-rank", cfg.horizon_rank, "rank budget for scans")->check(CLI::PositiveNumber);
    app.add_option("--format", cfg.format, "json | csv | text")->check(CLI::IsMember({"json", "csv", "text"}));
    app.add_option("--out", cfg.out, "write the result to this file");
    app.add_option("--seed", cfg.seed, "seed for sampled checks");

    std::string file, afile;
    auto* analyze = app.add_subcommand("analyze", "classify a recurrence and report its dominant part");
    analyze->add_option("recurrence", file)->required();

    std::uint64_t count = 0;
    std::string moduli;
    bool with_log = false;
    auto* enumerate = app.add_subcommand("enumerate", "non-negative values in increasing order as CSV");
    enumerate->add_option("recurrence", file)->required();
    enumerate->add_option("--count", count)->required();
    enumerate->add_option("--moduli", moduli, "comma separated");
    enumerate->add_flag("--log", with_log, "add log|u_n|");

    std::uint64_t M = 0, word_count = 0, word_from = 0;
    auto* profile = app.add_subcommand("profile", "residue profile of the sorted stream");
    profile->add_option("recurrence", file)->required();
    profile->add_option("--modulus", M)->required()->check(CLI::Range(2ULL, 1ULL << 40));
    profile->add_option("--word", word_count, "also emit this many residues");
    profile->add_option("--from-rank", word_from);

    std::string pattern, deltas;
    std::uint64_t from = 0;
    int tries = 64;
    auto* find = app.add_subcommand("find-pattern", "occurrence or witness for a residue pattern");
    find->add_option("recurrence", file)->required();
    find->add_option("--modulus", M)->required()->check(CLI::Range(2ULL, 1ULL << 40));
    find->add_option("--pattern", pattern, "comma separated residues")->required();
    find->add_option("--from", from, "first rank (scan) or least index (witness modes)");
    find->add_option("--deltas", deltas, "ratio bounds delta_2..delta_l for rigorous frames");
    find->add_option("--tries", tries, "rotation hits tried in rigorous mode")->check(CLI::PositiveNumber);

    auto* verify = app.add_subcommand("verify-witness", "re-derive every claim of a witness certificate");
    verify->add_option("certificate", file)->required();

    std::string range, gamma = "1", delta = "3";
    int check = 0;
    auto* intervals = app.add_subcommand("intervals", "J_d(gamma, delta) endpoints, lengths and anchors as CSV");
    intervals->add_option("recurrence", file)->required();
    intervals->add_option("--d-range", range, "a:b inclusive")->required();
    intervals->add_option("--gamma", gamma);
    intervals->add_option("--delta", delta);
    intervals->add_option("--check", check, "random interior points checked per row");

    std::uint64_t sparsity = 100000;
    auto* decide = app.add_subcommand("decide", "Muller acceptance of the characteristic word of the value set");
    decide->add_option("automaton", afile)->required();
    decide->add_option("recurrence", file)->required();
    decide->add_option("--sparsity-ranks", sparsity)->check(CLI::PositiveNumber);

    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e, out, err);
        return code == 0 ? 0 : 1;
    }

    std::ofstream file_out;
    std::ostream* o = &out;
    if (!cfg.out.empty()) {
        file_out.open(cfg.out);
        if (!file_out) {
            err << "error: cannot write '" << cfg.out << "'\n";
            return 1;
        }
        o = &file_out;
    }
    try {
        if (*analyze) return cmd_analyze(cfg, file, *o);
        if (*enumerate) return cmd_enumerate(cfg, file, count, moduli, with_log, *o);
        if (*profile) return cmd_profile(cfg, file, M, word_count, word_from, *o);
        if (*find) return cmd_find_pattern(cfg, file, M, pattern, from, deltas, tries, *o);
        if (*verify) return cmd_verify(cfg, file, *o);
        if (*intervals) return cmd_intervals(cfg, file, range, gamma, delta, check, *o);
        if (*decide) return cmd_decide(cfg, afile, file, sparsity, *o);
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return exit_code(e.code());
    } catch (const json::exception& e) {
        err << "error: invalid_input: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}

}  // namespace dynpred
