// ipa: command-line front end.
//
//   ipa verify <model> [options]   run abstract reachability and check properties
//   ipa sat <file.cnf>             solve a DIMACS file (usable as an external backend)
//
// Exit status: 0 when everything checked holds, 1 when something could not
// be established (an UNKNOWN property or a missed fixpoint, for example),
// 2 on usage or input errors.

#include <chrono>
#include <cstdint>
#include <exception>
#include <fstream>
#include <iostream>
#include <regex>
#include <sstream>
#include <tuple>
#include <string>

#include <CLI11.hpp>

#include "ipa/model_file.hpp"
#include "ipa/oracle.hpp"
#include "ipa/reach.hpp"
#include "ipa/report.hpp"
#include "ipa/sat.hpp"

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct VerifyArgs {
    std::string model;
    int max_iters = 64;
    std::string subs = "auto";
    std::string sat = "internal";
    std::string dump_reach;
    std::string check_inductive;
    std::string oracle_scope;
    std::string json;
    std::uint64_t seed = 0;
    bool quiet = false;
};

// "lo..hi" optionally followed by ",name=lo..hi" overrides for single symbols.
ipa::Scope parse_scope(const std::string& text) {
    static const std::regex range(R"(\s*(-?\d+)\s*\.\.\s*(-?\d+)\s*)");
    auto parse_range = [&](const std::string& t) {
        std::smatch m;
        if (!std::regex_match(t, m, range)) {
            throw ipa::Error(ipa::ErrorCode::ParseError, "expected lo..hi, got '" + t + "'");
        }
        const std::int64_t lo = std::stoll(m[1]), hi = std::stoll(m[2]);
        if (lo > hi) throw ipa::Error(ipa::ErrorCode::ParseError, "empty range '" + t + "'");
        return std::make_pair(lo, hi);
    };
    std::vector<std::string> parts;
    std::stringstream ss(text);
    for (std::string part; std::getline(ss, part, ',');) parts.push_back(part);
    if (parts.empty()) throw ipa::Error(ipa::ErrorCode::ParseError, "empty scope");
    ipa::Scope sc;
    std::tie(sc.lo, sc.hi) = parse_range(parts[0]);
    for (std::size_t k = 1; k < parts.size(); ++k) {
        const auto eq = parts[k].find('=');
        if (eq == std::string::npos) throw ipa::Error(ipa::ErrorCode::ParseError, "expected name=lo..hi, got '" + parts[k] + "'");
        std::string name = parts[k].substr(0, eq);
        name.erase(0, name.find_first_not_of(' '));
        name.erase(name.find_last_not_of(' ') + 1);
        sc.overrides[name] = parse_range(parts[k].substr(eq + 1));
    }
    return sc;
}

int verify(const VerifyArgs& a) {
    const auto t0 = Clock::now();
    ipa::ModelFile mf = ipa::load_model(a.model);
    ipa::SatConfig cfg = ipa::SatConfig::parse(a.sat);
    cfg.seed = a.seed;
    const ipa::SubstitutionSet pi =
        a.subs == "auto" ? ipa::default_substitutions(mf) : ipa::parse_substitutions(ipa::read_file(a.subs), mf);
    std::optional<ipa::Expr> chi;
    if (!a.check_inductive.empty()) chi = ipa::parse_expr(a.check_inductive, mf.env());
    std::optional<ipa::Scope> scope;
    if (!a.oracle_scope.empty()) scope = parse_scope(a.oracle_scope);

    ipa::RunReport rep;
    rep.model = a.model;
    rep.predicates = mf.bank.preds;
    for (const auto& s : pi.elements) rep.substitutions.push_back(ipa::to_string(s));
    rep.timings.parse = since(t0);

    const auto t1 = Clock::now();
    ipa::ReachEngine eng(mf.model, mf.bank, cfg);
    rep.reach = eng.reach(pi, a.max_iters);
    rep.timings.reach = since(t1);

    for (const auto& [name, psi] : mf.properties) {
        rep.properties.push_back({name, ipa::render(psi), ipa::check_property(rep.reach.rho, psi, mf.bank)});
    }
    if (chi) rep.inductive = ipa::InductiveReport{a.check_inductive, ipa::check_inductive(*chi, eng, pi)};
    if (scope) rep.soundness = ipa::soundness_check(mf.model, mf.bank, rep.reach.rho, *scope);
    rep.timings.total = since(t0);

    if (!a.dump_reach.empty()) {
        std::ofstream out(a.dump_reach);
        if (!out) throw ipa::Error(ipa::ErrorCode::ParseError, "cannot write '" + a.dump_reach + "'");
        out << ipa::dump_cubes(rep.reach.rho, mf.bank);
    }
    if (!a.json.empty()) {
        std::ofstream out(a.json);
        if (!out) throw ipa::Error(ipa::ErrorCode::ParseError, "cannot write '" + a.json + "'");
        out << ipa::render_json(rep).dump(2) << "\n";
    }
    if (!a.quiet) std::cout << ipa::render_text(rep);

    bool ok = rep.reach.converged && rep.all_hold();
    if (rep.inductive && !rep.inductive->result.inductive) ok = false;
    if (rep.soundness && !rep.soundness->ok()) ok = false;
    return ok ? 0 : 1;
}

int sat(const std::string& path) {
    const ipa::PropFormula f = ipa::parse_dimacs(ipa::read_file(path));
    const ipa::SatResult r = ipa::solve(f, {});
    if (!r.sat()) {
        std::cout << "s UNSATISFIABLE\n";
        return 20;
    }
    std::cout << "s SATISFIABLE\nv";
    for (int v = 1; v <= f.num_vars; ++v) std::cout << " " << (r.value(v) ? v : -v);
    std::cout << " 0\n";
    return 10;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Indexed predicate abstraction verifier"};
    app.require_subcommand(1);

    VerifyArgs va;
    auto* verify_cmd = app.add_subcommand("verify", "Compute abstract reachable states and check properties");
    verify_cmd->add_option("model", va.model, "Model file")->required();
    verify_cmd->add_option("--max-iters", va.max_iters, "Iteration limit")->check(CLI::NonNegativeNumber);
    verify_cmd->add_option("--subs", va.subs, "Substitution file, or 'auto'");
    verify_cmd->add_option("--sat", va.sat, "internal | dimacs:<command>");
    verify_cmd->add_option("--dump-reach", va.dump_reach, "Write the reachable cubes to this file");
    verify_cmd->add_option("--check-inductive", va.check_inductive, "Formula over predicate names to test");
    verify_cmd->add_option("--oracle-scope", va.oracle_scope, "Check soundness against explicit states: lo..hi[,name=lo..hi]...");
    verify_cmd->add_option("--json", va.json, "Write a JSON report to this file");
    verify_cmd->add_option("--seed", va.seed, "Perturb the SAT solver's initial variable order");
    verify_cmd->add_flag("-q,--quiet", va.quiet, "Suppress the text report");

    std::string cnf;
    auto* sat_cmd = app.add_subcommand("sat", "Solve a DIMACS CNF file; exit 10 if satisfiable, 20 if not");
    sat_cmd->add_option("file", cnf, "CNF file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (*verify_cmd) return verify(va);
        return sat(cnf);
    } catch (const ipa::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
