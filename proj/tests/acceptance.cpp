// Acceptance gate.  Runs each criterion in turn and prints one PASS/FAIL
// line per criterion; the exit status is non-zero if any of them fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>

#include "ipa/oracle.hpp"
#include "ipa/reach.hpp"
#include "support/checks.hpp"
#include "support/corpus.hpp"
#include "support/galois.hpp"

using namespace ipa;

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

// A criterion returns an empty string on success or the reason it failed.
// `note` collects details worth printing either way.
struct Criterion {
    int id;
    std::string title;
    std::function<std::string(std::ostringstream& note)> body;
};

std::string show(const CubeSet& s) {
    std::string out = "{";
    for (const auto& c : s.listing()) out += (out.size() > 1 ? "," : "") + c;
    return out + "}";
}

SubstitutionSet identity_only(const PredicateBank& b) {
    SubstitutionSet s;
    s.add(identity_substitution(b));
    return s;
}

std::string running_trace(std::ostringstream& note) {
    const auto t0 = Clock::now();
    const ModelFile& mf = testgen::running_model();
    const ReachEngine eng(mf.model, mf.bank);
    const SubstitutionSet pi = default_substitutions(mf);
    const CubeSet rho0 = eng.initial();
    const CubeSet rho1 = eng.step(rho0, pi);
    const CubeSet rho2 = eng.step(rho1, pi);
    const ReachResult r = eng.reach(pi, 64);
    const bool holds = check_property(r.rho, mf.properties.at(0).second, mf.bank).status == Verdict::Holds;
    const double secs = since(t0);
    note << "rho0 " << show(rho0) << ", rho1 " << show(rho1) << ", " << secs << " s";
    if (rho0 != CubeSet(2, {"11", "00"})) return "rho0 is " + show(rho0);
    if (rho1 != CubeSet(2, {"11", "10", "00"})) return "rho1 is " + show(rho1);
    if (rho2 != rho1) return "rho2 differs from rho1";
    if (!r.converged || r.rho != rho1 || r.iterations != 2) return "reach did not stop at rho1 after 2 steps";
    if (!holds) return "safe is not HOLDS";
    if (secs >= 1.0) return "took longer than 1 s";
    return {};
}

std::string encoded_step(std::ostringstream& note) {
    const ModelFile& mf = testgen::running_model();
    const ReachEngine eng(mf.model, mf.bank);
    const Expr image = eng.image_formula(CubeSet(2, {"11", "00"}), default_substitutions(mf));
    const CubeSet sols = all_sat_project(encode(image, mf.bank.preds)).cubes;
    note << "solutions " << show(sols);
    // Everything except p false, q true.
    if (sols != CubeSet(2, {"11", "10", "00"})) return "solutions are " + show(sols);
    return {};
}

std::string german(std::ostringstream& note) {
    const auto t0 = Clock::now();
    const ModelFile& mf = testgen::german_model();
    const std::size_t plain = mf.bank.preds.size() - mf.bank.axioms.size();
    const ReachResult r = reach(mf.model, mf.bank, default_substitutions(mf), 25);
    const double secs = since(t0);
    note << r.iterations << " iterations (published figure: 9), " << r.rho.size() << " cubes, " << secs << " s";
    if (plain != 13) return std::to_string(plain) + " predicates instead of 13";
    if (!mf.model.sig.contains("last_granted")) return "no last_granted variable";
    if (!r.converged) return "not converged within 25 iterations";
    for (const auto& [name, psi] : mf.properties) {
        if (check_property(r.rho, psi, mf.bank).status != Verdict::Holds) return name + " is not HOLDS";
    }
    if (secs > 600) return "took longer than 10 minutes";
    return {};
}

std::string galois(std::ostringstream& note) {
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        const std::string err = testgen::check_galois_instance(seed);
        if (!err.empty()) return "seed " + std::to_string(seed) + ": " + err;
    }
    const auto w = testgen::table_one_witness();
    note << "100 instances; gamma sizes {TF} " << w.gamma_tf << ", {TT} " << w.gamma_tt << ", {TF,TT} "
         << w.gamma_union;
    if (w.gamma_tf != 0 || w.gamma_tt != 0) return "gamma of a single cube is not empty";
    if (w.gamma_union == 0 || !w.union_is_nonnegative) return "gamma of the union is not the non-negative tables";
    return {};
}

std::string monotonicity(std::ostringstream& note) {
    bool strict = false;
    for (const ModelFile* mf : {&testgen::running_model(), &testgen::german_model()}) {
        const ReachResult full = reach(mf->model, mf->bank, default_substitutions(*mf), 64);
        const ReachResult id = reach(mf->model, mf->bank, identity_only(mf->bank), 64);
        note << (mf == &testgen::running_model() ? "" : "; ") << full.rho.size() << " vs " << id.rho.size() << " cubes";
        if (!full.converged || !id.converged) return "a run did not converge";
        if (!full.rho.subset_of(id.rho)) return "auto fixpoint is not inside the identity-only fixpoint";
        strict = strict || full.rho.size() < id.rho.size();
    }
    if (!strict) return "containment is not strict on any model";
    return {};
}

std::string soundness(std::ostringstream& note) {
    {
        const ModelFile& mf = testgen::running_model();
        Scope sc;
        sc.lo = -2;
        sc.hi = 3;
        sc.overrides["i"] = {-2, 2}; // keeps F(i + 1) inside the table
        const ReachResult r = reach(mf.model, mf.bank, default_substitutions(mf), 64);
        const SoundnessReport rep = soundness_check(mf.model, mf.bank, r.rho, sc);
        note << "running " << rep.states_checked << " states; ";
        if (!rep.ok()) return "running example: " + rep.violations.front().state;
    }
    {
        const ModelFile& mf = testgen::german_model();
        Scope sc;
        sc.lo = 0;
        sc.hi = 1;
        const ReachResult r = reach(mf.model, mf.bank, default_substitutions(mf), 64);
        const SoundnessReport rep = soundness_check(mf.model, mf.bank, r.rho, sc);
        note << "german " << rep.states_checked << " states";
        if (!rep.ok()) return "german-cache: " + rep.violations.front().state;
    }
    return {};
}

std::string allsat(std::ostringstream& note) {
    for (std::uint64_t seed = 1; seed <= 200; ++seed) {
        const std::string err = testgen::check_allsat_instance(seed);
        if (!err.empty()) return "seed " + std::to_string(seed) + ": " + err;
    }
    note << "200 instances";
    return {};
}

std::string encoder(std::ostringstream& note) {
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        const std::string err = testgen::check_encoder_instance(seed, true);
        if (!err.empty()) return "seed " + std::to_string(seed) + ": " + err;
    }
    note << "100 instances, widened domains agree";
    return {};
}

std::string inductive(std::ostringstream& note) {
    for (const ModelFile* mf : {&testgen::running_model(), &testgen::german_model(), &testgen::german_dual_model()}) {
        const SubstitutionSet pi = default_substitutions(*mf);
        const ReachEngine eng(mf->model, mf->bank);
        const ReachResult r = eng.reach(pi, 64);
        if (!r.converged) return "a corpus run did not converge";
        if (!check_inductive(formula_of(r.rho, mf->bank), eng, pi).inductive) return "fixpoint is not inductive";
    }
    const ModelFile& mf = testgen::running_model();
    const SubstitutionSet pi = default_substitutions(mf);
    const auto pred = [&](const char* s) { return parse_expr(s, mf.env()); };
    if (!check_inductive(pred("p | !q"), mf.model, mf.bank, pi).inductive) return "p | !q is not inductive";
    const InductiveResult both = check_inductive(pred("p & q"), mf.model, mf.bank, pi);
    if (both.inductive || both.base_failures.empty()) return "p & q does not fail its base case";
    note << "all three corpus fixpoints inductive; p & q base failures " << show(both.base_failures);
    return {};
}

} // namespace

int main() {
    const std::vector<Criterion> all{
        {1, "running example trace", running_trace},
        {2, "encoded step solutions", encoded_step},
        {3, "german-cache converges, coherence holds", german},
        {4, "Galois laws at finite scope", galois},
        {5, "monotonicity in the substitution set", monotonicity},
        {6, "soundness against the explicit oracle", soundness},
        {7, "AllSAT against brute force", allsat},
        {8, "encoder against bounded evaluation", encoder},
        {9, "fixpoint inductiveness", inductive},
    };
    int failed = 0;
    for (const auto& c : all) {
        std::ostringstream note;
        std::string err;
        try {
            err = c.body(note);
        } catch (const std::exception& e) {
            err = std::string("exception: ") + e.what();
        }
        const bool ok = err.empty();
        failed += ok ? 0 : 1;
        std::printf("%s %d %s: %s\n", ok ? "PASS" : "FAIL", c.id, c.title.c_str(), ok ? note.str().c_str() : err.c_str());
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(all.size()) - failed, all.size());
    return failed == 0 ? 0 : 1;
}
