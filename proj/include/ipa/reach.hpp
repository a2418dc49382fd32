#pragma once

// Symbolic abstract reachability over indexed predicates.  Each image is
// the set of predicate valuations satisfying a quantifier-free formula,
// enumerated by projected AllSAT.

#include <chrono>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ipa/abstraction.hpp"
#include "ipa/encoder.hpp"
#include "ipa/error.hpp"
#include "ipa/expr.hpp"
#include "ipa/sat.hpp"
#include "ipa/system_model.hpp"

namespace ipa {

struct IterationStats {
    std::size_t new_cubes = 0;
    int solver_calls = 0;
    double seconds = 0;
};

struct ReachResult {
    CubeSet rho;
    int iterations = 0; // image computations after the initial one
    std::vector<IterationStats> per_iteration; // entry 0 is the initial set
    bool converged = false;
};

/// Reachability engine for one model and predicate bank.  Compositions of
/// the predicate definitions with the initial and next-state expressions
/// are computed once.
class ReachEngine {
public:
    ReachEngine(const SystemModel& m, const PredicateBank& b, SatConfig cfg = {})
        : model_(m), bank_(b), cfg_(std::move(cfg)) {
        for (const auto& p : b.preds) {
            const Expr def = b.defs.at(p);
            Expr init = compose_init(def, m);
            Expr next = compose_next(def, m);
            const bool axiom = b.axioms.count(p) != 0;
            // An axiom's definition is asserted outright and its bit pinned to true.
            init_parts_.push_back(axiom ? mk_and({mk_bool_sym(p), init}) : mk_iff(mk_bool_sym(p), init));
            next_parts_.push_back(axiom ? mk_and({mk_bool_sym(p), next}) : mk_iff(mk_bool_sym(p), next));
        }
    }

    const PredicateBank& bank() const { return bank_; }

    /// Predicate valuations of the initial states.
    CubeSet initial(IterationStats* stats = nullptr) const {
        return enumerate(mk_and(init_parts_), std::nullopt, stats);
    }

    /// Image formula whose P-solutions are the abstract successors of rho.
    Expr image_formula(const CubeSet& rho, const SubstitutionSet& pi) const {
        std::vector<Expr> parts{concretization_formula(rho, bank_, pi)};
        parts.insert(parts.end(), next_parts_.begin(), next_parts_.end());
        return mk_and(std::move(parts));
    }

    /// rho together with its abstract successors under Π.
    CubeSet step(const CubeSet& rho, const SubstitutionSet& pi, IterationStats* stats = nullptr) const {
        if (pi.empty()) throw Error(ErrorCode::EmptySubstitutionSet, "substitution set is empty");
        if (rho.empty()) {
            if (stats) *stats = {};
            return rho;
        }
        return rho.united(enumerate(image_formula(rho, pi), rho, stats));
    }

    /// Successors of rho outside of rho.
    CubeSet successors_outside(const CubeSet& rho, const SubstitutionSet& pi) const {
        if (pi.empty()) throw Error(ErrorCode::EmptySubstitutionSet, "substitution set is empty");
        if (rho.empty()) return rho;
        return enumerate(image_formula(rho, pi), rho, nullptr);
    }

    ReachResult reach(const SubstitutionSet& pi, int max_iters) const {
        if (pi.empty()) throw Error(ErrorCode::EmptySubstitutionSet, "substitution set is empty");
        ReachResult r;
        IterationStats st;
        r.rho = initial(&st);
        r.per_iteration.push_back(st);
        for (int it = 1; it <= max_iters; ++it) {
            CubeSet next = step(r.rho, pi, &st);
            r.per_iteration.push_back(st);
            r.iterations = it;
            if (next == r.rho) {
                r.converged = true;
                break;
            }
            r.rho = std::move(next);
        }
        return r;
    }

    /// Valuations over P satisfying a formula over P, restricted to the
    /// axiom-respecting ones.
    CubeSet denotation(Expr chi) const {
        for (const auto& s : free_symbols(chi)) {
            if (std::find(bank_.preds.begin(), bank_.preds.end(), s) == bank_.preds.end()) {
                throw Error(ErrorCode::FreeSymbolOutOfScope, "'" + s + "' is not a predicate name");
            }
        }
        std::vector<Expr> parts{chi};
        for (const auto& q : bank_.axioms) parts.push_back(mk_bool_sym(q));
        return all_sat_project(encode(mk_and(std::move(parts)), bank_.preds)).cubes;
    }

private:
    CubeSet enumerate(Expr e, const std::optional<CubeSet>& exclude, IterationStats* stats) const {
        const auto t0 = std::chrono::steady_clock::now();
        AllSatResult r = all_sat_project(encode(e, bank_.preds), cfg_, exclude);
        if (stats) {
            stats->new_cubes = r.cubes.size();
            stats->solver_calls = r.solver_calls;
            stats->seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        }
        return r.cubes;
    }

    const SystemModel& model_;
    const PredicateBank& bank_;
    SatConfig cfg_;
    std::vector<Expr> init_parts_;
    std::vector<Expr> next_parts_;
};

inline CubeSet initial_abstract(const SystemModel& m, const PredicateBank& b, const SatConfig& cfg = {}) {
    return ReachEngine(m, b, cfg).initial();
}

inline CubeSet step(const CubeSet& rho, const SystemModel& m, const PredicateBank& b, const SubstitutionSet& pi,
                    const SatConfig& cfg = {}) {
    return ReachEngine(m, b, cfg).step(rho, pi);
}

inline ReachResult reach(const SystemModel& m, const PredicateBank& b, const SubstitutionSet& pi, int max_iters,
                         const SatConfig& cfg = {}) {
    return ReachEngine(m, b, cfg).reach(pi, max_iters);
}

// ---- verdicts ---------------------------------------------------------------------

enum class Verdict { Holds, Unknown };

inline const char* to_string(Verdict v) { return v == Verdict::Holds ? "HOLDS" : "UNKNOWN"; }

struct PropertyVerdict {
    Verdict status = Verdict::Holds;
    std::vector<std::uint64_t> witnesses; // violating cubes, at most the cap
};

/// Reasons a property may fail to be proved by this method.
inline const std::vector<std::string>& unknown_reasons() {
    static const std::vector<std::string> reasons{
        "the system may genuinely violate the property",
        "the predicates may be too weak to express an invariant that implies the property",
        "the substitution set may lack an instantiation the proof needs",
        "no finite set of instantiations may be enough to prove the property",
    };
    return reasons;
}

/// HOLDS iff psi is true on every cube of rho.
inline PropertyVerdict check_property(const CubeSet& rho, Expr psi, const PredicateBank& b, std::size_t cap = 10) {
    for (const auto& s : free_symbols(psi)) {
        if (std::find(b.preds.begin(), b.preds.end(), s) == b.preds.end()) {
            throw Error(ErrorCode::FreeSymbolOutOfScope, "property mentions '" + s + "', which is not a predicate");
        }
    }
    PropertyVerdict v;
    for (auto c : rho) {
        Interp in;
        for (int j = 0; j < b.width(); ++j) in.set(b.preds[static_cast<std::size_t>(j)], CubeSet::bit(c, j));
        if (!eval_bool(psi, in)) {
            v.status = Verdict::Unknown;
            if (v.witnesses.size() < cap) v.witnesses.push_back(c);
        }
    }
    return v;
}

struct InductiveResult {
    bool inductive = false;
    CubeSet base_failures;
    CubeSet step_failures;
};

/// Checks that the initial abstract states satisfy chi and that every
/// Π-successor of a chi-state satisfies chi.  Success means the universal
/// closure of chi is an invariant; this is a sufficient condition only,
/// relative to Π.
inline InductiveResult check_inductive(const CubeSet& chi_set, const ReachEngine& eng, const SubstitutionSet& pi) {
    InductiveResult r;
    const CubeSet init = eng.initial();
    r.base_failures = init.filtered([&](std::uint64_t c) { return !chi_set.contains(c); });
    r.step_failures = eng.successors_outside(chi_set, pi);
    r.inductive = r.base_failures.empty() && r.step_failures.empty();
    return r;
}

inline InductiveResult check_inductive(Expr chi, const ReachEngine& eng, const SubstitutionSet& pi) {
    return check_inductive(eng.denotation(chi), eng, pi);
}

inline InductiveResult check_inductive(Expr chi, const SystemModel& m, const PredicateBank& b,
                                       const SubstitutionSet& pi, const SatConfig& cfg = {}) {
    return check_inductive(chi, ReachEngine(m, b, cfg), pi);
}

} // namespace ipa
