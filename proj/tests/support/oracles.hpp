#pragma once

// Independent reference computations used by the unit and acceptance
// tests.  None of them go through the encoder or the SAT solver.

#include <cstdint>
#include <cstdlib>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "ipa/cnf.hpp"
#include "ipa/expr.hpp"
#include "ipa/substitute.hpp"

namespace ipa::testgen {

// ---- random CNF ---------------------------------------------------------------

struct RandomCnf {
    int num_vars = 0;
    std::vector<Clause> clauses;
    std::vector<int> preserved; // variables, in cube bit order
};

inline RandomCnf random_cnf(std::mt19937_64& rng, int max_vars = 12, int max_preserved = 6) {
    auto uni = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
    RandomCnf r;
    r.num_vars = uni(1, max_vars);
    const int k = uni(0, std::min(max_preserved, r.num_vars));
    std::vector<int> vars(static_cast<std::size_t>(r.num_vars));
    for (int v = 0; v < r.num_vars; ++v) vars[static_cast<std::size_t>(v)] = v + 1;
    std::shuffle(vars.begin(), vars.end(), rng);
    r.preserved.assign(vars.begin(), vars.begin() + k);
    // Clause/variable ratios around the threshold give a mix of sat and unsat.
    const int m = uni(0, static_cast<int>(4.5 * r.num_vars) + 1);
    for (int c = 0; c < m; ++c) {
        Clause cl;
        const int len = uni(1, 3);
        for (int l = 0; l < len; ++l) {
            const int v = uni(1, r.num_vars);
            cl.push_back(uni(0, 1) ? v : -v);
        }
        r.clauses.push_back(cl);
    }
    return r;
}

inline PropFormula as_formula(const RandomCnf& r) {
    PropFormula f;
    f.num_vars = r.num_vars;
    f.clauses = r.clauses;
    for (std::size_t j = 0; j < r.preserved.size(); ++j) f.preserved.emplace_back("v" + std::to_string(j), r.preserved[j]);
    return f;
}

/// Projections of all models onto `preserved` by trying every assignment.
inline std::set<std::uint64_t> brute_projection(int num_vars, const std::vector<Clause>& clauses,
                                                const std::vector<int>& preserved) {
    std::set<std::uint64_t> out;
    for (std::uint64_t a = 0; a < (std::uint64_t{1} << num_vars); ++a) {
        auto val = [&](Lit l) { return ((a >> (std::abs(l) - 1)) & 1) == (l > 0 ? 1u : 0u); };
        bool ok = true;
        for (const auto& c : clauses) {
            bool any = false;
            for (Lit l : c) any = any || val(l);
            if (!any) {
                ok = false;
                break;
            }
        }
        if (!ok) continue;
        std::uint64_t cube = 0;
        for (std::size_t j = 0; j < preserved.size(); ++j) {
            if (val(preserved[j])) cube |= std::uint64_t{1} << j;
        }
        out.insert(cube);
    }
    return out;
}

inline bool brute_sat(int num_vars, const std::vector<Clause>& clauses) {
    return !brute_projection(num_vars, clauses, {}).empty();
}

// ---- bounded-domain evaluation of CLU formulas ----------------------------------

/// Enumerates the valuations of the Boolean symbols `preds` for which the
/// formula is satisfiable when every integer symbol and every function value
/// ranges over [lo, hi].  Symbols and function points are assigned lazily,
/// only when evaluation reaches them, and connectives short-circuit on the
/// part already decided, so refuted branches are cut early.
class BoundedSolutions {
public:
    BoundedSolutions(Expr e, std::vector<std::string> preds, std::int64_t lo, std::int64_t hi)
        : e_(beta_reduce(e)), preds_(std::move(preds)), lo_(lo), hi_(hi) {}

    std::set<std::uint64_t> run() {
        std::set<std::uint64_t> found;
        for (std::uint64_t c = 0; c < (std::uint64_t{1} << preds_.size()); ++c) {
            env_.clear();
            for (std::size_t j = 0; j < preds_.size(); ++j) env_[preds_[j]] = (c >> j) & 1;
            if (explore()) found.insert(c);
        }
        return found;
    }

private:
    struct Need {
        std::string key;
        bool boolean;
    };

    // True when some extension of the current assignment satisfies the formula.
    bool explore() {
        try {
            return eval_bool(e_);
        } catch (const Need& need) {
            const std::int64_t lo = need.boolean ? 0 : lo_;
            const std::int64_t hi = need.boolean ? 1 : hi_;
            bool ok = false;
            for (std::int64_t v = lo; v <= hi && !ok; ++v) {
                env_[need.key] = v;
                ok = explore();
            }
            env_.erase(need.key);
            return ok;
        }
    }

    std::int64_t value_of(const std::string& key, bool boolean) {
        auto it = env_.find(key);
        if (it == env_.end()) throw Need{key, boolean};
        return it->second;
    }

    std::int64_t lookup(Expr app) {
        std::string key = app.kid(0).name() + "(";
        for (std::size_t k = 1; k < app.num_kids(); ++k) key += std::to_string(eval_int(app.kid(k))) + ",";
        return value_of(key, app.kind() == Kind::PredApp);
    }

    // Short-circuits over kids in any order: a deciding kid wins over an
    // undecided one.
    bool junction(Expr e, bool absorbing) {
        std::optional<Need> pending;
        for (auto k : e.kids()) {
            try {
                if (eval_bool(k) == absorbing) return absorbing;
            } catch (const Need& n) {
                if (!pending) pending = n;
            }
        }
        if (pending) throw *pending;
        return !absorbing;
    }

    bool eval_bool(Expr e) {
        switch (e.kind()) {
        case Kind::True: return true;
        case Kind::False: return false;
        case Kind::BoolSym: return value_of(e.name(), true) != 0;
        case Kind::Not: return !eval_bool(e.kid(0));
        case Kind::And: return junction(e, false);
        case Kind::Or: return junction(e, true);
        case Kind::Implies: {
            std::optional<Need> pending;
            try {
                if (!eval_bool(e.kid(0))) return true;
            } catch (const Need& n) {
                pending = n;
            }
            if (eval_bool(e.kid(1))) return true;
            if (pending) throw *pending;
            return false;
        }
        case Kind::Iff: return eval_bool(e.kid(0)) == eval_bool(e.kid(1));
        case Kind::Eq: return eval_int(e.kid(0)) == eval_int(e.kid(1));
        case Kind::Lt: return eval_int(e.kid(0)) < eval_int(e.kid(1));
        case Kind::Le: return eval_int(e.kid(0)) <= eval_int(e.kid(1));
        case Kind::PredApp: return lookup(e) != 0;
        case Kind::BoolIte: return eval_bool(e.kid(0)) ? eval_bool(e.kid(1)) : eval_bool(e.kid(2));
        default: break;
        }
        throw std::logic_error("unexpected node in bounded evaluation");
    }

    std::int64_t eval_int(Expr e) {
        switch (e.kind()) {
        case Kind::IntConst: return e.value();
        case Kind::IntSym: return value_of("#" + e.name(), false);
        case Kind::IntIte: return eval_bool(e.kid(0)) ? eval_int(e.kid(1)) : eval_int(e.kid(2));
        case Kind::PlusConst: return eval_int(e.kid(0)) + e.value();
        case Kind::FuncApp: return lookup(e);
        default: break;
        }
        throw std::logic_error("unexpected term in bounded evaluation");
    }

    Expr e_;
    std::vector<std::string> preds_;
    std::int64_t lo_, hi_;
    std::map<std::string, std::int64_t> env_; // Booleans as 0/1; integers prefixed '#'
};

/// A radius for BoundedSolutions that is independent of the encoder's own
/// bound: literals plus room for every integer-valued atom to sit in its own
/// gap of width (sum of offsets + 1).
inline std::int64_t generous_radius(Expr e) {
    Expr r = beta_reduce(e);
    std::int64_t maxlit = 0, offsets = 0;
    std::set<std::int64_t> seen_offsets;
    std::size_t atoms = 0;
    for_each_node(std::vector<Expr>{r}, [&](Expr n) {
        if (n.kind() == Kind::IntConst) maxlit = std::max<std::int64_t>(maxlit, std::llabs(n.value()));
        if (n.kind() == Kind::PlusConst && seen_offsets.insert(n.value()).second) offsets += std::llabs(n.value());
        if (n.kind() == Kind::IntSym || n.kind() == Kind::FuncApp) ++atoms;
    });
    return maxlit + static_cast<std::int64_t>(atoms + 1) * (offsets + 1);
}

} // namespace ipa::testgen
