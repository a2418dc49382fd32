#pragma once

// Explicit-state reference semantics at finite scope.  Function-valued
// state is a total table over the scope's integer range; applying it
// outside that range is an error rather than a silent clamp.

#include <cmath>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "ipa/abstraction.hpp"
#include "ipa/error.hpp"
#include "ipa/eval.hpp"
#include "ipa/system_model.hpp"

namespace ipa {

namespace detail {

inline std::vector<std::vector<std::int64_t>> tuples(int arity, std::int64_t lo, std::int64_t hi) {
    std::vector<std::vector<std::int64_t>> out{{}};
    for (int k = 0; k < arity; ++k) {
        std::vector<std::vector<std::int64_t>> next;
        for (const auto& t : out) {
            for (std::int64_t v = lo; v <= hi; ++v) {
                auto t2 = t;
                t2.push_back(v);
                next.push_back(std::move(t2));
            }
        }
        out = std::move(next);
    }
    return out;
}

} // namespace detail

/// Table of `f` over the scope's integer range.
inline FuncPtr tabulate(const FuncValue& f, const Scope& sc) {
    auto t = std::make_shared<FuncValue>();
    t->arity = f.arity;
    t->boolean = f.boolean;
    for (const auto& args : detail::tuples(f.arity, sc.lo, sc.hi)) t->table[args] = f.apply(args);
    return t;
}

/// Value with functions replaced by their tables over the scope.
inline Value tabulate(const Value& v, const Scope& sc) {
    if (!is_func(v)) return v;
    try {
        return tabulate(*std::get<FuncPtr>(v), sc);
    } catch (const Error& e) {
        if (e.code() == ErrorCode::OutOfScope) {
            throw Error(ErrorCode::OutOfScope, std::string("scope too small: ") + e.what());
        }
        throw;
    }
}

/// Canonical text of a state; equal states give equal keys.
inline std::string state_key(const Interp& s) {
    std::string out;
    for (const auto& [name, v] : s.values()) {
        out += name + "=";
        if (is_bool(v)) {
            out += std::get<bool>(v) ? "T" : "F";
        } else if (is_int(v)) {
            out += std::to_string(std::get<std::int64_t>(v));
        } else {
            out += "{";
            for (const auto& [args, r] : std::get<FuncPtr>(v)->table) {
                for (auto a : args) out += std::to_string(a) + ",";
                out += ":";
                out += std::holds_alternative<bool>(r) ? (std::get<bool>(r) ? "T" : "F")
                                                       : std::to_string(std::get<std::int64_t>(r));
                out += " ";
            }
            out += "}";
        }
        out += "; ";
    }
    return out;
}

/// Every interpretation of `names` (with sorts from `sig`) over the scope.
/// Integer symbols take values in their ranges; functions are all tables
/// from the scope range into the symbol's range.
inline void enumerate_interps(const std::vector<std::string>& names, const Signature& sig, const Scope& sc,
                              const std::function<void(const Interp&)>& fn, double budget = 1e7) {
    double count = 1;
    for (const auto& n : names) {
        const Sort s = sig.at(n).sort;
        auto [lo, hi] = sc.range(n);
        const double vals = s.kind == Sort::Int ? static_cast<double>(hi - lo + 1) : s.kind == Sort::Bool ? 2.0 : 0.0;
        if (s.kind == Sort::Func || s.kind == Sort::Pred) {
            const double pts = std::pow(static_cast<double>(sc.size()), s.arity);
            const double per = s.kind == Sort::Pred ? 2.0 : static_cast<double>(hi - lo + 1);
            count *= std::pow(per, pts);
        } else {
            count *= vals;
        }
    }
    if (count > budget) throw Error(ErrorCode::ScopeTooLarge, "too many interpretations to enumerate");

    Interp cur;
    std::function<void(std::size_t)> rec = [&](std::size_t k) {
        if (k == names.size()) {
            fn(cur);
            return;
        }
        const std::string& n = names[k];
        const Sort s = sig.at(n).sort;
        auto [lo, hi] = sc.range(n);
        if (s.kind == Sort::Bool) {
            for (bool b : {false, true}) {
                cur.set(n, b);
                rec(k + 1);
            }
        } else if (s.kind == Sort::Int) {
            for (std::int64_t v = lo; v <= hi; ++v) {
                cur.set(n, v);
                rec(k + 1);
            }
        } else {
            const auto pts = detail::tuples(s.arity, sc.lo, sc.hi);
            std::vector<Scalar> vals;
            if (s.kind == Sort::Pred) {
                vals = {Scalar(false), Scalar(true)};
            } else {
                for (std::int64_t v = lo; v <= hi; ++v) vals.emplace_back(v);
            }
            std::vector<std::size_t> idx(pts.size(), 0);
            while (true) {
                auto f = std::make_shared<FuncValue>();
                f->arity = s.arity;
                f->boolean = s.kind == Sort::Pred;
                for (std::size_t p = 0; p < pts.size(); ++p) f->table[pts[p]] = vals[idx[p]];
                cur.set(n, FuncPtr(f));
                rec(k + 1);
                std::size_t p = 0;
                while (p < idx.size() && ++idx[p] == vals.size()) idx[p++] = 0;
                if (p == idx.size()) break;
            }
        }
    };
    rec(0);
}

/// True when every axiom holds at every index assignment in scope.
inline bool satisfies_axioms(const Interp& s, const PredicateBank& b, const Scope& sc) {
    if (b.axioms.empty()) return true;
    bool ok = true;
    detail::enumerate_ints(b.index_syms, sc, [&](const Interp& ix) {
        if (!ok) return;
        Interp full = s.combined(ix);
        for (const auto& q : b.axioms) ok = ok && eval_bool(b.defs.at(q), full);
    });
    return ok;
}

struct BoundedReachOptions {
    std::size_t max_states = 200000;
    int max_depth = -1; // negative: until no new states
    const PredicateBank* axioms = nullptr; // restrict to states satisfying these axioms
};

/// Breadth-first exploration from all initial states in scope under all
/// inputs in scope.  States come back in discovery order.
inline std::vector<Interp> concrete_reach_bounded(const SystemModel& m, const Scope& sc,
                                                  const BoundedReachOptions& opt = {}) {
    const auto V = m.state_syms();
    const auto I = m.input_syms();
    const auto J = m.init_syms();
    std::vector<Interp> states;
    std::unordered_set<std::string> seen;
    std::deque<std::pair<std::size_t, int>> queue;

    auto admit = [&](Interp s, int depth) {
        if (opt.axioms && !satisfies_axioms(s, *opt.axioms, sc)) return;
        std::string key = state_key(s);
        if (!seen.insert(std::move(key)).second) return;
        if (states.size() >= opt.max_states) {
            throw Error(ErrorCode::StateBudgetExceeded, "more than " + std::to_string(opt.max_states) + " states");
        }
        states.push_back(std::move(s));
        queue.emplace_back(states.size() - 1, depth);
    };

    enumerate_interps(J, m.sig, sc, [&](const Interp& ij) {
        Interp s;
        for (const auto& v : V) s.set(v, tabulate(eval(m.init.at(v), ij), sc));
        admit(std::move(s), 0);
    });

    std::vector<Interp> inputs;
    enumerate_interps(I, m.sig, sc, [&](const Interp& ii) { inputs.push_back(ii); });

    while (!queue.empty()) {
        auto [idx, depth] = queue.front();
        queue.pop_front();
        if (opt.max_depth >= 0 && depth >= opt.max_depth) continue;
        for (const auto& in : inputs) {
            const Interp env = states[idx].combined(in);
            Interp next;
            for (const auto& v : V) next.set(v, tabulate(eval(m.next.at(v), env), sc));
            admit(std::move(next), depth + 1);
        }
    }
    return states;
}

/// Readable rendering of a concrete state.
inline std::string describe_state(const Interp& s) {
    std::string out;
    for (const auto& [name, v] : s.values()) {
        if (!out.empty()) out += ", ";
        out += name + " = ";
        if (is_bool(v)) {
            out += std::get<bool>(v) ? "true" : "false";
        } else if (is_int(v)) {
            out += std::to_string(std::get<std::int64_t>(v));
        } else {
            out += "[";
            bool first = true;
            for (const auto& [args, r] : std::get<FuncPtr>(v)->table) {
                if (!first) out += " ";
                first = false;
                for (std::size_t k = 0; k < args.size(); ++k) out += (k ? "," : "") + std::to_string(args[k]);
                out += "->";
                out += std::holds_alternative<bool>(r) ? (std::get<bool>(r) ? "T" : "F")
                                                       : std::to_string(std::get<std::int64_t>(r));
            }
            out += "]";
        }
    }
    return out;
}

struct SoundnessViolation {
    std::size_t state_index;
    std::string state;
    std::uint64_t cube;
};

struct SoundnessReport {
    std::size_t states_checked = 0;
    std::vector<SoundnessViolation> violations;
    bool ok() const { return violations.empty(); }
};

/// Checks that the abstraction of every bounded-reachable concrete state
/// lies inside rho.
inline SoundnessReport soundness_check(const SystemModel& m, const PredicateBank& b, const CubeSet& rho,
                                       const Scope& sc, BoundedReachOptions opt = {}) {
    if (!b.axioms.empty()) opt.axioms = &b;
    SoundnessReport r;
    const auto states = concrete_reach_bounded(m, sc, opt);
    r.states_checked = states.size();
    for (std::size_t k = 0; k < states.size(); ++k) {
        for (auto c : alpha_explicit(states[k], b, sc)) {
            if (!rho.contains(c)) r.violations.push_back({k, describe_state(states[k]), c});
        }
    }
    return r;
}

} // namespace ipa
