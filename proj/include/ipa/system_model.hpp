#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "ipa/error.hpp"
#include "ipa/expr.hpp"
#include "ipa/signature.hpp"
#include "ipa/substitute.hpp"
#include "ipa/typecheck.hpp"

namespace ipa {

/// Transition system: state symbols evolve from `init` (over initial
/// symbols) by `next` (over state and input symbols).
struct SystemModel {
    Signature sig;
    std::map<std::string, Expr> init;
    std::map<std::string, Expr> next;

    std::vector<std::string> state_syms() const { return sig.of_class(SymbolClass::State); }
    std::vector<std::string> input_syms() const { return sig.of_class(SymbolClass::Input); }
    std::vector<std::string> init_syms() const { return sig.of_class(SymbolClass::Initial); }
};

struct Diagnostic {
    std::string kind; // FreeSymbolOutOfScope, MissingNext, MissingInit, SortMismatch, ...
    std::string symbol;
    std::string message;
};

inline std::string to_string(const Diagnostic& d) { return d.kind + " [" + d.symbol + "]: " + d.message; }

namespace detail {

inline void check_entries(const SystemModel& m, const std::map<std::string, Expr>& entries, const char* what,
                          const char* missing_kind, const std::set<std::string>& allowed,
                          const std::string& allowed_text, std::vector<Diagnostic>& out) {
    for (const auto& v : m.state_syms()) {
        if (!entries.count(v)) out.push_back({missing_kind, v, std::string("no ") + what + " expression"});
    }
    for (const auto& [v, e] : entries) {
        auto info = m.sig.lookup(v);
        if (!info || info->cls != SymbolClass::State) {
            out.push_back({"NotAStateSymbol", v, std::string(what) + " given for a non-state symbol"});
            continue;
        }
        try {
            const Sort s = typecheck(e, m.sig);
            if (!(s == info->sort)) {
                out.push_back({"SortMismatch", v,
                               std::string(what) + " has sort " + to_string(s) + ", expected " +
                                   to_string(info->sort)});
            }
        } catch (const Error& err) {
            out.push_back({to_string(err.code()), v, err.what()});
            continue;
        }
        for (const auto& s : free_symbols(e)) {
            if (!allowed.count(s)) {
                out.push_back({"FreeSymbolOutOfScope", v,
                               std::string(what) + " mentions '" + s + "', outside " + allowed_text});
            }
        }
    }
}

} // namespace detail

/// Empty iff every state symbol has a well-sorted init over J and next over
/// V and I.
inline std::vector<Diagnostic> validate(const SystemModel& m) {
    std::vector<Diagnostic> out;
    std::set<std::string> j = m.sig.set_of(SymbolClass::Initial);
    std::set<std::string> vi = m.sig.set_of(SymbolClass::State);
    for (const auto& s : m.input_syms()) vi.insert(s);
    detail::check_entries(m, m.init, "init", "MissingInit", j, "the initial symbols", out);
    detail::check_entries(m, m.next, "next", "MissingNext", vi, "the state and input symbols", out);
    return out;
}

/// `e` evaluated in the successor state: e[next/V], beta reduced.
inline Expr compose_next(Expr e, const SystemModel& m) {
    return beta_reduce(substitute(e, m.next, m.sig.set_of(SymbolClass::State)));
}

/// `e` evaluated in an initial state: e[init/V], beta reduced.
inline Expr compose_init(Expr e, const SystemModel& m) {
    return beta_reduce(substitute(e, m.init, m.sig.set_of(SymbolClass::State)));
}

} // namespace ipa
