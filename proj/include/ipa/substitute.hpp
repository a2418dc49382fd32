#pragma once

#include <map>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "ipa/error.hpp"
#include "ipa/eval.hpp"
#include "ipa/expr.hpp"

namespace ipa {

/// Named set of replacement expressions, one per target symbol.
using Substitution = std::map<std::string, Expr>;

inline Expr rebuild(Expr e, std::vector<Expr> kids) {
    return detail::make(e.kind(), std::move(kids), e.name(), e.value(), e.params());
}

namespace detail {

class Substituter {
public:
    Substituter(const Substitution& sub, const std::set<std::string>& targets) : sub_(sub), targets_(targets) {}

    Expr run(Expr e) {
        if (auto it = memo_.find(e); it != memo_.end()) return it->second;
        Expr out;
        if (is_symbol(e) && targets_.count(e.name())) {
            auto it = sub_.find(e.name());
            if (it == sub_.end()) {
                throw Error(ErrorCode::UnboundSymbol, "no replacement for target '" + e.name() + "'");
            }
            if (!(sort_of(it->second) == sort_of(e))) {
                throw Error(ErrorCode::SortMismatch, "replacement for '" + e.name() + "' has sort " +
                                                         to_string(sort_of(it->second)) + ", expected " +
                                                         to_string(sort_of(e)));
            }
            out = it->second;
        } else if (e.num_kids() == 0) {
            out = e;
        } else {
            std::vector<Expr> kids;
            kids.reserve(e.num_kids());
            bool changed = false;
            for (std::size_t i = 0; i < e.num_kids(); ++i) {
                kids.push_back(run(e.kid(i)));
                changed = changed || kids.back() != e.kid(i);
            }
            out = changed ? rebuild(e, std::move(kids)) : e;
        }
        memo_.emplace(e, out);
        return out;
    }

private:
    const Substitution& sub_;
    const std::set<std::string>& targets_;
    std::unordered_map<Expr, Expr, ExprHash> memo_;
};

/// Replaces lambda variables by (lambda-free) argument terms.
inline Expr instantiate_params(Expr e, const std::map<std::string, Expr>& args,
                               std::unordered_map<Expr, Expr, ExprHash>& memo) {
    if (auto it = memo.find(e); it != memo.end()) return it->second;
    Expr out = e;
    if (e.kind() == Kind::LambdaVar) {
        if (auto it = args.find(e.name()); it != args.end()) out = it->second;
    } else if (e.num_kids() > 0) {
        std::vector<Expr> kids;
        kids.reserve(e.num_kids());
        for (std::size_t i = 0; i < e.num_kids(); ++i) kids.push_back(instantiate_params(e.kid(i), args, memo));
        out = rebuild(e, std::move(kids));
    }
    memo.emplace(e, out);
    return out;
}

class BetaReducer {
public:
    Expr run(Expr e) {
        if (auto it = memo_.find(e); it != memo_.end()) return it->second;
        Expr out = e;
        if (e.num_kids() > 0) {
            std::vector<Expr> kids;
            kids.reserve(e.num_kids());
            for (std::size_t i = 0; i < e.num_kids(); ++i) kids.push_back(run(e.kid(i)));
            const bool app = e.kind() == Kind::FuncApp || e.kind() == Kind::PredApp;
            if (app && kids[0].kind() == Kind::Lambda) {
                // The reduced body holds no lambdas, so plain replacement of
                // the parameters cannot capture anything.
                Expr lam = kids[0];
                std::map<std::string, Expr> binding;
                for (std::size_t i = 0; i < lam.params().size(); ++i) binding[lam.params()[i]] = kids[i + 1];
                std::unordered_map<Expr, Expr, ExprHash> memo;
                out = instantiate_params(lam.kid(0), binding, memo);
            } else {
                out = rebuild(e, std::move(kids));
            }
        }
        memo_.emplace(e, out);
        return out;
    }

private:
    std::unordered_map<Expr, Expr, ExprHash> memo_;
};

} // namespace detail

/// Simultaneous replacement of every free occurrence of each symbol in
/// `targets` by its image under `sub`.  Replacements are not revisited.
inline Expr substitute(Expr e, const Substitution& sub, const std::set<std::string>& targets) {
    return detail::Substituter(sub, targets).run(e);
}

/// Substitution whose targets are exactly its keys.
inline Expr substitute(Expr e, const Substitution& sub) {
    std::set<std::string> targets;
    for (const auto& [k, v] : sub) targets.insert(k);
    return substitute(e, sub, targets);
}

/// Expands every application of a syntactic lambda.  Terminates because
/// the logic has no recursion; only applications of symbols remain, and a
/// lambda survives only at the root.
inline Expr beta_reduce(Expr e) { return detail::BetaReducer().run(e); }

/// Interpretation obtained by evaluating each replacement under `interp`.
inline Interp eval_substitution(const Substitution& sub, const Interp& interp) {
    Interp out;
    for (const auto& [name, expr] : sub) out.set(name, eval(expr, interp));
    return out;
}

} // namespace ipa
