#pragma once

#include <set>
#include <string>

#include "ipa/error.hpp"
#include "ipa/expr.hpp"
#include "ipa/signature.hpp"

namespace ipa {

namespace detail {

class TypeChecker {
public:
    explicit TypeChecker(const Signature& sig) : sig_(sig) {}

    Sort check(Expr e) {
        switch (e.kind()) {
        case Kind::True:
        case Kind::False: return Sort::boolean();
        case Kind::IntConst: return Sort::integer();
        case Kind::BoolSym:
        case Kind::IntSym:
        case Kind::FuncSym:
        case Kind::PredSym: {
            auto info = sig_.lookup(e.name());
            if (!info) throw Error(ErrorCode::UndeclaredSymbol, "'" + e.name() + "'");
            if (!(info->sort == sort_of(e))) {
                throw Error(ErrorCode::SortMismatch, "'" + e.name() + "' is declared " + to_string(info->sort) +
                                                         " but used as " + to_string(sort_of(e)));
            }
            return info->sort;
        }
        case Kind::LambdaVar:
            if (!bound_.count(e.name())) {
                throw Error(ErrorCode::UnboundSymbol, "lambda variable '" + e.name() + "' is not bound");
            }
            return Sort::integer();
        case Kind::Not: expect(e.kid(0), Sort::Bool, "operand of !"); return Sort::boolean();
        case Kind::And:
        case Kind::Or:
            for (std::size_t i = 0; i < e.num_kids(); ++i) expect(e.kid(i), Sort::Bool, "connective operand");
            return Sort::boolean();
        case Kind::Implies:
        case Kind::Iff:
            expect(e.kid(0), Sort::Bool, "connective operand");
            expect(e.kid(1), Sort::Bool, "connective operand");
            return Sort::boolean();
        case Kind::Eq:
        case Kind::Lt:
        case Kind::Le:
            expect(e.kid(0), Sort::Int, "comparison operand");
            expect(e.kid(1), Sort::Int, "comparison operand");
            return Sort::boolean();
        case Kind::BoolIte:
        case Kind::IntIte: {
            expect(e.kid(0), Sort::Bool, "ITE condition");
            const Sort want = e.kind() == Kind::BoolIte ? Sort::boolean() : Sort::integer();
            expect(e.kid(1), want.kind, "ITE branch");
            expect(e.kid(2), want.kind, "ITE branch");
            return want;
        }
        case Kind::PlusConst: expect(e.kid(0), Sort::Int, "operand of +"); return Sort::integer();
        case Kind::PredApp:
        case Kind::FuncApp: {
            const Sort head = check(e.kid(0));
            const Sort::Kind want = e.kind() == Kind::PredApp ? Sort::Pred : Sort::Func;
            if (head.kind != want) {
                throw Error(ErrorCode::SortMismatch, "'" + render(e.kid(0)) + "' of sort " + to_string(head) +
                                                         " cannot be applied here");
            }
            if (static_cast<std::size_t>(head.arity) != e.num_kids() - 1) {
                throw Error(ErrorCode::ArityMismatch, "'" + render(e.kid(0)) + "' expects " +
                                                          std::to_string(head.arity) + " argument(s), got " +
                                                          std::to_string(e.num_kids() - 1));
            }
            for (std::size_t i = 1; i < e.num_kids(); ++i) expect(e.kid(i), Sort::Int, "application argument");
            return want == Sort::Pred ? Sort::boolean() : Sort::integer();
        }
        case Kind::Lambda: {
            const auto& ps = e.params();
            std::set<std::string> distinct(ps.begin(), ps.end());
            if (ps.empty() || distinct.size() != ps.size()) {
                throw Error(ErrorCode::SortMismatch, "lambda parameters must be non-empty and distinct");
            }
            auto saved = bound_;
            bound_.insert(ps.begin(), ps.end());
            const Sort body = check(e.kid(0));
            bound_ = std::move(saved);
            if (!body.is_scalar()) throw Error(ErrorCode::SortMismatch, "lambda body must be BOOL or INT");
            const int n = static_cast<int>(ps.size());
            return body.kind == Sort::Bool ? Sort::pred(n) : Sort::func(n);
        }
        }
        throw Error(ErrorCode::SortMismatch, "unknown node");
    }

private:
    void expect(Expr e, Sort::Kind want, const char* what) {
        const Sort got = check(e);
        if (got.kind != want) {
            throw Error(ErrorCode::SortMismatch, std::string(what) + " '" + render(e) + "' has sort " +
                                                     to_string(got) + ", expected " +
                                                     to_string(Sort{want, 0}));
        }
    }

    const Signature& sig_;
    std::set<std::string> bound_;
};

} // namespace detail

/// Sort of `e` under `sig`; throws UndeclaredSymbol, ArityMismatch,
/// SortMismatch or UnboundSymbol when `e` violates the grammar.
inline Sort typecheck(Expr e, const Signature& sig) { return detail::TypeChecker(sig).check(e); }

} // namespace ipa
