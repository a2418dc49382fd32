#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "ipa/error.hpp"
#include "ipa/expr.hpp"

namespace ipa {

using Scalar = std::variant<bool, std::int64_t>;

class Interp;

/// Total function or predicate over integer tuples: a finite exception
/// table backed by a default lambda.  The default is evaluated in the
/// interpretation it was created in (`env`).  A value without a default is
/// partial; applying it outside the table raises OutOfScope.
struct FuncValue {
    int arity = 1;
    bool boolean = false; // predicate when true
    std::map<std::vector<std::int64_t>, Scalar> table;
    Expr fallback; // Lambda node or null
    std::shared_ptr<const Interp> env;
    std::map<std::string, std::int64_t> captured; // enclosing lambda bindings

    Scalar apply(const std::vector<std::int64_t>& args) const;
};

using FuncPtr = std::shared_ptr<const FuncValue>;
using Value = std::variant<bool, std::int64_t, FuncPtr>;

inline bool is_bool(const Value& v) { return std::holds_alternative<bool>(v); }
inline bool is_int(const Value& v) { return std::holds_alternative<std::int64_t>(v); }
inline bool is_func(const Value& v) { return std::holds_alternative<FuncPtr>(v); }

inline Value to_value(const Scalar& s) {
    return std::visit([](auto x) -> Value { return x; }, s);
}

inline Sort sort_of(const Value& v) {
    if (is_bool(v)) return Sort::boolean();
    if (is_int(v)) return Sort::integer();
    const auto& f = std::get<FuncPtr>(v);
    return f->boolean ? Sort::pred(f->arity) : Sort::func(f->arity);
}

/// Assignment of values to symbols.
class Interp {
public:
    Interp() = default;
    Interp(std::initializer_list<std::pair<const std::string, Value>> init) : values_(init) {}

    void set(const std::string& name, Value v) { values_[name] = std::move(v); }
    bool contains(const std::string& name) const { return values_.count(name) != 0; }
    const Value& get(const std::string& name) const {
        auto it = values_.find(name);
        if (it == values_.end()) throw Error(ErrorCode::UnboundSymbol, "'" + name + "' has no value");
        return it->second;
    }
    const std::map<std::string, Value>& values() const { return values_; }

    /// Union with `other`; entries of `other` win on overlap.
    Interp combined(const Interp& other) const {
        Interp out = *this;
        for (const auto& [k, v] : other.values_) out.values_[k] = v;
        return out;
    }

private:
    std::map<std::string, Value> values_;
};

/// Function value defined by a lambda closed over `env`.
inline FuncPtr make_closure(Expr lambda, std::shared_ptr<const Interp> env,
                            std::map<std::string, std::int64_t> captured = {}) {
    auto f = std::make_shared<FuncValue>();
    const Sort s = sort_of(lambda);
    f->arity = s.arity;
    f->boolean = s.kind == Sort::Pred;
    f->fallback = lambda;
    f->env = std::move(env);
    f->captured = std::move(captured);
    return f;
}

/// Function value from a closed lambda such as `LAMBDA (u). u`.
inline FuncPtr make_function(Expr closed_lambda) {
    return make_closure(closed_lambda, std::make_shared<Interp>());
}

/// Copy of `base` with a point update at `args`.
inline FuncPtr with_update(const FuncPtr& base, std::vector<std::int64_t> args, Scalar v) {
    auto f = std::make_shared<FuncValue>(*base);
    f->table[std::move(args)] = v;
    return f;
}

namespace detail {

class Evaluator {
public:
    Evaluator(const Interp& interp, std::map<std::string, std::int64_t> bound)
        : interp_(interp), bound_(std::move(bound)) {}

    Value eval(Expr e) {
        switch (e.kind()) {
        case Kind::FuncSym:
        case Kind::PredSym: return interp_.get(e.name());
        case Kind::Lambda:
            return make_closure(e, std::make_shared<Interp>(interp_), bound_);
        default: break;
        }
        if (is_bool_kind(e.kind())) return eval_bool(e);
        return eval_int(e);
    }

    bool eval_bool(Expr e) {
        switch (e.kind()) {
        case Kind::True: return true;
        case Kind::False: return false;
        case Kind::BoolSym: {
            const Value& v = interp_.get(e.name());
            if (!is_bool(v)) throw Error(ErrorCode::SortMismatch, "'" + e.name() + "' is not BOOL");
            return std::get<bool>(v);
        }
        case Kind::Not: return !eval_bool(e.kid(0));
        case Kind::And:
            for (std::size_t i = 0; i < e.num_kids(); ++i) {
                if (!eval_bool(e.kid(i))) return false;
            }
            return true;
        case Kind::Or:
            for (std::size_t i = 0; i < e.num_kids(); ++i) {
                if (eval_bool(e.kid(i))) return true;
            }
            return false;
        case Kind::Implies: return !eval_bool(e.kid(0)) || eval_bool(e.kid(1));
        case Kind::Iff: return eval_bool(e.kid(0)) == eval_bool(e.kid(1));
        case Kind::Eq: return eval_int(e.kid(0)) == eval_int(e.kid(1));
        case Kind::Lt: return eval_int(e.kid(0)) < eval_int(e.kid(1));
        case Kind::Le: return eval_int(e.kid(0)) <= eval_int(e.kid(1));
        case Kind::BoolIte: return eval_bool(e.kid(0)) ? eval_bool(e.kid(1)) : eval_bool(e.kid(2));
        case Kind::PredApp: return std::get<bool>(apply(e));
        default: throw Error(ErrorCode::SortMismatch, "'" + render(e) + "' is not a formula");
        }
    }

    std::int64_t eval_int(Expr e) {
        switch (e.kind()) {
        case Kind::IntConst: return e.value();
        case Kind::IntSym: {
            const Value& v = interp_.get(e.name());
            if (!is_int(v)) throw Error(ErrorCode::SortMismatch, "'" + e.name() + "' is not INT");
            return std::get<std::int64_t>(v);
        }
        case Kind::LambdaVar: {
            auto it = bound_.find(e.name());
            if (it == bound_.end()) throw Error(ErrorCode::UnboundSymbol, "lambda variable '" + e.name() + "'");
            return it->second;
        }
        case Kind::IntIte: return eval_bool(e.kid(0)) ? eval_int(e.kid(1)) : eval_int(e.kid(2));
        case Kind::PlusConst: {
            std::int64_t r = 0;
            if (__builtin_add_overflow(eval_int(e.kid(0)), e.value(), &r)) {
                throw Error(ErrorCode::OutOfScope, "integer overflow in '" + render(e) + "'");
            }
            return r;
        }
        case Kind::FuncApp: return std::get<std::int64_t>(apply(e));
        default: throw Error(ErrorCode::SortMismatch, "'" + render(e) + "' is not an integer term");
        }
    }

private:
    Scalar apply(Expr app) {
        std::vector<std::int64_t> args;
        args.reserve(app.num_kids() - 1);
        for (std::size_t i = 1; i < app.num_kids(); ++i) args.push_back(eval_int(app.kid(i)));
        Expr head = app.kid(0);
        if (head.kind() == Kind::Lambda) {
            auto saved = bound_;
            for (std::size_t i = 0; i < args.size(); ++i) bound_[head.params()[i]] = args[i];
            Scalar r = is_bool_kind(head.kid(0).kind()) ? Scalar(eval_bool(head.kid(0)))
                                                        : Scalar(eval_int(head.kid(0)));
            bound_ = std::move(saved);
            return r;
        }
        const Value& v = interp_.get(head.name());
        if (!is_func(v)) throw Error(ErrorCode::SortMismatch, "'" + head.name() + "' is not a function");
        const auto& f = std::get<FuncPtr>(v);
        if (static_cast<std::size_t>(f->arity) != args.size()) {
            throw Error(ErrorCode::ArityMismatch, "'" + head.name() + "' applied to wrong number of arguments");
        }
        return f->apply(args);
    }

    const Interp& interp_;
    std::map<std::string, std::int64_t> bound_;
};

} // namespace detail

inline Scalar FuncValue::apply(const std::vector<std::int64_t>& args) const {
    if (auto it = table.find(args); it != table.end()) return it->second;
    if (fallback.is_null()) {
        std::string at;
        for (auto a : args) at += (at.empty() ? "" : ", ") + std::to_string(a);
        throw Error(ErrorCode::OutOfScope, "function undefined at (" + at + ")");
    }
    static const Interp empty;
    auto bound = captured;
    for (std::size_t i = 0; i < args.size(); ++i) bound[fallback.params()[i]] = args[i];
    detail::Evaluator ev(env ? *env : empty, std::move(bound));
    Expr body = fallback.kid(0);
    if (boolean) return ev.eval_bool(body);
    return ev.eval_int(body);
}

/// Denotation of `e` under `interp`.  Lambdas evaluate to closures over a
/// copy of `interp`.
inline Value eval(Expr e, const Interp& interp) { return detail::Evaluator(interp, {}).eval(e); }

inline bool eval_bool(Expr e, const Interp& interp) { return detail::Evaluator(interp, {}).eval_bool(e); }

inline std::int64_t eval_int(Expr e, const Interp& interp) { return detail::Evaluator(interp, {}).eval_int(e); }

} // namespace ipa
