#pragma once

// Typed expression trees for the logic of counters, lambdas and
// uninterpreted functions.  Nodes are hash-consed: two expressions are
// structurally equal iff they share the same node, so Expr compares and
// hashes by pointer.  Nodes live for the lifetime of the process.

#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <set>
#include <string>
#include <unordered_set>
#include <vector>

#include "ipa/error.hpp"

namespace ipa {

struct Sort {
    enum Kind : std::uint8_t { Bool, Int, Func, Pred };
    Kind kind = Bool;
    int arity = 0;

    static Sort boolean() { return {Bool, 0}; }
    static Sort integer() { return {Int, 0}; }
    static Sort func(int n) { return {Func, n}; }
    static Sort pred(int n) { return {Pred, n}; }

    bool is_scalar() const { return kind == Bool || kind == Int; }
    friend bool operator==(const Sort&, const Sort&) = default;
};

inline std::string to_string(const Sort& s) {
    switch (s.kind) {
    case Sort::Bool: return "BOOL";
    case Sort::Int: return "INT";
    case Sort::Func: return "FUNC(" + std::to_string(s.arity) + ")";
    case Sort::Pred: return "PRED(" + std::to_string(s.arity) + ")";
    }
    return "?";
}

enum class Kind : std::uint8_t {
    // Boolean-valued
    True,
    False,
    BoolSym,
    Not,
    And,
    Or,
    Implies,
    Iff,
    Eq,
    Lt,
    Le,
    PredApp,
    BoolIte,
    // integer-valued
    IntConst,
    IntSym,
    LambdaVar,
    IntIte,
    PlusConst,
    FuncApp,
    // function / predicate valued
    FuncSym,
    PredSym,
    Lambda,
};

namespace detail {

struct Node {
    Kind kind;
    std::string name;            // symbols and lambda variables
    std::int64_t value = 0;      // IntConst value, PlusConst offset, symbol arity
    std::vector<const Node*> kids;
    std::vector<std::string> params; // Lambda parameters
    std::size_t hash = 0;
    std::uint32_t id = 0;
};

struct NodeHash {
    std::size_t operator()(const Node* n) const { return n->hash; }
};

struct NodeEq {
    bool operator()(const Node* a, const Node* b) const {
        return a->kind == b->kind && a->value == b->value && a->name == b->name &&
               a->kids == b->kids && a->params == b->params;
    }
};

inline void hash_combine(std::size_t& h, std::size_t v) {
    h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
}

class NodeTable {
public:
    static NodeTable& instance() {
        static NodeTable table;
        return table;
    }

    const Node* intern(Node&& proto) {
        std::size_t h = std::hash<int>{}(static_cast<int>(proto.kind));
        hash_combine(h, std::hash<std::string>{}(proto.name));
        hash_combine(h, std::hash<std::int64_t>{}(proto.value));
        for (const Node* k : proto.kids) hash_combine(h, k->hash);
        for (const auto& p : proto.params) hash_combine(h, std::hash<std::string>{}(p));
        proto.hash = h;

        std::lock_guard<std::mutex> lock(mutex_);
        if (auto it = set_.find(&proto); it != set_.end()) return *it;
        auto owned = std::make_unique<Node>(std::move(proto));
        owned->id = static_cast<std::uint32_t>(storage_.size());
        const Node* raw = owned.get();
        storage_.push_back(std::move(owned));
        set_.insert(raw);
        return raw;
    }

private:
    std::mutex mutex_;
    std::unordered_set<const Node*, NodeHash, NodeEq> set_;
    std::vector<std::unique_ptr<Node>> storage_;
};

} // namespace detail

/// Handle to an immutable, interned expression node.
class Expr {
public:
    Expr() = default;
    explicit Expr(const detail::Node* n) : n_(n) {}

    bool is_null() const { return n_ == nullptr; }
    explicit operator bool() const { return n_ != nullptr; }

    Kind kind() const { return n_->kind; }
    const std::string& name() const { return n_->name; }
    std::int64_t value() const { return n_->value; }
    std::size_t num_kids() const { return n_->kids.size(); }
    Expr kid(std::size_t i) const { return Expr(n_->kids[i]); }
    std::vector<Expr> kids() const {
        std::vector<Expr> out;
        out.reserve(n_->kids.size());
        for (const auto* k : n_->kids) out.emplace_back(k);
        return out;
    }
    const std::vector<std::string>& params() const { return n_->params; }
    std::uint32_t id() const { return n_->id; }
    std::size_t hash() const { return n_->hash; }
    const detail::Node* node() const { return n_; }

    friend bool operator==(Expr a, Expr b) { return a.n_ == b.n_; }
    friend bool operator!=(Expr a, Expr b) { return a.n_ != b.n_; }
    /// Orders by creation id, which is deterministic within a run.
    friend bool operator<(Expr a, Expr b) { return a.n_->id < b.n_->id; }

private:
    const detail::Node* n_ = nullptr;
};

struct ExprHash {
    std::size_t operator()(Expr e) const { return std::hash<const void*>{}(e.node()); }
};

namespace detail {

inline Expr make(Kind k, std::vector<Expr> kids = {}, std::string name = {}, std::int64_t value = 0,
                 std::vector<std::string> params = {}) {
    Node proto;
    proto.kind = k;
    proto.name = std::move(name);
    proto.value = value;
    proto.kids.reserve(kids.size());
    for (Expr e : kids) proto.kids.push_back(e.node());
    proto.params = std::move(params);
    return Expr(NodeTable::instance().intern(std::move(proto)));
}

} // namespace detail

// ---- construction ---------------------------------------------------------

inline Expr mk_true() { return detail::make(Kind::True); }
inline Expr mk_false() { return detail::make(Kind::False); }
inline Expr mk_bool(bool b) { return b ? mk_true() : mk_false(); }
inline Expr mk_bool_sym(const std::string& n) { return detail::make(Kind::BoolSym, {}, n); }
inline Expr mk_int_sym(const std::string& n) { return detail::make(Kind::IntSym, {}, n); }
inline Expr mk_lambda_var(const std::string& n) { return detail::make(Kind::LambdaVar, {}, n); }
inline Expr mk_func_sym(const std::string& n, int arity) { return detail::make(Kind::FuncSym, {}, n, arity); }
inline Expr mk_pred_sym(const std::string& n, int arity) { return detail::make(Kind::PredSym, {}, n, arity); }
inline Expr mk_int(std::int64_t v) { return detail::make(Kind::IntConst, {}, {}, v); }

inline Expr mk_not(Expr a) { return detail::make(Kind::Not, {a}); }

/// n-ary conjunction in the given order; an empty list is true.
inline Expr mk_and(std::vector<Expr> xs) {
    if (xs.empty()) return mk_true();
    if (xs.size() == 1) return xs.front();
    return detail::make(Kind::And, std::move(xs));
}

/// n-ary disjunction in the given order; an empty list is false.
inline Expr mk_or(std::vector<Expr> xs) {
    if (xs.empty()) return mk_false();
    if (xs.size() == 1) return xs.front();
    return detail::make(Kind::Or, std::move(xs));
}

inline Expr mk_and(Expr a, Expr b) { return mk_and(std::vector<Expr>{a, b}); }
inline Expr mk_or(Expr a, Expr b) { return mk_or(std::vector<Expr>{a, b}); }
inline Expr mk_implies(Expr a, Expr b) { return detail::make(Kind::Implies, {a, b}); }
inline Expr mk_iff(Expr a, Expr b) { return detail::make(Kind::Iff, {a, b}); }
inline Expr mk_eq(Expr a, Expr b) { return detail::make(Kind::Eq, {a, b}); }
inline Expr mk_lt(Expr a, Expr b) { return detail::make(Kind::Lt, {a, b}); }
inline Expr mk_le(Expr a, Expr b) { return detail::make(Kind::Le, {a, b}); }
inline Expr mk_ge(Expr a, Expr b) { return mk_le(b, a); }
inline Expr mk_gt(Expr a, Expr b) { return mk_lt(b, a); }
inline Expr mk_plus(Expr t, std::int64_t c) { return detail::make(Kind::PlusConst, {t}, {}, c); }

inline Expr mk_lambda(std::vector<std::string> params, Expr body) {
    return detail::make(Kind::Lambda, {body}, {}, static_cast<std::int64_t>(params.size()), std::move(params));
}

// ---- sorts ----------------------------------------------------------------

inline bool is_bool_kind(Kind k) { return k <= Kind::BoolIte; }
inline bool is_int_kind(Kind k) { return k >= Kind::IntConst && k <= Kind::FuncApp; }

/// Structural sort; assumes the expression is well typed (see typecheck).
inline Sort sort_of(Expr e) {
    const Kind k = e.kind();
    if (is_bool_kind(k)) return Sort::boolean();
    if (is_int_kind(k)) return Sort::integer();
    if (k == Kind::FuncSym) return Sort::func(static_cast<int>(e.value()));
    if (k == Kind::PredSym) return Sort::pred(static_cast<int>(e.value()));
    const int n = static_cast<int>(e.params().size());
    return sort_of(e.kid(0)).kind == Sort::Bool ? Sort::pred(n) : Sort::func(n);
}

inline bool is_symbol(Expr e) {
    switch (e.kind()) {
    case Kind::BoolSym:
    case Kind::IntSym:
    case Kind::FuncSym:
    case Kind::PredSym: return true;
    default: return false;
    }
}

/// Symbol node of the given sort.
inline Expr mk_symbol(const std::string& name, Sort s) {
    switch (s.kind) {
    case Sort::Bool: return mk_bool_sym(name);
    case Sort::Int: return mk_int_sym(name);
    case Sort::Func: return mk_func_sym(name, s.arity);
    case Sort::Pred: return mk_pred_sym(name, s.arity);
    }
    return {};
}

/// ITE at term or formula level depending on the branch sort.
inline Expr mk_ite(Expr c, Expr a, Expr b) {
    return detail::make(sort_of(a).kind == Sort::Bool ? Kind::BoolIte : Kind::IntIte, {c, a, b});
}

/// Application of a function- or predicate-valued expression.
inline Expr mk_apply(Expr f, std::vector<Expr> args) {
    args.insert(args.begin(), f);
    return detail::make(sort_of(f).kind == Sort::Pred ? Kind::PredApp : Kind::FuncApp, std::move(args));
}

// ---- traversal ------------------------------------------------------------

namespace detail {

inline void collect_free(Expr e, std::set<std::string>& out, std::unordered_set<const Node*>& seen) {
    if (!seen.insert(e.node()).second) return;
    if (is_symbol(e)) {
        out.insert(e.name());
        return;
    }
    for (std::size_t i = 0; i < e.num_kids(); ++i) collect_free(e.kid(i), out, seen);
}

} // namespace detail

/// Free (non lambda-bound) symbols.  Lambda variables are a separate node
/// kind and never count as symbols.
inline std::set<std::string> free_symbols(Expr e) {
    std::set<std::string> out;
    std::unordered_set<const detail::Node*> seen;
    detail::collect_free(e, out, seen);
    return out;
}

/// Post-order visit of every distinct node reachable from the roots.
template <typename Fn>
void for_each_node(const std::vector<Expr>& roots, Fn&& fn) {
    std::unordered_set<const detail::Node*> seen;
    std::vector<std::pair<Expr, bool>> stack;
    for (auto it = roots.rbegin(); it != roots.rend(); ++it) stack.emplace_back(*it, false);
    while (!stack.empty()) {
        auto [e, expanded] = stack.back();
        stack.pop_back();
        if (expanded) {
            fn(e);
            continue;
        }
        if (seen.count(e.node())) continue;
        seen.insert(e.node());
        stack.emplace_back(e, true);
        for (std::size_t i = e.num_kids(); i-- > 0;) {
            if (!seen.count(e.kid(i).node())) stack.emplace_back(e.kid(i), false);
        }
    }
}

// ---- rendering --------------------------------------------------------------

namespace detail {

inline int precedence(Expr e) {
    switch (e.kind()) {
    case Kind::Lambda: return 0;
    case Kind::Implies: return 1;
    case Kind::Or: return 2;
    case Kind::And: return 3;
    case Kind::Not: return 4;
    case Kind::Iff:
    case Kind::Eq:
    case Kind::Lt:
    case Kind::Le: return 5;
    case Kind::PlusConst: return 6;
    default: return 7;
    }
}

inline void render_to(Expr e, int ctx, std::string& out);

inline void render_list(const std::vector<Expr>& xs, std::size_t from, std::string& out) {
    for (std::size_t i = from; i < xs.size(); ++i) {
        if (i > from) out += ", ";
        render_to(xs[i], 0, out);
    }
}

inline void render_to(Expr e, int ctx, std::string& out) {
    const int prec = precedence(e);
    const bool paren = prec < ctx;
    if (paren) out += '(';
    auto binary = [&](const char* op, int lctx, int rctx) {
        render_to(e.kid(0), lctx, out);
        out += op;
        render_to(e.kid(1), rctx, out);
    };
    switch (e.kind()) {
    case Kind::True: out += "true"; break;
    case Kind::False: out += "false"; break;
    case Kind::BoolSym:
    case Kind::IntSym:
    case Kind::LambdaVar:
    case Kind::FuncSym:
    case Kind::PredSym: out += e.name(); break;
    case Kind::IntConst: out += std::to_string(e.value()); break;
    case Kind::Not:
        out += '!';
        render_to(e.kid(0), 7, out);
        break;
    case Kind::And:
    case Kind::Or: {
        const char* op = e.kind() == Kind::And ? " & " : " | ";
        for (std::size_t i = 0; i < e.num_kids(); ++i) {
            if (i) out += op;
            render_to(e.kid(i), prec + 1, out);
        }
        break;
    }
    case Kind::Implies: binary(" => ", 2, 1); break;
    case Kind::Iff:
    case Kind::Eq: binary(" = ", 6, 6); break;
    case Kind::Lt: binary(" < ", 6, 6); break;
    case Kind::Le: binary(" <= ", 6, 6); break;
    case Kind::PlusConst:
        render_to(e.kid(0), 6, out);
        if (e.value() < 0 && e.value() != INT64_MIN) {
            out += " - ";
            out += std::to_string(-e.value());
        } else {
            out += " + ";
            out += std::to_string(e.value());
        }
        break;
    case Kind::BoolIte:
    case Kind::IntIte:
        out += "ITE(";
        render_list(e.kids(), 0, out);
        out += ')';
        break;
    case Kind::PredApp:
    case Kind::FuncApp: {
        render_to(e.kid(0), 7, out);
        out += '(';
        render_list(e.kids(), 1, out);
        out += ')';
        break;
    }
    case Kind::Lambda: {
        out += "LAMBDA (";
        for (std::size_t i = 0; i < e.params().size(); ++i) {
            if (i) out += ", ";
            out += e.params()[i];
        }
        out += "). ";
        render_to(e.kid(0), 0, out);
        break;
    }
    }
    if (paren) out += ')';
}

} // namespace detail

/// Canonical text form; `parse_expr(render(e))` yields `e` again.
inline std::string render(Expr e) {
    if (e.is_null()) return "<null>";
    std::string out;
    detail::render_to(e, 0, out);
    return out;
}

} // namespace ipa

template <>
struct std::hash<ipa::Expr> {
    std::size_t operator()(ipa::Expr e) const noexcept { return ipa::ExprHash{}(e); }
};
