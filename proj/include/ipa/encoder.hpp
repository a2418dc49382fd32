#pragma once

// Eager propositional encoding of quantifier-free formulas: function
// applications are eliminated by Ackermann expansion, and integer symbols
// range over a finite domain large enough to keep every satisfiable
// formula satisfiable.

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "ipa/cnf.hpp"
#include "ipa/error.hpp"
#include "ipa/expr.hpp"
#include "ipa/substitute.hpp"

namespace ipa {

/// Rewrites formula-level ITE(c, a, b) as (c & a) | (!c & b).
inline Expr desugar_bool_ite(Expr e) {
    std::unordered_map<Expr, Expr, ExprHash> memo;
    auto rec = [&](auto&& self, Expr n) -> Expr {
        if (auto it = memo.find(n); it != memo.end()) return it->second;
        Expr out = n;
        if (n.num_kids() > 0) {
            std::vector<Expr> kids;
            for (std::size_t k = 0; k < n.num_kids(); ++k) kids.push_back(self(self, n.kid(k)));
            if (n.kind() == Kind::BoolIte) {
                out = mk_or(mk_and(kids[0], kids[1]), mk_and(mk_not(kids[0]), kids[2]));
            } else {
                out = rebuild(n, std::move(kids));
            }
        }
        memo.emplace(n, out);
        return out;
    };
    return rec(rec, e);
}

struct AckermannResult {
    Expr formula;
    /// Each distinct application (arguments already rewritten) with the
    /// fresh symbol standing for it, in order of first occurrence.
    std::vector<std::pair<Expr, Expr>> apps;
};

namespace detail {

class Ackermannizer {
public:
    Expr run(Expr e) {
        if (auto it = memo_.find(e); it != memo_.end()) return it->second;
        Expr out = e;
        if (e.kind() == Kind::FuncApp || e.kind() == Kind::PredApp) {
            Expr head = e.kid(0);
            if (head.kind() != Kind::FuncSym && head.kind() != Kind::PredSym) {
                throw Error(ErrorCode::ValidationError, "application of a non-symbol; beta reduce first");
            }
            std::vector<Expr> args;
            for (std::size_t k = 1; k < e.num_kids(); ++k) args.push_back(run(e.kid(k)));
            Expr key = mk_apply(head, args);
            auto it = fresh_.find(key);
            if (it == fresh_.end()) {
                const std::string name = head.name() + "@" + std::to_string(++counter_);
                Expr v = e.kind() == Kind::PredApp ? mk_bool_sym(name) : mk_int_sym(name);
                it = fresh_.emplace(key, v).first;
                apps_.emplace_back(key, v);
            }
            out = it->second;
        } else if (e.num_kids() > 0) {
            std::vector<Expr> kids;
            for (std::size_t k = 0; k < e.num_kids(); ++k) kids.push_back(run(e.kid(k)));
            out = rebuild(e, std::move(kids));
        }
        memo_.emplace(e, out);
        return out;
    }

    /// Functional consistency for every pair of applications of one symbol.
    std::vector<Expr> constraints() const {
        std::vector<Expr> out;
        for (std::size_t a = 0; a < apps_.size(); ++a) {
            for (std::size_t b = a + 1; b < apps_.size(); ++b) {
                Expr fa = apps_[a].first, fb = apps_[b].first;
                if (fa.kid(0) != fb.kid(0)) continue;
                std::vector<Expr> eqs;
                for (std::size_t k = 1; k < fa.num_kids(); ++k) eqs.push_back(mk_eq(fa.kid(k), fb.kid(k)));
                Expr va = apps_[a].second, vb = apps_[b].second;
                Expr same = va.kind() == Kind::BoolSym ? mk_iff(va, vb) : mk_eq(va, vb);
                out.push_back(mk_implies(mk_and(std::move(eqs)), same));
            }
        }
        return out;
    }

    const std::vector<std::pair<Expr, Expr>>& apps() const { return apps_; }

private:
    std::unordered_map<Expr, Expr, ExprHash> memo_;
    std::unordered_map<Expr, Expr, ExprHash> fresh_;
    std::vector<std::pair<Expr, Expr>> apps_;
    int counter_ = 0;
};

} // namespace detail

/// Replaces each distinct application by a fresh symbol and conjoins the
/// functional-consistency constraints.  Fresh names contain '@' and so
/// never clash with declared symbols.
inline AckermannResult ackermannize(Expr e) {
    detail::Ackermannizer ack;
    Expr body = ack.run(e);
    std::vector<Expr> parts{body};
    for (Expr c : ack.constraints()) parts.push_back(c);
    return {mk_and(std::move(parts)), ack.apps()};
}

/// Every integer symbol ranges over [0, domain - 1].  Integer literals are
/// treated as offsets from the extra symbol `zero_symbol`.
struct DomainBound {
    std::int64_t domain = 1;
    std::map<std::string, std::int64_t> size; // per integer symbol; all equal to `domain`
    std::set<std::int64_t> offsets;           // effective offsets of integer leaves
    bool uses_zero = false;

    static constexpr const char* zero_symbol = "@zero";

    std::int64_t max_abs_offset() const {
        std::int64_t m = 0;
        for (auto o : offsets) m = std::max(m, o < 0 ? -o : o);
        return m;
    }
};

namespace detail {

/// Offsets c such that some leaf of `t` has the form s + c.
inline const std::set<std::int64_t>& leaf_offsets(Expr t, std::unordered_map<Expr, std::set<std::int64_t>, ExprHash>& memo) {
    if (auto it = memo.find(t); it != memo.end()) return it->second;
    std::set<std::int64_t> out;
    switch (t.kind()) {
    case Kind::IntConst: out.insert(t.value()); break;
    case Kind::IntSym: out.insert(0); break;
    case Kind::PlusConst:
        for (auto o : leaf_offsets(t.kid(0), memo)) {
            std::int64_t r = 0;
            if (__builtin_add_overflow(o, t.value(), &r)) throw Error(ErrorCode::ScopeTooLarge, "offset overflow");
            out.insert(r);
        }
        break;
    case Kind::IntIte: {
        const auto& a = leaf_offsets(t.kid(1), memo);
        const auto& b = leaf_offsets(t.kid(2), memo);
        out.insert(a.begin(), a.end());
        out.insert(b.begin(), b.end());
        break;
    }
    default: throw Error(ErrorCode::ValidationError, "unexpected integer term '" + render(t) + "'");
    }
    return memo.emplace(t, std::move(out)).first->second;
}

} // namespace detail

/// Domain N * (C + 1), where N counts the integer symbols (plus the zero
/// symbol when literals occur) and C sums the magnitudes of the distinct
/// effective offsets.  Any satisfying integer assignment can be compressed
/// into this range without changing a single comparison.
inline DomainBound compute_bounds(Expr e) {
    DomainBound db;
    std::set<std::string> syms;
    std::unordered_map<Expr, std::set<std::int64_t>, ExprHash> memo;
    for_each_node({e}, [&](Expr n) {
        if (n.kind() == Kind::IntSym) syms.insert(n.name());
        if (n.kind() == Kind::IntConst) db.uses_zero = true;
        if (n.kind() == Kind::FuncApp || n.kind() == Kind::PredApp) {
            throw Error(ErrorCode::ValidationError, "compute_bounds expects an application-free formula");
        }
        if (n.kind() == Kind::Eq || n.kind() == Kind::Lt || n.kind() == Kind::Le) {
            for (int k = 0; k < 2; ++k) {
                const auto& o = detail::leaf_offsets(n.kid(static_cast<std::size_t>(k)), memo);
                db.offsets.insert(o.begin(), o.end());
            }
        }
    });
    if (db.uses_zero) syms.insert(DomainBound::zero_symbol);
    const auto n = static_cast<std::int64_t>(syms.size());
    std::int64_t c = 0;
    for (auto o : db.offsets) c += o < 0 ? -o : o;
    if (n > 0 && c > (std::int64_t{1} << 40) / n) throw Error(ErrorCode::ScopeTooLarge, "integer domain too large");
    db.domain = std::max<std::int64_t>(1, n * (c + 1));
    for (const auto& s : syms) db.size[s] = db.domain;
    return db;
}

namespace detail {

inline int bit_length(std::uint64_t v) {
    int n = 0;
    while (v) {
        ++n;
        v >>= 1;
    }
    return n;
}

class BitBlaster {
public:
    using Word = std::vector<Lit>;

    BitBlaster(const DomainBound& db, const std::vector<std::string>& preserve, PropFormula& f)
        : db_(db), cnf_(static_cast<int>(preserve.size())), f_(f) {
        for (std::size_t k = 0; k < preserve.size(); ++k) {
            const int v = static_cast<int>(k) + 1;
            f_.preserved.emplace_back(preserve[k], v);
            f_.bool_vars[preserve[k]] = v;
        }
        sym_bits_ = bit_length(static_cast<std::uint64_t>(db.domain - 1));
        const std::int64_t reach = db.domain - 1 + db.max_abs_offset();
        width_ = bit_length(static_cast<std::uint64_t>(reach)) + 2;
    }

    void assert_formula(Expr e) { cnf_.add_clause({formula(e)}); }

    void finish() {
        f_.num_vars = cnf_.num_vars();
        f_.clauses = std::move(cnf_.clauses());
    }

private:
    Lit formula(Expr e) {
        if (auto it = bmemo_.find(e); it != bmemo_.end()) return it->second;
        Lit out = 0;
        switch (e.kind()) {
        case Kind::True: out = cnf_.true_lit(); break;
        case Kind::False: out = cnf_.false_lit(); break;
        case Kind::BoolSym: {
            auto it = f_.bool_vars.find(e.name());
            if (it == f_.bool_vars.end()) it = f_.bool_vars.emplace(e.name(), cnf_.new_var()).first;
            out = it->second;
            break;
        }
        case Kind::Not: out = -formula(e.kid(0)); break;
        case Kind::And:
        case Kind::Or: {
            std::vector<Lit> xs;
            for (std::size_t k = 0; k < e.num_kids(); ++k) xs.push_back(formula(e.kid(k)));
            out = e.kind() == Kind::And ? cnf_.land(xs) : cnf_.lor(xs);
            break;
        }
        case Kind::Implies: out = cnf_.lor(-formula(e.kid(0)), formula(e.kid(1))); break;
        case Kind::Iff: out = cnf_.liff(formula(e.kid(0)), formula(e.kid(1))); break;
        case Kind::BoolIte: out = cnf_.ite(formula(e.kid(0)), formula(e.kid(1)), formula(e.kid(2))); break;
        case Kind::Eq: out = equal(term(e.kid(0)), term(e.kid(1))); break;
        case Kind::Lt: out = less(term(e.kid(0)), term(e.kid(1))); break;
        case Kind::Le: out = -less(term(e.kid(1)), term(e.kid(0))); break;
        default: throw Error(ErrorCode::ValidationError, "cannot bit-blast '" + render(e) + "'");
        }
        bmemo_.emplace(e, out);
        return out;
    }

    const Word& term(Expr t) {
        if (auto it = tmemo_.find(t); it != tmemo_.end()) return it->second;
        Word out;
        switch (t.kind()) {
        case Kind::IntSym: out = symbol(t.name()); break;
        case Kind::IntConst: out = add_const(symbol(DomainBound::zero_symbol), t.value()); break;
        case Kind::PlusConst: out = add_const(term(t.kid(0)), t.value()); break;
        case Kind::IntIte: {
            const Lit c = formula(t.kid(0));
            const Word a = term(t.kid(1));
            const Word& b = term(t.kid(2));
            for (int k = 0; k < width_; ++k) out.push_back(cnf_.ite(c, a[k], b[k]));
            break;
        }
        default: throw Error(ErrorCode::ValidationError, "cannot bit-blast term '" + render(t) + "'");
        }
        return tmemo_.emplace(t, std::move(out)).first->second;
    }

    Word symbol(const std::string& name) {
        auto it = f_.int_bits.find(name);
        if (it == f_.int_bits.end()) {
            Word bits;
            for (int k = 0; k < sym_bits_; ++k) bits.push_back(cnf_.new_var());
            it = f_.int_bits.emplace(name, std::move(bits)).first;
        }
        Word w = it->second;
        w.resize(static_cast<std::size_t>(width_), cnf_.false_lit());
        return w;
    }

    Word add_const(const Word& a, std::int64_t c) {
        Word out;
        Lit carry = cnf_.false_lit();
        for (int k = 0; k < width_; ++k) {
            const Lit b = cnf_.constant((static_cast<std::uint64_t>(c) >> std::min(k, 63)) & 1U);
            out.push_back(cnf_.lxor(cnf_.lxor(a[k], b), carry));
            carry = cnf_.lor(cnf_.land(a[k], b), cnf_.land(carry, cnf_.lxor(a[k], b)));
        }
        return out;
    }

    Lit equal(const Word& a, const Word& b) {
        std::vector<Lit> xs;
        for (int k = 0; k < width_; ++k) xs.push_back(cnf_.liff(a[k], b[k]));
        return cnf_.land(xs);
    }

    // Sign of a - b, computed as a + ~b + 1.
    Lit less(const Word& a, const Word& b) {
        Lit carry = cnf_.true_lit();
        Lit sum = 0;
        for (int k = 0; k < width_; ++k) {
            const Lit nb = -b[k];
            const Lit x = cnf_.lxor(a[k], nb);
            sum = cnf_.lxor(x, carry);
            carry = cnf_.lor(cnf_.land(a[k], nb), cnf_.land(carry, x));
        }
        return sum;
    }

    const DomainBound& db_;
    CnfBuilder cnf_;
    PropFormula& f_;
    int sym_bits_ = 0;
    int width_ = 2;
    std::unordered_map<Expr, Lit, ExprHash> bmemo_;
    std::unordered_map<Expr, Word, ExprHash> tmemo_;
};

} // namespace detail

/// Propositional encoding of an application-free formula over `db`.
/// Predicate symbols in `preserve` become variables 1..k.
inline PropFormula bitblast(Expr e, const DomainBound& db, const std::vector<std::string>& preserve) {
    PropFormula f;
    detail::BitBlaster bb(db, preserve, f);
    bb.assert_formula(e);
    bb.finish();
    return f;
}

/// Full pipeline: beta reduction, formula ITE removal, Ackermann
/// expansion, domain bounding and bit-blasting.
inline PropFormula encode(Expr e, const std::vector<std::string>& preserve) {
    Expr flat = desugar_bool_ite(beta_reduce(e));
    AckermannResult ack = ackermannize(flat);
    DomainBound db = compute_bounds(ack.formula);
    return bitblast(ack.formula, db, preserve);
}

} // namespace ipa
