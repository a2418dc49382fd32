#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "ipa/error.hpp"
#include "ipa/eval.hpp"
#include "ipa/expr.hpp"
#include "ipa/substitute.hpp"
#include "ipa/system_model.hpp"

namespace ipa {

/// Indexed predicates: Boolean definitions over state and index symbols,
/// named by the abstract variables P.  Axioms are predicates required to
/// hold in every state.
struct PredicateBank {
    std::vector<std::string> index_syms;
    std::vector<std::string> preds; // order fixes the bit layout of cubes
    std::map<std::string, Expr> defs;
    std::set<std::string> axioms;

    int width() const { return static_cast<int>(preds.size()); }

    int position(const std::string& p) const {
        auto it = std::find(preds.begin(), preds.end(), p);
        if (it == preds.end()) throw Error(ErrorCode::UndeclaredSymbol, "'" + p + "' is not a predicate");
        return static_cast<int>(it - preds.begin());
    }

    bool is_axiom(int j) const { return axioms.count(preds[static_cast<std::size_t>(j)]) != 0; }

    std::uint64_t axiom_mask() const {
        std::uint64_t m = 0;
        for (int j = 0; j < width(); ++j) {
            if (is_axiom(j)) m |= std::uint64_t{1} << j;
        }
        return m;
    }

    Substitution def_substitution() const { return Substitution(defs.begin(), defs.end()); }
};

inline std::vector<Diagnostic> validate(const PredicateBank& b, const SystemModel& m) {
    std::vector<Diagnostic> out;
    if (b.preds.size() > 64) out.push_back({"TooManyPredicates", "", "at most 64 predicates are supported"});
    std::set<std::string> scope = m.sig.set_of(SymbolClass::State);
    for (const auto& x : b.index_syms) {
        auto info = m.sig.lookup(x);
        if (!info || info->cls != SymbolClass::Index || info->sort.kind != Sort::Int) {
            out.push_back({"SortMismatch", x, "index symbols must be declared INT indices"});
        }
        scope.insert(x);
    }
    for (const auto& p : b.preds) {
        auto it = b.defs.find(p);
        if (it == b.defs.end()) {
            out.push_back({"MissingDefinition", p, "predicate has no definition"});
            continue;
        }
        try {
            if (!(typecheck(it->second, m.sig) == Sort::boolean())) {
                out.push_back({"SortMismatch", p, "predicate definition is not BOOL"});
            }
        } catch (const Error& err) {
            out.push_back({to_string(err.code()), p, err.what()});
            continue;
        }
        for (const auto& s : free_symbols(it->second)) {
            if (!scope.count(s)) {
                out.push_back({"FreeSymbolOutOfScope", p, "definition mentions '" + s + "', outside state and index symbols"});
            }
        }
    }
    for (const auto& q : b.axioms) {
        if (std::find(b.preds.begin(), b.preds.end(), q) == b.preds.end()) {
            out.push_back({"UndeclaredSymbol", q, "axiom is not a predicate"});
        }
    }
    return out;
}

/// Set of total truth assignments to the predicates.  Bit j of a cube is
/// the value of predicate j.
class CubeSet {
public:
    explicit CubeSet(int width = 0) : width_(width) {
        if (width < 0 || width > 64) throw Error(ErrorCode::ValidationError, "cube width must be in [0, 64]");
    }

    CubeSet(int width, std::initializer_list<std::string> cubes) : CubeSet(width) {
        for (const auto& c : cubes) insert(parse(c));
    }

    static CubeSet full(int width) {
        if (width > 24) throw Error(ErrorCode::ScopeTooLarge, "full cube set too large to enumerate");
        CubeSet s(width);
        for (std::uint64_t c = 0; c < (std::uint64_t{1} << width); ++c) s.insert(c);
        return s;
    }

    int width() const { return width_; }
    std::size_t size() const { return cubes_.size(); }
    bool empty() const { return cubes_.empty(); }
    bool insert(std::uint64_t c) { return cubes_.insert(c & mask()).second; }
    bool contains(std::uint64_t c) const { return cubes_.count(c) != 0; }
    auto begin() const { return cubes_.begin(); }
    auto end() const { return cubes_.end(); }

    bool subset_of(const CubeSet& o) const {
        return std::includes(o.cubes_.begin(), o.cubes_.end(), cubes_.begin(), cubes_.end());
    }

    CubeSet united(const CubeSet& o) const {
        CubeSet r = *this;
        r.cubes_.insert(o.cubes_.begin(), o.cubes_.end());
        return r;
    }

    CubeSet filtered(const std::function<bool(std::uint64_t)>& keep) const {
        CubeSet r(width_);
        for (auto c : cubes_) {
            if (keep(c)) r.cubes_.insert(c);
        }
        return r;
    }

    friend bool operator==(const CubeSet& a, const CubeSet& b) {
        return a.width_ == b.width_ && a.cubes_ == b.cubes_;
    }

    static bool bit(std::uint64_t c, int j) { return (c >> j) & 1U; }

    /// Cube as a string of '1'/'0', predicate 0 first.
    std::string bits(std::uint64_t c) const {
        std::string s;
        for (int j = 0; j < width_; ++j) s += bit(c, j) ? '1' : '0';
        return s;
    }

    /// Accepts '1'/'0' or 'T'/'F' per predicate, predicate 0 first.
    std::uint64_t parse(const std::string& s) const {
        if (static_cast<int>(s.size()) != width_) {
            throw Error(ErrorCode::ParseError, "cube '" + s + "' does not have width " + std::to_string(width_));
        }
        std::uint64_t c = 0;
        for (int j = 0; j < width_; ++j) {
            const char ch = s[static_cast<std::size_t>(j)];
            if (ch == '1' || ch == 'T') {
                c |= std::uint64_t{1} << j;
            } else if (ch != '0' && ch != 'F') {
                throw Error(ErrorCode::ParseError, "bad cube character '" + std::string(1, ch) + "'");
            }
        }
        return c;
    }

    /// Cubes as bit strings in descending lexicographic order.
    std::vector<std::string> listing() const {
        std::vector<std::string> out;
        for (auto c : cubes_) out.push_back(bits(c));
        std::sort(out.begin(), out.end(), std::greater<>());
        return out;
    }

private:
    std::uint64_t mask() const { return width_ == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << width_) - 1; }

    int width_;
    std::set<std::uint64_t> cubes_;
};

/// Reachable-set dump: a header naming the predicate order, then one cube
/// per line.
inline std::string dump_cubes(const CubeSet& s, const PredicateBank& b) {
    std::string out = "# predicates:";
    for (const auto& p : b.preds) out += " " + p;
    out += "\n";
    for (const auto& line : s.listing()) out += line + "\n";
    return out;
}

// ---- formulas over P ---------------------------------------------------------

inline Expr cube_formula(std::uint64_t c, const PredicateBank& b) {
    std::vector<Expr> lits;
    for (int j = 0; j < b.width(); ++j) {
        Expr p = mk_bool_sym(b.preds[static_cast<std::size_t>(j)]);
        lits.push_back(CubeSet::bit(c, j) ? p : mk_not(p));
    }
    return mk_and(std::move(lits));
}

/// Disjunction of the cube conjunctions.
inline Expr formula_of(const CubeSet& s, const PredicateBank& b) {
    std::vector<Expr> ds;
    for (auto c : s) ds.push_back(cube_formula(c, b));
    return mk_or(std::move(ds));
}

/// Satisfying assignments of a formula over P alone.
inline CubeSet cubes_of(Expr chi, const PredicateBank& b) {
    for (const auto& s : free_symbols(chi)) {
        if (std::find(b.preds.begin(), b.preds.end(), s) == b.preds.end()) {
            throw Error(ErrorCode::FreeSymbolOutOfScope, "'" + s + "' is not a predicate name");
        }
    }
    CubeSet out = CubeSet::full(b.width());
    return out.filtered([&](std::uint64_t c) {
        Interp in;
        for (int j = 0; j < b.width(); ++j) in.set(b.preds[static_cast<std::size_t>(j)], CubeSet::bit(c, j));
        return eval_bool(chi, in);
    });
}

// ---- substitution sets ---------------------------------------------------------

struct SubstitutionSet {
    std::vector<Substitution> elements;

    bool empty() const { return elements.empty(); }
    std::size_t size() const { return elements.size(); }

    /// Appends unless structurally present; returns whether it was new.
    bool add(Substitution s) {
        if (std::find(elements.begin(), elements.end(), s) != elements.end()) return false;
        elements.push_back(std::move(s));
        return true;
    }
};

inline Substitution identity_substitution(const PredicateBank& b) {
    Substitution s;
    for (const auto& x : b.index_syms) s[x] = mk_int_sym(x);
    return s;
}

inline std::string to_string(const Substitution& s) {
    std::string out;
    for (const auto& [k, v] : s) out += (out.empty() ? "" : "; ") + k + " := " + render(v);
    return out;
}

namespace detail {

inline void collect_app_args(Expr e, std::vector<Expr>& pool, std::unordered_set<Expr, ExprHash>& seen) {
    for_each_node({e}, [&](Expr n) {
        if (n.kind() != Kind::FuncApp && n.kind() != Kind::PredApp) return;
        for (std::size_t k = 1; k < n.num_kids(); ++k) {
            if (seen.insert(n.kid(k)).second) pool.push_back(n.kid(k));
        }
    });
}

} // namespace detail

/// Application-argument terms of the predicate definitions and of their
/// next-state compositions, in order of first appearance.
inline std::vector<Expr> instantiation_pool(const SystemModel& m, const PredicateBank& b) {
    std::vector<Expr> pool;
    std::unordered_set<Expr, ExprHash> seen;
    for (const auto& p : b.preds) detail::collect_app_args(b.defs.at(p), pool, seen);
    for (const auto& p : b.preds) detail::collect_app_args(compose_next(b.defs.at(p), m), pool, seen);
    return pool;
}

/// Identity plus, for each index symbol, each pool term substituted for it
/// alone.  With `cross_product`, every combination of pool terms across
/// the index symbols instead.
inline SubstitutionSet generate_instantiations(const SystemModel& m, const PredicateBank& b,
                                               bool cross_product = false) {
    SubstitutionSet out;
    const Substitution id = identity_substitution(b);
    out.add(id);
    const std::vector<Expr> pool = instantiation_pool(m, b);
    if (!cross_product) {
        for (const auto& x : b.index_syms) {
            for (Expr t : pool) {
                Substitution s = id;
                s[x] = t;
                out.add(std::move(s));
            }
        }
        return out;
    }
    std::vector<Substitution> acc{id};
    for (const auto& x : b.index_syms) {
        std::vector<Substitution> next;
        for (const auto& s : acc) {
            next.push_back(s);
            for (Expr t : pool) {
                Substitution s2 = s;
                s2[x] = t;
                next.push_back(std::move(s2));
            }
        }
        acc = std::move(next);
    }
    for (auto& s : acc) out.add(std::move(s));
    return out;
}

/// The quantifier-instantiated concretization of `rho`: the conjunction
/// over Π of rho with predicate names replaced by their definitions.
inline Expr concretization_formula(const CubeSet& rho, const PredicateBank& b, const SubstitutionSet& pi) {
    if (pi.empty()) throw Error(ErrorCode::EmptySubstitutionSet, "substitution set is empty");
    std::set<std::string> pset(b.preds.begin(), b.preds.end());
    std::set<std::string> xset(b.index_syms.begin(), b.index_syms.end());
    const Expr body = substitute(formula_of(rho, b), b.def_substitution(), pset);
    std::vector<Expr> parts;
    for (const auto& s : pi.elements) parts.push_back(substitute(body, s, xset));
    return mk_and(std::move(parts));
}

// ---- explicit abstraction at finite scope -----------------------------------------

/// Integer range for enumerated symbols, with per-symbol overrides.
struct Scope {
    std::int64_t lo = 0;
    std::int64_t hi = 0;
    std::map<std::string, std::pair<std::int64_t, std::int64_t>> overrides;

    std::pair<std::int64_t, std::int64_t> range(const std::string& name) const {
        auto it = overrides.find(name);
        return it == overrides.end() ? std::make_pair(lo, hi) : it->second;
    }
    std::int64_t size() const { return hi - lo + 1; }
};

namespace detail {

/// Calls `fn` with every assignment of `names` to values in their ranges.
inline void enumerate_ints(const std::vector<std::string>& names, const Scope& sc,
                           const std::function<void(const Interp&)>& fn) {
    Interp cur;
    std::function<void(std::size_t)> rec = [&](std::size_t k) {
        if (k == names.size()) {
            fn(cur);
            return;
        }
        auto [lo, hi] = sc.range(names[k]);
        for (std::int64_t v = lo; v <= hi; ++v) {
            cur.set(names[k], v);
            rec(k + 1);
        }
    };
    rec(0);
}

inline double enumeration_count(const std::vector<std::string>& names, const Scope& sc) {
    double n = 1;
    for (const auto& x : names) {
        auto [lo, hi] = sc.range(x);
        n *= static_cast<double>(hi - lo + 1);
    }
    return n;
}

} // namespace detail

inline constexpr double kDefaultEnumerationBudget = 1 << 20;

/// Predicate valuations of state `s` over every index assignment in scope,
/// restricted to cubes that satisfy the axioms.
inline CubeSet alpha_explicit(const Interp& s, const PredicateBank& b, const Scope& sc,
                              double budget = kDefaultEnumerationBudget) {
    if (detail::enumeration_count(b.index_syms, sc) > budget) {
        throw Error(ErrorCode::ScopeTooLarge, "index enumeration exceeds budget");
    }
    CubeSet out(b.width());
    const std::uint64_t axioms = b.axiom_mask();
    detail::enumerate_ints(b.index_syms, sc, [&](const Interp& ix) {
        Interp full = s.combined(ix);
        std::uint64_t c = 0;
        for (int j = 0; j < b.width(); ++j) {
            if (eval_bool(b.defs.at(b.preds[static_cast<std::size_t>(j)]), full)) c |= std::uint64_t{1} << j;
        }
        if ((c & axioms) == axioms) out.insert(c);
    });
    return out;
}

/// States of `universe` all of whose abstract images lie in `S`.
inline std::vector<Interp> gamma_explicit(const CubeSet& S, const PredicateBank& b, const std::vector<Interp>& universe,
                                          const Scope& sc) {
    std::vector<Interp> out;
    for (const auto& s : universe) {
        if (alpha_explicit(s, b, sc).subset_of(S)) out.push_back(s);
    }
    return out;
}

/// Union of the abstract images of a set of states.
inline CubeSet alpha_explicit(const std::vector<Interp>& states, const PredicateBank& b, const Scope& sc) {
    CubeSet out(b.width());
    for (const auto& s : states) out = out.united(alpha_explicit(s, b, sc));
    return out;
}

} // namespace ipa
