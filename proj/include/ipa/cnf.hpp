#pragma once

#include <array>
#include <cstdlib>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "ipa/error.hpp"

namespace ipa {

/// Literal in DIMACS convention: variable v > 0 is `v`, its negation `-v`.
using Lit = int;
using Clause = std::vector<Lit>;

/// Clausal formula with the variables of the predicate symbols designated
/// as preserved.  Preserved variables are numbered 1..k in predicate order.
struct PropFormula {
    int num_vars = 0;
    std::vector<Clause> clauses;
    std::vector<std::pair<std::string, int>> preserved;
    std::map<std::string, int> bool_vars;             // Boolean symbol -> variable
    std::map<std::string, std::vector<Lit>> int_bits; // integer symbol -> bits, LSB first
};

/// Tseitin gate builder with constant folding and structural hashing.
class CnfBuilder {
public:
    /// Variables 1..reserved are left for the caller; a constant-true
    /// variable is allocated right after them.
    explicit CnfBuilder(int reserved = 0) : num_vars_(reserved) {
        true_ = new_var();
        clauses_.push_back({true_});
    }

    Lit new_var() { return ++num_vars_; }
    Lit true_lit() const { return true_; }
    Lit false_lit() const { return -true_; }
    Lit constant(bool b) const { return b ? true_ : -true_; }
    bool is_true(Lit a) const { return a == true_; }
    bool is_false(Lit a) const { return a == -true_; }

    void add_clause(Clause c) { clauses_.push_back(std::move(c)); }

    Lit land(Lit a, Lit b) {
        if (is_false(a) || is_false(b) || a == -b) return false_lit();
        if (is_true(a)) return b;
        if (is_true(b) || a == b) return a;
        if (a > b) std::swap(a, b);
        return gate('&', a, b, 0, [&](Lit g) {
            clauses_.push_back({-g, a});
            clauses_.push_back({-g, b});
            clauses_.push_back({g, -a, -b});
        });
    }

    Lit lor(Lit a, Lit b) { return -land(-a, -b); }

    Lit lxor(Lit a, Lit b) {
        if (is_false(a)) return b;
        if (is_false(b)) return a;
        if (is_true(a)) return -b;
        if (is_true(b)) return -a;
        if (a == b) return false_lit();
        if (a == -b) return true_lit();
        // Normalise polarity so that x^y, !x^y, ... share one gate.
        bool flip = false;
        if (a < 0) {
            a = -a;
            flip = !flip;
        }
        if (b < 0) {
            b = -b;
            flip = !flip;
        }
        if (a > b) std::swap(a, b);
        Lit g = gate('^', a, b, 0, [&](Lit g) {
            clauses_.push_back({-g, a, b});
            clauses_.push_back({-g, -a, -b});
            clauses_.push_back({g, -a, b});
            clauses_.push_back({g, a, -b});
        });
        return flip ? -g : g;
    }

    Lit liff(Lit a, Lit b) { return -lxor(a, b); }

    Lit ite(Lit c, Lit t, Lit e) {
        if (is_true(c)) return t;
        if (is_false(c)) return e;
        if (t == e) return t;
        if (is_true(t)) return lor(c, e);
        if (is_false(t)) return land(-c, e);
        if (is_true(e)) return lor(-c, t);
        if (is_false(e)) return land(c, t);
        if (c < 0) {
            c = -c;
            std::swap(t, e);
        }
        return gate('?', c, t, e, [&](Lit g) {
            clauses_.push_back({-g, -c, t});
            clauses_.push_back({-g, c, e});
            clauses_.push_back({g, -c, -t});
            clauses_.push_back({g, c, -e});
        });
    }

    Lit land(const std::vector<Lit>& xs) {
        Lit acc = true_lit();
        for (Lit x : xs) acc = land(acc, x);
        return acc;
    }

    Lit lor(const std::vector<Lit>& xs) {
        Lit acc = false_lit();
        for (Lit x : xs) acc = lor(acc, x);
        return acc;
    }

    int num_vars() const { return num_vars_; }
    std::vector<Clause>& clauses() { return clauses_; }

private:
    template <class Emit>
    Lit gate(char op, Lit a, Lit b, Lit c, Emit emit) {
        const std::array<int, 4> key{op, a, b, c};
        if (auto it = gates_.find(key); it != gates_.end()) return it->second;
        const Lit g = new_var();
        emit(g);
        gates_.emplace(key, g);
        return g;
    }

    int num_vars_;
    Lit true_;
    std::vector<Clause> clauses_;
    std::map<std::array<int, 4>, Lit> gates_;
};

/// DIMACS text; preserved variables are listed as `c pred <name> <var>`.
inline std::string to_dimacs(const PropFormula& f) {
    std::ostringstream out;
    for (const auto& [name, v] : f.preserved) out << "c pred " << name << " " << v << "\n";
    out << "p cnf " << f.num_vars << " " << f.clauses.size() << "\n";
    for (const auto& c : f.clauses) {
        for (Lit l : c) out << l << " ";
        out << "0\n";
    }
    return out.str();
}

/// Reads DIMACS CNF, including `c pred` annotations.
inline PropFormula parse_dimacs(const std::string& text) {
    PropFormula f;
    std::istringstream in(text);
    std::string line;
    Clause cur;
    bool header = false;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::istringstream ls(line);
        std::string tok;
        if (!(ls >> tok)) continue;
        if (tok == "c") {
            std::string kw, name;
            int v = 0;
            if (ls >> kw >> name >> v && kw == "pred") f.preserved.emplace_back(name, v);
            continue;
        }
        if (tok == "p") {
            std::string fmt;
            std::size_t n = 0;
            if (!(ls >> fmt >> f.num_vars >> n) || fmt != "cnf") {
                throw Error(ErrorCode::ParseError, "line " + std::to_string(lineno) + ": bad problem line");
            }
            header = true;
            continue;
        }
        if (!header) throw Error(ErrorCode::ParseError, "line " + std::to_string(lineno) + ": clause before header");
        ls.clear();
        ls.str(line);
        long long lit = 0;
        while (ls >> lit) {
            if (lit == 0) {
                f.clauses.push_back(std::move(cur));
                cur.clear();
            } else {
                if (std::llabs(lit) > f.num_vars) {
                    throw Error(ErrorCode::ParseError, "line " + std::to_string(lineno) + ": literal out of range");
                }
                cur.push_back(static_cast<Lit>(lit));
            }
        }
        if (!ls.eof()) throw Error(ErrorCode::ParseError, "line " + std::to_string(lineno) + ": bad literal");
    }
    if (!cur.empty()) f.clauses.push_back(std::move(cur));
    return f;
}

} // namespace ipa
