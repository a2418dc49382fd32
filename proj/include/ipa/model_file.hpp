#pragma once

// Line-oriented model files.  A statement starts with a keyword in the
// first column; indented lines continue the previous statement.  `#`
// starts a comment.
//
//   VAR name : BOOL | INT | FUNC(n) | PRED(n)     (also INPUT, INITSYM)
//   CONST name := integer
//   DEFINE name := expr
//   INIT name := expr
//   NEXT name := expr
//   INDEX name
//   PRED name := expr
//   AXIOM name := expr
//   PROPERTY name := expr over predicate names
//   SUBST x := term; y := term     (one substitution; repeatable)
//   OPTION name [value]

#include <cctype>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "ipa/abstraction.hpp"
#include "ipa/error.hpp"
#include "ipa/expr.hpp"
#include "ipa/expr_parser.hpp"
#include "ipa/signature.hpp"
#include "ipa/system_model.hpp"

namespace ipa {

struct ModelFile {
    SystemModel model;
    PredicateBank bank;
    std::vector<std::pair<std::string, Expr>> properties;
    std::map<std::string, std::int64_t> constants;
    std::map<std::string, Expr> macros;
    std::map<std::string, std::string> options;
    struct SubstLine {
        int line, col;
        std::string text;
    };
    std::vector<SubstLine> subst_lines;

    ParseEnv env() const {
        ParseEnv e;
        e.sig = &model.sig;
        e.constants = constants;
        e.macros = macros;
        return e;
    }
};

namespace detail {

struct Statement {
    std::string keyword;
    std::string text; // remainder after the keyword, continuation lines included
    int line = 0;
    int col = 0; // column where `text` starts
};

inline std::string strip_comment(const std::string& line) {
    const auto h = line.find('#');
    return h == std::string::npos ? line : line.substr(0, h);
}

inline bool blank(const std::string& s) {
    for (char c : s) {
        if (!std::isspace(static_cast<unsigned char>(c))) return false;
    }
    return true;
}

inline std::vector<Statement> split_statements(const std::string& text) {
    std::vector<Statement> out;
    std::istringstream in(text);
    std::string raw;
    int lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        if (!raw.empty() && raw.back() == '\r') raw.pop_back();
        const std::string line = strip_comment(raw);
        if (blank(line)) {
            if (!out.empty()) out.back().text += "\n";
            continue;
        }
        if (std::isspace(static_cast<unsigned char>(line[0]))) {
            if (out.empty()) {
                throw Error(ErrorCode::ParseError, where(lineno, 1) + ": continuation line without a statement");
            }
            out.back().text += "\n" + line;
            continue;
        }
        std::size_t k = 0;
        while (k < line.size() && (std::isalpha(static_cast<unsigned char>(line[k])) || line[k] == '_')) ++k;
        Statement s;
        s.keyword = line.substr(0, k);
        s.line = lineno;
        s.col = static_cast<int>(k) + 1;
        s.text = line.substr(k);
        out.push_back(std::move(s));
    }
    return out;
}

class ModelParser {
public:
    ModelFile parse(const std::string& text) {
        for (const auto& st : split_statements(text)) statement(st);
        finish();
        return std::move(mf_);
    }

private:
    // Cursor over one statement's text.
    struct Cursor {
        const Statement& st;
        std::size_t pos = 0;
        int line;
        std::size_t line_start = 0;
        int col0;

        explicit Cursor(const Statement& s) : st(s), line(s.line), col0(s.col) {}

        int col() const { return static_cast<int>(pos - line_start) + (line == st.line ? col0 : 1); }

        void skip_ws() {
            while (pos < st.text.size() && std::isspace(static_cast<unsigned char>(st.text[pos]))) {
                if (st.text[pos] == '\n') {
                    ++line;
                    line_start = pos + 1;
                }
                ++pos;
            }
        }

        [[noreturn]] void fail(const std::string& msg, ErrorCode code = ErrorCode::ParseError) {
            throw Error(code, where(line, col()) + ": " + msg);
        }

        std::string name() {
            skip_ws();
            const std::size_t b = pos;
            while (pos < st.text.size() &&
                   (std::isalnum(static_cast<unsigned char>(st.text[pos])) || st.text[pos] == '_' || st.text[pos] == '\'')) {
                ++pos;
            }
            if (b == pos || std::isdigit(static_cast<unsigned char>(st.text[b]))) fail("expected a name");
            return st.text.substr(b, pos - b);
        }

        bool try_lit(const std::string& lit) {
            skip_ws();
            if (st.text.compare(pos, lit.size(), lit) == 0) {
                pos += lit.size();
                return true;
            }
            return false;
        }

        void expect(const std::string& lit) {
            if (!try_lit(lit)) fail("expected '" + lit + "'");
        }

        bool at_end() {
            skip_ws();
            return pos >= st.text.size();
        }

        void expect_end() {
            if (!at_end()) fail("unexpected text '" + st.text.substr(pos, st.text.find('\n', pos) - pos) + "'");
        }

        // The rest of the statement, with its starting position.
        std::string rest(int& out_line, int& out_col) {
            skip_ws();
            out_line = line;
            out_col = col();
            const std::string r = st.text.substr(pos);
            pos = st.text.size();
            return r;
        }
    };

    void statement(const Statement& st) {
        Cursor c(st);
        const std::string& kw = st.keyword;
        if (kw == "VAR" || kw == "INPUT" || kw == "INITSYM") {
            const SymbolClass cls = kw == "VAR" ? SymbolClass::State
                                  : kw == "INPUT" ? SymbolClass::Input
                                                  : SymbolClass::Initial;
            std::vector<std::pair<std::string, std::pair<int, int>>> names;
            do {
                c.skip_ws();
                const std::pair<int, int> at{c.line, c.col()};
                names.emplace_back(c.name(), at);
            } while (c.try_lit(","));
            c.expect(":");
            const Sort s = sort(c);
            c.expect_end();
            for (const auto& [n, at] : names) declare(n, s, cls, at.first, at.second);
        } else if (kw == "INDEX") {
            do {
                c.skip_ws();
                const int l = c.line, col = c.col();
                declare(c.name(), Sort::integer(), SymbolClass::Index, l, col);
                mf_.bank.index_syms.push_back(last_);
            } while (c.try_lit(","));
            c.expect_end();
        } else if (kw == "CONST") {
            c.skip_ws();
            const int l = c.line, col = c.col();
            const std::string n = c.name();
            c.expect(":=");
            c.skip_ws();
            bool neg = c.try_lit("-");
            c.skip_ws();
            std::size_t b = c.pos;
            while (c.pos < st.text.size() && std::isdigit(static_cast<unsigned char>(st.text[c.pos]))) ++c.pos;
            if (b == c.pos) c.fail("expected an integer");
            std::int64_t v = 0;
            try {
                v = std::stoll(st.text.substr(b, c.pos - b));
            } catch (const std::exception&) {
                c.fail("integer out of range");
            }
            c.expect_end();
            reserve_name(n, l, col);
            mf_.constants[n] = neg ? -v : v;
        } else if (kw == "DEFINE") {
            c.skip_ws();
            const int l = c.line, col = c.col();
            const std::string n = c.name();
            c.expect(":=");
            Expr e = expr(c);
            reserve_name(n, l, col);
            mf_.macros[n] = e;
        } else if (kw == "INIT" || kw == "NEXT") {
            c.skip_ws();
            const int l = c.line, col = c.col();
            const std::string n = c.name();
            auto info = mf_.model.sig.lookup(n);
            if (!info) throw Error(ErrorCode::ValidationError, where(l, col) + ": '" + n + "' is not declared");
            if (info->cls != SymbolClass::State) {
                throw Error(ErrorCode::ValidationError, where(l, col) + ": '" + n + "' is not a state variable");
            }
            auto& target = kw == "INIT" ? mf_.model.init : mf_.model.next;
            if (target.count(n)) throw Error(ErrorCode::ValidationError, where(l, col) + ": duplicate " + kw + " for '" + n + "'");
            c.expect(":=");
            target[n] = expr(c);
        } else if (kw == "PRED" || kw == "AXIOM") {
            c.skip_ws();
            const int l = c.line, col = c.col();
            const std::string n = c.name();
            c.expect(":=");
            Expr e = expr(c);
            declare(n, Sort::boolean(), SymbolClass::Predicate, l, col);
            mf_.bank.preds.push_back(n);
            mf_.bank.defs[n] = e;
            if (kw == "AXIOM") mf_.bank.axioms.insert(n);
        } else if (kw == "PROPERTY") {
            c.skip_ws();
            const int l = c.line, col = c.col();
            const std::string n = c.name();
            c.expect(":=");
            int el = 0, ec = 0;
            Expr e = expr(c, &el, &ec);
            for (const auto& s : free_symbols(e)) {
                auto info = mf_.model.sig.lookup(s);
                if (!info || info->cls != SymbolClass::Predicate) {
                    throw Error(ErrorCode::ValidationError,
                                where(el, ec) + ": property '" + n + "' mentions '" + s + "', which is not a predicate");
                }
            }
            for (const auto& [pn, pe] : mf_.properties) {
                if (pn == n) throw Error(ErrorCode::ValidationError, where(l, col) + ": duplicate property '" + n + "'");
            }
            mf_.properties.emplace_back(n, e);
        } else if (kw == "SUBST") {
            std::string text = st.text;
            for (char& ch : text) if (ch == '\n') ch = ' ';
            mf_.subst_lines.push_back({st.line, st.col, text});
        } else if (kw == "OPTION") {
            const std::string n = c.name();
            c.skip_ws();
            int l = 0, col = 0;
            std::string v = c.rest(l, col);
            while (!v.empty() && std::isspace(static_cast<unsigned char>(v.back()))) v.pop_back();
            mf_.options[n] = v;
        } else {
            throw Error(ErrorCode::ParseError, where(st.line, 1) + ": unknown statement '" + kw + "'");
        }
    }

    Sort sort(Cursor& c) {
        c.skip_ws();
        const std::size_t start = c.pos;
        const std::string s = c.name();
        if (s == "BOOL") return Sort::boolean();
        if (s == "INT") return Sort::integer();
        if (s == "FUNC" || s == "PRED") {
            c.expect("(");
            c.skip_ws();
            std::size_t b = c.pos;
            while (c.pos < c.st.text.size() && std::isdigit(static_cast<unsigned char>(c.st.text[c.pos]))) ++c.pos;
            if (b == c.pos) c.fail("expected an arity");
            const int n = std::stoi(c.st.text.substr(b, c.pos - b));
            if (n < 1) c.fail("arity must be at least 1");
            c.expect(")");
            return s == "FUNC" ? Sort::func(n) : Sort::pred(n);
        }
        c.pos = start;
        c.fail("unknown sort '" + s + "'");
    }

    Expr expr(Cursor& c, int* out_line = nullptr, int* out_col = nullptr) {
        ParseEnv env = mf_.env();
        const std::string text = c.rest(env.line, env.col);
        if (out_line) *out_line = env.line;
        if (out_col) *out_col = env.col;
        if (blank(text)) c.fail("missing expression");
        try {
            return parse_expr(text, env);
        } catch (const Error& e) {
            if (e.code() == ErrorCode::ParseError) throw;
            // e.what() already starts with the original code.
            throw Error(ErrorCode::ValidationError, e.what());
        }
    }

    void reserve_name(const std::string& n, int l, int col) {
        if (mf_.model.sig.contains(n) || mf_.constants.count(n) || mf_.macros.count(n) || keyword(n)) {
            throw Error(ErrorCode::ValidationError, where(l, col) + ": '" + n + "' is already defined");
        }
    }

    static bool keyword(const std::string& n) {
        return n == "true" || n == "false" || n == "ITE" || n == "LAMBDA";
    }

    void declare(const std::string& n, Sort s, SymbolClass cls, int l, int col) {
        reserve_name(n, l, col);
        mf_.model.sig.declare(n, s, cls);
        last_ = n;
    }

    void finish() {
        std::vector<Diagnostic> diags = validate(mf_.model);
        for (auto& d : validate(mf_.bank, mf_.model)) diags.push_back(std::move(d));
        if (!diags.empty()) {
            std::string msg = "model is not valid:";
            for (const auto& d : diags) msg += "\n  " + to_string(d);
            throw Error(ErrorCode::ValidationError, msg);
        }
    }

    ModelFile mf_;
    std::string last_;
};

} // namespace detail


inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::ParseError, "cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}


namespace detail {

// One substitution written as `x := term; y := term`.  Index symbols not
// mentioned map to themselves.
inline Substitution parse_substitution_line(const std::string& line, int lineno, int col0, const ModelFile& mf) {
    std::set<std::string> scope = mf.model.sig.set_of(SymbolClass::State);
    for (const auto& s : mf.model.sig.of_class(SymbolClass::Input)) scope.insert(s);
    for (const auto& s : mf.bank.index_syms) scope.insert(s);
    Substitution sub = identity_substitution(mf.bank);
    std::size_t start = 0;
    while (start <= line.size()) {
        std::size_t end = line.find(';', start);
        if (end == std::string::npos) end = line.size();
        const std::string item = line.substr(start, end - start);
        const int col = col0 + static_cast<int>(start);
        if (!blank(item)) {
            const auto eq = item.find(":=");
            if (eq == std::string::npos) throw Error(ErrorCode::ParseError, where(lineno, col) + ": expected 'index := term'");
            std::string lhs = item.substr(0, eq);
            lhs.erase(0, lhs.find_first_not_of(" \t"));
            lhs.erase(lhs.find_last_not_of(" \t") + 1);
            if (std::find(mf.bank.index_syms.begin(), mf.bank.index_syms.end(), lhs) == mf.bank.index_syms.end()) {
                throw Error(ErrorCode::ValidationError, where(lineno, col) + ": '" + lhs + "' is not an index symbol");
            }
            ParseEnv env = mf.env();
            env.line = lineno;
            env.col = col + static_cast<int>(eq) + 2;
            Expr t = parse_expr(item.substr(eq + 2), env);
            if (!(sort_of(t) == Sort::integer())) {
                throw Error(ErrorCode::ValidationError, where(lineno, col) + ": replacement must be INT");
            }
            for (const auto& s : free_symbols(t)) {
                if (!scope.count(s)) {
                    throw Error(ErrorCode::ValidationError,
                                where(lineno, col) + ": '" + s + "' is not a state, input or index symbol");
                }
            }
            sub[lhs] = t;
        }
        start = end + 1;
    }
    return sub;
}

} // namespace detail

/// Substitution-set text: one substitution per line, `x := i + 1; y := y`.
inline SubstitutionSet parse_substitutions(const std::string& text, const ModelFile& mf) {
    SubstitutionSet out;
    std::istringstream in(text);
    std::string raw;
    int lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        const std::string line = detail::strip_comment(raw);
        if (detail::blank(line)) continue;
        out.add(detail::parse_substitution_line(line, lineno, 1, mf));
    }
    if (out.empty()) throw Error(ErrorCode::EmptySubstitutionSet, "substitution file lists no substitutions");
    return out;
}

/// The substitution set given by SUBST statements, if any.
inline std::optional<SubstitutionSet> model_substitutions(const ModelFile& mf) {
    if (mf.subst_lines.empty()) return std::nullopt;
    SubstitutionSet out;
    for (const auto& sl : mf.subst_lines) out.add(detail::parse_substitution_line(sl.text, sl.line, sl.col, mf));
    return out;
}

inline ModelFile parse_model(const std::string& text) {
    ModelFile mf = detail::ModelParser().parse(text);
    model_substitutions(mf); // SUBST lines are checked up front
    return mf;
}

inline ModelFile load_model(const std::string& path) { return parse_model(read_file(path)); }

/// Substitutions from the file if it lists any, else generated ones.  The
/// `cross_product` option widens generation to all combinations.
inline SubstitutionSet default_substitutions(const ModelFile& mf) {
    if (auto pi = model_substitutions(mf)) return *pi;
    return generate_instantiations(mf.model, mf.bank, mf.options.count("cross_product") != 0);
}

} // namespace ipa
