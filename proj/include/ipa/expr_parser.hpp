#pragma once

#include <cctype>
#include <charconv>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "ipa/error.hpp"
#include "ipa/expr.hpp"
#include "ipa/signature.hpp"
#include "ipa/typecheck.hpp"

namespace ipa {

/// Names visible to the expression parser besides declared symbols.
struct ParseEnv {
    const Signature* sig = nullptr;
    std::map<std::string, std::int64_t> constants;
    std::map<std::string, Expr> macros;
    int line = 1; // position of the first character, for diagnostics
    int col = 1;
};

namespace detail {

enum class Tok { Name, Number, Op, End };

struct Token {
    Tok kind = Tok::End;
    std::string text;
    std::int64_t number = 0;
    int line = 0;
    int col = 0;
};

inline std::string where(int line, int col) { return "line " + std::to_string(line) + ", col " + std::to_string(col); }

inline std::vector<Token> tokenize(std::string_view src, int line, int col0) {
    static const char* ops[] = {"=>", "<=", ">=", "!=", "=", "<", ">", "!", "&", "|",
                                "+",  "-",  "(",  ")",  ",", "."};
    std::vector<Token> out;
    std::size_t i = 0;
    std::size_t line_start = 0;
    int cur_line = line;
    auto column = [&](std::size_t at) {
        return static_cast<int>(at - line_start) + (cur_line == line ? col0 : 1);
    };
    while (i < src.size()) {
        const char c = src[i];
        if (c == '\n') {
            ++cur_line;
            line_start = ++i;
            continue;
        }
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
            continue;
        }
        Token t;
        t.line = cur_line;
        t.col = column(i);
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t j = i;
            while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_' ||
                                      src[j] == '\'')) {
                ++j;
            }
            t.kind = Tok::Name;
            t.text = std::string(src.substr(i, j - i));
            i = j;
        } else if (std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t j = i;
            while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
            t.kind = Tok::Number;
            t.text = std::string(src.substr(i, j - i));
            // Parsed as unsigned magnitude so that INT64_MIN survives negation.
            std::uint64_t mag = 0;
            auto [p, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), mag);
            if (ec != std::errc() || mag > static_cast<std::uint64_t>(INT64_MAX) + 1) {
                throw Error(ErrorCode::ParseError, where(t.line, t.col) + ": integer literal out of range");
            }
            t.number = static_cast<std::int64_t>(mag);
            i = j;
        } else {
            bool matched = false;
            for (const char* op : ops) {
                std::string_view o(op);
                if (src.substr(i, o.size()) == o) {
                    t.kind = Tok::Op;
                    t.text = std::string(o);
                    i += o.size();
                    matched = true;
                    break;
                }
            }
            if (!matched) {
                throw Error(ErrorCode::ParseError,
                            where(t.line, t.col) + ": unexpected character '" + std::string(1, c) + "'");
            }
        }
        out.push_back(std::move(t));
    }
    Token end;
    end.line = cur_line;
    end.col = column(src.size());
    out.push_back(end);
    return out;
}

class ExprParser {
public:
    ExprParser(std::string_view src, const ParseEnv& env) : env_(env), toks_(tokenize(src, env.line, env.col)) {}

    Expr parse_all() {
        Expr e = parse_expr();
        if (peek().kind != Tok::End) fail("unexpected '" + peek().text + "'");
        return e;
    }

private:
    const Token& peek() const { return toks_[pos_]; }
    bool at_op(const char* op) const { return peek().kind == Tok::Op && peek().text == op; }
    bool at_name(const char* n) const { return peek().kind == Tok::Name && peek().text == n; }

    [[noreturn]] void fail(const std::string& msg, ErrorCode code = ErrorCode::ParseError) const {
        throw Error(code, where(peek().line, peek().col) + ": " + msg);
    }

    void expect_op(const char* op) {
        if (!at_op(op)) fail(std::string("expected '") + op + "'");
        ++pos_;
    }

    Sort::Kind shallow(Expr e) const { return sort_of(e).kind; }

    void require(Expr e, Sort::Kind k, const char* what) const {
        if (shallow(e) != k) {
            fail(std::string(what) + " '" + render(e) + "' has sort " + to_string(sort_of(e)) + ", expected " +
                     to_string(Sort{k, 0}),
                 ErrorCode::SortMismatch);
        }
    }

    Expr parse_expr() { return parse_implies(); }

    Expr parse_implies() {
        Expr lhs = parse_or();
        if (at_op("=>")) {
            ++pos_;
            Expr rhs = parse_implies();
            require(lhs, Sort::Bool, "operand of =>");
            require(rhs, Sort::Bool, "operand of =>");
            return mk_implies(lhs, rhs);
        }
        return lhs;
    }

    Expr parse_or() {
        std::vector<Expr> xs{parse_and()};
        while (at_op("|")) {
            ++pos_;
            xs.push_back(parse_and());
        }
        if (xs.size() == 1) return xs[0];
        for (Expr x : xs) require(x, Sort::Bool, "operand of |");
        return mk_or(std::move(xs));
    }

    Expr parse_and() {
        std::vector<Expr> xs{parse_not()};
        while (at_op("&")) {
            ++pos_;
            xs.push_back(parse_not());
        }
        if (xs.size() == 1) return xs[0];
        for (Expr x : xs) require(x, Sort::Bool, "operand of &");
        return mk_and(std::move(xs));
    }

    Expr parse_not() {
        if (at_op("!")) {
            ++pos_;
            Expr a = parse_not();
            require(a, Sort::Bool, "operand of !");
            return mk_not(a);
        }
        return parse_cmp();
    }

    Expr parse_cmp() {
        Expr lhs = parse_sum();
        static const char* cmps[] = {"=", "!=", "<", "<=", ">", ">="};
        for (const char* op : cmps) {
            if (!at_op(op)) continue;
            ++pos_;
            Expr rhs = parse_sum();
            const std::string o = op;
            if (o == "=" || o == "!=") {
                Expr eq;
                if (shallow(lhs) == Sort::Bool && shallow(rhs) == Sort::Bool) {
                    eq = mk_iff(lhs, rhs);
                } else {
                    require(lhs, Sort::Int, "operand of =");
                    require(rhs, Sort::Int, "operand of =");
                    eq = mk_eq(lhs, rhs);
                }
                return o == "=" ? eq : mk_not(eq);
            }
            require(lhs, Sort::Int, "comparison operand");
            require(rhs, Sort::Int, "comparison operand");
            if (o == "<") return mk_lt(lhs, rhs);
            if (o == "<=") return mk_le(lhs, rhs);
            if (o == ">") return mk_gt(lhs, rhs);
            return mk_ge(lhs, rhs);
        }
        return lhs;
    }

    Expr parse_sum() {
        Expr t = parse_primary();
        while (at_op("+") || at_op("-")) {
            const bool minus = peek().text == "-";
            ++pos_;
            bool neg = minus;
            if (at_op("-")) {
                neg = !neg;
                ++pos_;
            }
            if (peek().kind != Tok::Number) fail("only integer constants may be added to a term");
            std::int64_t c = peek().number;
            ++pos_;
            if (neg) c = -c;
            require(t, Sort::Int, "operand of +");
            t = mk_plus(t, c);
        }
        return t;
    }

    std::vector<Expr> parse_args() {
        expect_op("(");
        std::vector<Expr> args;
        if (!at_op(")")) {
            args.push_back(parse_expr());
            while (at_op(",")) {
                ++pos_;
                args.push_back(parse_expr());
            }
        }
        expect_op(")");
        return args;
    }

    Expr apply_checked(Expr head, std::vector<Expr> args) {
        const Sort hs = sort_of(head);
        if (hs.kind != Sort::Func && hs.kind != Sort::Pred) {
            fail("'" + render(head) + "' of sort " + to_string(hs) + " cannot be applied", ErrorCode::SortMismatch);
        }
        if (static_cast<std::size_t>(hs.arity) != args.size()) {
            fail("'" + render(head) + "' expects " + std::to_string(hs.arity) + " argument(s), got " +
                     std::to_string(args.size()),
                 ErrorCode::ArityMismatch);
        }
        for (Expr a : args) require(a, Sort::Int, "application argument");
        return mk_apply(head, std::move(args));
    }

    Expr parse_primary() {
        const Token t = peek();
        if (t.kind == Tok::Number) {
            ++pos_;
            return mk_int(t.number);
        }
        if (t.kind == Tok::Op && t.text == "-") {
            ++pos_;
            if (peek().kind != Tok::Number) fail("expected integer after '-'");
            const std::int64_t v = peek().number;
            ++pos_;
            return mk_int(-v);
        }
        if (t.kind == Tok::Op && t.text == "(") {
            ++pos_;
            Expr inner = parse_expr();
            expect_op(")");
            if (at_op("(")) return apply_checked(inner, parse_args());
            return inner;
        }
        if (t.kind != Tok::Name) fail(t.kind == Tok::End ? "unexpected end of expression" : "unexpected '" + t.text + "'");
        ++pos_;
        if (t.text == "true") return mk_true();
        if (t.text == "false") return mk_false();
        if (t.text == "ITE") {
            auto args = parse_args();
            if (args.size() != 3) fail("ITE takes three arguments", ErrorCode::ArityMismatch);
            require(args[0], Sort::Bool, "ITE condition");
            if (shallow(args[1]) != shallow(args[2]) || !sort_of(args[1]).is_scalar()) {
                fail("ITE branches must both be BOOL or both INT", ErrorCode::SortMismatch);
            }
            return mk_ite(args[0], args[1], args[2]);
        }
        if (t.text == "LAMBDA") {
            expect_op("(");
            std::vector<std::string> params;
            while (true) {
                if (peek().kind != Tok::Name) fail("expected lambda parameter");
                params.push_back(peek().text);
                ++pos_;
                if (at_op(",")) {
                    ++pos_;
                    continue;
                }
                break;
            }
            expect_op(")");
            expect_op(".");
            lambda_scope_.push_back(params);
            Expr body = parse_expr();
            lambda_scope_.pop_back();
            if (!sort_of(body).is_scalar()) fail("lambda body must be BOOL or INT", ErrorCode::SortMismatch);
            return mk_lambda(std::move(params), body);
        }
        return resolve_name(t);
    }

    Expr resolve_name(const Token& t) {
        for (auto it = lambda_scope_.rbegin(); it != lambda_scope_.rend(); ++it) {
            for (const auto& p : *it) {
                if (p == t.text) {
                    if (at_op("(")) {
                        fail("lambda parameter '" + t.text + "' is an integer and cannot be applied",
                             ErrorCode::SortMismatch);
                    }
                    return mk_lambda_var(t.text);
                }
            }
        }
        Expr head;
        if (auto m = env_.macros.find(t.text); m != env_.macros.end()) {
            head = m->second;
        } else if (auto c = env_.constants.find(t.text); c != env_.constants.end()) {
            head = mk_int(c->second);
        } else if (env_.sig) {
            if (auto info = env_.sig->lookup(t.text)) head = mk_symbol(t.text, info->sort);
        }
        if (head.is_null()) {
            --pos_;
            fail("undeclared symbol '" + t.text + "'", ErrorCode::UndeclaredSymbol);
        }
        if (at_op("(")) return apply_checked(head, parse_args());
        return head;
    }

    const ParseEnv& env_;
    std::vector<Token> toks_;
    std::size_t pos_ = 0;
    std::vector<std::vector<std::string>> lambda_scope_;
};

} // namespace detail

/// Parses the canonical text syntax produced by `render`.  `>=`, `>` and
/// `!=` are accepted as sugar for `<=`, `<` and `!(a = b)`.
inline Expr parse_expr(std::string_view text, const ParseEnv& env) {
    return detail::ExprParser(text, env).parse_all();
}

inline Expr parse_expr(std::string_view text, const Signature& sig) {
    ParseEnv env;
    env.sig = &sig;
    return parse_expr(text, env);
}

} // namespace ipa
