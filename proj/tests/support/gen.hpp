#pragma once

// Random well-typed expressions for property tests.

#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "ipa/expr.hpp"

namespace ipa::testgen {

struct GenConfig {
    std::vector<std::string> ints;
    std::vector<std::string> bools;
    std::vector<std::pair<std::string, int>> funcs;
    std::vector<std::pair<std::string, int>> preds;
    int max_depth = 3;
    int const_range = 3;
    int offset_range = 2;
    bool lambda_heads = false;
    bool use_ite = true;
};

class ExprGen {
public:
    ExprGen(GenConfig cfg, std::uint64_t seed) : cfg_(std::move(cfg)), rng_(seed) {}

    std::mt19937_64& rng() { return rng_; }

    int uniform(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
    bool coin(int percent = 50) { return uniform(1, 100) <= percent; }

    template <class T>
    const T& pick(const std::vector<T>& xs) {
        return xs[static_cast<std::size_t>(uniform(0, static_cast<int>(xs.size()) - 1))];
    }

    Expr formula(int depth) {
        if (depth <= 0 || coin(20)) return bool_leaf();
        switch (uniform(0, 9)) {
        case 0: return mk_not(formula(depth - 1));
        case 1: return mk_and({formula(depth - 1), formula(depth - 1)});
        case 2: return mk_or({formula(depth - 1), formula(depth - 1), formula(depth - 1)});
        case 3: return mk_implies(formula(depth - 1), formula(depth - 1));
        case 4: return mk_iff(formula(depth - 1), formula(depth - 1));
        case 5: return mk_eq(term(depth - 1), term(depth - 1));
        case 6: return mk_lt(term(depth - 1), term(depth - 1));
        case 7: return mk_le(term(depth - 1), term(depth - 1));
        case 8:
            if (cfg_.use_ite) return mk_ite(formula(depth - 1), formula(depth - 1), formula(depth - 1));
            return mk_le(term(depth - 1), term(depth - 1));
        default:
            if (!cfg_.preds.empty() || cfg_.lambda_heads) return pred_app(depth - 1);
            return mk_eq(term(depth - 1), term(depth - 1));
        }
    }

    Expr term(int depth) {
        if (depth <= 0 || coin(25)) return int_leaf();
        switch (uniform(0, 3)) {
        case 0:
            if (cfg_.use_ite) return mk_ite(formula(depth - 1), term(depth - 1), term(depth - 1));
            [[fallthrough]];
        case 1: return mk_plus(term(depth - 1), offset());
        default:
            if (!cfg_.funcs.empty() || cfg_.lambda_heads) return func_app(depth - 1);
            return mk_plus(term(depth - 1), offset());
        }
    }

    /// Lambda of the given arity whose body may mention enclosing symbols.
    Expr lambda(int arity, bool boolean, int depth) {
        std::vector<std::string> params;
        for (int i = 0; i < arity; ++i) params.push_back("u" + std::to_string(next_param_++));
        const auto saved = bound_;
        bound_.insert(bound_.end(), params.begin(), params.end());
        Expr body = boolean ? formula(depth) : term(depth);
        bound_ = saved;
        return mk_lambda(params, body);
    }

    std::int64_t offset() {
        int c = 0;
        while (c == 0) c = uniform(-cfg_.offset_range, cfg_.offset_range);
        return c;
    }

private:
    Expr bool_leaf() {
        const int n = uniform(0, 9);
        if (n == 0) return mk_true();
        if (n == 1) return mk_false();
        if (n < 5 && !cfg_.bools.empty()) return mk_bool_sym(pick(cfg_.bools));
        if (n < 7) return mk_eq(int_leaf(), int_leaf());
        return mk_lt(int_leaf(), int_leaf());
    }

    Expr int_leaf() {
        const int n = uniform(0, 9);
        if (n < 2 || (cfg_.ints.empty() && bound_.empty())) return mk_int(uniform(-cfg_.const_range, cfg_.const_range));
        if (!bound_.empty() && (n < 5 || cfg_.ints.empty())) return mk_lambda_var(pick(bound_));
        return mk_int_sym(pick(cfg_.ints));
    }

    std::vector<Expr> args(int arity, int depth) {
        std::vector<Expr> out;
        for (int i = 0; i < arity; ++i) out.push_back(term(depth));
        return out;
    }

    Expr func_app(int depth) {
        if (cfg_.lambda_heads && (cfg_.funcs.empty() || coin(30))) {
            const int arity = uniform(1, 2);
            Expr head = lambda(arity, false, depth);
            return mk_apply(head, args(arity, depth));
        }
        const auto& [name, arity] = pick(cfg_.funcs);
        return mk_apply(mk_func_sym(name, arity), args(arity, depth));
    }

    Expr pred_app(int depth) {
        if (cfg_.lambda_heads && (cfg_.preds.empty() || coin(30))) {
            const int arity = uniform(1, 2);
            Expr head = lambda(arity, true, depth);
            return mk_apply(head, args(arity, depth));
        }
        const auto& [name, arity] = pick(cfg_.preds);
        return mk_apply(mk_pred_sym(name, arity), args(arity, depth));
    }

    GenConfig cfg_;
    std::mt19937_64 rng_;
    std::vector<std::string> bound_;
    int next_param_ = 0;
};

} // namespace ipa::testgen
