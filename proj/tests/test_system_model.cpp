#include <gtest/gtest.h>

#include <random>

#include "ipa/eval.hpp"
#include "ipa/expr_parser.hpp"
#include "ipa/system_model.hpp"
#include "support/corpus.hpp"

using namespace ipa;

namespace {

SystemModel running() {
    SystemModel m;
    m.sig.declare("F", Sort::func(1), SymbolClass::State);
    m.sig.declare("i", Sort::integer(), SymbolClass::Input);
    m.sig.declare("x", Sort::integer(), SymbolClass::Index);
    m.init["F"] = parse_expr("LAMBDA (u). u", m.sig);
    m.next["F"] = parse_expr("LAMBDA (u). ITE(u = i, F(i + 1), F(u))", m.sig);
    return m;
}

bool has_kind(const std::vector<Diagnostic>& ds, const std::string& kind) {
    for (const auto& d : ds) {
        if (d.kind == kind) return true;
    }
    return false;
}

// Random table for F over [-4, 4], identity elsewhere.
FuncPtr random_table(std::mt19937_64& rng) {
    FuncPtr f = make_function(mk_lambda({"u"}, mk_lambda_var("u")));
    for (std::int64_t a = -4; a <= 4; ++a) {
        f = with_update(f, {a}, Scalar(std::int64_t(std::uniform_int_distribution<int>(-3, 3)(rng))));
    }
    return f;
}

// a and b agree on random interpretations of F, x and i.
void expect_equivalent(Expr a, Expr b) {
    std::mt19937_64 rng(7);
    for (int n = 0; n < 300; ++n) {
        Interp in;
        in.set("F", random_table(rng));
        in.set("x", std::int64_t(std::uniform_int_distribution<int>(-3, 3)(rng)));
        in.set("i", std::int64_t(std::uniform_int_distribution<int>(-3, 3)(rng)));
        ASSERT_EQ(eval_bool(a, in), eval_bool(b, in)) << render(a) << " vs " << render(b);
    }
}

} // namespace

TEST(Validate, RunningExampleIsClean) { EXPECT_TRUE(validate(running()).empty()); }

TEST(Validate, NextMayNotMentionInitialSymbols) {
    SystemModel m = running();
    m.sig.declare("j", Sort::integer(), SymbolClass::Initial);
    m.next["F"] = parse_expr("LAMBDA (u). ITE(u = j, 0, F(u))", m.sig);
    EXPECT_TRUE(has_kind(validate(m), "FreeSymbolOutOfScope"));
}

TEST(Validate, MissingNextIsReported) {
    SystemModel m = running();
    m.next.clear();
    const auto ds = validate(m);
    ASSERT_EQ(ds.size(), 1u);
    EXPECT_EQ(ds[0].kind, "MissingNext");
    EXPECT_EQ(ds[0].symbol, "F");
}

TEST(Validate, InitMayNotMentionStateSymbols) {
    SystemModel m = running();
    m.init["F"] = parse_expr("LAMBDA (u). F(u)", m.sig);
    EXPECT_TRUE(has_kind(validate(m), "FreeSymbolOutOfScope"));
}

TEST(Validate, SortOfUpdateMustMatch) {
    SystemModel m = running();
    m.init["F"] = parse_expr("LAMBDA (u). u >= 0", m.sig);
    EXPECT_TRUE(has_kind(validate(m), "SortMismatch"));
}

TEST(Compose, NextOfFunctionPredicateSplitsOnInput) {
    const SystemModel m = running();
    const Expr got = compose_next(parse_expr("F(x) >= 0", m.sig), m);
    const Expr want = parse_expr("(x = i & F(i + 1) >= 0) | (x != i & F(x) >= 0)", m.sig);
    expect_equivalent(got, want);
    EXPECT_EQ(render(got), "0 <= ITE(x = i, F(i + 1), F(x))");
}

TEST(Compose, NextLeavesIndexOnlyPredicateAlone) {
    const SystemModel m = running();
    const Expr q = parse_expr("x >= 0", m.sig);
    EXPECT_EQ(compose_next(q, m), q);
    EXPECT_EQ(compose_next(mk_true(), m), mk_true());
}

TEST(Compose, InitReducesThroughIdentity) {
    const SystemModel m = running();
    const Expr q = parse_expr("x >= 0", m.sig);
    EXPECT_EQ(compose_init(parse_expr("F(x) >= 0", m.sig), m), q);
    EXPECT_EQ(compose_init(q, m), q);
    EXPECT_EQ(compose_init(parse_expr("F(F(x)) >= 0", m.sig), m), q);
}

TEST(Compose, InitIsTotalOnCorpus) {
    for (const ModelFile* mf : {&testgen::running_model(), &testgen::german_model()}) {
        const SystemModel& m = mf->model;
        Interp j;
        for (const auto& s : m.init_syms()) {
            const Sort so = m.sig.at(s).sort;
            if (so.kind == Sort::Bool) {
                j.set(s, true);
            } else {
                j.set(s, std::int64_t{1});
            }
        }
        for (const auto& v : m.state_syms()) {
            const Value val = eval(m.init.at(v), j);
            EXPECT_EQ(sort_of(val), m.sig.at(v).sort) << v;
        }
    }
}
