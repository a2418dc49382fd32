#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <json.hpp>

#include "ipa/model_file.hpp"
#include "ipa/reach.hpp"
#include "support/corpus.hpp"

using namespace ipa;

namespace {

const std::string kRunning = R"(VAR F : FUNC(1)
INPUT i : INT
INIT F := LAMBDA (u). u
NEXT F := LAMBDA (u). ITE(u = i, F(i+1), F(u))
INDEX x
PRED p := F(x) >= 0
PRED q := x >= 0
PROPERTY safe := q => p
)";

struct CliRun {
    int code;
    std::string out;
};

CliRun run(const std::string& args) {
    const std::string cmd = std::string(IPA_CLI) + " " + args + " 2>&1";
    CliRun r{-1, {}};
    FILE* p = popen(cmd.c_str(), "r");
    if (!p) return r;
    char buf[4096];
    while (std::size_t n = fread(buf, 1, sizeof buf, p)) r.out.append(buf, n);
    const int st = pclose(p);
    r.code = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
    return r;
}

std::string temp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / ("ipa_test_" + std::to_string(::getpid()) + "_" + name)).string();
}

std::string write_temp(const std::string& name, const std::string& text) {
    const std::string path = temp_path(name);
    std::ofstream(path) << text;
    return path;
}

std::string slurp(const std::string& path) { return read_file(path); }

std::string running() { return testgen::model_path("running.ipa"); }

void expect_error(const std::string& text, ErrorCode code, const std::string& where) {
    try {
        parse_model(text);
        FAIL() << "no error for:\n" << text;
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), code) << e.what();
        EXPECT_NE(std::string(e.what()).find(where), std::string::npos) << e.what();
    }
}

} // namespace

TEST(ModelFile, RunningExampleParses) {
    const ModelFile mf = parse_model(kRunning);
    EXPECT_EQ(mf.bank.preds, (std::vector<std::string>{"p", "q"}));
    EXPECT_EQ(mf.bank.index_syms, std::vector<std::string>{"x"});
    ASSERT_EQ(mf.properties.size(), 1u);
    EXPECT_EQ(mf.properties[0].first, "safe");
    EXPECT_EQ(mf.model.input_syms(), std::vector<std::string>{"i"});
}

TEST(ModelFile, GermanHasThirteenPredicatesAndOneAxiom) {
    const ModelFile& mf = testgen::german_model();
    EXPECT_EQ(mf.bank.preds.size() - mf.bank.axioms.size(), 13u);
    EXPECT_EQ(mf.bank.axioms, std::set<std::string>{"a1"});
    for (const char* p : {"ehsl", "eg", "cc_s", "cc_e", "lg", "il", "sl", "c_e", "c_i", "ch2_ge", "ch2_gs", "ch2_inv",
                          "ch3_ack"}) {
        EXPECT_TRUE(mf.bank.defs.count(p)) << p;
    }
}

TEST(ModelFile, ParseErrorsCarryPositions) {
    expect_error("VAR F : FUNK(1)\n", ErrorCode::ParseError, "line 1, col 9");
    expect_error("VAR c : INT\nINIT c := 0\nNEXT c := c +\n", ErrorCode::ParseError, "line 3");
    expect_error("VAR c : INT\nBOGUS c\n", ErrorCode::ParseError, "line 2, col 1");
}

TEST(ModelFile, ValidationErrors) {
    expect_error(kRunning + "PROPERTY bad := p & r\n", ErrorCode::ValidationError, "'r'");
    expect_error("VAR c : INT\nINIT c := 0\n", ErrorCode::ValidationError, "c");
    expect_error(kRunning + "PRED p := x < 0\n", ErrorCode::ValidationError, "line 9");
    expect_error(kRunning + "SUBST y := x\n", ErrorCode::ValidationError, "line 9");
}

TEST(ModelFile, ExplicitSubstitutions) {
    const ModelFile mf = parse_model(kRunning + "SUBST x := i + 1\nSUBST x := x\n");
    const auto pi = model_substitutions(mf);
    ASSERT_TRUE(pi.has_value());
    EXPECT_EQ(pi->size(), 2u);
    EXPECT_FALSE(model_substitutions(parse_model(kRunning)).has_value());
    EXPECT_EQ(default_substitutions(parse_model(kRunning)).size(), 2u);
    try {
        parse_substitutions("# nothing\n", mf);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::EmptySubstitutionSet);
    }
}

TEST(ModelFile, CorpusExpressionsRoundTrip) {
    for (const auto& entry : std::filesystem::directory_iterator(std::string(IPA_SOURCE_DIR) + "/models")) {
        if (entry.path().extension() != ".ipa") continue;
        const ModelFile mf = load_model(entry.path().string());
        std::vector<Expr> all;
        for (const auto& [_, e] : mf.model.init) all.push_back(e);
        for (const auto& [_, e] : mf.model.next) all.push_back(e);
        for (const auto& [_, e] : mf.bank.defs) all.push_back(e);
        for (const auto& [_, e] : mf.properties) all.push_back(e);
        for (Expr e : all) {
            ParseEnv env = mf.env();
            EXPECT_EQ(parse_expr(render(e), env), e) << entry.path() << ": " << render(e);
        }
    }
}

TEST(Cli, RunningExampleHolds) {
    const std::string dump = temp_path("reach.txt");
    const CliRun r = run("verify " + running() + " --dump-reach " + dump);
    EXPECT_EQ(r.code, 0) << r.out;
    EXPECT_NE(r.out.find("safe: HOLDS"), std::string::npos);
    EXPECT_NE(r.out.find("step 1: 1 new cubes, 2 solver calls"), std::string::npos) << r.out;
    EXPECT_EQ(slurp(dump), "# predicates: p q\n11\n10\n00\n");
    std::filesystem::remove(dump);
}

TEST(Cli, InductivenessCheck) {
    CliRun r = run("verify " + running() + " --check-inductive 'p & q'");
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.out.find("not inductive under"), std::string::npos) << r.out;
    EXPECT_NE(r.out.find("base fails"), std::string::npos) << r.out;
    r = run("verify " + running() + " --check-inductive 'p | !q'");
    EXPECT_EQ(r.code, 0) << r.out;
}

TEST(Cli, UnknownPropertyExitsOne) {
    const std::string model = write_temp("unknown.ipa", kRunning + "PROPERTY all := p\n");
    const CliRun r = run("verify " + model);
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.out.find("all: UNKNOWN"), std::string::npos) << r.out;
    EXPECT_NE(r.out.find(unknown_reasons()[2]), std::string::npos) << r.out;
    std::filesystem::remove(model);
}

TEST(Cli, IdentityOnlySubstitutionsLoseTheProof) {
    const std::string subs = write_temp("id.subs", "x := x\n");
    const CliRun r = run("verify " + running() + " --subs " + subs);
    EXPECT_EQ(r.code, 1) << r.out;
    EXPECT_NE(r.out.find("safe: UNKNOWN"), std::string::npos) << r.out;
    std::filesystem::remove(subs);
}

TEST(Cli, JsonReport) {
    const std::string out = temp_path("report.json");
    ASSERT_EQ(run("verify " + running() + " -q --json " + out + " --oracle-scope -2..3,i=-2..2").code, 0);
    const auto j = nlohmann::json::parse(slurp(out));
    for (const char* k : {"model", "predicates", "iterations", "converged", "reach_size", "properties", "timings"}) {
        EXPECT_TRUE(j.contains(k)) << k;
    }
    EXPECT_EQ(j["iterations"], 2);
    EXPECT_EQ(j["reach_size"], 3);
    EXPECT_EQ(j["properties"][0]["status"], "HOLDS");
    EXPECT_EQ(j["oracle"]["violations"], 0);
    EXPECT_EQ(j["oracle"]["states"], 132);
    std::filesystem::remove(out);
}

TEST(Cli, ExternalBackend) {
    const CliRun r = run("verify " + running() + " --sat 'dimacs:" + IPA_CLI + " sat'");
    EXPECT_EQ(r.code, 0) << r.out;
}

TEST(Cli, UsageAndInputErrorsExitTwo) {
    EXPECT_EQ(run("").code, 2);
    EXPECT_EQ(run("verify").code, 2);
    EXPECT_EQ(run("verify /nonexistent/model.ipa").code, 2);
    EXPECT_EQ(run("verify " + running() + " --max-iters nope").code, 2);
    EXPECT_EQ(run("verify " + running() + " --check-inductive 'p & zz'").code, 2);
    EXPECT_EQ(run("verify " + running() + " --sat minisat").code, 2);
    const std::string bad = write_temp("bad.ipa", "VAR F : FUNC(1\n");
    const CliRun r = run("verify " + bad);
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.out.find("line 1"), std::string::npos) << r.out;
    std::filesystem::remove(bad);
}

TEST(Cli, MissedFixpointExitsOne) {
    const CliRun r = run("verify " + running() + " --max-iters 1");
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.out.find("did not converge"), std::string::npos) << r.out;
}

TEST(Cli, SatSubcommand) {
    const std::string sat = write_temp("s.cnf", "p cnf 2 2\n1 2 0\n-1 0\n");
    const std::string unsat = write_temp("u.cnf", "p cnf 1 2\n1 0\n-1 0\n");
    CliRun r = run("sat " + sat);
    EXPECT_EQ(r.code, 10);
    EXPECT_NE(r.out.find("s SATISFIABLE"), std::string::npos);
    EXPECT_NE(r.out.find("-1 2 0"), std::string::npos) << r.out;
    r = run("sat " + unsat);
    EXPECT_EQ(r.code, 20);
    EXPECT_NE(r.out.find("s UNSATISFIABLE"), std::string::npos);
    std::filesystem::remove(sat);
    std::filesystem::remove(unsat);
}
