#pragma once

// Conflict-driven clause-learning SAT solver and projected enumeration of
// solutions.

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <memory>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <unistd.h>
#include <utility>
#include <vector>

#include "ipa/abstraction.hpp"
#include "ipa/cnf.hpp"
#include "ipa/error.hpp"

namespace ipa {

enum class SatStatus { Sat, Unsat };

struct SatResult {
    SatStatus status = SatStatus::Unsat;
    std::vector<bool> model; // indexed by variable; entry 0 unused

    bool sat() const { return status == SatStatus::Sat; }
    bool value(int v) const { return model.at(static_cast<std::size_t>(v)); }
};

/// Incremental CDCL solver: two watched literals, first-UIP learning with
/// local minimisation, VSIDS ordering (ties to the lowest variable), saved
/// phases defaulting to false, Luby restarts and learnt-clause reduction.
/// Clauses may be added between calls to `solve`.
class Solver {
public:
    explicit Solver(int num_vars = 0, std::uint64_t seed = 0) : rng_(seed), seeded_(seed != 0) { reserve(num_vars); }

    int num_vars() const { return nvars_; }

    int new_var() {
        reserve(nvars_ + 1);
        return nvars_;
    }

    void reserve(int n) {
        while (nvars_ < n) {
            ++nvars_;
            assigns_.push_back(0);
            level_.push_back(0);
            reason_.push_back(-1);
            activity_.push_back(seeded_ ? std::uniform_real_distribution<double>(0, 1e-5)(rng_) : 0.0);
            phase_.push_back(1); // negative first
            seen_.push_back(0);
            heap_pos_.push_back(-1);
            watches_.emplace_back();
            watches_.emplace_back();
            heap_insert(nvars_ - 1);
        }
    }

    void add_clause(const Clause& dimacs) {
        if (unsat_) return;
        cancel_until(0);
        std::vector<int> c;
        for (Lit l : dimacs) {
            if (l == 0) throw Error(ErrorCode::ValidationError, "literal 0 in clause");
            const int v = std::abs(l);
            if (v > nvars_) reserve(v);
            c.push_back(to_internal(l));
        }
        std::sort(c.begin(), c.end());
        c.erase(std::unique(c.begin(), c.end()), c.end());
        std::vector<int> kept;
        for (std::size_t k = 0; k < c.size(); ++k) {
            if (k + 1 < c.size() && c[k + 1] == (c[k] ^ 1)) return; // tautology
            const int val = lit_value(c[k]);
            if (val == 1) return;
            if (val == 0) kept.push_back(c[k]);
        }
        if (kept.empty()) {
            unsat_ = true;
            return;
        }
        if (kept.size() == 1) {
            enqueue(kept[0], -1);
            if (propagate() >= 0) unsat_ = true;
            return;
        }
        attach(store(std::move(kept), false));
        ++original_;
    }

    SatResult solve() {
        SatResult r;
        ++solves_;
        if (unsat_) return r;
        if (propagate() >= 0) {
            unsat_ = true;
            return r;
        }
        for (int restart = 0;; ++restart) {
            const std::int64_t budget = 100 * luby(restart);
            const int st = search(budget);
            if (st == 1) {
                r.status = SatStatus::Sat;
                r.model.assign(static_cast<std::size_t>(nvars_) + 1, false);
                for (int v = 0; v < nvars_; ++v) r.model[static_cast<std::size_t>(v) + 1] = assigns_[v] == 1;
                cancel_until(0);
                return r;
            }
            if (st == -1) {
                unsat_ = true;
                return r;
            }
            cancel_until(0);
            if (learnts_ > max_learnts_) reduce_db();
        }
    }

    std::uint64_t conflicts() const { return conflicts_; }
    std::uint64_t decisions() const { return decisions_; }
    std::uint64_t solves() const { return solves_; }

private:
    struct ClauseData {
        std::vector<int> lits;
        bool learnt = false;
        bool deleted = false;
        double activity = 0;
    };

    struct Watcher {
        int cref;
        int blocker;
    };

    static int to_internal(Lit l) { return 2 * (std::abs(l) - 1) + (l < 0 ? 1 : 0); }
    static int var(int lit) { return lit >> 1; }

    // 1 true, -1 false, 0 unassigned
    int lit_value(int lit) const {
        const int a = assigns_[var(lit)];
        return (lit & 1) ? -a : a;
    }

    int decision_level() const { return static_cast<int>(trail_lim_.size()); }

    int store(std::vector<int> lits, bool learnt) {
        clauses_.push_back({std::move(lits), learnt, false, 0.0});
        return static_cast<int>(clauses_.size()) - 1;
    }

    void attach(int cref) {
        const auto& c = clauses_[cref].lits;
        watches_[c[0]].push_back({cref, c[1]});
        watches_[c[1]].push_back({cref, c[0]});
    }

    void enqueue(int lit, int reason) {
        const int v = var(lit);
        assigns_[v] = (lit & 1) ? -1 : 1;
        level_[v] = decision_level();
        reason_[v] = reason;
        trail_.push_back(lit);
    }

    int propagate() {
        int conflict = -1;
        while (qhead_ < trail_.size() && conflict < 0) {
            const int p = trail_[qhead_++];
            const int false_lit = p ^ 1;
            auto& ws = watches_[false_lit];
            std::size_t i = 0, j = 0;
            while (i < ws.size()) {
                const Watcher w = ws[i];
                if (lit_value(w.blocker) == 1) {
                    ws[j++] = ws[i++];
                    continue;
                }
                auto& c = clauses_[w.cref].lits;
                if (c[0] == false_lit) std::swap(c[0], c[1]);
                ++i;
                const int first = c[0];
                const Watcher nw{w.cref, first};
                if (first != w.blocker && lit_value(first) == 1) {
                    ws[j++] = nw;
                    continue;
                }
                bool moved = false;
                for (std::size_t k = 2; k < c.size(); ++k) {
                    if (lit_value(c[k]) != -1) {
                        std::swap(c[1], c[k]);
                        watches_[c[1]].push_back(nw);
                        moved = true;
                        break;
                    }
                }
                if (moved) continue;
                ws[j++] = nw;
                if (lit_value(first) == -1) {
                    conflict = w.cref;
                    while (i < ws.size()) ws[j++] = ws[i++];
                } else {
                    enqueue(first, w.cref);
                }
            }
            ws.resize(j);
        }
        if (conflict >= 0) qhead_ = trail_.size();
        return conflict;
    }

    void analyze(int confl, std::vector<int>& learnt, int& back_level) {
        learnt.assign(1, -1);
        int path = 0;
        int p = -1;
        std::size_t idx = trail_.size();
        std::vector<int> touched;
        do {
            auto& cd = clauses_[confl];
            if (cd.learnt) bump_clause(cd);
            for (std::size_t k = (p == -1 ? 0 : 1); k < cd.lits.size(); ++k) {
                const int q = cd.lits[k];
                const int v = var(q);
                if (seen_[v] || level_[v] == 0) continue;
                bump_var(v);
                seen_[v] = 1;
                touched.push_back(v);
                if (level_[v] >= decision_level()) {
                    ++path;
                } else {
                    learnt.push_back(q);
                }
            }
            do {
                --idx;
            } while (!seen_[var(trail_[idx])]);
            p = trail_[idx];
            confl = reason_[var(p)];
            seen_[var(p)] = 0;
            --path;
        } while (path > 0);
        learnt[0] = p ^ 1;

        // Drop literals implied by the rest of the clause.
        std::size_t out = 1;
        for (std::size_t k = 1; k < learnt.size(); ++k) {
            const int v = var(learnt[k]);
            const int r = reason_[v];
            bool redundant = r >= 0;
            if (redundant) {
                const auto& rl = clauses_[r].lits;
                for (std::size_t m = 1; m < rl.size(); ++m) {
                    const int u = var(rl[m]);
                    if (!seen_[u] && level_[u] > 0) {
                        redundant = false;
                        break;
                    }
                }
            }
            if (!redundant) learnt[out++] = learnt[k];
        }
        learnt.resize(out);
        for (int v : touched) seen_[v] = 0;

        back_level = 0;
        if (learnt.size() > 1) {
            std::size_t best = 1;
            for (std::size_t k = 2; k < learnt.size(); ++k) {
                if (level_[var(learnt[k])] > level_[var(learnt[best])]) best = k;
            }
            std::swap(learnt[1], learnt[best]);
            back_level = level_[var(learnt[1])];
        }
    }

    void cancel_until(int lvl) {
        if (decision_level() <= lvl) return;
        for (std::size_t k = trail_.size(); k > trail_lim_[static_cast<std::size_t>(lvl)]; --k) {
            const int v = var(trail_[k - 1]);
            phase_[v] = static_cast<char>(trail_[k - 1] & 1);
            assigns_[v] = 0;
            reason_[v] = -1;
            if (heap_pos_[v] < 0) heap_insert(v);
        }
        trail_.resize(trail_lim_[static_cast<std::size_t>(lvl)]);
        trail_lim_.resize(static_cast<std::size_t>(lvl));
        qhead_ = trail_.size();
    }

    // 1 = model found, -1 = unsatisfiable, 0 = budget exhausted.
    int search(std::int64_t budget) {
        std::vector<int> learnt;
        std::int64_t local = 0;
        while (true) {
            const int confl = propagate();
            if (confl >= 0) {
                ++conflicts_;
                ++local;
                if (decision_level() == 0) return -1;
                int back = 0;
                analyze(confl, learnt, back);
                cancel_until(back);
                if (learnt.size() == 1) {
                    enqueue(learnt[0], -1);
                } else {
                    const int cref = store(learnt, true);
                    attach(cref);
                    bump_clause(clauses_[cref]);
                    ++learnts_;
                    enqueue(learnt[0], cref);
                }
                var_inc_ /= 0.95;
                cla_inc_ /= 0.999;
                continue;
            }
            if (local >= budget) return 0;
            const int v = pick_branch();
            if (v < 0) return 1;
            ++decisions_;
            trail_lim_.push_back(trail_.size());
            enqueue(2 * v + phase_[v], -1);
        }
    }

    int pick_branch() {
        while (!heap_.empty()) {
            const int v = heap_pop();
            if (assigns_[v] == 0) return v;
        }
        return -1;
    }

    void bump_var(int v) {
        activity_[v] += var_inc_;
        if (activity_[v] > 1e100) {
            for (auto& a : activity_) a *= 1e-100;
            var_inc_ *= 1e-100;
        }
        if (heap_pos_[v] >= 0) sift_up(heap_pos_[v]);
    }

    void bump_clause(ClauseData& c) {
        c.activity += cla_inc_;
        if (c.activity > 1e20) {
            for (auto& d : clauses_) {
                if (d.learnt) d.activity *= 1e-20;
            }
            cla_inc_ *= 1e-20;
        }
    }

    // Called at decision level 0 only, so no clause is the reason of a
    // literal that analysis could visit.
    void reduce_db() {
        std::vector<int> ls;
        for (int k = 0; k < static_cast<int>(clauses_.size()); ++k) {
            if (clauses_[k].learnt && clauses_[k].lits.size() > 2) ls.push_back(k);
        }
        std::sort(ls.begin(), ls.end(), [&](int a, int b) { return clauses_[a].activity < clauses_[b].activity; });
        for (std::size_t k = 0; k < ls.size() / 2; ++k) clauses_[ls[k]].deleted = true;
        std::vector<ClauseData> kept;
        kept.reserve(clauses_.size());
        for (auto& c : clauses_) {
            if (!c.deleted) kept.push_back(std::move(c));
        }
        clauses_ = std::move(kept);
        for (auto& w : watches_) w.clear();
        learnts_ = 0;
        for (int k = 0; k < static_cast<int>(clauses_.size()); ++k) {
            attach(k);
            if (clauses_[k].learnt) ++learnts_;
        }
        for (auto& r : reason_) r = -1;
        max_learnts_ = static_cast<std::size_t>(static_cast<double>(max_learnts_) * 1.1);
    }

    static std::int64_t luby(int i) {
        // Position i (0-based) of 1 1 2 1 1 2 4 1 1 2 ...
        std::int64_t size = 1;
        int seq = 0;
        while (size < i + 1) {
            ++seq;
            size = 2 * size + 1;
        }
        std::int64_t x = i;
        while (size - 1 != x) {
            size = (size - 1) >> 1;
            --seq;
            x = x % size;
        }
        return std::int64_t{1} << seq;
    }

    // Max-heap on activity, ties broken toward the lower variable.
    bool before(int a, int b) const {
        return activity_[a] > activity_[b] || (activity_[a] == activity_[b] && a < b);
    }

    void heap_insert(int v) {
        heap_pos_[v] = static_cast<int>(heap_.size());
        heap_.push_back(v);
        sift_up(heap_pos_[v]);
    }

    int heap_pop() {
        const int top = heap_[0];
        heap_pos_[top] = -1;
        const int last = heap_.back();
        heap_.pop_back();
        if (!heap_.empty()) {
            heap_[0] = last;
            heap_pos_[last] = 0;
            sift_down(0);
        }
        return top;
    }

    void sift_up(int i) {
        const int v = heap_[i];
        while (i > 0) {
            const int parent = (i - 1) / 2;
            if (!before(v, heap_[parent])) break;
            heap_[i] = heap_[parent];
            heap_pos_[heap_[i]] = i;
            i = parent;
        }
        heap_[i] = v;
        heap_pos_[v] = i;
    }

    void sift_down(int i) {
        const int v = heap_[i];
        const int n = static_cast<int>(heap_.size());
        while (true) {
            int child = 2 * i + 1;
            if (child >= n) break;
            if (child + 1 < n && before(heap_[child + 1], heap_[child])) ++child;
            if (!before(heap_[child], v)) break;
            heap_[i] = heap_[child];
            heap_pos_[heap_[i]] = i;
            i = child;
        }
        heap_[i] = v;
        heap_pos_[v] = i;
    }

    std::mt19937_64 rng_;
    bool seeded_ = false;
    int nvars_ = 0;
    bool unsat_ = false;
    std::vector<ClauseData> clauses_;
    std::vector<std::vector<Watcher>> watches_;
    std::vector<int> assigns_;
    std::vector<int> level_;
    std::vector<int> reason_;
    std::vector<double> activity_;
    std::vector<char> phase_;
    std::vector<char> seen_;
    std::vector<int> heap_;
    std::vector<int> heap_pos_;
    std::vector<int> trail_;
    std::vector<std::size_t> trail_lim_;
    std::size_t qhead_ = 0;
    double var_inc_ = 1.0;
    double cla_inc_ = 1.0;
    std::size_t learnts_ = 0;
    std::size_t original_ = 0;
    std::size_t max_learnts_ = 4000;
    std::uint64_t conflicts_ = 0;
    std::uint64_t decisions_ = 0;
    std::uint64_t solves_ = 0;
};

// ---- external solvers ----------------------------------------------------------

/// Runs `<command> <file.cnf>` and reads a SAT-competition style answer
/// (`s SATISFIABLE` / `s UNSATISFIABLE` plus `v` lines) from stdout.
class DimacsBackend {
public:
    explicit DimacsBackend(std::string command) : command_(std::move(command)) {}

    SatResult solve(int num_vars, const std::vector<Clause>& clauses) const {
        char path[] = "/tmp/ipa-XXXXXX.cnf";
        const int fd = mkstemps(path, 4);
        if (fd < 0) throw Error(ErrorCode::ExternalSolverFailure, "cannot create temporary file");
        close(fd);
        {
            std::ofstream out(path);
            out << "p cnf " << num_vars << " " << clauses.size() << "\n";
            for (const auto& c : clauses) {
                for (Lit l : c) out << l << " ";
                out << "0\n";
            }
        }
        const std::string cmd = command_ + " " + path + " 2>/dev/null";
        FILE* pipe = popen(cmd.c_str(), "r");
        if (!pipe) {
            std::remove(path);
            throw Error(ErrorCode::ExternalSolverFailure, "cannot run '" + command_ + "'");
        }
        std::string text;
        char buf[4096];
        std::size_t n = 0;
        while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) text.append(buf, n);
        pclose(pipe);
        std::remove(path);
        return parse_answer(text, num_vars, clauses);
    }

    const std::string& command() const { return command_; }

private:
    SatResult parse_answer(const std::string& text, int num_vars, const std::vector<Clause>& clauses) const {
        SatResult r;
        std::optional<bool> sat;
        r.model.assign(static_cast<std::size_t>(num_vars) + 1, false);
        std::istringstream in(text);
        std::string line;
        while (std::getline(in, line)) {
            std::istringstream ls(line);
            std::string tag;
            if (!(ls >> tag)) continue;
            if (tag == "s") {
                std::string word;
                ls >> word;
                if (word == "SATISFIABLE") sat = true;
                if (word == "UNSATISFIABLE") sat = false;
            } else if (tag == "v") {
                long long l = 0;
                while (ls >> l) {
                    if (l == 0) break;
                    const auto v = static_cast<std::size_t>(std::llabs(l));
                    if (v <= static_cast<std::size_t>(num_vars)) r.model[v] = l > 0;
                }
            }
        }
        if (!sat) throw Error(ErrorCode::ExternalSolverFailure, "'" + command_ + "' gave no 's' line");
        if (!*sat) {
            r.model.clear();
            return r;
        }
        r.status = SatStatus::Sat;
        for (const auto& c : clauses) {
            bool ok = false;
            for (Lit l : c) ok = ok || r.model[static_cast<std::size_t>(std::abs(l))] == (l > 0);
            if (!ok) throw Error(ErrorCode::ExternalSolverFailure, "'" + command_ + "' returned a non-model");
        }
        return r;
    }

    std::string command_;
};

/// Backend choice: the built-in solver or an external DIMACS command.
struct SatConfig {
    std::string external_command; // empty selects the internal solver
    std::uint64_t seed = 0;       // nonzero perturbs the internal solver's initial variable order

    static SatConfig parse(const std::string& spec) {
        if (spec == "internal") return {};
        if (spec.rfind("dimacs:", 0) == 0 && spec.size() > 7) return {spec.substr(7), 0};
        throw Error(ErrorCode::ParseError, "unknown SAT backend '" + spec + "'");
    }
};

inline SatResult solve(const PropFormula& f, const SatConfig& cfg = {}) {
    if (!cfg.external_command.empty()) return DimacsBackend(cfg.external_command).solve(f.num_vars, f.clauses);
    Solver s(f.num_vars, cfg.seed);
    for (const auto& c : f.clauses) s.add_clause(c);
    return s.solve();
}

struct AllSatResult {
    CubeSet cubes;
    int solver_calls = 0;
};

/// Every assignment to the preserved variables that extends to a model of
/// `f`, skipping those in `exclude`.  Each solution is blocked by a clause
/// over the preserved variables only, so the number of solver calls is
/// the number of cubes found plus one.
inline AllSatResult all_sat_project(const PropFormula& f, const SatConfig& cfg = {},
                                    const std::optional<CubeSet>& exclude = std::nullopt) {
    const int k = static_cast<int>(f.preserved.size());
    AllSatResult out{CubeSet(k), 0};
    auto blocking = [&](std::uint64_t cube) {
        Clause c;
        for (int j = 0; j < k; ++j) {
            const Lit v = f.preserved[static_cast<std::size_t>(j)].second;
            c.push_back(CubeSet::bit(cube, j) ? -v : v);
        }
        return c;
    };
    auto cube_of = [&](const SatResult& r) {
        std::uint64_t cube = 0;
        for (int j = 0; j < k; ++j) {
            if (r.value(f.preserved[static_cast<std::size_t>(j)].second)) cube |= std::uint64_t{1} << j;
        }
        return cube;
    };

    if (cfg.external_command.empty()) {
        Solver s(f.num_vars, cfg.seed);
        for (const auto& c : f.clauses) s.add_clause(c);
        if (exclude) {
            for (auto cube : *exclude) s.add_clause(blocking(cube));
        }
        while (true) {
            ++out.solver_calls;
            SatResult r = s.solve();
            if (!r.sat()) break;
            const std::uint64_t cube = cube_of(r);
            out.cubes.insert(cube);
            s.add_clause(blocking(cube));
        }
        return out;
    }

    DimacsBackend ext(cfg.external_command);
    std::vector<Clause> clauses = f.clauses;
    if (exclude) {
        for (auto cube : *exclude) clauses.push_back(blocking(cube));
    }
    while (true) {
        ++out.solver_calls;
        SatResult r = ext.solve(f.num_vars, clauses);
        if (!r.sat()) break;
        const std::uint64_t cube = cube_of(r);
        if (!out.cubes.insert(cube)) throw Error(ErrorCode::ExternalSolverFailure, "solver repeated a blocked cube");
        clauses.push_back(blocking(cube));
    }
    return out;
}

} // namespace ipa
