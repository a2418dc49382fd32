#pragma once

// Human-readable and JSON renderings of a verification run.

#include <cstdint>
#include <iomanip>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>
#include "ipa/abstraction.hpp"
#include "ipa/oracle.hpp"
#include "ipa/reach.hpp"

namespace ipa {

struct PropertyReport {
    std::string name;
    std::string formula;
    PropertyVerdict verdict;
};

struct InductiveReport {
    std::string formula;
    InductiveResult result;
};

struct Timings {
    double parse = 0;
    double reach = 0;
    double total = 0;
};

struct RunReport {
    std::string model;
    std::vector<std::string> predicates;
    std::vector<std::string> substitutions;
    ReachResult reach;
    std::vector<PropertyReport> properties;
    std::optional<InductiveReport> inductive;
    std::optional<SoundnessReport> soundness;
    Timings timings;

    bool all_hold() const {
        for (const auto& p : properties) {
            if (p.verdict.status != Verdict::Holds) return false;
        }
        return true;
    }
};

/// Cube as a string of 1/0 in predicate order.
inline std::string cube_text(std::uint64_t c, int width) {
    std::string s;
    for (int j = 0; j < width; ++j) s += CubeSet::bit(c, j) ? '1' : '0';
    return s;
}

inline std::string render_text(const RunReport& r) {
    const int w = static_cast<int>(r.predicates.size());
    std::ostringstream out;
    out << "model: " << r.model << "\n";
    out << "predicates (" << w << "):";
    for (const auto& p : r.predicates) out << " " << p;
    out << "\n";
    out << "substitutions (" << r.substitutions.size() << "):\n";
    for (const auto& s : r.substitutions) out << "  " << s << "\n";

    out << "iterations:\n";
    out << std::fixed << std::setprecision(3);
    for (std::size_t k = 0; k < r.reach.per_iteration.size(); ++k) {
        const auto& st = r.reach.per_iteration[k];
        out << "  " << (k == 0 ? std::string("init") : "step " + std::to_string(k)) << ": " << st.new_cubes
            << " new cubes, " << st.solver_calls << " solver calls, " << st.seconds << " s\n";
    }
    out << (r.reach.converged ? "converged" : "did not converge") << " after " << r.reach.iterations
        << " iterations; " << r.reach.rho.size() << " reachable cubes\n";

    bool unknown = false;
    for (const auto& p : r.properties) {
        out << p.name << ": " << to_string(p.verdict.status) << "\n";
        if (p.verdict.status == Verdict::Unknown) {
            unknown = true;
            for (auto c : p.verdict.witnesses) out << "  violating cube " << cube_text(c, w) << "\n";
        }
    }
    if (unknown) {
        out << "a property could not be proved; possible reasons:\n";
        for (const auto& reason : unknown_reasons()) out << "  - " << reason << "\n";
    }
    if (!r.reach.converged && !r.properties.empty()) {
        out << "note: the iteration limit was reached, so verdicts cover only the states explored so far\n";
    }

    if (r.inductive) {
        const auto& ir = r.inductive->result;
        out << "check " << r.inductive->formula << ": ";
        if (ir.inductive) {
            out << "inductive under Π\n";
        } else {
            out << "not inductive under Π: " << (ir.base_failures.empty() ? "step fails" : "base fails") << "\n";
            for (auto c : ir.base_failures) out << "  initial cube outside: " << cube_text(c, w) << "\n";
            for (auto c : ir.step_failures) out << "  successor outside: " << cube_text(c, w) << "\n";
        }
    }

    if (r.soundness) {
        out << "oracle: " << r.soundness->states_checked << " concrete states, " << r.soundness->violations.size()
            << " violations\n";
        std::size_t shown = 0;
        for (const auto& v : r.soundness->violations) {
            if (shown++ == 5) break;
            out << "  cube " << cube_text(v.cube, w) << " from " << v.state << "\n";
        }
    }
    out << "time: parse " << r.timings.parse << " s, reach " << r.timings.reach << " s, total " << r.timings.total
        << " s\n";
    return out.str();
}

inline nlohmann::json render_json(const RunReport& r) {
    using nlohmann::json;
    const int w = static_cast<int>(r.predicates.size());
    json j;
    j["model"] = r.model;
    j["predicates"] = r.predicates;
    j["iterations"] = r.reach.iterations;
    j["converged"] = r.reach.converged;
    j["reach_size"] = r.reach.rho.size();
    json props = json::array();
    for (const auto& p : r.properties) {
        json ws = json::array();
        for (auto c : p.verdict.witnesses) ws.push_back(cube_text(c, w));
        props.push_back({{"name", p.name}, {"status", to_string(p.verdict.status)}, {"witnesses", ws}});
    }
    j["properties"] = props;
    json per = json::array();
    for (const auto& st : r.reach.per_iteration) {
        per.push_back({{"new_cubes", st.new_cubes}, {"solver_calls", st.solver_calls}, {"seconds", st.seconds}});
    }
    j["timings"] = {{"parse", r.timings.parse}, {"reach", r.timings.reach}, {"total", r.timings.total}, {"per_iteration", per}};
    j["substitutions"] = r.substitutions;
    if (r.inductive) {
        const auto& ir = r.inductive->result;
        json base = json::array(), step = json::array();
        for (auto c : ir.base_failures) base.push_back(cube_text(c, w));
        for (auto c : ir.step_failures) step.push_back(cube_text(c, w));
        j["inductive"] = {{"formula", r.inductive->formula}, {"inductive", ir.inductive},
                          {"base_failures", base}, {"step_failures", step}};
    }
    if (r.soundness) {
        j["oracle"] = {{"states", r.soundness->states_checked}, {"violations", r.soundness->violations.size()}};
    }
    return j;
}

} // namespace ipa
