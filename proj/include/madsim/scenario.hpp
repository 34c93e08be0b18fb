// Scenario configuration: agents with strategies, parameters and initial
// knowledge, canSee policy, toggles, budget. Parsed from the line-oriented
// scenario format or expanded from the built-in case presets.

#pragma once

#include <map>
#include <string>
#include <vector>

#include "madsim/knowledge.hpp"

namespace madsim {

enum class Tri { Off, On, Both };

struct AgentConfig {
    AgentId id;
    std::string strategy;
    std::map<std::string, std::string> params;
    std::vector<TermPtr> initial_terms;
    std::vector<std::pair<AgentId, Belief>> knows;
};

struct ScenarioConfig {
    std::string name;
    std::string protocol;  // "bme" | "sra3p"
    std::vector<AgentConfig> agents;
    // key "<actual-sender>#<nth-post>" -> pinned observer set for an erase of
    // that triplet; unpinned erases enumerate every admissible subset.
    std::map<std::string, IdSet> cansee;
    std::map<std::string, Tri> toggles;  // listen_after_step3, stop_after_first
    int fake_count = 1;
    uint32_t budget = 64;
    std::string fresh_namespace = "fresh";

    Tri toggle(const std::string& name, Tri fallback = Tri::Both) const {
        auto it = toggles.find(name);
        return it == toggles.end() ? fallback : it->second;
    }
    const AgentConfig* find_agent(const AgentId& id) const;
};

struct ScenarioError : std::runtime_error {
    explicit ScenarioError(const std::string& what) : std::runtime_error(what) {}
};

/// Parse the scenario text format. Diagnostics name the offending line.
ScenarioConfig parse_scenario_text(const std::string& text, const std::string& origin);
ScenarioConfig parse_scenario_file(const std::string& path);

/// Inverse of parse: parse(print(config)) == config.
std::string print_scenario(const ScenarioConfig& cfg);

/// Structural equality (used by the round-trip test).
bool scenario_eq(const ScenarioConfig& a, const ScenarioConfig& b);

// Built-in presets: bme-case1..6, sra3p-case1..6, plus guardian variants
// ("<preset>+guardian-e1", "<preset>+guardian-e2": the guardian replaces
// that attacker position). See presets.cpp.
std::vector<std::string> preset_names();
ScenarioConfig preset(const std::string& name);

}  // namespace madsim
