// Engine-level invariants checked over explored branches: dummy-attacker
// null activity, erase supremacy, eraser visibility, journal monotonicity,
// single-action indexing, rollback completeness, and the exclusivity /
// non-exclusivity facts of the two case studies. Shared by the unit tests
// and the acceptance suite.

#pragma once

#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>

#include "madsim/explorer.hpp"
#include "madsim/strategies_bme.hpp"
#include "madsim/strategies_sra3p.hpp"
#include "madsim/tables.hpp"

namespace madsim::props {

inline std::vector<std::string> all_preset_names() {
    std::vector<std::string> out;
    for (const std::string& base : preset_names()) {
        out.push_back(base);
        out.push_back(base + "+guardian-e1");
        out.push_back(base + "+guardian-e2");
    }
    return out;
}

// Trace-level invariants that need no world access.
inline std::optional<std::string> check_trace_invariants(const RunRecord& r) {
    std::set<TripletId> erased;
    uint32_t prev_index = 0;
    for (const TraceEvent& e : r.trace) {
        if (e.index != prev_index + 1)
            return "indices not single-stepped at " + e.line();
        prev_index = e.index;
        if (e.kind == ActionKind::Erase) {
            if (!e.observers || !e.observers->count(e.actor))
                return "served eraser missing from observers: " + e.line();
            erased.insert(e.triplet);
        }
        if (e.kind == ActionKind::Receive && erased.count(e.triplet))
            return "erased triplet was delivered: " + e.line();
    }
    return std::nullopt;
}

// World-level invariants (journals, rollback) checked by replaying.
inline std::optional<std::string> check_world_invariants(const ScenarioConfig& cfg,
                                                         const RunRecord& rec) {
    std::optional<std::string> failure;
    replay_inspect(cfg, tape_of(rec), [&](const World& w) {
        for (const AgentId& id : w.agent_order()) {
            const World::AgentRt& rt = w.agent(id);
            if (!rt.journal.monotonic()) {
                failure = "journal not monotonic for " + id;
                return;
            }
            if (rt.journal.size() != w.net().index + 1) {
                failure = "journal of " + id + " has " + std::to_string(rt.journal.size()) +
                          " snapshots for " + std::to_string(w.net().index) + " actions";
                return;
            }
            if (!rt.knowledge.partition_ok()) {
                failure = "belief partition violated for " + id;
                return;
            }
        }
        // Rollback completeness: an attacker outside an erase's observers
        // holds exactly its previous snapshot right after the erase.
        for (const TraceEvent& e : w.trace()) {
            if (e.kind != ActionKind::Erase) continue;
            for (const AgentId& id : w.agent_order()) {
                if (!w.agent(id).strategy->is_attacker()) continue;
                if (e.observers->count(id)) continue;
                const auto& before = w.agent(id).journal.at(e.index - 1).terms;
                const auto& after = w.agent(id).journal.at(e.index).terms;
                if (before != after) {
                    failure = "rollback residue for " + id + " at " + e.line();
                    return;
                }
            }
        }
    });
    return failure;
}

inline std::optional<std::string> check_preset_invariants(const std::string& name) {
    ScenarioConfig cfg = preset(name);
    for (const RunRecord& r : explore(cfg)) {
        if (auto f = check_trace_invariants(r)) return name + ": " + *f;
        if (auto f = check_world_invariants(cfg, r)) return name + ": " + *f;
    }
    return std::nullopt;
}

// BME exclusivity: no branch leaves two attackers able to derive the key
// the initiator committed to.
inline std::optional<std::string> check_bme_exclusivity(const std::string& name) {
    ScenarioConfig cfg = preset(name);
    std::optional<std::string> failure;
    for (const RunRecord& r : explore(cfg)) {
        replay_inspect(cfg, tape_of(r), [&](const World& w) {
            const BmeHonestA* a = nullptr;
            for (const AgentId& id : w.agent_order())
                if (auto* p = dynamic_cast<BmeHonestA*>(w.agent(id).strategy.get())) a = p;
            if (!a || !a->step3_sent || a->responses.empty()) return;
            TermPtr used = a->responses.front().session_key;
            int holders = 0;
            for (const AgentId& id : w.agent_order()) {
                if (!w.agent(id).strategy->is_attacker()) continue;
                if (can_synthesize(used, w.agent(id).knowledge.terms)) ++holders;
            }
            if (holders > 1) failure = name + ": " + std::to_string(holders) +
                                       " attackers hold the session key in use";
        });
        if (failure) return failure;
    }
    return std::nullopt;
}

// SRA3P non-exclusivity: some case-2 branch with canSee = both leaves the
// true secret in both attackers' datasets.
inline std::optional<std::string> check_sra3p_non_exclusivity() {
    ScenarioConfig cfg = preset("sra3p-case2");
    bool witnessed = false;
    for (const RunRecord& r : explore(cfg)) {
        if (!r.cansee_step3 || r.cansee_step3->size() != 2) continue;
        replay_inspect(cfg, tape_of(r), [&](const World& w) {
            TermPtr secret;
            for (const AgentId& id : w.agent_order())
                if (auto* p = dynamic_cast<Sra3pHonestA*>(w.agent(id).strategy.get()))
                    secret = normalize(p->secret);
            int holders = 0;
            for (const AgentId& id : {AgentId("E1"), AgentId("E2")})
                if (contains(w.agent(id).knowledge.terms, secret)) ++holders;
            if (holders == 2) witnessed = true;
        });
        if (witnessed) return std::nullopt;
    }
    if (!witnessed)
        return std::string("no sra3p case-2 branch gives both attackers the secret");
    return std::nullopt;
}

// Dummy attackers over randomized scenarios: an attacker whose dataset
// holds no agent identifiers performs no network action, ever.
inline std::optional<std::string> check_dummy_attackers(int scenarios, uint32_t seed) {
    std::mt19937 rng(seed);
    for (int i = 0; i < scenarios; ++i) {
        bool bme = rng() % 2 == 0;
        int case_no = 1 + int(rng() % 6);
        ScenarioConfig cfg = preset((bme ? "bme-case" : "sra3p-case") + std::to_string(case_no));
        AgentConfig dummy;
        dummy.id = "E3";
        dummy.strategy = bme ? "bme.attacker" : "sra3p.attacker";
        if (bme) {
            dummy.params["server"] = "S";
            dummy.params["key"] = "key:kE3S";
        } else {
            dummy.params["kind"] = "auto";
        }
        // Pure terms never reveal identifiers; give it a random pile.
        int extra = int(rng() % 4);
        for (int t = 0; t < extra; ++t) {
            switch (rng() % 3) {
                case 0: dummy.initial_terms.push_back(Term::atom("junk" + std::to_string(t))); break;
                case 1: dummy.initial_terms.push_back(Term::sym_key("junkk" + std::to_string(t))); break;
                default:
                    dummy.initial_terms.push_back(Term::pair(Term::atom("x"), Term::sym_key("y")));
            }
        }
        cfg.agents.push_back(dummy);
        cfg.name += "+dummy";
        for (const RunRecord& r : explore(cfg)) {
            for (const TraceEvent& e : r.trace)
                if (e.actor == "E3" && e.kind != ActionKind::Receive)
                    return cfg.name + ": dummy attacker acted: " + e.line();
        }
    }
    return std::nullopt;
}

inline std::optional<std::string> run_engine_properties(int dummy_scenarios, uint32_t seed) {
    for (const std::string& name : all_preset_names())
        if (auto f = check_preset_invariants(name)) return f;
    for (int i = 1; i <= 6; ++i)
        if (auto f = check_bme_exclusivity("bme-case" + std::to_string(i))) return f;
    if (auto f = check_sra3p_non_exclusivity()) return f;
    if (auto f = check_dummy_attackers(dummy_scenarios, seed)) return f;
    return std::nullopt;
}

// Order-irrelevance: the outcome multiset of a BME preset is identical
// across the two initiative orders of the attack requests.
inline std::optional<std::string> check_order_irrelevance(const std::string& name) {
    std::map<std::string, std::multiset<std::string>> by_order;
    for (const RunRecord& r : explore(preset(name))) {
        std::string order = "-";
        for (const ResolvedChoice& c : r.choices) {
            if (c.bp.kind == "initiative-order" && c.bp.context == "attacker actions") {
                order = c.bp.options[c.chosen].substr(0, c.bp.options[c.chosen].find(' '));
                break;
            }
        }
        std::ostringstream key;
        for (const OutcomeRow& row : r.outcomes) key << row.str() << "|";
        by_order[order].insert(key.str());
    }
    auto e1 = by_order.find("E1");
    auto e2 = by_order.find("E2");
    if (e1 == by_order.end() || e2 == by_order.end())
        return name + ": exploration missing an initiative order";
    if (e1->second != e2->second)
        return name + ": outcome multisets differ across initiative orders";
    return std::nullopt;
}

}  // namespace madsim::props
