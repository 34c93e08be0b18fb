// One run's world: the network dataset plus every agent's journalled
// knowledge and strategy, stepped by the network handler until quiescence.
// Attacker requests take priority over honest actions; among attacker
// requests erases are served first; deliveries precede honest sends. Every
// same-priority tie and every unpinned canSee resolution goes through the
// chooser, which the explorer drives to enumerate all runs.

#pragma once

#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "madsim/strategy.hpp"

namespace madsim {

struct BranchPoint {
    std::string kind;  // initiative-order | serve-order | cansee | toggle
    std::string context;
    std::vector<std::string> options;
};

class Chooser {
public:
    virtual ~Chooser() = default;
    virtual size_t choose(const BranchPoint& bp) = 0;
};

struct ResolvedChoice {
    BranchPoint bp;
    size_t chosen;
};

struct BudgetExceeded : std::runtime_error {
    explicit BudgetExceeded(const std::string& what) : std::runtime_error(what) {}
};

struct EngineError : std::logic_error {
    explicit EngineError(const std::string& what) : std::logic_error(what) {}
};

class World {
public:
    struct AgentRt {
        AgentConfig cfg;
        AgentKnowledge knowledge;  // confirmed
        KnowledgeJournal journal;
        std::unique_ptr<Strategy> strategy;
        std::map<TripletId, SpyOutcome> pending;  // simulated, unconfirmed spies
        uint32_t posts = 0;                        // sender ordinals
        uint32_t minted = 0;
    };

    World(const ScenarioConfig& cfg, Chooser& chooser);

    /// Step to final quiescence. Throws BudgetExceeded past the action budget.
    void run();

    const ScenarioConfig& config() const { return cfg_; }
    const std::vector<TraceEvent>& trace() const { return trace_; }
    const std::vector<ResolvedChoice>& choices() const { return choices_; }
    const NetworkState& net() const { return net_; }
    const AgentRt& agent(const AgentId& id) const;
    std::vector<AgentId> agent_order() const;

private:
    friend class WorldServices;

    ScenarioConfig cfg_;
    Chooser& chooser_;
    NetworkState net_;
    std::vector<AgentId> order_;
    std::map<AgentId, AgentRt> agents_;
    std::vector<TraceEvent> trace_;
    std::vector<ResolvedChoice> choices_;
    std::set<std::string> quiescence_sigs_;
    std::map<std::string, bool> toggle_cache_;

    size_t choose(const BranchPoint& bp);
    bool toggle_value(const AgentId& agent, const std::string& name);

    void snapshot_all();
    void update_sightings();
    std::vector<ActionRequest> collect_requests();
    bool step();  // false at quiescence with no new intents

    void apply_post(const ActionRequest& r);
    void apply_erase(const ActionRequest& r);
    void apply_receive(const InTransit& t);
    const InTransit* next_deliverable();

    IdSet resolve_observers(const InTransit& t, const AgentId& served);
    void confirm_or_rollback(TripletId id, const Triplet& t, const IdSet& observers);

    std::string state_signature() const;
    Dataset view_of(const AgentId& id) const;
    void verify_preconditions(const ActionRequest& r);
};

}  // namespace madsim
