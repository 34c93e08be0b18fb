// Per-agent proprietary datasets: monotonic term knowledge plus the
// attentive-agent partition (honest / dishonest / unknown) and its journal
// of per-action snapshots.

#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "madsim/term.hpp"

namespace madsim {

using AgentId = std::string;
using IdSet = std::set<AgentId>;

enum class Belief { Honest, Dishonest, Unknown };

const char* belief_name(Belief b);

struct AgentKnowledge {
    Dataset terms;  // analysis-closed at all times
    IdSet honest;
    IdSet dishonest;
    IdSet unknown;

    IdSet attentive() const;
    bool is_attentive(const AgentId& id) const;

    /// Merge t and its analysis closure into terms; input value unchanged.
    [[nodiscard]] AgentKnowledge learn_term(const TermPtr& t) const;

    /// Place `who` in the requested cell, removing it from the other two.
    [[nodiscard]] AgentKnowledge classify_agent(const AgentId& who, Belief label) const;

    /// Dummy attacker: pays attention to nobody, hence can never act.
    bool is_dummy() const { return honest.empty() && dishonest.empty() && unknown.empty(); }

    /// Terms closed together with the AgentName terms of known ids; this is
    /// the synthesis context (ids are data an agent can always write down).
    Dataset synthesis_context() const;

    bool can_build(const TermPtr& goal) const;

    /// Partition cells are pairwise disjoint (attentive() is their union).
    bool partition_ok() const;
};

struct KnowledgeJournal {
    std::vector<AgentKnowledge> snapshots;  // one per confirmed action index

    void record(const AgentKnowledge& k) { snapshots.push_back(k); }
    const AgentKnowledge& at(size_t index) const { return snapshots.at(index); }
    size_t size() const { return snapshots.size(); }

    /// snapshot(i).terms grows monotonically in i.
    bool monotonic() const;
};

}  // namespace madsim
