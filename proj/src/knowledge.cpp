#include "madsim/knowledge.hpp"

#include <algorithm>

namespace madsim {

const char* belief_name(Belief b) {
    switch (b) {
        case Belief::Honest: return "honest";
        case Belief::Dishonest: return "dishonest";
        case Belief::Unknown: return "unknown";
    }
    return "?";
}

IdSet AgentKnowledge::attentive() const {
    IdSet all = honest;
    all.insert(dishonest.begin(), dishonest.end());
    all.insert(unknown.begin(), unknown.end());
    return all;
}

bool AgentKnowledge::is_attentive(const AgentId& id) const {
    return honest.count(id) || dishonest.count(id) || unknown.count(id);
}

AgentKnowledge AgentKnowledge::learn_term(const TermPtr& t) const {
    AgentKnowledge out = *this;
    out.terms.insert(normalize(t));
    out.terms = analyze_closure(out.terms);
    return out;
}

AgentKnowledge AgentKnowledge::classify_agent(const AgentId& who, Belief label) const {
    AgentKnowledge out = *this;
    out.honest.erase(who);
    out.dishonest.erase(who);
    out.unknown.erase(who);
    switch (label) {
        case Belief::Honest: out.honest.insert(who); break;
        case Belief::Dishonest: out.dishonest.insert(who); break;
        case Belief::Unknown: out.unknown.insert(who); break;
    }
    return out;
}

Dataset AgentKnowledge::synthesis_context() const {
    Dataset ctx = terms;
    for (const AgentId& id : attentive()) ctx.insert(Term::agent(id));
    return analyze_closure(ctx);
}

bool AgentKnowledge::can_build(const TermPtr& goal) const {
    return can_synthesize(goal, synthesis_context());
}

bool AgentKnowledge::partition_ok() const {
    for (const AgentId& id : honest)
        if (dishonest.count(id) || unknown.count(id)) return false;
    for (const AgentId& id : dishonest)
        if (unknown.count(id)) return false;
    return true;
}

bool KnowledgeJournal::monotonic() const {
    for (size_t i = 1; i < snapshots.size(); ++i) {
        const Dataset& prev = snapshots[i - 1].terms;
        const Dataset& cur = snapshots[i].terms;
        if (!std::all_of(prev.begin(), prev.end(),
                         [&](const TermPtr& t) { return cur.count(t) > 0; }))
            return false;
    }
    return true;
}

}  // namespace madsim
