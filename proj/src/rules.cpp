#include "madsim/rules.hpp"

namespace madsim {

std::optional<SpyOutcome> spy_eligible(SpyMode mode, const Triplet& t,
                                       const AgentKnowledge& k,
                                       const OfInterest& of_interest) {
    const AgentId& sender = true_sender(t);
    auto interested = [&](const AgentId& id) { return of_interest && of_interest(id); };

    SpyOutcome out;
    out.acquired.insert(normalize(t.message));
    switch (mode) {
        case SpyMode::Restricted:
            if (k.is_attentive(sender) && k.is_attentive(t.receiver)) return out;
            return std::nullopt;
        case SpyMode::Inflow:
            if (interested(sender) && k.is_attentive(t.receiver)) {
                out.learned_ids.insert(sender);
                return out;
            }
            return std::nullopt;
        case SpyMode::Outflow:
            if (k.is_attentive(sender) && interested(t.receiver)) {
                out.learned_ids.insert(t.receiver);
                return out;
            }
            return std::nullopt;
    }
    return std::nullopt;
}

Triplet make_injection(const AgentId& by, const AgentId& impersonate, const TermPtr& m,
                       const AgentId& to, const AgentKnowledge& k) {
    if (!k.is_attentive(impersonate))
        throw RuleError("inject by " + by + ": impersonated id " + impersonate + " unknown");
    if (!k.is_attentive(to))
        throw RuleError("inject by " + by + ": target id " + to + " unknown");
    if (!k.can_build(m))
        throw RuleError("inject by " + by + ": message not synthesizable: " + print_term(m));
    return Triplet{SenderTag::masquerading(by, impersonate), normalize(m), to};
}

ActionRequest make_erase_request(const AgentId& by, const InTransit& t,
                                 const AgentKnowledge& k) {
    if (!k.is_attentive(true_sender(t.triplet)))
        throw RuleError("erase by " + by + ": true sender " + true_sender(t.triplet) +
                        " unknown");
    ActionRequest r;
    r.kind = ActionKind::Erase;
    r.by = by;
    r.target = t.id;
    return r;
}

}  // namespace madsim
