// Attacker-side rule engine: eligibility and effect of the three spy rules
// (restricted, inflow, outflow), injection, and erase requests. canSee
// membership is enforced later by the handler's confirm/rollback.

#pragma once

#include <functional>
#include <optional>

#include "madsim/knowledge.hpp"
#include "madsim/network.hpp"

namespace madsim {

enum class SpyMode { Restricted, Inflow, Outflow };

struct SpyOutcome {
    Dataset acquired;        // the message (analysis happens on learn)
    IdSet learned_ids;       // new attentive entries (inflow/outflow only)
};

using OfInterest = std::function<bool(const AgentId&)>;

/// Some iff the rule's premises hold for this attacker and triplet.
/// Restricted: true sender and receiver both attentive; message only.
/// Inflow: of_interest(true sender) and receiver attentive; + sender id.
/// Outflow: true sender attentive and of_interest(receiver); + receiver id.
std::optional<SpyOutcome> spy_eligible(SpyMode mode, const Triplet& t,
                                       const AgentKnowledge& k,
                                       const OfInterest& of_interest);

struct RuleError : std::runtime_error {
    explicit RuleError(const std::string& what) : std::runtime_error(what) {}
};

/// Build the masquerading triplet <by(impersonate), m, to>. Preconditions
/// (synthesizable message, both ids attentive) are strategy bugs if violated.
Triplet make_injection(const AgentId& by, const AgentId& impersonate, const TermPtr& m,
                       const AgentId& to, const AgentKnowledge& k);

/// Erase request; requires the target's true sender to be attentive.
ActionRequest make_erase_request(const AgentId& by, const InTransit& t,
                                 const AgentKnowledge& k);

}  // namespace madsim
