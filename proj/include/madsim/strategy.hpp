// Executable agent programs. A strategy is a deterministic reaction
// function over its own observation stream; every nondeterministic choice
// is externalized through the engine's chooser (toggles) or the handler
// (action selection, canSee). Strategies may stash only confirmed
// observations; simulated spy content informs the current round's requests
// and nothing else, so handler rollback needs no strategy cooperation.

#pragma once

#include <memory>
#include <vector>

#include "madsim/network.hpp"
#include "madsim/rules.hpp"
#include "madsim/scenario.hpp"

namespace madsim {

class World;

/// Narrow engine services exposed to strategies.
class Services {
public:
    virtual ~Services() = default;
    virtual const AgentId& self() const = 0;
    virtual const AgentKnowledge& knowledge() const = 0;  // confirmed
    /// Confirmed terms plus this round's simulated acquisitions, closed.
    virtual const Dataset& view() const = 0;
    /// In-transit triplets this agent currently simulates spying.
    virtual const std::vector<InTransit>& sightings() const = 0;
    virtual TermPtr mint_atom(AtomTag tag) = 0;
    virtual TermPtr mint_key(bool commutative) = 0;
    /// Resolve a scenario toggle (cached per agent+name; Both branches).
    virtual bool toggle(const std::string& name) = 0;
    virtual int fake_count() const = 0;
    /// Belief updates routed through the engine so journals stay exact.
    virtual void relabel(const AgentId& who, Belief b) = 0;
};

class Strategy {
public:
    virtual ~Strategy() = default;

    virtual std::string name() const = 0;
    virtual bool is_attacker() const { return false; }
    /// Guardians are attackers whose acquisitions are benign.
    virtual bool benign() const { return false; }

    /// Emit this round's action requests (recomputed every round; an
    /// unserved request simply gets re-emitted or withdrawn).
    virtual void collect(Services& s, std::vector<ActionRequest>& out) = 0;

    /// Own Send/Inject request was applied.
    virtual void on_posted(Services& s, const ActionRequest& r) = 0;
    /// Own Erase request was served.
    virtual void on_erase_served(Services&, const Triplet&) {}
    /// A message addressed to this agent was delivered.
    virtual void on_delivery(Services&, const Triplet&) {}
    /// A simulated spy was confirmed by the handler.
    virtual void on_spy_confirmed(Services&, const Triplet&) {}

    /// Quiescence poll (the logical "reasonable time" expiring). Returns
    /// true if the strategy now has new actions to attempt.
    virtual bool on_timeout(Services&) { return false; }

    /// Willingness to receive a delivery (honest A stops listening, a
    /// stopped classical attacker is closed).
    virtual bool receptive(Services&, const InTransit&) { return true; }
    /// Attackers simulate spying only while listening.
    virtual bool listening(Services&) { return is_attacker(); }

    virtual SpyMode spy_mode() const { return SpyMode::Restricted; }
    virtual OfInterest of_interest() const { return {}; }

    /// Final inferences at run end (suspect condemnation, flags).
    virtual void conclude(Services&) {}

    /// Behavior-relevant state for the explorer's quiescence fixpoint
    /// check. Excludes retry counters.
    virtual std::string signature() const { return {}; }
};

/// Instantiate a strategy by scenario name ("bme.honest_a", ...). Throws
/// ScenarioError for unknown names or bad parameter blocks.
std::unique_ptr<Strategy> make_strategy(const AgentConfig& cfg, const ScenarioConfig& scenario);

}  // namespace madsim
