#include "madsim/world.hpp"

#include <algorithm>
#include <sstream>

namespace madsim {

namespace {

std::string idset_str(const IdSet& s) {
    std::string out = "{";
    bool first = true;
    for (const AgentId& id : s) {
        if (!first) out += ",";
        out += id;
        first = false;
    }
    return out + "}";
}

}  // namespace

// Per-agent adapter giving strategies their narrow view of the world.
class WorldServices final : public Services {
public:
    WorldServices(World& w, World::AgentRt& rt, Dataset view, std::vector<InTransit> sightings)
        : w_(w), rt_(rt), view_(std::move(view)), sightings_(std::move(sightings)) {}

    const AgentId& self() const override { return rt_.cfg.id; }
    const AgentKnowledge& knowledge() const override { return rt_.knowledge; }
    const Dataset& view() const override { return view_; }
    const std::vector<InTransit>& sightings() const override { return sightings_; }

    // Freshly minted data enters the minter's knowledge (internal
    // generation, like nonce creation).
    TermPtr mint_atom(AtomTag tag) override {
        TermPtr t = Term::atom(w_.cfg_.fresh_namespace + ":" + rt_.cfg.id + ":" +
                                   std::to_string(++rt_.minted),
                               tag);
        rt_.knowledge = rt_.knowledge.learn_term(t);
        return t;
    }
    TermPtr mint_key(bool commutative) override {
        (void)commutative;  // labels carry no key semantics
        TermPtr t = Term::sym_key(w_.cfg_.fresh_namespace + ":" + rt_.cfg.id + ":" +
                                  std::to_string(++rt_.minted));
        rt_.knowledge = rt_.knowledge.learn_term(t);
        return t;
    }
    bool toggle(const std::string& name) override { return w_.toggle_value(rt_.cfg.id, name); }
    int fake_count() const override { return w_.cfg_.fake_count; }
    void relabel(const AgentId& who, Belief b) override {
        rt_.knowledge = rt_.knowledge.classify_agent(who, b);
    }

private:
    World& w_;
    World::AgentRt& rt_;
    Dataset view_;
    std::vector<InTransit> sightings_;
};

World::World(const ScenarioConfig& cfg, Chooser& chooser) : cfg_(cfg), chooser_(chooser) {
    for (const AgentConfig& a : cfg.agents) {
        if (agents_.count(a.id)) throw ScenarioError("duplicate agent id: " + a.id);
        AgentRt rt;
        rt.cfg = a;
        for (const auto& [who, belief] : a.knows)
            rt.knowledge = rt.knowledge.classify_agent(who, belief);
        Dataset init;
        init.insert(Term::agent(a.id));  // an agent always knows its own identifier
        for (const TermPtr& t : a.initial_terms) init.insert(normalize(t));
        rt.knowledge.terms = analyze_closure(init);
        rt.strategy = make_strategy(a, cfg);
        order_.push_back(a.id);
        agents_.emplace(a.id, std::move(rt));
    }
}

const World::AgentRt& World::agent(const AgentId& id) const {
    auto it = agents_.find(id);
    if (it == agents_.end()) throw EngineError("unknown agent: " + id);
    return it->second;
}

std::vector<AgentId> World::agent_order() const { return order_; }

size_t World::choose(const BranchPoint& bp) {
    size_t c = bp.options.size() <= 1 ? 0 : chooser_.choose(bp);
    if (c >= bp.options.size()) throw EngineError("chooser out of range for " + bp.kind);
    if (bp.options.size() > 1) choices_.push_back({bp, c});
    return c;
}

bool World::toggle_value(const AgentId& agent, const std::string& name) {
    std::string key = agent + ":" + name;
    auto it = toggle_cache_.find(key);
    if (it != toggle_cache_.end()) return it->second;
    bool value = false;
    switch (cfg_.toggle(name)) {
        case Tri::On: value = true; break;
        case Tri::Off: value = false; break;
        case Tri::Both: {
            BranchPoint bp{"toggle", key, {"off", "on"}};
            value = choose(bp) == 1;
            break;
        }
    }
    toggle_cache_[key] = value;
    return value;
}

Dataset World::view_of(const AgentId& id) const {
    const AgentRt& rt = agents_.at(id);
    Dataset view = rt.knowledge.terms;
    bool extended = false;
    for (const auto& [tid, outcome] : rt.pending) {
        for (const TermPtr& t : outcome.acquired) {
            view.insert(t);
            extended = true;
        }
    }
    return extended ? analyze_closure(view) : view;
}

void World::snapshot_all() {
    for (AgentId& id : order_) agents_.at(id).journal.record(agents_.at(id).knowledge);
}

void World::update_sightings() {
    for (AgentId& id : order_) {
        AgentRt& rt = agents_.at(id);
        if (!rt.strategy->is_attacker()) continue;
        WorldServices s(*this, rt, {}, {});
        if (!rt.strategy->listening(s)) continue;
        for (const InTransit& t : net_.in_transit) {
            if (true_sender(t.triplet) == id) continue;  // own message
            if (rt.pending.count(t.id)) continue;
            auto outcome = spy_eligible(rt.strategy->spy_mode(), t.triplet, rt.knowledge,
                                        rt.strategy->of_interest());
            if (outcome) rt.pending.emplace(t.id, std::move(*outcome));
        }
    }
}

std::vector<ActionRequest> World::collect_requests() {
    std::vector<ActionRequest> all;
    for (AgentId& id : order_) {
        AgentRt& rt = agents_.at(id);
        std::vector<InTransit> sightings;
        for (const InTransit& t : net_.in_transit)
            if (rt.pending.count(t.id)) sightings.push_back(t);
        WorldServices s(*this, rt, view_of(id), std::move(sightings));
        std::vector<ActionRequest> mine;
        rt.strategy->collect(s, mine);
        for (ActionRequest& r : mine) {
            r.by = id;
            all.push_back(std::move(r));
        }
    }
    return all;
}

void World::verify_preconditions(const ActionRequest& r) {
    const AgentRt& rt = agents_.at(r.by);
    switch (r.kind) {
        case ActionKind::Send:
        case ActionKind::Inject: {
            const Triplet& t = *r.post;
            if (true_sender(t) != r.by) throw EngineError("post by wrong actor");
            if (r.kind == ActionKind::Send && t.sender.masquerade())
                throw EngineError("send with masquerading tag");
            if (r.kind == ActionKind::Inject && !t.sender.masquerade())
                throw EngineError("inject with genuine tag");
            AgentKnowledge v = rt.knowledge;
            v.terms = view_of(r.by);
            if (!v.can_build(t.message))
                throw EngineError(r.by + " cannot synthesize " + print_term(t.message));
            if (r.kind == ActionKind::Inject) {
                if (!rt.knowledge.is_attentive(*t.sender.claimed) ||
                    !rt.knowledge.is_attentive(t.receiver))
                    throw EngineError(r.by + " injects with unknown ids");
            }
            break;
        }
        case ActionKind::Erase: {
            const InTransit* t = net_.find(*r.target);
            if (!t) throw EngineError("erase of unknown triplet");
            if (!rt.knowledge.is_attentive(true_sender(t->triplet)))
                throw EngineError(r.by + " erases triplet with unknown true sender");
            break;
        }
        case ActionKind::Receive:
            throw EngineError("receive is handler-initiated");
    }
}

void World::apply_post(const ActionRequest& r) {
    verify_preconditions(r);
    AgentRt& rt = agents_.at(r.by);
    uint32_t ordinal = ++rt.posts;
    TripletId id = net_.post(*r.post, ordinal);
    trace_.push_back({net_.index, r.kind, r.by, r.post->sender, r.post->message,
                      r.post->receiver, std::nullopt, id});
    WorldServices s(*this, rt, view_of(r.by), {});
    rt.strategy->on_posted(s, r);
    snapshot_all();
}

IdSet World::resolve_observers(const InTransit& t, const AgentId& served) {
    IdSet eligible;  // attackers currently simulating a spy on t
    for (AgentId& id : order_)
        if (agents_.at(id).pending.count(t.id)) eligible.insert(id);

    std::string key = true_sender(t.triplet) + "#" + std::to_string(t.sender_ordinal);
    auto pinned = cfg_.cansee.find(key);
    if (pinned != cfg_.cansee.end()) {
        IdSet observers;
        for (const AgentId& id : pinned->second)
            if (eligible.count(id)) observers.insert(id);
        observers.insert(served);
        return observers;
    }

    // Every subset of the simulating spies that contains the served eraser.
    std::vector<AgentId> others;
    for (const AgentId& id : eligible)
        if (id != served) others.push_back(id);
    std::vector<IdSet> candidates;
    size_t n = others.size();
    for (size_t mask = 0; mask < (size_t{1} << n); ++mask) {
        IdSet set{served};
        for (size_t i = 0; i < n; ++i)
            if (mask & (size_t{1} << i)) set.insert(others[i]);
        candidates.push_back(std::move(set));
    }
    std::sort(candidates.begin(), candidates.end(),
              [](const IdSet& a, const IdSet& b) {
                  if (a.size() != b.size()) return a.size() < b.size();
                  return a < b;
              });
    BranchPoint bp{"cansee", "erase of " + print_term(t.triplet.message) + " by " + served, {}};
    for (const IdSet& s : candidates) bp.options.push_back(idset_str(s));
    return candidates[choose(bp)];
}

void World::confirm_or_rollback(TripletId id, const Triplet& t, const IdSet& observers) {
    for (AgentId& aid : order_) {
        AgentRt& rt = agents_.at(aid);
        auto it = rt.pending.find(id);
        if (it == rt.pending.end()) continue;
        SpyOutcome outcome = it->second;
        rt.pending.erase(it);
        if (!observers.count(aid)) continue;  // rollback: nothing was committed
        for (const TermPtr& term : outcome.acquired) rt.knowledge = rt.knowledge.learn_term(term);
        for (const AgentId& learned : outcome.learned_ids)
            if (!rt.knowledge.is_attentive(learned))
                rt.knowledge = rt.knowledge.classify_agent(learned, Belief::Unknown);
        WorldServices s(*this, rt, view_of(aid), {});
        rt.strategy->on_spy_confirmed(s, t);
    }
}

void World::apply_erase(const ActionRequest& r) {
    verify_preconditions(r);
    const InTransit snapshot = *net_.find(*r.target);
    IdSet observers = resolve_observers(snapshot, r.by);
    Triplet t = net_.resolve(snapshot.id);
    trace_.push_back({net_.index, ActionKind::Erase, r.by, t.sender, t.message, t.receiver,
                      observers, snapshot.id});
    confirm_or_rollback(snapshot.id, t, observers);
    AgentRt& rt = agents_.at(r.by);
    WorldServices s(*this, rt, view_of(r.by), {});
    rt.strategy->on_erase_served(s, t);
    snapshot_all();
}

void World::apply_receive(const InTransit& entry_ref) {
    const InTransit entry = entry_ref;  // resolve() invalidates references into in_transit
    Triplet t = net_.resolve(entry.id);
    trace_.push_back({net_.index, ActionKind::Receive, t.receiver, t.sender, t.message,
                      t.receiver, std::nullopt, entry.id});
    AgentRt& rt = agents_.at(t.receiver);
    rt.knowledge = rt.knowledge.learn_term(t.message);
    WorldServices s(*this, rt, view_of(t.receiver), {});
    rt.strategy->on_delivery(s, t);
    // Delivery resolves the triplet: every simulated spy is confirmed.
    IdSet everyone;
    for (AgentId& id : order_) everyone.insert(id);
    confirm_or_rollback(entry.id, t, everyone);
    snapshot_all();
}

const InTransit* World::next_deliverable() {
    for (const InTransit& t : net_.in_transit) {
        auto it = agents_.find(t.triplet.receiver);
        if (it == agents_.end()) continue;  // receiver outside the scenario
        AgentRt& rt = it->second;
        WorldServices s(*this, rt, {}, {});
        if (rt.strategy->receptive(s, t)) return &t;
    }
    return nullptr;
}

bool World::step() {
    update_sightings();
    std::vector<ActionRequest> requests = collect_requests();

    auto attacker = [&](const ActionRequest& r) {
        return agents_.at(r.by).strategy->is_attacker();
    };
    std::vector<ActionRequest> erases, attacker_posts, honest_posts;
    for (ActionRequest& r : requests) {
        if (r.kind == ActionKind::Erase) {
            if (!attacker(r)) throw EngineError("erase requested by honest agent " + r.by);
            erases.push_back(std::move(r));
        } else if (attacker(r)) {
            attacker_posts.push_back(std::move(r));
        } else {
            honest_posts.push_back(std::move(r));
        }
    }

    // Message deletion, when requested by any attacker, always succeeds and
    // outranks everything else this round. A pinned canSee policy restricts
    // which requester's erase the handler serves: the pinned set must
    // contain the served eraser to be realizable.
    if (!erases.empty()) {
        std::vector<ActionRequest> servable;
        for (const ActionRequest& r : erases) {
            const InTransit* t = net_.find(*r.target);
            if (!t) continue;
            std::string key = true_sender(t->triplet) + "#" + std::to_string(t->sender_ordinal);
            auto pinned = cfg_.cansee.find(key);
            if (pinned != cfg_.cansee.end() && !pinned->second.count(r.by)) {
                bool pinned_requester_exists = false;
                for (const ActionRequest& o : erases)
                    if (o.target == r.target && pinned->second.count(o.by))
                        pinned_requester_exists = true;
                if (pinned_requester_exists) continue;
            }
            servable.push_back(r);
        }
        if (servable.empty()) servable = erases;
        BranchPoint bp{"initiative-order", "erase requests", {}};
        for (const ActionRequest& r : servable)
            bp.options.push_back(r.by + " erases #" + std::to_string(*r.target));
        apply_erase(servable[choose(bp)]);
        return true;
    }
    if (!attacker_posts.empty()) {
        BranchPoint bp{"initiative-order", "attacker actions", {}};
        for (const ActionRequest& r : attacker_posts)
            bp.options.push_back(r.by + " " + std::string(action_kind_name(r.kind)) + " " +
                                 r.intent);
        apply_post(attacker_posts[choose(bp)]);
        return true;
    }
    if (const InTransit* d = next_deliverable()) {
        apply_receive(*d);
        return true;
    }
    if (!honest_posts.empty()) {
        // Pick the agent, then the request within the agent's queue.
        std::vector<AgentId> who;
        for (const ActionRequest& r : honest_posts)
            if (std::find(who.begin(), who.end(), r.by) == who.end()) who.push_back(r.by);
        AgentId actor = who.front();
        if (who.size() > 1) {
            BranchPoint bp{"initiative-order", "honest actions", {}};
            for (const AgentId& id : who) bp.options.push_back(id);
            actor = who[choose(bp)];
        }
        std::vector<ActionRequest> mine;
        for (ActionRequest& r : honest_posts)
            if (r.by == actor) mine.push_back(std::move(r));
        size_t pick = 0;
        if (mine.size() > 1) {
            BranchPoint bp{"serve-order", "pending requests at " + actor, {}};
            for (const ActionRequest& r : mine) bp.options.push_back(r.intent);
            pick = choose(bp);
        }
        apply_post(mine[pick]);
        return true;
    }

    // Quiescence: every waiting agent's "reasonable time" expires at once.
    bool any = false;
    for (AgentId& id : order_) {
        AgentRt& rt = agents_.at(id);
        WorldServices s(*this, rt, view_of(id), {});
        any |= rt.strategy->on_timeout(s);
    }
    if (!any) return false;
    std::string sig = state_signature();
    if (!quiescence_sigs_.insert(sig).second) return false;  // fixpoint: replays are futile
    return true;
}

void World::run() {
    snapshot_all();  // index 0
    while (step()) {
        if (trace_.size() > cfg_.budget) {
            std::string branch;
            for (const ResolvedChoice& c : choices_)
                branch += (branch.empty() ? "" : ",") + std::to_string(c.chosen);
            throw BudgetExceeded("action budget " + std::to_string(cfg_.budget) +
                                 " exceeded in scenario " + cfg_.name + " on branch [" +
                                 branch + "]");
        }
    }
    // Run over: unresolved triplets confirm nobody; drop simulated spies.
    for (AgentId& id : order_) agents_.at(id).pending.clear();
    for (AgentId& id : order_) {
        AgentRt& rt = agents_.at(id);
        WorldServices s(*this, rt, view_of(id), {});
        rt.strategy->conclude(s);
    }
}

std::string World::state_signature() const {
    std::ostringstream sig;
    for (const InTransit& t : net_.in_transit)
        sig << t.triplet.sender.display() << ">" << t.triplet.receiver << ":"
            << print_term(t.triplet.message) << ";";
    for (const AgentId& id : order_) {
        const AgentRt& rt = agents_.at(id);
        sig << "|" << id << "=" << print_dataset(rt.knowledge.terms) << "/h" << idset_str(rt.knowledge.honest)
            << "d" << idset_str(rt.knowledge.dishonest) << "u" << idset_str(rt.knowledge.unknown)
            << "~" << rt.strategy->signature();
    }
    return sig.str();
}

}  // namespace madsim
