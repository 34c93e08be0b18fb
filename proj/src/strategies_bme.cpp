#include "madsim/strategies_bme.hpp"

#include <algorithm>
#include <sstream>

#include "madsim/strategies_sra3p.hpp"

namespace madsim {

namespace {

bool is_agent_pair(const TermPtr& t) {
    return t->kind() == TermKind::Pair && t->left()->kind() == TermKind::AgentName &&
           t->right()->kind() == TermKind::AgentName;
}

}  // namespace

// -- honest initiator ---------------------------------------------------------

BmeHonestA::BmeHonestA(AgentId peer_, AgentId server_, TermPtr server_key_)
    : peer(std::move(peer_)), server(std::move(server_)), server_key(std::move(server_key_)) {}

void BmeHonestA::collect(Services& s, std::vector<ActionRequest>& out) {
    if (aborted) return;
    if (!request_sent) {
        ActionRequest r;
        r.kind = ActionKind::Send;
        r.post = Triplet{SenderTag::genuine(s.self()),
                         Term::pair(Term::agent(s.self()), Term::agent(peer)), server};
        r.intent = "step1";
        out.push_back(std::move(r));
        return;
    }
    if (!responses.empty() && !step3_sent) {
        ActionRequest r;
        r.kind = ActionKind::Send;
        r.post = Triplet{SenderTag::genuine(s.self()), responses.front().forward_blob, peer};
        r.intent = "step3";
        out.push_back(std::move(r));
    }
}

void BmeHonestA::on_posted(Services&, const ActionRequest& r) {
    if (r.intent == "step1") request_sent = true;
    if (r.intent == "step3") step3_sent = true;
}

void BmeHonestA::on_delivery(Services&, const Triplet& t) {
    if (t.sender.apparent() != server) return;
    // Expected shape: pair({k}kAS, blob).
    TermPtr m = t.message;
    if (m->kind() != TermKind::Pair || m->left()->kind() != TermKind::Enc ||
        !term_eq(m->left()->key(), server_key)) {
        malformed_response = true;
        aborted = true;
        return;
    }
    responses.push_back({m->left()->body(), m->right()});
    if (responses.size() >= 2) {
        // Two answers to a single request: attack detected. Quarantine every
        // key received and stop using any of them.
        duplicate_server_response = true;
        for (const Response& r : responses) keys_quarantined.insert(normalize(r.session_key));
        if (!step3_sent) aborted = true;
    }
}

bool BmeHonestA::on_timeout(Services&) {
    if (request_sent && responses.empty() && !aborted) no_answer_timeout = true;
    return false;
}

bool BmeHonestA::receptive(Services& s, const InTransit&) {
    if (aborted) return false;
    if (step3_sent) return s.toggle("listen_after_step3");
    return true;
}

std::string BmeHonestA::signature() const {
    std::ostringstream o;
    o << request_sent << step3_sent << aborted << responses.size() << duplicate_server_response
      << no_answer_timeout;
    return o.str();
}

// -- key server ---------------------------------------------------------------

BmeServer::BmeServer(std::map<AgentId, TermPtr> shared_keys_)
    : shared_keys(std::move(shared_keys_)) {}

void BmeServer::collect(Services& s, std::vector<ActionRequest>& out) {
    for (size_t i = 0; i < queue.size(); ++i) {
        if (queue[i].served) continue;
        ActionRequest r;
        r.kind = ActionKind::Send;
        r.post = Triplet{SenderTag::genuine(s.self()), queue[i].response, queue[i].to};
        r.intent = "respond#" + std::to_string(i);
        out.push_back(std::move(r));
    }
}

void BmeServer::on_posted(Services&, const ActionRequest& r) {
    size_t i = std::stoul(r.intent.substr(r.intent.find('#') + 1));
    queue[i].served = true;
    serve_log.push_back(i);
}

void BmeServer::on_delivery(Services& s, const Triplet& t) {
    if (!is_agent_pair(t.message)) return;  // not a key request
    AgentId x = t.message->left()->label();
    AgentId y = t.message->right()->label();
    // Requests naming unregistered agents are ignored.
    if (!shared_keys.count(x) || !shared_keys.count(y)) return;
    TermPtr k = s.mint_key(false);
    TermPtr response = Term::pair(Term::enc(k, shared_keys[x]), Term::enc(k, shared_keys[y]));
    queue.push_back({x, y, k, normalize(response), false});
}

std::string BmeServer::signature() const {
    std::ostringstream o;
    o << queue.size() << ":" << serve_log.size();
    return o.str();
}

// -- passive responder --------------------------------------------------------

BmeHonestB::BmeHonestB(TermPtr server_key_) : server_key(std::move(server_key_)) {}

void BmeHonestB::on_delivery(Services&, const Triplet& t) {
    const TermPtr& m = t.message;
    if (m->kind() == TermKind::Enc && term_eq(m->key(), server_key)) session_key = m->body();
}

std::string BmeHonestB::signature() const { return session_key ? "k" : "-"; }

// -- competitive attacker -----------------------------------------------------

BmeAttacker::BmeAttacker(AgentId server_, TermPtr own_server_key_, bool benign)
    : server(std::move(server_)), own_server_key(std::move(own_server_key_)), benign_(benign) {}

bool BmeAttacker::opener_like(const Triplet& t) const {
    // The initiator's own request: a genuine agent-name pair addressed to S.
    return !t.sender.masquerade() && t.receiver == server && is_agent_pair(t.message);
}

bool BmeAttacker::response_like(const Triplet& t) const {
    return !t.sender.masquerade() && true_sender(t) == server &&
           t.message->kind() == TermKind::Pair && t.message->left()->kind() == TermKind::Enc;
}

bool BmeAttacker::blob_like(const Triplet& t) const {
    return opening && !t.sender.masquerade() && true_sender(t) == opening->initiator &&
           t.receiver == opening->peer && t.message->kind() == TermKind::Enc;
}

void BmeAttacker::collect(Services& s, std::vector<ActionRequest>& out) {
    for (const InTransit& t : s.sightings()) {
        const Triplet& trip = t.triplet;
        if (!opening && opener_like(trip)) {
            // Intercept the opening request (classical attack step 1).
            ActionRequest r;
            r.kind = ActionKind::Erase;
            r.target = t.id;
            r.intent = "intercept-opening";
            out.push_back(std::move(r));
            continue;
        }
        if (opening && trip.receiver == server && is_agent_pair(trip.message)) {
            // Another key request (A, X): erase only when X is believed
            // dishonest; otherwise let it through.
            AgentId suspect = trip.message->right()->label();
            if (suspect != s.self() && s.knowledge().dishonest.count(suspect)) {
                ActionRequest r;
                r.kind = ActionKind::Erase;
                r.target = t.id;
                r.intent = "erase-competitor";
                out.push_back(std::move(r));
            }
            continue;
        }
        if (blob_like(trip)) {
            // The initiator's step-(3) reply: take the peer's place.
            ActionRequest r;
            r.kind = ActionKind::Erase;
            r.target = t.id;
            r.intent = "grab-step3";
            out.push_back(std::move(r));
            continue;
        }
    }
    if (opening && !attack_posted) {
        ActionRequest r;
        r.kind = ActionKind::Inject;
        r.post = make_injection(s.self(), opening->initiator,
                                Term::pair(Term::agent(opening->initiator), Term::agent(s.self())),
                                server, s.knowledge());
        r.intent = "attack-request";
        out.push_back(std::move(r));
    }
}

void BmeAttacker::on_posted(Services&, const ActionRequest& r) {
    if (r.intent == "attack-request") attack_posted = true;
}

void BmeAttacker::on_spy_confirmed(Services& s, const Triplet& t) {
    if (opener_like(t) && !opening) {
        opening = Opening{true_sender(t), t.message->right()->label()};
        return;
    }
    if (t.receiver == server && is_agent_pair(t.message)) {
        AgentId suspect = t.message->right()->label();
        if (suspect != s.self()) requests_observed.insert(suspect);
        return;
    }
    if (response_like(t)) {
        ++responses_seen;
        return;
    }
    if (blob_like(t)) {
        blob = t.message;
        believes_success = true;
    }
}

bool BmeAttacker::on_timeout(Services&) {
    // Replay the request to S when the server seems never to have answered.
    if (opening && attack_posted && responses_seen == 0 && !believes_success) {
        attack_posted = false;
        ++replays;
        return true;
    }
    return false;
}

void BmeAttacker::conclude(Services& s) {
    // Suspect condemned: failing with a pending unknown suspect confirms it.
    if (believes_success) return;
    for (const AgentId& x : requests_observed) {
        if (s.knowledge().unknown.count(x)) {
            s.relabel(x, Belief::Dishonest);
            condemned = x;
            break;
        }
    }
}

std::string BmeAttacker::signature() const {
    std::ostringstream o;
    o << (opening ? opening->initiator : "-") << attack_posted << responses_seen
      << believes_success << requests_observed.size() << (blob ? "b" : "-");
    return o.str();
}

// -- factory ------------------------------------------------------------------

namespace {

TermPtr param_term(const AgentConfig& cfg, const std::string& key) {
    auto it = cfg.params.find(key);
    if (it == cfg.params.end())
        throw ScenarioError("agent " + cfg.id + ": missing param '" + key + "'");
    return parse_term(it->second);
}

std::string param_str(const AgentConfig& cfg, const std::string& key,
                      const std::string& fallback = {}) {
    auto it = cfg.params.find(key);
    if (it == cfg.params.end()) {
        if (!fallback.empty()) return fallback;
        throw ScenarioError("agent " + cfg.id + ": missing param '" + key + "'");
    }
    return it->second;
}

}  // namespace

std::unique_ptr<Strategy> make_strategy(const AgentConfig& cfg, const ScenarioConfig& scenario) {
    const std::string& kind = cfg.strategy;
    if (kind == "bme.honest_a")
        return std::make_unique<BmeHonestA>(param_str(cfg, "peer"), param_str(cfg, "server"),
                                            param_term(cfg, "key"));
    if (kind == "bme.honest_b") return std::make_unique<BmeHonestB>(param_term(cfg, "key"));
    if (kind == "bme.server") {
        std::map<AgentId, TermPtr> keys;
        for (const auto& [k, v] : cfg.params) {
            if (k.rfind("key_for:", 0) == 0) keys[k.substr(8)] = parse_term(v);
        }
        if (keys.empty()) throw ScenarioError("agent " + cfg.id + ": server has no key_for:X params");
        return std::make_unique<BmeServer>(std::move(keys));
    }
    if (kind == "bme.attacker" || kind == "guardian.bme")
        return std::make_unique<BmeAttacker>(param_str(cfg, "server"), param_term(cfg, "key"),
                                             kind == "guardian.bme");
    if (kind == "sra3p.honest_a")
        return std::make_unique<Sra3pHonestA>(param_str(cfg, "peer"), param_term(cfg, "key"),
                                              param_term(cfg, "secret"));
    if (kind == "sra3p.honest_b") return std::make_unique<Sra3pHonestB>(param_term(cfg, "key"));
    if (kind == "sra3p.attacker" || kind == "guardian.sra3p") {
        std::string mode = param_str(cfg, "kind", "auto");
        std::string classifier = param_str(cfg, "classifier", "oracle");
        (void)scenario;
        return std::make_unique<Sra3pAttacker>(mode, classifier, kind == "guardian.sra3p");
    }
    throw ScenarioError("unknown strategy '" + kind + "' for agent " + cfg.id);
}

}  // namespace madsim
