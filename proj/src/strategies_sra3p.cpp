#include "madsim/strategies_sra3p.hpp"

#include <sstream>

namespace madsim {

namespace {

// Heads of the commutative stack; empty when the term is not a cenc.
std::vector<TermPtr> comm_layers(const TermPtr& t) {
    std::vector<TermPtr> keys;
    TermPtr core = t;
    while (core->kind() == TermKind::Enc && core->commutative()) {
        keys.push_back(core->key());
        core = core->body();
    }
    return keys;
}

// Remove one layer keyed by `key` from a commutative stack, or nullptr.
TermPtr strip_layer(const TermPtr& t, const TermPtr& key) {
    std::vector<TermPtr> keys;
    TermPtr core = t;
    while (core->kind() == TermKind::Enc && core->commutative()) {
        keys.push_back(core->key());
        core = core->body();
    }
    for (size_t i = 0; i < keys.size(); ++i) {
        if (!term_eq(keys[i], key)) continue;
        TermPtr out = core;
        for (size_t j = 0; j < keys.size(); ++j)
            if (j != i) out = Term::enc(out, keys[j], true);
        return normalize(out);
    }
    return nullptr;
}

}  // namespace

// -- honest initiator ---------------------------------------------------------

Sra3pHonestA::Sra3pHonestA(AgentId peer_, TermPtr own_key_, TermPtr secret_)
    : peer(std::move(peer_)), own_key(std::move(own_key_)), secret(std::move(secret_)) {}

void Sra3pHonestA::collect(Services& s, std::vector<ActionRequest>& out) {
    if (aborted) return;
    if (!pass1_sent) {
        ActionRequest r;
        r.kind = ActionKind::Send;
        r.post = Triplet{SenderTag::genuine(s.self()),
                         normalize(Term::enc(secret, own_key, true)), peer};
        r.intent = "pass1";
        out.push_back(std::move(r));
        return;
    }
    if (!responses.empty() && !pass3_sent) {
        // Follow the protocol blindly: strip the own layer, even when the
        // response is the untouched step-1 message (the oracle exploit).
        TermPtr reply = strip_layer(responses.front(), own_key);
        if (!reply) return;
        ActionRequest r;
        r.kind = ActionKind::Send;
        r.post = Triplet{SenderTag::genuine(s.self()), reply, peer};
        r.intent = "pass3";
        out.push_back(std::move(r));
    }
}

void Sra3pHonestA::on_posted(Services&, const ActionRequest& r) {
    if (r.intent == "pass1") pass1_sent = true;
    if (r.intent == "pass3") pass3_sent = true;
}

void Sra3pHonestA::on_delivery(Services&, const Triplet& t) {
    // Only responses A can strip count as step-2 answers.
    if (!strip_layer(t.message, own_key)) return;
    responses.push_back(t.message);
    if (responses.size() >= 2) {
        // Duplicate answer while one exchange is open: someone is posing as
        // the peer. Halt to protect the secret.
        duplicate_step2 = true;
        if (!pass3_sent) aborted = true;
    }
}

bool Sra3pHonestA::receptive(Services&, const InTransit&) { return !aborted && !pass3_sent; }

void Sra3pHonestA::conclude(Services&) {
    if (!pass3_sent && !aborted) stalled = true;
}

std::string Sra3pHonestA::signature() const {
    std::ostringstream o;
    o << pass1_sent << pass3_sent << aborted << responses.size() << duplicate_step2;
    return o.str();
}

// -- honest responder ---------------------------------------------------------

Sra3pHonestB::Sra3pHonestB(TermPtr own_key_) : own_key(std::move(own_key_)) {}

void Sra3pHonestB::collect(Services& s, std::vector<ActionRequest>& out) {
    if (pass1 && !pass2_sent) {
        ActionRequest r;
        r.kind = ActionKind::Send;
        r.post = Triplet{SenderTag::genuine(s.self()),
                         normalize(Term::enc(*pass1, own_key, true)), reply_to_};
        r.intent = "pass2";
        out.push_back(std::move(r));
    }
}

void Sra3pHonestB::on_posted(Services&, const ActionRequest& r) {
    if (r.intent == "pass2") pass2_sent = true;
}

void Sra3pHonestB::on_delivery(Services&, const Triplet& t) {
    if (!pass1) {
        pass1 = t.message;
        reply_to_ = t.sender.apparent();
        return;
    }
    if (TermPtr m = strip_layer(t.message, own_key)) secret = m;
}

std::string Sra3pHonestB::signature() const {
    std::ostringstream o;
    o << bool(pass1) << pass2_sent << bool(secret);
    return o.str();
}

// -- attacker -----------------------------------------------------------------

Sra3pAttacker::Sra3pAttacker(std::string kind, std::string classifier, bool benign)
    : kind_(std::move(kind)), classifier_(std::move(classifier)), benign_(benign) {
    if (classifier_ != "oracle" && classifier_ != "none")
        throw ScenarioError("sra3p attacker: classifier must be oracle or none, got '" +
                            classifier_ + "'");
}

bool Sra3pAttacker::aware(Services& s) const {
    IdSet suspects = s.knowledge().dishonest;
    for (const AgentId& id : s.knowledge().unknown) suspects.insert(id);
    suspects.erase(initiator);
    suspects.erase(peer);
    return !suspects.empty();
}

void Sra3pAttacker::resolve_opening_mode(Services& s) {
    if (mode_resolved_) return;
    mode_resolved_ = true;
    if (kind_ == "classical") opening_mode_ = Mode::Classical;
    else if (kind_ == "strong") opening_mode_ = Mode::Strong;
    else if (kind_ == "competitive") opening_mode_ = Mode::Competitive;
    else opening_mode_ = aware(s) ? Mode::Strong : Mode::Classical;
    if (opening_mode_ == Mode::Strong) initiative = s.toggle("strong_preempt");
}

bool Sra3pAttacker::opener_like(const Triplet& t) const {
    return !attack_trace && !t.sender.masquerade() && t.message->kind() == TermKind::Enc &&
           t.message->commutative();
}

bool Sra3pAttacker::echo_like(const Triplet& t) const {
    return attack_trace && term_eq(t.message, *attack_trace) && t.receiver == initiator;
}

// What the attacker reads is the claimed sender (the true sender only
// filters attention); an injected fake claiming to be the initiator is
// indistinguishable from the genuine reply.
bool Sra3pAttacker::reply_like(const Triplet& t) const {
    return attack_trace && t.sender.apparent() == initiator && t.receiver == peer &&
           !term_eq(t.message, *attack_trace);
}

IdSet Sra3pAttacker::known_competitors(Services& s) const {
    IdSet out = s.knowledge().dishonest;
    out.erase(initiator);
    out.erase(peer);
    return out;
}

void Sra3pAttacker::collect(Services& s, std::vector<ActionRequest>& out) {
    if (stopped) return;
    bool saw_foreign_echo = false;
    for (const InTransit& t : s.sightings()) {
        const Triplet& trip = t.triplet;
        if (opener_like(trip)) {
            ActionRequest r;
            r.kind = ActionKind::Erase;
            r.target = t.id;
            r.intent = "intercept-opening";
            out.push_back(std::move(r));
            continue;
        }
        if (echo_like(trip) && true_sender(trip) != s.self()) {
            saw_foreign_echo = true;
            if (echoed) {
                // Duplicate answers would let the initiator detect the
                // attack; remove the competitor's echo.
                ActionRequest r;
                r.kind = ActionKind::Erase;
                r.target = t.id;
                r.intent = "erase-duplicate-echo";
                out.push_back(std::move(r));
            }
            continue;
        }
        if (reply_like(trip)) {
            ActionRequest r;
            r.kind = ActionKind::Erase;
            r.target = t.id;
            r.intent = "grab-reply";
            out.push_back(std::move(r));
            continue;
        }
    }
    if (saw_foreign_echo && !echoed) echo_withdrawn = true;

    if (attack_trace && !echoed && !echo_withdrawn) {
        bool classical_turn = opening_mode_ == Mode::Classical && !switched_;
        if (classical_turn || initiative) {
            ActionRequest r;
            r.kind = ActionKind::Inject;
            r.post = make_injection(s.self(), peer, *attack_trace, initiator, s.knowledge());
            r.intent = "echo";
            out.push_back(std::move(r));
        }
    }

    // Fake messages pollute competitors once the oracle is engaged. The
    // competitive variant cannot observe the engagement (the competitor is
    // unknown, so its echo cannot be spied) and fires on the opener alone.
    if (attack_trace && (echoed || anyone_echoed_ || opening_mode_ == Mode::Competitive)) {
        if (opening_mode_ == Mode::Competitive && !fakes_sent_to.count(peer)) {
            ActionRequest r;
            r.kind = ActionKind::Inject;
            r.post = make_injection(s.self(), initiator, prepared_fake(s, peer), peer,
                                    s.knowledge());
            r.intent = "fake-broadcast";
            out.push_back(std::move(r));
        } else {
            for (const AgentId& c : known_competitors(s)) {
                if (fakes_sent_to.count(c)) continue;
                ActionRequest r;
                r.kind = ActionKind::Inject;
                r.post = make_injection(s.self(), initiator, prepared_fake(s, c), c,
                                        s.knowledge());
                r.intent = "fake:" + c;
                out.push_back(std::move(r));
                break;  // one post per round
            }
        }
    }
}

TermPtr Sra3pAttacker::prepared_fake(Services& s, const AgentId& target) {
    auto it = prepared_fakes_.find(target);
    if (it != prepared_fakes_.end()) return it->second;
    TermPtr fake = s.mint_atom(AtomTag::Fake);
    my_fakes.insert(normalize(fake));
    prepared_fakes_[target] = fake;
    return fake;
}

void Sra3pAttacker::on_posted(Services& s, const ActionRequest& r) {
    if (r.intent == "echo") echoed = true;
    AgentId target;
    if (r.intent == "fake-broadcast") target = peer;
    else if (r.intent.rfind("fake:", 0) == 0) target = r.intent.substr(5);
    else return;
    prepared_fakes_.erase(target);  // the next fake (if any) is fresh
    if (++fake_rounds_[target] >= s.fake_count()) fakes_sent_to.insert(target);
}

void Sra3pAttacker::detect_competitor(Services& s, const AgentId& who) {
    if (s.knowledge().dishonest.count(who)) return;  // already correctly labeled
    if (classifier_ == "none") {
        // The decisional process fails to name the culprit; all that is
        // learned is that an active competitor exists, which forces the
        // competitive variant.
        detected_anonymous_ = true;
        if (opening_mode_ == Mode::Classical && !switched_) opening_mode_ = Mode::Competitive;
        return;
    }
    detected_suspect = who;
    detected_prior = s.knowledge().unknown.count(who) ? Belief::Unknown : Belief::Honest;
    s.relabel(who, Belief::Dishonest);
    if (opening_mode_ == Mode::Classical) switched_ = true;
}

void Sra3pAttacker::add_candidate(Services& s, const TermPtr& m) {
    // A message reads as the secret only once this attacker expects the
    // initiator's reply, i.e. after its own attack is in play.
    bool engaged = echoed || switched_ || opening_mode_ != Mode::Classical;
    if (!engaged) return;
    TermPtr n = normalize(m);
    if (attack_trace && term_eq(n, *attack_trace)) return;
    if (my_fakes.count(n)) return;
    for (const TermPtr& c : candidates)
        if (term_eq(c, n)) return;
    candidates.push_back(n);
    if (candidates.size() == 1 && opening_mode_ == Mode::Classical && !switched_)
        stopped = s.toggle("stop_after_first");
}

void Sra3pAttacker::on_delivery(Services& s, const Triplet& t) {
    if (!attack_trace) return;
    add_candidate(s, t.message);
}

void Sra3pAttacker::on_spy_confirmed(Services& s, const Triplet& t) {
    if (!attack_trace && !t.sender.masquerade() && t.message->kind() == TermKind::Enc &&
        t.message->commutative()) {
        attack_trace = t.message;
        initiator = true_sender(t);
        peer = t.receiver;
        resolve_opening_mode(s);
        return;
    }
    if (echo_like(t) && true_sender(t) != s.self()) {
        anyone_echoed_ = true;
        detect_competitor(s, true_sender(t));
        return;
    }
    if (reply_like(t)) add_candidate(s, t.message);
}

void Sra3pAttacker::on_erase_served(Services& s, const Triplet& t) {
    if (echo_like(t) && true_sender(t) != s.self() && echoed) duplicate_erased = true;
}

bool Sra3pAttacker::on_timeout(Services&) {
    // Deadlocked strong attackers: somebody has to move first.
    if (attack_trace && opening_mode_ == Mode::Strong && !echoed && !echo_withdrawn &&
        !anyone_echoed_ && !initiative) {
        initiative = true;
        return true;
    }
    return false;
}

std::string Sra3pAttacker::signature() const {
    std::ostringstream o;
    o << bool(attack_trace) << echoed << echo_withdrawn << initiative << stopped << switched_
      << anyone_echoed_ << detected_anonymous_ << candidates.size() << fakes_sent_to.size()
      << bool(detected_suspect);
    for (const TermPtr& c : candidates) o << print_term(c) << ";";
    return o.str();
}

}  // namespace madsim
