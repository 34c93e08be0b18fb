// Per-run outcome classification: per-agent result / belief / key /
// detection rows, and the BME trace-family label. The detection catalog:
// alpha  two server answers spied, an extra request (A,X) was seen
// beta   two server answers spied, no extra request seen
// gamma  one server answer seen and the reply missed (unknown eraser)
// delta  reply missed, but an active attacker was already known
// epsilon a suspect under test is condemned on failure

#include <algorithm>

#include "madsim/explorer.hpp"
#include "madsim/strategies_bme.hpp"
#include "madsim/strategies_sra3p.hpp"

namespace madsim {

namespace {

struct Cast {
    const World& w;
    BmeHonestA* bme_a = nullptr;
    BmeServer* bme_s = nullptr;
    Sra3pHonestA* sra_a = nullptr;
    std::vector<std::pair<AgentId, BmeAttacker*>> bme_eves;
    std::vector<std::pair<AgentId, Sra3pAttacker*>> sra_eves;
    AgentId a_id;

    explicit Cast(const World& world) : w(world) {
        for (const AgentId& id : world.agent_order()) {
            Strategy* s = world.agent(id).strategy.get();
            if (auto* p = dynamic_cast<BmeHonestA*>(s)) { bme_a = p; a_id = id; }
            if (auto* p = dynamic_cast<BmeServer*>(s)) bme_s = p;
            if (auto* p = dynamic_cast<Sra3pHonestA*>(s)) { sra_a = p; a_id = id; }
            if (auto* p = dynamic_cast<BmeAttacker*>(s)) bme_eves.emplace_back(id, p);
            if (auto* p = dynamic_cast<Sra3pAttacker*>(s)) sra_eves.emplace_back(id, p);
        }
    }
};

IdSet initial_dishonest(const World& w, const AgentId& id) {
    IdSet out;
    for (const auto& [who, b] : w.agent(id).cfg.knows)
        if (b == Belief::Dishonest) out.insert(who);
    return out;
}

bool attentive_to_some_competitor(const World& w, const AgentId& self) {
    const AgentKnowledge& k = w.agent(self).knowledge;
    for (const AgentId& other : w.agent_order()) {
        if (other == self) continue;
        if (!w.agent(other).strategy->is_attacker()) continue;
        if (k.is_attentive(other)) return true;
    }
    return false;
}

std::string bme_detection(const World& w, const AgentId& id, const BmeAttacker& e,
                          bool reply_posted) {
    IdSet knew = initial_dishonest(w, id);
    bool observed_known_attacker = false;
    for (const AgentId& x : e.requests_observed)
        if (knew.count(x)) observed_known_attacker = true;

    if (e.believes_success) return observed_known_attacker ? "correct understanding" : "none";
    if (e.condemned) return "epsilon";
    // A replied and this attacker was kept from spying it: missed message.
    if (reply_posted) return observed_known_attacker ? "delta" : "gamma";
    if (e.responses_seen >= 2) return e.requests_observed.empty() ? "beta" : "alpha";
    if (observed_known_attacker) return "correct understanding";
    return "none";  // never attacked (no opening seen)
}

void classify_bme(const Cast& c, Classification& out) {
    const BmeHonestA& a = *c.bme_a;
    const BmeServer& srv = *c.bme_s;

    size_t responses_posted = srv.serve_log.size();
    bool a_used_key = a.step3_sent && !a.duplicate_server_response && !a.malformed_response;

    // Who (if anyone) holds, and believes in, the key A committed to.
    bool compromised = false;
    for (const auto& [id, e] : c.bme_eves) {
        if (e->benign()) continue;
        if (e->believes_success && e->blob && term_eq((*e->blob)->key(), e->own_server_key) &&
            a_used_key)
            compromised = true;
    }

    if (a.no_answer_timeout && !a.step3_sent) {
        out.outcomes.push_back(
            {c.a_id, Result::Safe, BeliefOutcome::Attack, KeyStatus::None, "no answer: DoS"});
    } else if (a.duplicate_server_response) {
        out.outcomes.push_back(
            {c.a_id, Result::Safe, BeliefOutcome::Attack, KeyStatus::NotUsed, "2 keys"});
    } else if (a.step3_sent) {
        if (compromised)
            out.outcomes.push_back(
                {c.a_id, Result::Attacked, BeliefOutcome::Safe, KeyStatus::Broken, "none"});
        else
            out.outcomes.push_back({c.a_id, Result::Safe, BeliefOutcome::Safe,
                                    responses_posted >= 2 ? KeyStatus::Used : KeyStatus::InUse,
                                    "none"});
    } else {
        out.outcomes.push_back(
            {c.a_id, Result::Safe, BeliefOutcome::Safe, KeyStatus::None, "none"});
    }

    size_t n_attackers = c.bme_eves.size();
    for (const auto& [id, e] : c.bme_eves) {
        OutcomeRow row;
        row.agent = id;
        bool right = e->blob && term_eq((*e->blob)->key(), e->own_server_key);
        row.key_status = e->blob ? (right ? KeyStatus::Right : KeyStatus::Wrong) : KeyStatus::None;
        row.belief = e->believes_success ? BeliefOutcome::Success : BeliefOutcome::Failure;
        row.result = (right && e->believes_success && a_used_key) ? Result::Success
                                                                  : Result::Failure;
        row.detection = n_attackers > 2 ? "unclassified-n>2"
                                        : bme_detection(c.w, id, *e, a.step3_sent);
        out.outcomes.push_back(std::move(row));
    }

    // Trace family.
    if (c.bme_eves.empty()) {
        out.family = "honest";
    } else if (responses_posted == 0) {
        out.family = "T4";
    } else if (responses_posted == 1) {
        out.family = a.step3_sent ? "T5" : "T0";
    } else {
        if (!a.step3_sent) out.family = "T1";
        else out.family = a.responses.size() >= 2 ? "T3" : "T2";
    }
}

std::string sra3p_detection(const World& w, const AgentId& id, const Sra3pAttacker& e,
                            bool guardian_vocab) {
    bool knew = false;
    for (const AgentId& x : initial_dishonest(w, id))
        if (w.agent(x).strategy->is_attacker()) knew = true;
    if (knew) return "none (c)";
    if (e.detected_suspect) {
        if (guardian_vocab) return "(in) label";
        return e.detected_prior == Belief::Unknown ? "(in) label" : "(in) trace";
    }
    bool competitor_known = attentive_to_some_competitor(w, id);
    if (e.candidates.size() >= 2) {
        if (guardian_vocab) return competitor_known ? "(post) label" : "post (exists)";
        return competitor_known ? "(post) uncertainty" : "(post exists) uncertainty";
    }
    if (e.candidates.empty() && e.echoed) {
        // Echoed, then silence: a competitor it never saw interfered.
        return guardian_vocab ? "post (exists)" : "(post exists) failure";
    }
    return "none";
}

void classify_sra3p(const Cast& c, Classification& out) {
    const Sra3pHonestA& a = *c.sra_a;
    TermPtr secret = normalize(a.secret);

    auto has_secret = [&](const Sra3pAttacker& e) {
        return std::any_of(e.candidates.begin(), e.candidates.end(),
                           [&](const TermPtr& t) { return term_eq(t, secret); });
    };

    std::map<AgentId, Result> results;
    for (const auto& [id, e] : c.sra_eves) {
        if (e->candidates.empty()) results[id] = Result::Failure;
        else if (!has_secret(*e)) results[id] = Result::FullFailure;
        else if (e->candidates.size() == 1) results[id] = Result::Success;
        else results[id] = Result::Uncertainty;
    }
    // Success upgrades to dominance when every competitor fully failed.
    for (const auto& [id, e] : c.sra_eves) {
        if (results[id] != Result::Success) continue;
        bool all_duped = true;
        for (const auto& [oid, oe] : c.sra_eves)
            if (oid != id && results[oid] != Result::FullFailure) all_duped = false;
        if (all_duped && c.sra_eves.size() > 1) results[id] = Result::Dominance;
    }

    bool leaked = false;
    for (const auto& [id, e] : c.sra_eves)
        if (!e->benign() && has_secret(*e)) leaked = true;

    if (a.aborted)
        out.outcomes.push_back(
            {c.a_id, Result::Safe, BeliefOutcome::Attack, KeyStatus::None, "duplicates"});
    else if (a.pass3_sent)
        out.outcomes.push_back({c.a_id, leaked ? Result::Attacked : Result::Safe,
                                BeliefOutcome::Safe, KeyStatus::None, "none"});
    else
        out.outcomes.push_back(
            {c.a_id, Result::Safe, BeliefOutcome::Attack, KeyStatus::None, "no answer"});

    size_t n_attackers = c.sra_eves.size();
    for (const auto& [id, e] : c.sra_eves) {
        OutcomeRow row;
        row.agent = id;
        row.result = results[id];
        row.belief = e->candidates.empty() ? BeliefOutcome::Failure : BeliefOutcome::Success;
        row.key_status = KeyStatus::None;
        row.detection = n_attackers > 2 ? "unclassified-n>2"
                                        : sra3p_detection(c.w, id, *e, e->benign());
        out.outcomes.push_back(std::move(row));
    }
    out.family = "sra3p";
}

}  // namespace

Classification classify_world(const World& w) {
    Classification out;
    Cast c(w);
    if (c.bme_a && c.bme_s) classify_bme(c, out);
    else if (c.sra_a) classify_sra3p(c, out);
    else {
        std::string trace;
        for (const TraceEvent& e : w.trace()) trace += "\n  " + e.line();
        throw EngineError("classify: unrecognized scenario (no initiator role); trace:" + trace);
    }
    std::sort(out.outcomes.begin(), out.outcomes.end());
    return out;
}

void annotate_record(RunRecord& rec, const World& w) {
    Cast c(w);
    // A's listen toggle and SRA3P stop toggles, from the resolved choices.
    for (const ResolvedChoice& rc : rec.choices) {
        if (rc.bp.kind != "toggle") continue;
        auto colon = rc.bp.context.find(':');
        AgentId agent = rc.bp.context.substr(0, colon);
        std::string name = rc.bp.context.substr(colon + 1);
        if (name == "listen_after_step3") rec.listened[agent] = rc.chosen == 1;
        if (name == "stop_after_first") rec.stopped[agent] = rc.chosen == 1;
    }
    for (const auto& [id, e] : c.sra_eves)
        if (e->stopped) rec.stopped[id] = true;

    for (const auto& [id, e] : c.sra_eves) {
        std::string attack = e->opening_mode() == Sra3pAttacker::Mode::Strong ? "strong"
                             : e->opening_mode() == Sra3pAttacker::Mode::Competitive
                                 ? "competitive"
                                 : (e->switched() ? "cl->str" : "classical");
        TermPtr secret = c.sra_a ? normalize(c.sra_a->secret) : nullptr;
        bool has_m = false;
        for (const TermPtr& t : e->candidates)
            if (secret && term_eq(t, secret)) has_m = true;
        std::string messages = e->candidates.empty() ? "none"
                               : !has_m ? "M_fake"
                               : e->candidates.size() == 1 ? "M!"
                                                           : "M+";
        rec.agent_info[id] = {{"attack", attack}, {"messages", messages}};
    }

    if (c.bme_s && !c.bme_s->serve_log.empty())
        rec.served_first = c.bme_s->queue[c.bme_s->serve_log.front()].partner;

    // The reply erase: A's second post, removed by an attacker.
    TermPtr opener;
    if (c.bme_a) opener = normalize(Term::pair(Term::agent(c.a_id), Term::agent(c.bme_a->peer)));
    if (c.sra_a) opener = normalize(Term::enc(c.sra_a->secret, c.sra_a->own_key, true));
    for (const TraceEvent& e : rec.trace) {
        if (e.kind == ActionKind::Erase && e.sender.actual == c.a_id &&
            !e.sender.masquerade() && !term_eq(e.message, opener))
            rec.cansee_step3 = e.observers;
        if (c.sra_a && e.kind == ActionKind::Inject && term_eq(e.message, opener) &&
            e.receiver == c.a_id && !rec.first_echoer)
            rec.first_echoer = e.actor;
    }
}

}  // namespace madsim
