// BME roles: the initiator A, the key server S, the passive responder B,
// and the competitive attacker (also used as the BME guardian).
//
//   (1) A -> S : A, B
//   (2) S -> A : {kAB}kAS, {kAB}kBS
//   (3) A -> B : {kAB}kBS

#pragma once

#include <optional>

#include "madsim/strategy.hpp"

namespace madsim {

class BmeHonestA final : public Strategy {
public:
    BmeHonestA(AgentId peer, AgentId server, TermPtr server_key);

    std::string name() const override { return "bme.honest_a"; }
    void collect(Services& s, std::vector<ActionRequest>& out) override;
    void on_posted(Services& s, const ActionRequest& r) override;
    void on_delivery(Services& s, const Triplet& t) override;
    bool on_timeout(Services& s) override;
    bool receptive(Services& s, const InTransit& t) override;
    std::string signature() const override;

    struct Response {
        TermPtr session_key;
        TermPtr forward_blob;
    };

    // observable protocol state (read by the classifier)
    AgentId peer, server;
    TermPtr server_key;
    bool request_sent = false;
    bool step3_sent = false;
    bool aborted = false;
    std::vector<Response> responses;
    // honest flags
    bool duplicate_server_response = false;
    bool no_answer_timeout = false;
    bool malformed_response = false;
    Dataset keys_quarantined;
};

class BmeServer final : public Strategy {
public:
    explicit BmeServer(std::map<AgentId, TermPtr> shared_keys);

    std::string name() const override { return "bme.server"; }
    void collect(Services& s, std::vector<ActionRequest>& out) override;
    void on_posted(Services& s, const ActionRequest& r) override;
    void on_delivery(Services& s, const Triplet& t) override;
    std::string signature() const override;

    struct Pending {
        AgentId to;       // requester named in the message (response addressee)
        AgentId partner;  // second id of the request pair
        TermPtr session_key;
        TermPtr response;
        bool served = false;
    };

    std::map<AgentId, TermPtr> shared_keys;  // kXS per registered agent
    std::vector<Pending> queue;
    std::vector<size_t> serve_log;  // indices into queue, in serve order
};

class BmeHonestB final : public Strategy {
public:
    explicit BmeHonestB(TermPtr server_key);

    std::string name() const override { return "bme.honest_b"; }
    void collect(Services&, std::vector<ActionRequest>&) override {}
    void on_posted(Services&, const ActionRequest&) override {}
    void on_delivery(Services& s, const Triplet& t) override;
    std::string signature() const override;

    TermPtr server_key;
    std::optional<TermPtr> session_key;
};

// Competitive attacker of the case study. Spies the opening request,
// intercepts it, injects its own request impersonating the initiator, and
// watches for the step-(3) reply. Reacts to other requests per the
// behavior rules: erase when the suspect is believed dishonest, let pass
// otherwise; condemn an unknown suspect on failure.
class BmeAttacker final : public Strategy {
public:
    BmeAttacker(AgentId server, TermPtr own_server_key, bool benign);

    std::string name() const override { return benign_ ? "guardian.bme" : "bme.attacker"; }
    bool is_attacker() const override { return true; }
    bool benign() const override { return benign_; }
    void collect(Services& s, std::vector<ActionRequest>& out) override;
    void on_posted(Services& s, const ActionRequest& r) override;
    void on_spy_confirmed(Services& s, const Triplet& t) override;
    bool on_timeout(Services& s) override;
    void conclude(Services& s) override;
    std::string signature() const override;

    struct Opening {
        AgentId initiator;
        AgentId peer;
    };

    AgentId server;
    TermPtr own_server_key;
    std::optional<Opening> opening;
    bool attack_posted = false;
    int replays = 0;
    int responses_seen = 0;            // confirmed server responses
    IdSet requests_observed;           // partner ids of other key requests seen
    std::optional<TermPtr> blob;       // step-(3) message, if spied
    bool believes_success = false;
    std::optional<AgentId> condemned;  // suspect moved to dishonest on failure

private:
    bool benign_;
    bool opener_like(const Triplet& t) const;
    bool response_like(const Triplet& t) const;
    bool blob_like(const Triplet& t) const;
};

}  // namespace madsim
