// SRA3P roles under commutative encryption: the initiator A, the honest
// responder B, and the oracle-exploiting attacker in its classical, strong
// and competitive variants (also used as the SRA3P guardian).
//
//   (1) A -> B : {M}KA        (2) B -> A : {{M}KA}KB      (3) A -> B : {M}KB
//
// The classical attack echoes {M}KA back at step (2), making A strip his
// own layer and reveal M.

#pragma once

#include <optional>

#include "madsim/strategy.hpp"

namespace madsim {

class Sra3pHonestA final : public Strategy {
public:
    Sra3pHonestA(AgentId peer, TermPtr own_key, TermPtr secret);

    std::string name() const override { return "sra3p.honest_a"; }
    void collect(Services& s, std::vector<ActionRequest>& out) override;
    void on_posted(Services&, const ActionRequest& r) override;
    void on_delivery(Services&, const Triplet& t) override;
    bool receptive(Services&, const InTransit&) override;
    void conclude(Services&) override;
    std::string signature() const override;

    AgentId peer;
    TermPtr own_key;
    TermPtr secret;
    bool pass1_sent = false;
    bool pass3_sent = false;
    bool aborted = false;
    std::vector<TermPtr> responses;   // strippable step-2 responses, arrival order
    bool duplicate_step2 = false;     // honest flag
    bool stalled = false;             // run ended before step 3
};

class Sra3pHonestB final : public Strategy {
public:
    explicit Sra3pHonestB(TermPtr own_key);

    std::string name() const override { return "sra3p.honest_b"; }
    void collect(Services& s, std::vector<ActionRequest>& out) override;
    void on_posted(Services&, const ActionRequest& r) override;
    void on_delivery(Services&, const Triplet& t) override;
    std::string signature() const override;

    TermPtr own_key;
    std::optional<TermPtr> pass1;     // received {M}KA
    bool pass2_sent = false;
    std::optional<TermPtr> secret;    // recovered M

private:
    AgentId reply_to_;
};

// Attacker modes. "auto" derives the opening mode from the initial labels:
// a competitor believed dishonest or under test (unknown) means awareness,
// so the attacker opens with the strong attack; otherwise classical.
//
// The decisional process that attributes a spied attack trace is an oracle
// by default; a fallible classifier ("none") learns only that a competitor
// exists and falls back to the competitive attack.
class Sra3pAttacker final : public Strategy {
public:
    Sra3pAttacker(std::string kind, std::string classifier, bool benign);

    std::string name() const override { return benign_ ? "guardian.sra3p" : "sra3p.attacker"; }
    bool is_attacker() const override { return true; }
    bool benign() const override { return benign_; }
    void collect(Services& s, std::vector<ActionRequest>& out) override;
    void on_posted(Services& s, const ActionRequest& r) override;
    void on_delivery(Services& s, const Triplet& t) override;
    void on_spy_confirmed(Services& s, const Triplet& t) override;
    void on_erase_served(Services& s, const Triplet& t) override;
    bool on_timeout(Services& s) override;
    bool listening(Services&) override { return !stopped; }
    bool receptive(Services&, const InTransit&) override { return !stopped; }
    std::string signature() const override;

    enum class Mode { Classical, Strong, Competitive };

    Mode opening_mode() const { return opening_mode_; }
    bool switched() const { return switched_; }  // classical -> strong mid-run

    std::optional<TermPtr> attack_trace;  // {M}KA, once confirmed
    AgentId initiator, peer;              // learned from the opening triplet
    bool echoed = false;
    bool echo_withdrawn = false;          // competitor echoed first
    bool initiative = false;              // echo despite strong-mode waiting
    bool stopped = false;
    std::vector<TermPtr> candidates;      // confirmed messages readable as M
    Dataset my_fakes;
    IdSet fakes_sent_to;
    int fakes_remaining = 0;
    bool duplicate_erased = false;
    // in-protocol trace detection (oracle identification of the sender)
    std::optional<AgentId> detected_suspect;
    std::optional<Belief> detected_prior;

private:
    std::string kind_;
    std::string classifier_;
    bool benign_;
    bool detected_anonymous_ = false;
    Mode opening_mode_ = Mode::Classical;
    bool mode_resolved_ = false;
    bool switched_ = false;
    bool anyone_echoed_ = false;
    std::map<AgentId, int> fake_rounds_;
    std::map<AgentId, TermPtr> prepared_fakes_;

    TermPtr prepared_fake(Services& s, const AgentId& target);

    void resolve_opening_mode(Services& s);
    bool aware(Services& s) const;  // knows a competitor is active
    bool opener_like(const Triplet& t) const;
    bool echo_like(const Triplet& t) const;
    bool reply_like(const Triplet& t) const;
    void add_candidate(Services& s, const TermPtr& m);
    void detect_competitor(Services& s, const AgentId& who);
    IdSet known_competitors(Services& s) const;
};

}  // namespace madsim
