// The network dataset D_net: in-transit triplets, per-action indexing,
// sender tags (genuine vs masquerading), action requests and trace events.
// Selection/confirmation logic lives in the run engine (world.hpp); the
// types and state transitions here are pure.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "madsim/knowledge.hpp"
#include "madsim/term.hpp"

namespace madsim {

struct SenderTag {
    AgentId actual;
    std::optional<AgentId> claimed;  // set iff masquerading; claimed != actual

    static SenderTag genuine(AgentId who) { return {std::move(who), std::nullopt}; }
    static SenderTag masquerading(AgentId who, AgentId as) {
        return {std::move(who), std::move(as)};
    }

    bool masquerade() const { return claimed.has_value(); }
    /// What the receiver (and honest agents generally) see as the sender.
    const AgentId& apparent() const { return claimed ? *claimed : actual; }
    std::string display() const { return claimed ? actual + "(" + *claimed + ")" : actual; }
};

/// True-sender-ID: the actual sender, regardless of claimed identity.
inline const AgentId& true_sender(const SenderTag& s) { return s.actual; }

struct Triplet {
    SenderTag sender;
    TermPtr message;  // stored normalized
    AgentId receiver;
};

inline const AgentId& true_sender(const Triplet& t) { return true_sender(t.sender); }

using TripletId = uint32_t;

struct InTransit {
    TripletId id;
    Triplet triplet;
    uint32_t posted_index;   // D_net index right after posting
    uint32_t sender_ordinal; // n-th post by this actual sender (canSee policy key)
};

enum class ActionKind { Send, Inject, Erase, Receive };

const char* action_kind_name(ActionKind k);

struct ActionRequest {
    ActionKind kind;
    AgentId by;
    // Send/Inject carry a full triplet; Erase/Receive reference one in transit.
    std::optional<Triplet> post;
    std::optional<TripletId> target;
    // Strategy-private tag echoed back on completion so the strategy can
    // advance its phase without guessing.
    std::string intent;
};

struct CanSeeResolution {
    TripletId target;
    IdSet observers;  // contains at least the served eraser
};

struct TraceEvent {
    uint32_t index;
    ActionKind kind;
    AgentId actor;
    SenderTag sender;
    TermPtr message;
    AgentId receiver;
    std::optional<IdSet> observers;  // erase only
    TripletId triplet = 0;           // engine-internal; not serialized

    /// `i | actor | kind | sender-tag | message | receiver | observers`
    std::string line() const;
};

struct NetworkState {
    uint32_t index = 0;
    std::vector<InTransit> in_transit;
    TripletId next_id = 1;

    const InTransit* find(TripletId id) const;
    /// Post (Send/Inject): index+1, triplet in transit. The caller has
    /// already checked the Table-2 premises (message synthesizable,
    /// receiver known).
    TripletId post(const Triplet& t, uint32_t sender_ordinal);
    /// Remove a triplet (delivery or erasure); index+1.
    Triplet resolve(TripletId id);
};

}  // namespace madsim
