#include "madsim/network.hpp"

#include <algorithm>
#include <stdexcept>

namespace madsim {

const char* action_kind_name(ActionKind k) {
    switch (k) {
        case ActionKind::Send: return "send";
        case ActionKind::Inject: return "inject";
        case ActionKind::Erase: return "erase";
        case ActionKind::Receive: return "receive";
    }
    return "?";
}

std::string TraceEvent::line() const {
    std::string obs = "-";
    if (observers) {
        obs = "{";
        bool first = true;
        for (const AgentId& id : *observers) {
            if (!first) obs += ",";
            obs += id;
            first = false;
        }
        obs += "}";
    }
    return std::to_string(index) + " | " + actor + " | " + action_kind_name(kind) + " | " +
           sender.display() + " | " + print_term(message) + " | " + receiver + " | " + obs;
}

const InTransit* NetworkState::find(TripletId id) const {
    for (const InTransit& t : in_transit)
        if (t.id == id) return &t;
    return nullptr;
}

TripletId NetworkState::post(const Triplet& t, uint32_t sender_ordinal) {
    InTransit entry{next_id++, t, index + 1, sender_ordinal};
    entry.triplet.message = normalize(entry.triplet.message);
    ++index;
    in_transit.push_back(std::move(entry));
    return in_transit.back().id;
}

Triplet NetworkState::resolve(TripletId id) {
    auto it = std::find_if(in_transit.begin(), in_transit.end(),
                           [&](const InTransit& t) { return t.id == id; });
    if (it == in_transit.end()) throw std::logic_error("resolve: triplet not in transit");
    Triplet out = it->triplet;
    in_transit.erase(it);
    ++index;
    return out;
}

}  // namespace madsim
