// Built-in case presets: the six knowledge/belief conditions of each case
// study, plus guardian substitutions. Case conditions:
//   1: E1 and E2 know each other as honest
//   2: E1 and E2 know each other as attackers
//   3: E1 and E2 are unaware of each other
//   4: E2 knows E1 as honest, E1 unaware of E2
//   5: E2 knows E1 as dishonest, E1 unaware of E2
//   6: E2 knows E1 but is unsure of E1's honesty

#include "madsim/scenario.hpp"

namespace madsim {

namespace {

void case_labels(int n, AgentConfig& e1, AgentConfig& e2) {
    switch (n) {
        case 1:
            e1.knows.emplace_back("E2", Belief::Honest);
            e2.knows.emplace_back("E1", Belief::Honest);
            break;
        case 2:
            e1.knows.emplace_back("E2", Belief::Dishonest);
            e2.knows.emplace_back("E1", Belief::Dishonest);
            break;
        case 3:
            break;
        case 4:
            e2.knows.emplace_back("E1", Belief::Honest);
            break;
        case 5:
            e2.knows.emplace_back("E1", Belief::Dishonest);
            break;
        case 6:
            e2.knows.emplace_back("E1", Belief::Unknown);
            break;
        default:
            throw ScenarioError("case number out of range: " + std::to_string(n));
    }
}

ScenarioConfig bme_case(int n) {
    ScenarioConfig cfg;
    cfg.protocol = "bme";
    cfg.name = "bme-case" + std::to_string(n);
    cfg.cansee["A#1"] = {"E1", "E2"};  // both attackers spy the opening message
    cfg.toggles["listen_after_step3"] = Tri::Both;

    AgentConfig a{"A", "bme.honest_a",
                  {{"peer", "B"}, {"server", "S"}, {"key", "key:kAS"}},
                  {parse_term("key:kAS")},
                  {{"B", Belief::Honest}, {"S", Belief::Honest}}};
    AgentConfig b{"B", "bme.honest_b",
                  {{"key", "key:kBS"}},
                  {parse_term("key:kBS")},
                  {{"A", Belief::Honest}, {"S", Belief::Honest}}};
    AgentConfig s{"S", "bme.server",
                  {{"key_for:A", "key:kAS"},
                   {"key_for:B", "key:kBS"},
                   {"key_for:E1", "key:kE1S"},
                   {"key_for:E2", "key:kE2S"}},
                  {parse_term("key:kAS"), parse_term("key:kBS"), parse_term("key:kE1S"),
                   parse_term("key:kE2S")},
                  {{"A", Belief::Honest},
                   {"B", Belief::Honest},
                   {"E1", Belief::Honest},
                   {"E2", Belief::Honest}}};
    AgentConfig e1{"E1", "bme.attacker",
                   {{"server", "S"}, {"key", "key:kE1S"}},
                   {parse_term("key:kE1S")},
                   {{"A", Belief::Honest}, {"B", Belief::Honest}, {"S", Belief::Honest}}};
    AgentConfig e2{"E2", "bme.attacker",
                   {{"server", "S"}, {"key", "key:kE2S"}},
                   {parse_term("key:kE2S")},
                   {{"A", Belief::Honest}, {"B", Belief::Honest}, {"S", Belief::Honest}}};
    case_labels(n, e1, e2);
    cfg.agents = {a, b, s, e1, e2};
    return cfg;
}

ScenarioConfig sra3p_case(int n) {
    ScenarioConfig cfg;
    cfg.protocol = "sra3p";
    cfg.name = "sra3p-case" + std::to_string(n);
    cfg.cansee["A#1"] = {"E1", "E2"};  // both attackers spy the opening message
    cfg.toggles["stop_after_first"] = Tri::Both;
    cfg.toggles["strong_preempt"] = Tri::Both;

    AgentConfig a{"A", "sra3p.honest_a",
                  {{"peer", "B"}, {"key", "key:KA"}, {"secret", "atom:M"}},
                  {parse_term("key:KA"), parse_term("atom:M")},
                  {{"B", Belief::Honest}}};
    AgentConfig b{"B", "sra3p.honest_b",
                  {{"key", "key:KB"}},
                  {parse_term("key:KB")},
                  {{"A", Belief::Honest}}};
    AgentConfig e1{"E1", "sra3p.attacker",
                   {{"kind", "auto"}},
                   {},
                   {{"A", Belief::Honest}, {"B", Belief::Honest}}};
    AgentConfig e2{"E2", "sra3p.attacker",
                   {{"kind", "auto"}},
                   {},
                   {{"A", Belief::Honest}, {"B", Belief::Honest}}};
    case_labels(n, e1, e2);
    cfg.agents = {a, b, e1, e2};
    return cfg;
}

void substitute_guardian(ScenarioConfig& cfg, const AgentId& position) {
    bool found = false;
    for (AgentConfig& a : cfg.agents) {
        if (a.id != position) continue;
        if (a.strategy == "bme.attacker") a.strategy = "guardian.bme";
        else if (a.strategy == "sra3p.attacker") a.strategy = "guardian.sra3p";
        else throw ScenarioError("guardian substitution on non-attacker " + position);
        found = true;
    }
    if (!found) throw ScenarioError("guardian substitution: no agent " + position);
    cfg.name += "+guardian-" + position;
    for (char& c : cfg.name)
        c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
}

}  // namespace

std::vector<std::string> preset_names() {
    std::vector<std::string> out;
    for (int i = 1; i <= 6; ++i) out.push_back("bme-case" + std::to_string(i));
    for (int i = 1; i <= 6; ++i) out.push_back("sra3p-case" + std::to_string(i));
    return out;
}

ScenarioConfig preset(const std::string& name) {
    std::string base = name;
    std::string guardian;
    if (auto plus = name.find('+'); plus != std::string::npos) {
        base = name.substr(0, plus);
        guardian = name.substr(plus + 1);
    }
    ScenarioConfig cfg;
    if (base.rfind("bme-case", 0) == 0 && base.size() == 9)
        cfg = bme_case(base[8] - '0');
    else if (base.rfind("sra3p-case", 0) == 0 && base.size() == 11)
        cfg = sra3p_case(base[10] - '0');
    else
        throw ScenarioError("unknown preset '" + name + "'");
    if (!guardian.empty()) {
        if (guardian == "guardian-e1") substitute_guardian(cfg, "E1");
        else if (guardian == "guardian-e2") substitute_guardian(cfg, "E2");
        else throw ScenarioError("unknown preset suffix '+" + guardian + "'");
    }
    return cfg;
}

}  // namespace madsim
