#include "madsim/scenario.hpp"

#include "madsim/strategy.hpp"

#include <fstream>
#include <sstream>

namespace madsim {

const AgentConfig* ScenarioConfig::find_agent(const AgentId& id) const {
    for (const AgentConfig& a : agents)
        if (a.id == id) return &a;
    return nullptr;
}

namespace {

std::vector<std::string> split_ws(const std::string& line) {
    std::vector<std::string> out;
    std::istringstream in(line);
    std::string tok;
    while (in >> tok) out.push_back(tok);
    return out;
}

IdSet parse_idset(const std::string& text) {
    if (text.size() < 2 || text.front() != '{' || text.back() != '}')
        throw ScenarioError("expected {id,id,...}, got '" + text + "'");
    IdSet out;
    std::string inner = text.substr(1, text.size() - 2);
    std::istringstream in(inner);
    std::string id;
    while (std::getline(in, id, ','))
        if (!id.empty()) out.insert(id);
    return out;
}

std::string idset_text(const IdSet& s) {
    std::string out = "{";
    bool first = true;
    for (const AgentId& id : s) {
        if (!first) out += ",";
        out += id;
        first = false;
    }
    return out + "}";
}

Tri parse_tri(const std::string& v, const std::string& where) {
    if (v == "on" || v == "true") return Tri::On;
    if (v == "off" || v == "false") return Tri::Off;
    if (v == "both") return Tri::Both;
    throw ScenarioError(where + ": expected on|off|both, got '" + v + "'");
}

const char* tri_text(Tri t) {
    switch (t) {
        case Tri::On: return "on";
        case Tri::Off: return "off";
        case Tri::Both: return "both";
    }
    return "?";
}

Belief parse_belief(const std::string& v, const std::string& where) {
    if (v == "honest") return Belief::Honest;
    if (v == "dishonest") return Belief::Dishonest;
    if (v == "unknown") return Belief::Unknown;
    throw ScenarioError(where + ": expected honest|dishonest|unknown, got '" + v + "'");
}

}  // namespace

ScenarioConfig parse_scenario_text(const std::string& text, const std::string& origin) {
    ScenarioConfig cfg;
    AgentConfig* open_agent = nullptr;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    auto where = [&] { return origin + ":" + std::to_string(lineno); };

    while (std::getline(in, line)) {
        ++lineno;
        // '#' opens a comment at line start or after whitespace ("A#1" is a
        // canSee policy key, not a comment).
        for (size_t i = 0; i < line.size(); ++i) {
            if (line[i] != '#') continue;
            if (i == 0 || line[i - 1] == ' ' || line[i - 1] == '\t') {
                line.resize(i);
                break;
            }
        }
        std::vector<std::string> tok = split_ws(line);
        if (tok.empty()) continue;
        const std::string& key = tok[0];
        auto need = [&](size_t n) {
            if (tok.size() != n)
                throw ScenarioError(where() + ": '" + key + "' takes " + std::to_string(n - 1) +
                                    " argument(s)");
        };
        try {
            if (key == "protocol") { need(2); cfg.protocol = tok[1]; }
            else if (key == "name") { need(2); cfg.name = tok[1]; }
            else if (key == "budget") { need(2); cfg.budget = std::stoul(tok[1]); }
            else if (key == "fresh-namespace") { need(2); cfg.fresh_namespace = tok[1]; }
            else if (key == "fake-count") { need(2); cfg.fake_count = std::stoi(tok[1]); }
            else if (key == "cansee") {
                need(3);
                if (tok[2] == "enumerate") cfg.cansee.erase(tok[1]);
                else cfg.cansee[tok[1]] = parse_idset(tok[2]);
            } else if (key == "toggle") { need(3); cfg.toggles[tok[1]] = parse_tri(tok[2], where()); }
            else if (key == "agent") {
                need(2);
                if (cfg.find_agent(tok[1]))
                    throw ScenarioError(where() + ": duplicate agent id '" + tok[1] + "'");
                cfg.agents.push_back(AgentConfig{tok[1], {}, {}, {}, {}});
                open_agent = &cfg.agents.back();
            } else if (key == "strategy" || key == "param" || key == "term" || key == "knows") {
                if (!open_agent)
                    throw ScenarioError(where() + ": '" + key + "' outside an agent block");
                if (key == "strategy") { need(2); open_agent->strategy = tok[1]; }
                else if (key == "param") { need(3); open_agent->params[tok[1]] = tok[2]; }
                else if (key == "term") { need(2); open_agent->initial_terms.push_back(parse_term(tok[1])); }
                else { need(3); open_agent->knows.emplace_back(tok[1], parse_belief(tok[2], where())); }
            } else {
                throw ScenarioError(where() + ": unknown keyword '" + key + "'");
            }
        } catch (const TermParseError& e) {
            throw ScenarioError(where() + ": " + e.what());
        } catch (const std::invalid_argument&) {
            throw ScenarioError(where() + ": malformed number in '" + line + "'");
        }
    }
    if (cfg.protocol.empty()) throw ScenarioError(origin + ": missing 'protocol'");
    if (cfg.agents.empty()) throw ScenarioError(origin + ": no agents declared");
    for (const AgentConfig& a : cfg.agents) {
        if (a.strategy.empty())
            throw ScenarioError(origin + ": agent " + a.id + " has no strategy");
        for (const auto& [who, b] : a.knows) (void)b;
    }
    // canSee pins must be admissible observer sets over declared agents.
    for (const auto& [k, set] : cfg.cansee) {
        if (set.empty()) throw ScenarioError(origin + ": cansee " + k + " pins an empty set");
        for (const AgentId& id : set)
            if (!cfg.find_agent(id))
                throw ScenarioError(origin + ": cansee " + k + " names unknown agent " + id);
    }
    // Every strategy reference must resolve with its parameter block.
    for (const AgentConfig& a : cfg.agents) {
        try {
            (void)make_strategy(a, cfg);
        } catch (const ScenarioError& e) {
            throw ScenarioError(origin + ": " + e.what());
        }
    }
    return cfg;
}

ScenarioConfig parse_scenario_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ScenarioError("cannot open scenario file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenario_text(buf.str(), path);
}

std::string print_scenario(const ScenarioConfig& cfg) {
    std::ostringstream o;
    o << "protocol " << cfg.protocol << "\n";
    if (!cfg.name.empty()) o << "name " << cfg.name << "\n";
    o << "budget " << cfg.budget << "\n";
    o << "fresh-namespace " << cfg.fresh_namespace << "\n";
    o << "fake-count " << cfg.fake_count << "\n";
    for (const auto& [k, v] : cfg.cansee) o << "cansee " << k << " " << idset_text(v) << "\n";
    for (const auto& [k, v] : cfg.toggles) o << "toggle " << k << " " << tri_text(v) << "\n";
    for (const AgentConfig& a : cfg.agents) {
        o << "agent " << a.id << "\n";
        o << "  strategy " << a.strategy << "\n";
        for (const auto& [k, v] : a.params) o << "  param " << k << " " << v << "\n";
        for (const TermPtr& t : a.initial_terms) o << "  term " << print_term(t) << "\n";
        for (const auto& [who, b] : a.knows)
            o << "  knows " << who << " " << belief_name(b) << "\n";
    }
    return o.str();
}

bool scenario_eq(const ScenarioConfig& a, const ScenarioConfig& b) {
    if (a.protocol != b.protocol || a.name != b.name || a.budget != b.budget ||
        a.fresh_namespace != b.fresh_namespace || a.fake_count != b.fake_count)
        return false;
    if (a.cansee != b.cansee || a.toggles != b.toggles) return false;
    if (a.agents.size() != b.agents.size()) return false;
    for (size_t i = 0; i < a.agents.size(); ++i) {
        const AgentConfig& x = a.agents[i];
        const AgentConfig& y = b.agents[i];
        if (x.id != y.id || x.strategy != y.strategy || x.params != y.params ||
            x.knows != y.knows)
            return false;
        if (x.initial_terms.size() != y.initial_terms.size()) return false;
        for (size_t j = 0; j < x.initial_terms.size(); ++j)
            if (!term_eq(normalize(x.initial_terms[j]), normalize(y.initial_terms[j])))
                return false;
    }
    return true;
}

}  // namespace madsim
