#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <fstream>
#include <optional>

#include "madsim/scenario.hpp"

using namespace madsim;

TEST_CASE("scenario text round-trips through print and parse") {
    const char* text = R"(
protocol bme
name demo
budget 32
fake-count 2
cansee A#1 {E1}
toggle listen_after_step3 on
agent A
  strategy bme.honest_a
  param key key:kAS
  param peer B
  param server S
  term key:kAS
  knows B honest
  knows S honest
agent E1
  strategy bme.attacker
  param key key:kE1S
  param server S
  term key:kE1S
  knows A honest
  knows S honest
)";
    ScenarioConfig cfg = parse_scenario_text(text, "inline");
    CHECK(cfg.protocol == "bme");
    CHECK(cfg.budget == 32);
    CHECK(cfg.fake_count == 2);
    CHECK(cfg.cansee.at("A#1") == IdSet{"E1"});
    CHECK(cfg.toggle("listen_after_step3") == Tri::On);

    ScenarioConfig again = parse_scenario_text(print_scenario(cfg), "roundtrip");
    CHECK(scenario_eq(cfg, again));
}

TEST_CASE("presets round-trip as well") {
    for (const std::string& name : preset_names()) {
        CAPTURE(name);
        ScenarioConfig cfg = preset(name);
        ScenarioConfig again = parse_scenario_text(print_scenario(cfg), name);
        CHECK(scenario_eq(cfg, again));
    }
}

TEST_CASE("diagnostics name the offending construct") {
    CHECK_THROWS_WITH_AS(parse_scenario_text("protocol bme\nagent A\nagent A\n", "x"),
                         doctest::Contains("duplicate agent id 'A'"), ScenarioError);
    CHECK_THROWS_WITH_AS(parse_scenario_text("protocol bme\nterm atom:x\n", "x"),
                         doctest::Contains("outside an agent block"), ScenarioError);
    CHECK_THROWS_WITH_AS(parse_scenario_text("protocol bme\nagent A\n  term blob:x\n", "x"),
                         doctest::Contains("unknown prefix"), ScenarioError);
    CHECK_THROWS_WITH_AS(
        parse_scenario_text("protocol bme\ncansee A#1 {}\nagent A\n  strategy bme.server\n", "x"),
        doctest::Contains("empty set"), ScenarioError);
    CHECK_THROWS_WITH_AS(
        parse_scenario_text(
            "protocol bme\ncansee A#1 {E9}\nagent A\n  strategy bme.honest_b\n", "x"),
        doctest::Contains("unknown agent E9"), ScenarioError);
    CHECK_THROWS_WITH_AS(parse_scenario_text("agent A\n  strategy s\n", "x"),
                         doctest::Contains("missing 'protocol'"), ScenarioError);
}

namespace {

IdSet cell(const ScenarioConfig& cfg, const AgentId& who, Belief b) {
    const AgentConfig* a = cfg.find_agent(who);
    REQUIRE(a != nullptr);
    IdSet out;
    for (const auto& [id, belief] : a->knows)
        if (belief == b) out.insert(id);
    return out;
}

}  // namespace

TEST_CASE("case presets expand to the paper's knowledge conditions") {
    struct Expect {
        int case_no;
        // E1's label for E2 and E2's label for E1; nullopt = not attentive
        std::optional<Belief> e1_about_e2, e2_about_e1;
    };
    const Expect table[] = {
        {1, Belief::Honest, Belief::Honest},
        {2, Belief::Dishonest, Belief::Dishonest},
        {3, std::nullopt, std::nullopt},
        {4, std::nullopt, Belief::Honest},
        {5, std::nullopt, Belief::Dishonest},
        {6, std::nullopt, Belief::Unknown},
    };
    for (const char* proto : {"bme", "sra3p"}) {
        for (const Expect& e : table) {
            std::string name = std::string(proto) + "-case" + std::to_string(e.case_no);
            CAPTURE(name);
            ScenarioConfig cfg = preset(name);
            auto label_of = [&](const AgentId& who, const AgentId& about) -> std::optional<Belief> {
                for (Belief b : {Belief::Honest, Belief::Dishonest, Belief::Unknown})
                    if (cell(cfg, who, b).count(about)) return b;
                return std::nullopt;
            };
            CHECK(label_of("E1", "E2") == e.e1_about_e2);
            CHECK(label_of("E2", "E1") == e.e2_about_e1);
            // Both attackers watch the honest agents in every case.
            CHECK(cell(cfg, "E1", Belief::Honest).count("A"));
            CHECK(cell(cfg, "E2", Belief::Honest).count("A"));
            // The opening message is spied by both (case-study assumption).
            CHECK(cfg.cansee.at("A#1") == IdSet{"E1", "E2"});
        }
    }
}

TEST_CASE("guardian substitution swaps the strategy, nothing else") {
    ScenarioConfig plain = preset("bme-case5");
    ScenarioConfig g = preset("bme-case5+guardian-e2");
    CHECK(g.find_agent("E2")->strategy == "guardian.bme");
    CHECK(g.find_agent("E1")->strategy == "bme.attacker");
    CHECK(g.find_agent("E2")->knows == plain.find_agent("E2")->knows);
    CHECK_THROWS_AS(preset("bme-case7"), ScenarioError);
    CHECK_THROWS_AS(preset("bme-case5+guardian-e9"), ScenarioError);
}

TEST_CASE("scenario files parse from disk with the path in diagnostics") {
    std::string path = std::string(MADSIM_SOURCE_DIR) + "/build/demo_scenario.txt";
    {
        std::ofstream out(path);
        out << print_scenario(preset("sra3p-case2"));
    }
    ScenarioConfig cfg = parse_scenario_file(path);
    CHECK(scenario_eq(cfg, preset("sra3p-case2")));
    CHECK_THROWS_WITH_AS(parse_scenario_file("/nonexistent/nowhere.txt"),
                         doctest::Contains("cannot open"), ScenarioError);
}
