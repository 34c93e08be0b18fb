// madsim: symbolic simulator for security protocols under multiple
// non-collaborating attackers.
//
//   madsim explore --preset bme-case1 [--format text|csv|json]
//   madsim run --preset sra3p-case2 --choices 0,1,0
//   madsim table guardian.bme --format csv
//   madsim verify

#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "madsim/explorer.hpp"
#include "madsim/tables.hpp"

using namespace madsim;

namespace {

struct CommonOpts {
    std::string scenario_path;
    std::string preset_name;
    std::string format = "text";
    std::vector<std::string> cansee;
    uint32_t budget = 0;
    std::string fresh_namespace;
    int jobs = 1;
};

void add_common(CLI::App* cmd, CommonOpts& o, bool wants_scenario) {
    if (wants_scenario) {
        cmd->add_option("--scenario", o.scenario_path, "scenario file path");
        cmd->add_option("--preset", o.preset_name,
                        "built-in preset (bme-case1..6, sra3p-case1..6, optionally "
                        "+guardian-e1/+guardian-e2)");
        cmd->add_option("--cansee", o.cansee,
                        "pin an erase's observer set, e.g. A#2={E1,E2} or A#2=enumerate");
        cmd->add_option("--budget", o.budget, "per-run action budget");
        cmd->add_option("--seed-namespace", o.fresh_namespace, "fresh-value namespace prefix");
    }
    cmd->add_option("--format", o.format, "text | csv | json")
        ->check(CLI::IsMember({"text", "csv", "json"}));
    cmd->add_option("--jobs", o.jobs, "parallel branch evaluation")->check(CLI::PositiveNumber);
}

ScenarioConfig load_scenario(const CommonOpts& o) {
    if (o.scenario_path.empty() == o.preset_name.empty())
        throw ScenarioError("exactly one of --scenario or --preset is required");
    ScenarioConfig cfg = o.scenario_path.empty() ? preset(o.preset_name)
                                                 : parse_scenario_file(o.scenario_path);
    for (const std::string& spec : o.cansee) {
        auto eq = spec.find('=');
        if (eq == std::string::npos)
            throw ScenarioError("--cansee expects key=value, got '" + spec + "'");
        std::string key = spec.substr(0, eq);
        std::string value = spec.substr(eq + 1);
        std::string line = "cansee " + key + " " + value + "\n";
        // Reuse the scenario parser for the value grammar.
        ScenarioConfig probe = cfg;
        probe.cansee.clear();
        ScenarioConfig parsed = parse_scenario_text(print_scenario(cfg) + line, "--cansee");
        cfg.cansee = parsed.cansee;
    }
    if (o.budget) cfg.budget = o.budget;
    if (!o.fresh_namespace.empty()) cfg.fresh_namespace = o.fresh_namespace;
    return cfg;
}

nlohmann::json record_json(const RunRecord& r) {
    nlohmann::json j;
    j["family"] = r.family;
    j["choices"] = nlohmann::json::array();
    for (const ResolvedChoice& c : r.choices)
        j["choices"].push_back({{"kind", c.bp.kind},
                                {"context", c.bp.context},
                                {"options", c.bp.options},
                                {"chosen", c.chosen}});
    j["trace"] = nlohmann::json::array();
    for (const TraceEvent& e : r.trace) {
        nlohmann::json ev{{"index", e.index},
                          {"actor", e.actor},
                          {"kind", action_kind_name(e.kind)},
                          {"sender", e.sender.display()},
                          {"message", print_term(e.message)},
                          {"receiver", e.receiver}};
        if (e.observers) ev["observers"] = std::vector<std::string>(e.observers->begin(),
                                                                     e.observers->end());
        j["trace"].push_back(std::move(ev));
    }
    j["outcomes"] = nlohmann::json::array();
    for (const OutcomeRow& o : r.outcomes)
        j["outcomes"].push_back({{"agent", o.agent},
                                 {"result", result_name(o.result)},
                                 {"belief", belief_outcome_name(o.belief)},
                                 {"key", key_status_name(o.key_status)},
                                 {"detection", o.detection}});
    return j;
}

void print_record_text(const RunRecord& r, size_t idx) {
    std::cout << "run " << idx << "  family=" << r.family;
    if (r.cansee_step3) {
        std::cout << "  cansee(reply)={";
        bool first = true;
        for (const AgentId& id : *r.cansee_step3) {
            if (!first) std::cout << ",";
            std::cout << id;
            first = false;
        }
        std::cout << "}";
    }
    std::cout << "\n";
    for (const TraceEvent& e : r.trace) std::cout << "  " << e.line() << "\n";
    for (const OutcomeRow& o : r.outcomes) std::cout << "  => " << o.str() << "\n";
}

int cmd_explore(const CommonOpts& o) {
    ExploreStats stats;
    std::vector<RunRecord> runs = explore(load_scenario(o), o.jobs, &stats);
    if (o.format == "json") {
        nlohmann::json j = nlohmann::json::array();
        for (const RunRecord& r : runs) j.push_back(record_json(r));
        std::cout << j.dump(2) << "\n";
    } else if (o.format == "csv") {
        std::cout << "run,agent,result,belief,key,detection\n";
        for (size_t i = 0; i < runs.size(); ++i)
            for (const OutcomeRow& row : runs[i].outcomes)
                std::cout << i << "," << row.agent << "," << result_name(row.result) << ","
                          << belief_outcome_name(row.belief) << ","
                          << key_status_name(row.key_status) << "," << row.detection << "\n";
    } else {
        for (size_t i = 0; i < runs.size(); ++i) print_record_text(runs[i], i);
        std::cout << stats.runs_explored << " runs explored, " << stats.runs_distinct
                  << " distinct\n";
    }
    return 0;
}

int cmd_run(const CommonOpts& o, const std::string& choices_arg) {
    std::vector<size_t> tape;
    std::stringstream in(choices_arg);
    std::string tok;
    while (std::getline(in, tok, ','))
        if (!tok.empty()) tape.push_back(std::stoul(tok));
    RunRecord r = run_single(load_scenario(o), tape);
    if (o.format == "json") std::cout << record_json(r).dump(2) << "\n";
    else print_record_text(r, 0);
    return 0;
}

int cmd_table(const CommonOpts& o, const std::string& id) {
    Table t = emit_table(id, o.jobs);
    if (o.format == "csv") std::cout << t.csv();
    else if (o.format == "json") std::cout << t.json();
    else std::cout << t.text();
    return 0;
}

int cmd_verify(const CommonOpts& o) {
    VerifyReport report = verify_tables(o.jobs);
    for (const auto& e : report.entries) {
        std::cout << (e.match ? "match    " : "MISMATCH ") << e.table_id;
        if (!e.diff.empty()) std::cout << "  " << e.diff;
        std::cout << "\n";
    }
    std::cout << (report.all_match() ? "all tables match the golden fixtures\n"
                                     : "verification failed\n");
    return report.all_match() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"symbolic multi-attacker security protocol simulator"};
    app.require_subcommand(1);

    CommonOpts opts;
    std::string choices_arg, table_id;

    CLI::App* explore_cmd = app.add_subcommand("explore", "enumerate every run of a scenario");
    add_common(explore_cmd, opts, true);

    CLI::App* run_cmd = app.add_subcommand("run", "replay a single run from explicit choices");
    add_common(run_cmd, opts, true);
    run_cmd->add_option("--choices", choices_arg, "comma-separated branch choices");

    CLI::App* table_cmd = app.add_subcommand("table", "emit a report table");
    add_common(table_cmd, opts, false);
    std::string id_help = "one of:";
    for (const std::string& id : table_ids()) id_help += " " + id;
    table_cmd->add_option("id", table_id, id_help)->required();

    CLI::App* verify_cmd =
        app.add_subcommand("verify", "check all tables against the golden fixtures");
    add_common(verify_cmd, opts, false);

    try {
        app.parse(argc, argv);
        if (explore_cmd->parsed()) return cmd_explore(opts);
        if (run_cmd->parsed()) return cmd_run(opts, choices_arg);
        if (table_cmd->parsed()) return cmd_table(opts, table_id);
        if (verify_cmd->parsed()) return cmd_verify(opts);
        return 2;
    } catch (const CLI::ParseError& e) {
        return app.exit(e) ? 2 : 0;
    } catch (const ScenarioError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const TableError& e) {
        std::cerr << "table error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "engine error: " << e.what() << "\n";
        return 3;
    }
}
