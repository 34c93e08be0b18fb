#include "madsim/tables.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include "json.hpp"

namespace madsim {

namespace {

std::string join(const std::vector<std::string>& cells, const std::string& sep) {
    std::string out;
    for (size_t i = 0; i < cells.size(); ++i) {
        if (i) out += sep;
        out += cells[i];
    }
    return out;
}

std::string cansee_token(const IdSet& s) {
    std::vector<std::string> ids(s.begin(), s.end());
    return join(ids, "+");
}

// -- relabeling ---------------------------------------------------------------

// Swap the two attacker positions in a run's derived data (the paper's
// presentation convention for the symmetric cases).
RunRecord relabel_swap(const RunRecord& in, const AgentId& x, const AgentId& y) {
    RunRecord out = in;
    auto swap_id = [&](AgentId& id) {
        if (id == x) id = y;
        else if (id == y) id = x;
    };
    for (OutcomeRow& row : out.outcomes) swap_id(row.agent);
    std::sort(out.outcomes.begin(), out.outcomes.end());
    if (out.cansee_step3) {
        IdSet s;
        for (AgentId id : *out.cansee_step3) {
            swap_id(id);
            s.insert(id);
        }
        out.cansee_step3 = s;
    }
    if (out.served_first) swap_id(*out.served_first);
    if (out.first_echoer) swap_id(*out.first_echoer);
    auto swap_map_keys = [&](auto& m) {
        auto copy = m;
        m.clear();
        for (auto& [k, v] : copy) {
            AgentId id = k;
            swap_id(id);
            m[id] = v;
        }
    };
    swap_map_keys(out.stopped);
    swap_map_keys(out.listened);
    swap_map_keys(out.agent_info);
    return out;
}

const OutcomeRow& row_of(const RunRecord& r, const AgentId& id) {
    for (const OutcomeRow& row : r.outcomes)
        if (row.agent == id) return row;
    throw TableError("run has no outcome row for " + id);
}

// -- BME extended tables --------------------------------------------------------

struct BmeCellKey {
    std::string family;
    std::string cansee;  // "-", "E1+E2", "E1", "E2"
    bool operator<(const BmeCellKey& o) const {
        return std::tie(family, cansee) < std::tie(o.family, o.cansee);
    }
};

std::string bme_cansee_of(const RunRecord& r) {
    if (r.family == "T1" || r.family == "T4") return "-";
    if (!r.cansee_step3) return "-";
    return cansee_token(*r.cansee_step3);
}

// Cell -> row-label -> row cells; inserting a conflicting row is an error.
using Grid = std::map<BmeCellKey, std::map<std::string, std::vector<std::string>>>;

void grid_insert(Grid& g, const BmeCellKey& cell, const std::string& label,
                 std::vector<std::string> cells) {
    auto& slot = g[cell];
    auto it = slot.find(label);
    if (it == slot.end()) {
        slot.emplace(label, std::move(cells));
        return;
    }
    if (it->second != cells)
        throw TableError("conflicting rows for " + cell.family + "/" + cell.cansee + "/" +
                         label + ": [" + join(it->second, ",") + "] vs [" + join(cells, ",") +
                         "]");
}

std::string guardian_effect(const OutcomeRow& other) {
    return other.result == Result::Success ? "no effect" : "of help";
}

Table bme_extended(int case_no, int jobs) {
    bool symmetric = case_no == 1 || case_no == 2 || case_no == 3;
    bool starred = case_no == 4 || case_no == 6;
    auto runs = explore(preset("bme-case" + std::to_string(case_no)), jobs);

    Grid grid;
    for (const RunRecord& raw : runs) {
        RunRecord r = raw;
        if (symmetric && r.served_first && *r.served_first == "E2")
            r = relabel_swap(raw, "E1", "E2");
        BmeCellKey cell{r.family, bme_cansee_of(r)};

        const OutcomeRow& e1 = row_of(r, "E1");
        const OutcomeRow& e2 = row_of(r, "E2");
        const OutcomeRow& a = row_of(r, "A");
        auto attacker_cells = [&](const OutcomeRow& row, const OutcomeRow& other) {
            return std::vector<std::string>{result_name(row.result),
                                            belief_outcome_name(row.belief),
                                            key_status_name(row.key_status), row.detection,
                                            guardian_effect(other)};
        };
        std::vector<std::string> a_cells{result_name(a.result), belief_outcome_name(a.belief),
                                         key_status_name(a.key_status), a.detection, ""};
        if (!starred) {
            grid_insert(grid, cell, "E1", attacker_cells(e1, e2));
            grid_insert(grid, cell, "E2", attacker_cells(e2, e1));
            grid_insert(grid, cell, "A", a_cells);
        } else {
            // Both serve orders fill the cell: the first-served attacker's
            // row is starred; the A row follows the E1-first run.
            if (!r.served_first) {
                grid_insert(grid, cell, "E1", attacker_cells(e1, e2));
                grid_insert(grid, cell, "E2", attacker_cells(e2, e1));
                grid_insert(grid, cell, "A", a_cells);
            } else if (*r.served_first == "E1") {
                grid_insert(grid, cell, "E1*", attacker_cells(e1, e2));
                grid_insert(grid, cell, "E2", attacker_cells(e2, e1));
                grid_insert(grid, cell, "A", a_cells);
            } else {
                grid_insert(grid, cell, "E2*", attacker_cells(e2, e1));
                grid_insert(grid, cell, "E1", attacker_cells(e1, e2));
            }
        }
    }

    std::vector<BmeCellKey> cell_order;
    auto add_family = [&](const std::string& fam, bool cansee_cells) {
        if (!cansee_cells) {
            cell_order.push_back({fam, "-"});
            return;
        }
        cell_order.push_back({fam, "E1+E2"});
        cell_order.push_back({fam, "E1"});
        cell_order.push_back({fam, "E2"});
    };
    if (case_no == 2) add_family("T4", false);
    else if (case_no == 5) add_family("T5", true);
    else {
        add_family("T1", false);
        add_family("T2", true);
        add_family("T3", true);
    }

    std::vector<std::string> row_order =
        starred ? std::vector<std::string>{"E1*", "E1", "E2*", "E2", "A"}
                : std::vector<std::string>{"E1", "E2", "A"};

    Table t;
    t.id = "bme.extended.case" + std::to_string(case_no);
    t.header = {"trace", "cansee", "agent", "result", "belief", "key", "detection", "guardian"};
    for (const BmeCellKey& cell : cell_order) {
        auto it = grid.find(cell);
        if (it == grid.end())
            throw TableError(t.id + ": no runs landed in cell " + cell.family + "/" +
                             cell.cansee);
        for (const std::string& label : row_order) {
            auto rit = it->second.find(label);
            if (rit == it->second.end())
                throw TableError(t.id + ": missing row " + label + " in cell " + cell.family +
                                 "/" + cell.cansee);
            std::vector<std::string> row{cell.family, cell.cansee, label};
            row.insert(row.end(), rit->second.begin(), rit->second.end());
            t.rows.push_back(std::move(row));
        }
        // Every grid row must be consumed by the canonical order.
        if (it->second.size() != row_order.size())
            throw TableError(t.id + ": unexpected extra rows in cell " + cell.family + "/" +
                             cell.cansee);
    }
    return t;
}

Table bme_traces(int jobs) {
    Table t;
    t.id = "bme.traces";
    t.header = {"case", "families"};
    for (int n = 1; n <= 6; ++n) {
        auto runs = explore(preset("bme-case" + std::to_string(n)), jobs);
        std::set<std::string> fams;
        for (const RunRecord& r : runs) fams.insert(r.family);
        t.rows.push_back({std::to_string(n), join({fams.begin(), fams.end()}, "+")});
    }
    return t;
}

// -- SRA3P case tables ----------------------------------------------------------

// Columns: e1_stops | cansee E1+E2 | E1 | E2 (case 3 collapses to one).
struct SraColumns {
    // column label -> (row label -> value)
    std::map<std::string, std::map<std::string, std::string>> cells;

    void put(const std::string& col, const std::string& row, const std::string& value) {
        auto& slot = cells[col];
        auto it = slot.find(row);
        if (it == slot.end()) {
            slot.emplace(row, value);
            return;
        }
        if (it->second != value)
            throw TableError("conflicting cell " + col + "/" + row + ": '" + it->second +
                             "' vs '" + value + "'");
    }
};

std::string sra_column_of(const RunRecord& r) {
    if (r.stopped.count("E1") && r.stopped.at("E1")) return "e1_stops";
    if (!r.cansee_step3) return "-";
    return cansee_token(*r.cansee_step3);
}

RunRecord sra_relabel(const RunRecord& raw, int case_no) {
    // Presentation conventions: case 1 names the first echoer E1, case 2
    // names it E2; the asymmetric cases keep their fixed roles.
    if (case_no == 1 && raw.first_echoer && *raw.first_echoer == "E2")
        return relabel_swap(raw, "E1", "E2");
    if (case_no == 2 && raw.first_echoer && *raw.first_echoer == "E1")
        return relabel_swap(raw, "E1", "E2");
    return raw;
}

std::string sra_a_token(const OutcomeRow& a) {
    if (a.detection == "duplicates") return "detection (duplicates)";
    if (a.result == Result::Attacked) return "failure";
    return "no attack";
}

std::string sra_security_token(const RunRecord& r, const AgentId& real_attacker) {
    const OutcomeRow& a = row_of(r, "A");
    if (a.detection == "duplicates") return "enforced";
    const OutcomeRow& e = row_of(r, real_attacker);
    if (e.result == Result::Success || e.result == Result::Dominance) return "compromised";
    if (e.result == Result::Uncertainty) return "uncertain E";
    return "restored";
}

void sra_fill_attackers(SraColumns& cols, const RunRecord& r) {
    std::string col = sra_column_of(r);
    for (const AgentId& id : {AgentId("E1"), AgentId("E2")}) {
        const OutcomeRow& row = row_of(r, id);
        const auto& info = r.agent_info.at(id);
        cols.put(col, id + ".attack", info.at("attack"));
        cols.put(col, id + ".detection", row.detection);
        cols.put(col, id + ".messages", info.at("messages"));
        cols.put(col, id + ".result", result_name(row.result));
    }
    cols.put(col, "A.result", sra_a_token(row_of(r, "A")));
}

void sra_fill_guardian(SraColumns& cols, const RunRecord& r, const AgentId& g_pos) {
    std::string col = sra_column_of(r);
    // The stops column belongs to the E1 position regardless of who holds it.
    const OutcomeRow& g = row_of(r, g_pos);
    AgentId e_pos = g_pos == "E1" ? "E2" : "E1";
    cols.put(col, "G_" + g_pos + ".detection", g.detection);
    cols.put(col, "G_" + g_pos + ".security", sra_security_token(r, e_pos));
}

Table sra3p_case(int case_no, int jobs) {
    std::string base = "sra3p-case" + std::to_string(case_no);
    SraColumns cols;
    for (const RunRecord& raw : explore(preset(base), jobs))
        sra_fill_attackers(cols, sra_relabel(raw, case_no));

    for (const char* pos : {"e1", "e2"}) {
        AgentId phys = pos == std::string("e1") ? "E1" : "E2";
        for (const RunRecord& raw : explore(preset(base + "+guardian-" + pos), jobs)) {
            RunRecord r = sra_relabel(raw, case_no);
            AgentId logical = phys;
            if (r.first_echoer != raw.first_echoer) logical = phys == "E1" ? "E2" : "E1";
            sra_fill_guardian(cols, r, logical);
        }
    }

    std::vector<std::string> columns;
    if (case_no == 3) columns = {"-"};
    else columns = {"e1_stops", "E1+E2", "E1", "E2"};

    std::vector<std::pair<std::string, std::string>> row_labels = {
        {"E1", "attack"},    {"E1", "detection"},   {"E1", "messages"}, {"E1", "result"},
        {"E2", "attack"},    {"E2", "detection"},   {"E2", "messages"}, {"E2", "result"},
        {"A", "result"},     {"G_E1", "detection"}, {"G_E1", "security"},
        {"G_E2", "detection"}, {"G_E2", "security"},
    };

    Table t;
    t.id = "sra3p.case" + std::to_string(case_no);
    t.header = {"agent", "feature"};
    for (const std::string& c : columns)
        t.header.push_back(c == "-" ? "value" : (c == "e1_stops" ? "e1_stops" : "cansee_" + c));
    for (const auto& [agent, feature] : row_labels) {
        std::vector<std::string> row{agent, feature};
        for (const std::string& c : columns) {
            auto cit = cols.cells.find(c);
            std::string key = agent + "." + feature;
            if (cit == cols.cells.end() || !cit->second.count(key)) {
                // The strong-attack cases have no stops column ("--").
                row.push_back("--");
            } else {
                row.push_back(cit->second.at(key));
            }
        }
        t.rows.push_back(std::move(row));
    }
    return t;
}

// -- guardian matrices ------------------------------------------------------------

// One guardian configuration: the preset plus which position is benign.
struct GuardianConfig {
    std::string preset_name;
    AgentId g_pos;
};

// The matrix row a run belongs to, by the effective canSee of the
// initiator's reply. Runs in which no reply was erased (aborts, DoS) are
// canSee-independent and belong to every row.
std::vector<std::string> guardian_rows_of(const RunRecord& r, const AgentId& g_pos,
                                          const AgentId& e_pos) {
    if (!r.cansee_step3) return {"E+G", "G", "E"};
    const IdSet& s = *r.cansee_step3;
    if (s.count(g_pos) && s.count(e_pos)) return {"E+G"};
    if (s.count(g_pos)) return {"G"};
    return {"E"};
}

// BME: protected iff no real attacker achieved undetected success.
Table guardian_bme(int jobs) {
    struct Cell {
        bool any_protected = false;
        bool any_unprotected = false;
        bool listening_unprotected = false;
    };
    auto verdict = [](const Cell& c) -> std::string {
        if (!c.any_unprotected) return "always";
        if (!c.any_protected) return "";
        return c.listening_unprotected ? "sometimes" : "sometimes+";
    };

    std::vector<std::pair<std::string, std::vector<GuardianConfig>>> columns = {
        {"cases_1_3_4_6", {}},
        {"case_2", {{"bme-case2+guardian-e1", "E1"}, {"bme-case2+guardian-e2", "E2"}}},
        {"case_5_E_dishonest_G", {{"bme-case5+guardian-e2", "E2"}}},
        {"case_5_G_dishonest_E", {{"bme-case5+guardian-e1", "E1"}}},
    };
    for (int n : {1, 3, 4, 6}) {
        std::string base = "bme-case" + std::to_string(n);
        columns[0].second.push_back({base + "+guardian-e1", "E1"});
        columns[0].second.push_back({base + "+guardian-e2", "E2"});
    }

    std::vector<std::string> row_names = {"E+G", "G", "E"};
    Table t;
    t.id = "guardian.bme";
    t.header = {"cansee", "cases_1_3_4_6", "case_2", "case_5_E_dishonest_G",
                "case_5_G_dishonest_E"};
    std::map<std::string, std::map<std::string, Cell>> cells;  // row -> column -> cell

    for (auto& [col_name, configs] : columns) {
        for (const GuardianConfig& gc : configs) {
            AgentId e_pos = gc.g_pos == "E1" ? "E2" : "E1";
            for (const RunRecord& r : explore(preset(gc.preset_name), jobs)) {
                const OutcomeRow& a = row_of(r, "A");
                bool prot = a.result != Result::Attacked;
                bool listening = !r.listened.count("A") || r.listened.at("A");
                // Bucket the run by the effective canSee of the reply; a run
                // in which no reply was ever erased lands in every bucket.
                for (const std::string& row : guardian_rows_of(r, gc.g_pos, e_pos)) {
                    Cell& cell = cells[row][col_name];
                    (prot ? cell.any_protected : cell.any_unprotected) = true;
                    if (!prot && listening) cell.listening_unprotected = true;
                }
            }
        }
    }
    for (const std::string& row : row_names) {
        std::vector<std::string> cells_out{row};
        for (size_t c = 1; c < t.header.size(); ++c)
            cells_out.push_back(verdict(cells[row][t.header[c]]));
        t.rows.push_back(std::move(cells_out));
    }
    return t;
}

// SRA3P: graded by the real attacker's certainty about the secret.
Table guardian_sra3p(int jobs) {
    struct Cell {
        bool any_certain = false;
        bool any_uncertain = false;
        bool any_failed = false;
    };
    auto verdict = [](const Cell& c) -> std::string {
        if (!c.any_certain && !c.any_uncertain) return "always";
        if (!c.any_certain) return "sometimes+";
        if (c.any_uncertain || c.any_failed) return "sometimes";
        return "";
    };

    std::vector<std::pair<std::string, std::vector<GuardianConfig>>> columns = {
        {"case_2", {{"sra3p-case2+guardian-e1", "E1"}, {"sra3p-case2+guardian-e2", "E2"}}},
        {"case_3", {{"sra3p-case3+guardian-e1", "E1"}, {"sra3p-case3+guardian-e2", "E2"}}},
        {"cases_1_4_5_6_E_attentive_G",
         {{"sra3p-case1+guardian-e1", "E1"},
          {"sra3p-case1+guardian-e2", "E2"},
          {"sra3p-case4+guardian-e2", "E2"},
          {"sra3p-case5+guardian-e2", "E2"},
          {"sra3p-case6+guardian-e2", "E2"}}},
        {"cases_4_5_6_G_attentive_E",
         {{"sra3p-case4+guardian-e1", "E1"},
          {"sra3p-case5+guardian-e1", "E1"},
          {"sra3p-case6+guardian-e1", "E1"}}},
    };

    std::vector<std::string> row_names = {"E+G", "G", "E"};
    Table t;
    t.id = "guardian.sra3p";
    t.header = {"cansee", "case_2", "case_3", "cases_1_4_5_6_E_attentive_G",
                "cases_4_5_6_G_attentive_E"};
    std::map<std::string, std::map<std::string, Cell>> cells;

    for (auto& [col_name, configs] : columns) {
        for (const GuardianConfig& gc : configs) {
            AgentId e_pos = gc.g_pos == "E1" ? "E2" : "E1";
            for (const RunRecord& r : explore(preset(gc.preset_name), jobs)) {
                const OutcomeRow& e = row_of(r, e_pos);
                for (const std::string& row : guardian_rows_of(r, gc.g_pos, e_pos)) {
                    Cell& cell = cells[row][col_name];
                    if (e.result == Result::Success || e.result == Result::Dominance)
                        cell.any_certain = true;
                    else if (e.result == Result::Uncertainty)
                        cell.any_uncertain = true;
                    else
                        cell.any_failed = true;
                }
            }
        }
    }
    for (const std::string& row : row_names) {
        std::vector<std::string> cells_out{row};
        for (size_t c = 1; c < t.header.size(); ++c)
            cells_out.push_back(verdict(cells[row][t.header[c]]));
        t.rows.push_back(std::move(cells_out));
    }
    return t;
}

}  // namespace

// -- rendering ----------------------------------------------------------------

std::string Table::csv() const {
    std::string out = join(header, ",") + "\n";
    for (const auto& row : rows) out += join(row, ",") + "\n";
    return out;
}

std::string Table::text() const {
    std::vector<size_t> widths(header.size());
    auto widen = [&](const std::vector<std::string>& row) {
        for (size_t i = 0; i < row.size(); ++i) widths[i] = std::max(widths[i], row[i].size());
    };
    widen(header);
    for (const auto& row : rows) widen(row);
    std::ostringstream o;
    auto line = [&](const std::vector<std::string>& row) {
        for (size_t i = 0; i < row.size(); ++i) {
            o << row[i] << std::string(widths[i] - row[i].size(), ' ');
            if (i + 1 < row.size()) o << "  ";
        }
        o << "\n";
    };
    line(header);
    size_t total = 0;
    for (size_t w : widths) total += w + 2;
    o << std::string(total > 2 ? total - 2 : total, '-') << "\n";
    for (const auto& row : rows) line(row);
    return o.str();
}

std::string Table::json() const {
    nlohmann::json j;
    j["id"] = id;
    j["header"] = header;
    j["rows"] = rows;
    return j.dump(2) + "\n";
}

std::vector<std::string> table_ids() {
    std::vector<std::string> out{"bme.traces"};
    for (int i = 1; i <= 6; ++i) out.push_back("bme.extended.case" + std::to_string(i));
    for (int i = 1; i <= 6; ++i) out.push_back("sra3p.case" + std::to_string(i));
    out.push_back("guardian.bme");
    out.push_back("guardian.sra3p");
    return out;
}

Table emit_table(const std::string& table_id, int jobs) {
    if (table_id == "bme.traces") return bme_traces(jobs);
    if (table_id.rfind("bme.extended.case", 0) == 0 && table_id.size() == 18 &&
        table_id[17] >= '1' && table_id[17] <= '6')
        return bme_extended(table_id[17] - '0', jobs);
    if (table_id.rfind("sra3p.case", 0) == 0 && table_id.size() == 11 &&
        table_id[10] >= '1' && table_id[10] <= '6')
        return sra3p_case(table_id[10] - '0', jobs);
    if (table_id == "guardian.bme") return guardian_bme(jobs);
    if (table_id == "guardian.sra3p") return guardian_sra3p(jobs);
    throw TableError("unknown table id '" + table_id + "'");
}

bool VerifyReport::all_match() const {
    return std::all_of(entries.begin(), entries.end(),
                       [](const Entry& e) { return e.match; });
}

namespace {

// Fixture comparison ignores '#' provenance comments and trailing blanks.
std::vector<std::string> data_lines(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        out.push_back(line);
    }
    return out;
}

}  // namespace

VerifyReport verify_tables(int jobs) {
    VerifyReport report;
    for (const std::string& id : table_ids()) {
        VerifyReport::Entry entry{id, true, ""};
        try {
            std::vector<std::string> got = data_lines(emit_table(id, jobs).csv());
            std::vector<std::string> want = data_lines(golden_fixture(id));
            size_t n = std::max(got.size(), want.size());
            for (size_t i = 0; i < n; ++i) {
                std::string g = i < got.size() ? got[i] : "<missing>";
                std::string w = i < want.size() ? want[i] : "<missing>";
                if (g != w) {
                    entry.match = false;
                    entry.diff = "line " + std::to_string(i + 1) + ": got '" + g +
                                 "', want '" + w + "'";
                    break;
                }
            }
        } catch (const std::exception& e) {
            entry.match = false;
            entry.diff = std::string("error: ") + e.what();
        }
        report.entries.push_back(std::move(entry));
    }
    return report;
}

}  // namespace madsim
