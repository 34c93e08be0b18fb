// Report tables over explored runs: the trace-family summary, the
// extended outcome tables, and the guardian effectiveness matrices, in
// text, CSV and JSON. CSV output is byte-exact against the bundled golden
// fixtures (`verify`).

#pragma once

#include <string>
#include <vector>

#include "madsim/explorer.hpp"

namespace madsim {

struct Table {
    std::string id;
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::string csv() const;
    std::string text() const;
    std::string json() const;
};

struct TableError : std::runtime_error {
    explicit TableError(const std::string& what) : std::runtime_error(what) {}
};

/// Supported ids: bme.traces, bme.extended.case1..6, sra3p.case1..6,
/// guardian.bme, guardian.sra3p.
std::vector<std::string> table_ids();
Table emit_table(const std::string& table_id, int jobs = 1);

/// Golden fixtures bundled at build time, keyed by table id.
const std::string& golden_fixture(const std::string& table_id);

struct VerifyReport {
    struct Entry {
        std::string table_id;
        bool match;
        std::string diff;  // first mismatching line, when any
    };
    std::vector<Entry> entries;
    bool all_match() const;
};

/// Emit every supported table and compare against the bundled fixtures.
VerifyReport verify_tables(int jobs = 1);

}  // namespace madsim
