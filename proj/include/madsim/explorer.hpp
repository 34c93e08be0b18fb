// Exhaustive exploration of a scenario's nondeterminism: every chooser
// decision is a branch point, runs replay deterministically from a choice
// tape, and the explorer fans out depth-first until all tapes are spent.
// Per-run outcome classification lives in classify.cpp.

#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "madsim/world.hpp"

namespace madsim {

enum class Result { Success, Failure, FullFailure, Uncertainty, Dominance, Safe, Attacked };
enum class BeliefOutcome { Success, Failure, Attack, Safe };
enum class KeyStatus { Right, Wrong, None, Broken, NotUsed, Used, InUse };

const char* result_name(Result r);
const char* belief_outcome_name(BeliefOutcome b);
const char* key_status_name(KeyStatus k);

struct OutcomeRow {
    AgentId agent;
    Result result;
    BeliefOutcome belief;
    KeyStatus key_status;
    std::string detection;  // fixture token: alpha..epsilon, none, 2 keys, ...

    bool operator==(const OutcomeRow&) const = default;
    bool operator<(const OutcomeRow& o) const;
    std::string str() const;
};

struct RunRecord {
    std::vector<ResolvedChoice> choices;
    std::vector<TraceEvent> trace;
    std::vector<OutcomeRow> outcomes;  // sorted by agent

    // derived labels used by tables and assertions
    std::string family;                 // BME: T1..T5; SRA3P: informational
    std::optional<IdSet> cansee_step3;  // observers of the reply erase, if any
    std::optional<AgentId> served_first;  // BME: attacker whose request S served first
    std::optional<AgentId> first_echoer;  // SRA3P
    std::map<AgentId, bool> stopped;      // SRA3P: classical listener stopped
    std::map<AgentId, bool> listened;     // BME: A's listen_after_step3 resolution
    // per-attacker table telemetry ("attack" and "messages" tokens)
    std::map<AgentId, std::map<std::string, std::string>> agent_info;

    std::string trace_key() const;  // dedup key (exact trace)
};

struct ExploreStats {
    size_t runs_explored = 0;
    size_t runs_distinct = 0;
};

/// Depth-first enumeration of all runs; duplicate traces deduplicated,
/// results in canonical (choice-tape) order. jobs > 1 evaluates branches
/// concurrently with identical results.
std::vector<RunRecord> explore(const ScenarioConfig& cfg, int jobs = 1,
                               ExploreStats* stats = nullptr);

/// Classification of one finished world (exposed for explore's use and for
/// tests that drive single runs).
struct Classification {
    std::vector<OutcomeRow> outcomes;
    std::string family;
};
Classification classify_world(const World& w);

/// Replay one run from an explicit choice tape.
RunRecord run_single(const ScenarioConfig& cfg, const std::vector<size_t>& tape);

/// Replay a run and hand the finished world to an inspector (used by the
/// engine property suites to examine journals and final knowledge).
void replay_inspect(const ScenarioConfig& cfg, const std::vector<size_t>& tape,
                    const std::function<void(const World&)>& inspect);

/// The choice tape of an explored record (one entry per real branch).
std::vector<size_t> tape_of(const RunRecord& rec);

}  // namespace madsim
