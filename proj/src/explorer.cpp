#include "madsim/explorer.hpp"

#include <algorithm>
#include <atomic>
#include <deque>
#include <mutex>
#include <sstream>
#include <thread>

namespace madsim {

const char* result_name(Result r) {
    switch (r) {
        case Result::Success: return "success";
        case Result::Failure: return "failure";
        case Result::FullFailure: return "full failure";
        case Result::Uncertainty: return "uncertainty";
        case Result::Dominance: return "dominance";
        case Result::Safe: return "safe";
        case Result::Attacked: return "attacked";
    }
    return "?";
}

const char* belief_outcome_name(BeliefOutcome b) {
    switch (b) {
        case BeliefOutcome::Success: return "success";
        case BeliefOutcome::Failure: return "failure";
        case BeliefOutcome::Attack: return "attack";
        case BeliefOutcome::Safe: return "safe";
    }
    return "?";
}

const char* key_status_name(KeyStatus k) {
    switch (k) {
        case KeyStatus::Right: return "right";
        case KeyStatus::Wrong: return "wrong";
        case KeyStatus::None: return "none";
        case KeyStatus::Broken: return "broken";
        case KeyStatus::NotUsed: return "not used";
        case KeyStatus::Used: return "used";
        case KeyStatus::InUse: return "in use";
    }
    return "?";
}

bool OutcomeRow::operator<(const OutcomeRow& o) const {
    return std::tie(agent, result, belief, key_status, detection) <
           std::tie(o.agent, o.result, o.belief, o.key_status, o.detection);
}

std::string OutcomeRow::str() const {
    return agent + ": " + result_name(result) + " / " + belief_outcome_name(belief) + " / " +
           key_status_name(key_status) + " / " + detection;
}

std::string RunRecord::trace_key() const {
    std::string key;
    for (const TraceEvent& e : trace) key += e.line() + "\n";
    // Strategy toggles are semantic state, not schedule noise: a stopped
    // listener can yield the same trace as a continuing one outside canSee.
    for (const ResolvedChoice& c : choices)
        if (c.bp.kind == "toggle") key += c.bp.context + "=" + std::to_string(c.chosen) + "\n";
    return key;
}

namespace {

// Chooser that replays a prefix tape and defaults to option 0 beyond it,
// recording every decision's arity so the driver can enumerate siblings.
class TapeChooser final : public Chooser {
public:
    explicit TapeChooser(std::vector<size_t> tape) : tape_(std::move(tape)) {}

    size_t choose(const BranchPoint& bp) override {
        size_t pick = pos_ < tape_.size() ? tape_[pos_] : 0;
        if (pick >= bp.options.size())
            throw EngineError("stale tape: option " + std::to_string(pick) + " of " +
                              std::to_string(bp.options.size()));
        ++pos_;
        arity_.push_back(bp.options.size());
        picks_.push_back(pick);
        return pick;
    }

    const std::vector<size_t>& arity() const { return arity_; }
    const std::vector<size_t>& picks() const { return picks_; }

private:
    std::vector<size_t> tape_;
    size_t pos_ = 0;
    std::vector<size_t> arity_;
    std::vector<size_t> picks_;
};

RunRecord finish_run(World& w, const std::vector<size_t>& picks) {
    RunRecord rec;
    rec.choices = w.choices();
    rec.trace = w.trace();
    Classification c = classify_world(w);
    rec.outcomes = std::move(c.outcomes);
    rec.family = std::move(c.family);
    (void)picks;
    return rec;
}

}  // namespace

// Derived labels needed by table emission; fleshed out in classify.cpp via
// classify_world, which also fills family. The extraction of trace-derived
// labels lives here so run_single and explore share it.
void annotate_record(RunRecord& rec, const World& w);

RunRecord run_single(const ScenarioConfig& cfg, const std::vector<size_t>& tape) {
    TapeChooser chooser(tape);
    World w(cfg, chooser);
    w.run();
    RunRecord rec = finish_run(w, chooser.picks());
    annotate_record(rec, w);
    return rec;
}

void replay_inspect(const ScenarioConfig& cfg, const std::vector<size_t>& tape,
                    const std::function<void(const World&)>& inspect) {
    TapeChooser chooser(tape);
    World w(cfg, chooser);
    w.run();
    inspect(w);
}

std::vector<size_t> tape_of(const RunRecord& rec) {
    std::vector<size_t> tape;
    for (const ResolvedChoice& c : rec.choices) tape.push_back(c.chosen);
    return tape;
}

std::vector<RunRecord> explore(const ScenarioConfig& cfg, int jobs, ExploreStats* stats) {
    struct Item {
        std::vector<size_t> tape;
    };
    std::deque<Item> queue;
    queue.push_back({{}});
    std::mutex mu;
    std::vector<std::pair<std::vector<size_t>, RunRecord>> results;
    std::atomic<size_t> explored{0};
    std::atomic<bool> failed{false};
    std::string failure;

    auto worker = [&]() {
        for (;;) {
            Item item;
            {
                std::lock_guard<std::mutex> lock(mu);
                if (queue.empty() || failed) return;
                item = std::move(queue.front());
                queue.pop_front();
            }
            try {
                TapeChooser chooser(item.tape);
                World w(cfg, chooser);
                w.run();
                RunRecord rec = finish_run(w, chooser.picks());
                annotate_record(rec, w);
                ++explored;
                std::lock_guard<std::mutex> lock(mu);
                // Fan out: for every free decision beyond the fixed prefix,
                // queue its untried siblings.
                const auto& arity = chooser.arity();
                const auto& picks = chooser.picks();
                for (size_t i = item.tape.size(); i < arity.size(); ++i) {
                    for (size_t alt = picks[i] + 1; alt < arity[i]; ++alt) {
                        std::vector<size_t> next(picks.begin(), picks.begin() + i);
                        next.push_back(alt);
                        queue.push_back({std::move(next)});
                    }
                }
                results.emplace_back(std::vector<size_t>(picks.begin(), picks.end()),
                                     std::move(rec));
            } catch (const std::exception& e) {
                std::lock_guard<std::mutex> lock(mu);
                failed = true;
                failure = e.what();
                return;
            }
        }
    };

    if (jobs <= 1) {
        worker();
        // The queue drains fully only once no new work appears.
        while (!queue.empty() && !failed) worker();
    } else {
        // Workers exit when the queue momentarily drains; a simple
        // generation loop keeps respawning until it is genuinely empty.
        while (!failed) {
            {
                std::lock_guard<std::mutex> lock(mu);
                if (queue.empty()) break;
            }
            std::vector<std::thread> pool;
            for (int i = 0; i < jobs; ++i) pool.emplace_back(worker);
            for (auto& t : pool) t.join();
        }
    }
    if (failed) throw EngineError("exploration failed: " + failure);

    std::sort(results.begin(), results.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    std::vector<RunRecord> out;
    std::set<std::string> seen;
    for (auto& [tape, rec] : results) {
        if (!seen.insert(rec.trace_key()).second) continue;
        out.push_back(std::move(rec));
    }
    if (stats) {
        stats->runs_explored = explored;
        stats->runs_distinct = out.size();
    }
    return out;
}

}  // namespace madsim
