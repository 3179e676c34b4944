#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "red/dag.hpp"
#include "red/exec_model.hpp"
#include "red/refine.hpp"

namespace red {

/// One periodic task stream: the DAG released at `release_offset`, then
/// every `dag.period` after that. repeats == 0 means "until the horizon".
struct TaskEntry {
    DagTask dag;
    usec release_offset = 0;
    int repeats = 0;
};

/// Data dependency across task streams: each consumer job waits for the
/// completion of the latest producer job released at or before it (the
/// freshest available sample). Jobs released before any producer job run
/// unconstrained. With inherit_deadline set, the consumer's absolute
/// deadline is anchored at the consumed sample's release instead of its
/// own (the sample's freshness bound).
struct CrossDependency {
    std::string producer_task;
    std::string consumer_task;
    bool inherit_deadline = false;
};

/// Fault injection: the named node instance fails with OOM instead of
/// completing. The simulator has no real memory; this exists to exercise
/// handler-lifecycle paths.
struct FaultSpec {
    std::string task;
    std::int64_t job_index = 0;
    NodeId node;
};

struct TimedMutation {
    std::string task;
    DagMutation mutation;
};

struct Scenario {
    std::string name;
    std::vector<TaskEntry> tasks;
    std::vector<TimedMutation> mutations;
    ExecutionModel exec;
    usec horizon = 0;
    std::uint64_t seed = 1;
    double interference = 1.0; // multiplicative slowdown on sampled costs
    RefineConfig refine;
    std::vector<CrossDependency> cross_deps;
    std::vector<FaultSpec> faults;
};

/// Throws ScenarioError on the first violated scenario invariant.
inline void validate_scenario(const Scenario& s) {
    if (s.horizon <= 0) throw ScenarioError("horizon must be > 0");
    if (s.interference < 1.0) throw ScenarioError("interference must be >= 1.0");
    if (s.refine.gamma < 0) throw ScenarioError("gamma must be >= 0");
    std::set<std::string> ids;
    for (const auto& t : s.tasks) {
        if (!ids.insert(t.dag.task_id).second)
            throw ScenarioError("duplicate task id '" + t.dag.task_id + "'");
        auto report = validate_dag(t.dag);
        if (!report.ok)
            throw ScenarioError("task '" + t.dag.task_id + "': " +
                                report.violations.front().code + " (" +
                                report.violations.front().detail + ")");
        if (t.release_offset < 0)
            throw ScenarioError("task '" + t.dag.task_id + "': negative release offset");
        if (t.repeats < 0)
            throw ScenarioError("task '" + t.dag.task_id + "': negative repeats");
        if (t.repeats != 1 && !t.dag.period)
            throw ScenarioError("task '" + t.dag.task_id + "': repeating task needs a period");
    }
    for (const auto& m : s.mutations) {
        if (!ids.count(m.task))
            throw ScenarioError("mutation targets unknown task '" + m.task + "'");
        if (m.mutation.effective_time >= s.horizon)
            throw ScenarioError("mutation on '" + m.task + "' at " +
                                std::to_string(m.mutation.effective_time) +
                                "us is not before the horizon");
    }
    for (const auto& [key, dist] : s.exec.per_node) validate_dist(dist, key);
    for (const auto& c : s.cross_deps)
        if (!ids.count(c.producer_task) || !ids.count(c.consumer_task))
            throw ScenarioError("cross dependency references unknown task");
    for (const auto& f : s.faults)
        if (!ids.count(f.task)) throw ScenarioError("fault references unknown task '" + f.task + "'");
}

} // namespace red
