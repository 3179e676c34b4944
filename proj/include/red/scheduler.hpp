#pragma once

#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "red/deadline.hpp"

namespace red {

/// Policy ladder from the evaluation grid. EDF schedules the coarse DAG;
/// RED_FG adds structure refinement; RED_IDA adds runtime deadline
/// re-assignment; RED additionally switches to on-demand synchronization.
enum class Policy { EDF, RED_FG, RED_IDA, RED };

inline const char* to_string(Policy p) {
    switch (p) {
    case Policy::EDF: return "EDF";
    case Policy::RED_FG: return "RED-FG";
    case Policy::RED_IDA: return "RED-IDA";
    case Policy::RED: return "RED";
    }
    return "?";
}

inline std::optional<Policy> parse_policy(const std::string& s) {
    if (s == "EDF" || s == "edf") return Policy::EDF;
    if (s == "RED-FG" || s == "red-fg") return Policy::RED_FG;
    if (s == "RED-IDA" || s == "red-ida") return Policy::RED_IDA;
    if (s == "RED" || s == "red") return Policy::RED;
    return std::nullopt;
}

enum class SyncMode { Periodic, OnDemand };

inline const char* to_string(SyncMode m) {
    return m == SyncMode::Periodic ? "periodic" : "on-demand";
}

enum class DropPolicy { DropNodeOnMiss, DropJobOnMiss, NeverDrop };

inline const char* to_string(DropPolicy p) {
    switch (p) {
    case DropPolicy::DropNodeOnMiss: return "drop-node";
    case DropPolicy::DropJobOnMiss: return "drop-job";
    case DropPolicy::NeverDrop: return "never";
    }
    return "?";
}

inline std::optional<DropPolicy> parse_drop_policy(const std::string& s) {
    if (s == "drop-node") return DropPolicy::DropNodeOnMiss;
    if (s == "drop-job") return DropPolicy::DropJobOnMiss;
    if (s == "never") return DropPolicy::NeverDrop;
    return std::nullopt;
}

struct SchedulerConfig {
    Policy policy = Policy::RED;
    std::optional<SyncMode> sync; // unset: derived from policy
    usec sync_interval = ms_to_us_int(200);
    usec sync_cost = 0;
    usec decision_cost = 0;
    usec blocking_time = 0;
    DropPolicy drop_policy = DropPolicy::DropNodeOnMiss;
    LevelWeight level_weight = LevelWeight::MaxCost;

    bool refines() const { return policy != Policy::EDF; }
    bool reassigns() const { return policy == Policy::RED_IDA || policy == Policy::RED; }
    SyncMode effective_sync() const {
        if (sync) return *sync;
        return policy == Policy::RED ? SyncMode::OnDemand : SyncMode::Periodic;
    }
};

/// One dispatchable node instance in the ready queue.
struct ReadyEntry {
    NodeId node;
    std::string job; // "<task>#<index>"
    usec abs_deadline = 0;
    usec release = 0;

    auto key() const { return std::tie(abs_deadline, release, node, job); }
};

/// EDF selection: minimum absolute deadline, ties broken by earliest
/// release, then ascending node id.
inline ReadyEntry next_task_to_schedule(const std::vector<ReadyEntry>& ready) {
    if (ready.empty()) throw EmptyReadyQueue("next_task_to_schedule: empty ready queue");
    const ReadyEntry* best = &ready.front();
    for (const auto& e : ready)
        if (e.key() < best->key()) best = &e;
    return *best;
}

enum class DropDecision { Keep, Drop };

/// Applies the drop rule to an entry that has not started executing. A job
/// at its deadline instant is still kept (boundary rule: now == deadline is
/// feasible). Job-level cascading is the engine's responsibility.
inline DropDecision enforce_drop_policy(DropPolicy policy, const ReadyEntry& entry, usec now) {
    if (policy == DropPolicy::NeverDrop) return DropDecision::Keep;
    return now > entry.abs_deadline ? DropDecision::Drop : DropDecision::Keep;
}

/// Handler lifecycle states (task-handler finite state machine).
enum class HandlerState { Created, Ready, Running, Blocked, Completed, Dropped, FailedOom };

inline const char* to_string(HandlerState s) {
    switch (s) {
    case HandlerState::Created: return "created";
    case HandlerState::Ready: return "ready";
    case HandlerState::Running: return "running";
    case HandlerState::Blocked: return "blocked";
    case HandlerState::Completed: return "completed";
    case HandlerState::Dropped: return "dropped";
    case HandlerState::FailedOom: return "failed-oom";
    }
    return "?";
}

inline bool is_terminal(HandlerState s) {
    return s == HandlerState::Completed || s == HandlerState::Dropped ||
           s == HandlerState::FailedOom;
}

inline bool transition_allowed(HandlerState from, HandlerState to) {
    switch (from) {
    case HandlerState::Created: return to == HandlerState::Ready;
    case HandlerState::Ready:
        return to == HandlerState::Running || to == HandlerState::Dropped;
    case HandlerState::Running:
        return to == HandlerState::Blocked || to == HandlerState::Completed ||
               to == HandlerState::FailedOom || to == HandlerState::Dropped;
    case HandlerState::Blocked: return to == HandlerState::Ready;
    default: return false; // terminal states are never exited
    }
}

} // namespace red
