#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include "red/dag.hpp"
#include "red/scheduler.hpp"

namespace red {

enum class EventKind {
    Release,
    Dispatch,
    Complete,
    Miss,
    Drop,
    Mutation,
    Reassign,
    Sync,
    StateTransition
};

inline const char* to_string(EventKind k) {
    switch (k) {
    case EventKind::Release: return "release";
    case EventKind::Dispatch: return "dispatch";
    case EventKind::Complete: return "complete";
    case EventKind::Miss: return "miss";
    case EventKind::Drop: return "drop";
    case EventKind::Mutation: return "mutation";
    case EventKind::Reassign: return "reassign";
    case EventKind::Sync: return "sync";
    case EventKind::StateTransition: return "transition";
    }
    return "?";
}

/// Per-node description embedded in a Release event: traces are
/// self-contained, so metrics and replay checks need no scenario lookup.
struct TraceNode {
    NodeId id;
    usec cost_estimate = 0;
    usec abs_deadline = 0;
    int height = 0;
    NodeKind kind = NodeKind::Monolithic;
    std::string share_group;
};

struct MemberRef {
    std::string task;
    std::int64_t job = 0;
    NodeId node;
};

struct ReleasePayload {
    usec e2e_deadline = 0; // absolute: release + D
    std::vector<TraceNode> nodes;
    std::vector<Edge> edges;
};

struct DispatchPayload {
    usec abs_deadline = 0;
    usec release = 0;
    usec duration = 0; // execution time; decision/blocking costs listed apart
    usec decision_cost = 0;
    usec blocking = 0;
    std::vector<MemberRef> members; // >1 entries for a merged execution
};

struct CompletePayload {
    usec dispatched_at = 0;
    usec executed = 0;
    usec abs_deadline = 0;
    bool on_time = true;
};

struct MissPayload {
    usec abs_deadline = 0;
    usec completion = 0;
};

struct DropPayload {
    std::string reason; // deadline | job-cancel | orphaned | horizon | oom
};

struct MutationPayload {
    std::string detail;
};

struct ReassignPayload {
    std::map<NodeId, usec> new_absolute;
};

struct SyncPayload {
    std::string mode;   // periodic | on-demand
    usec cost = 0;
    std::string reason; // tick | level-complete | state-transition
    usec scheduled_at = 0;
};

struct TransitionPayload {
    HandlerState from = HandlerState::Created;
    HandlerState to = HandlerState::Created;
};

using EventPayload =
    std::variant<ReleasePayload, DispatchPayload, CompletePayload, MissPayload, DropPayload,
                 MutationPayload, ReassignPayload, SyncPayload, TransitionPayload>;

struct Event {
    usec t = 0;
    EventKind kind = EventKind::Release;
    std::string task;      // empty for sync events
    std::int64_t job = -1; // job index within task, -1 when not applicable
    NodeId node;           // empty when not applicable
    EventPayload payload;
};

/// The complete, ordered record of one simulation run. Every metric and
/// every invariant check derives from this object alone.
struct EventTrace {
    std::string scenario;
    std::string policy;
    std::string sync_mode;
    std::uint64_t seed = 0;
    usec horizon = 0;
    usec gamma = 0;
    usec total_busy = 0;      // accelerator occupancy: exec + sync + decision
    usec total_exec = 0;      // executed node time only
    usec total_sync_cost = 0;
    usec total_decision_cost = 0;
    std::vector<Event> events;
};

inline std::string job_key(const std::string& task, std::int64_t job) {
    return task + "#" + std::to_string(job);
}

} // namespace red
