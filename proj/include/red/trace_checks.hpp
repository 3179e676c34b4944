#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "red/metrics.hpp"
#include "red/trace.hpp"

namespace red {

struct SyncPolicyView {
    SyncMode mode = SyncMode::Periodic;
    usec interval = 0;
    usec cost = 0;
};

/// Recomputes, from a trace alone, the instants at which the given policy
/// must synchronize up to `now`: every interval multiple while any job is
/// live under Periodic; one per fully-completed height level per job plus
/// one per transition into Blocked/Failed-OOM under OnDemand. Serves as an
/// independent cross-check of the engine's emitted sync events.
inline std::vector<usec> sync_events(const SyncPolicyView& policy, const EventTrace& trace,
                                     usec now) {
    std::vector<usec> out;
    if (policy.mode == SyncMode::Periodic) {
        if (policy.interval <= 0) return out;
        // Live spans: [release, last settling event) per job.
        std::map<std::string, std::pair<usec, usec>> span;
        std::map<std::string, std::size_t> open; // unsettled node count
        for (const auto& ev : trace.events) {
            if (ev.job < 0) continue;
            std::string key = job_key(ev.task, ev.job);
            if (ev.kind == EventKind::Release) {
                span[key] = {ev.t, now};
                open[key] = std::get<ReleasePayload>(ev.payload).nodes.size();
            } else if (ev.kind == EventKind::Complete || ev.kind == EventKind::Drop) {
                if (open.count(key) && --open[key] == 0) span[key].second = ev.t;
            }
        }
        std::set<usec> ticks;
        for (const auto& [key, s] : span) {
            usec first = (s.first / policy.interval + 1) * policy.interval;
            for (usec t = first; t < s.second && t <= now; t += policy.interval)
                ticks.insert(t);
        }
        out.assign(ticks.begin(), ticks.end());
        return out;
    }
    // OnDemand: level completions and Blocked / Failed-OOM entries.
    auto jobs = collect_jobs(trace);
    for (const auto& j : jobs) {
        std::map<int, std::size_t> level_total;
        std::map<int, std::size_t> level_done;
        std::map<int, usec> level_last;
        for (const auto& [id, n] : j.nodes) ++level_total[n.height];
        bool any_drop = false;
        std::map<int, bool> level_dropped;
        for (const auto& [id, reason] : j.dropped) {
            level_dropped[j.nodes.at(id).height] = true;
            any_drop = true;
        }
        (void)any_drop;
        for (const auto& [id, t] : j.completion) {
            int h = j.nodes.at(id).height;
            ++level_done[h];
            level_last[h] = std::max(level_last[h], t);
        }
        for (const auto& [h, total] : level_total)
            if (!level_dropped[h] && level_done[h] == total && level_last[h] <= now)
                out.push_back(level_last[h]);
    }
    for (const auto& ev : trace.events) {
        if (ev.kind != EventKind::StateTransition || ev.t > now) continue;
        const auto& tp = std::get<TransitionPayload>(ev.payload);
        if (tp.to == HandlerState::Blocked || tp.to == HandlerState::FailedOom)
            out.push_back(ev.t);
    }
    std::sort(out.begin(), out.end());
    return out;
}

// ---------------------------------------------------------------------
// Trace invariant checks. Each returns human-readable violations; an
// empty result means the invariant holds over the whole trace.
// ---------------------------------------------------------------------

inline std::vector<std::string> check_event_order(const EventTrace& trace) {
    std::vector<std::string> bad;
    usec last = 0;
    for (const auto& ev : trace.events) {
        if (ev.t < last)
            bad.push_back("timestamp decreased: " + std::to_string(ev.t) + " after " +
                          std::to_string(last));
        if (ev.t > trace.horizon)
            bad.push_back("event past horizon at t=" + std::to_string(ev.t));
        last = std::max(last, ev.t);
    }
    return bad;
}

inline std::vector<std::string> check_fsm_legality(const EventTrace& trace) {
    std::vector<std::string> bad;
    std::map<std::string, HandlerState> state;
    for (const auto& ev : trace.events) {
        if (ev.kind != EventKind::StateTransition) continue;
        const auto& tp = std::get<TransitionPayload>(ev.payload);
        std::string key = job_key(ev.task, ev.job) + "/" + ev.node;
        HandlerState cur = state.count(key) ? state.at(key) : HandlerState::Created;
        if (tp.from != cur)
            bad.push_back(key + ": transition from " + to_string(tp.from) +
                          " but handler was " + to_string(cur));
        if (!transition_allowed(tp.from, tp.to))
            bad.push_back(key + ": illegal transition " + to_string(tp.from) + " -> " +
                          to_string(tp.to));
        state[key] = tp.to;
    }
    return bad;
}

/// No node becomes Ready before every predecessor completed (first Ready
/// transition only; the Blocked->Ready bounce inside an occupancy is
/// exempt).
inline std::vector<std::string> check_precedence(const EventTrace& trace) {
    std::vector<std::string> bad;
    auto jobs = collect_jobs(trace);
    std::map<std::string, const JobRecord*> by_key;
    for (const auto& j : jobs) by_key[job_key(j.task, j.index)] = &j;
    std::set<std::string> seen_ready;
    for (const auto& ev : trace.events) {
        if (ev.kind != EventKind::StateTransition) continue;
        const auto& tp = std::get<TransitionPayload>(ev.payload);
        if (tp.from != HandlerState::Created || tp.to != HandlerState::Ready) continue;
        std::string jk = job_key(ev.task, ev.job);
        const JobRecord* j = by_key.at(jk);
        for (const auto& [u, v] : j->edges) {
            if (v != ev.node) continue;
            auto c = j->completion.find(u);
            if (c == j->completion.end() || c->second > ev.t)
                bad.push_back(jk + "/" + ev.node + " ready at " + std::to_string(ev.t) +
                              " before predecessor " + u + " completed");
        }
    }
    return bad;
}

/// Replays every dispatch decision: at each Dispatch instant the chosen
/// entry must carry the minimum (deadline, release, node, job) key among
/// all entries that are Ready and not yet dispatched, with deadlines
/// tracked through Reassign events. Merged co-dispatches must share the
/// group and fit the gamma window.
inline std::vector<std::string> check_edf_dispatch(const EventTrace& trace) {
    std::vector<std::string> bad;
    struct NodeView {
        usec deadline = 0;
        usec release = 0;
        int height = 0;
        std::string group;
        NodeKind kind = NodeKind::Monolithic;
        bool ready = false;
        bool gone = false; // dispatched or settled
    };
    std::map<std::string, std::map<NodeId, NodeView>> view; // job key -> nodes
    for (const auto& ev : trace.events) {
        std::string jk = ev.job >= 0 ? job_key(ev.task, ev.job) : "";
        switch (ev.kind) {
        case EventKind::Release: {
            const auto& rp = std::get<ReleasePayload>(ev.payload);
            for (const auto& n : rp.nodes)
                view[jk][n.id] =
                    {n.abs_deadline, ev.t, n.height, n.share_group, n.kind, false, false};
            break;
        }
        case EventKind::StateTransition: {
            const auto& tp = std::get<TransitionPayload>(ev.payload);
            if (tp.from == HandlerState::Created && tp.to == HandlerState::Ready)
                view[jk][ev.node].ready = true;
            break;
        }
        case EventKind::Reassign: {
            const auto& rp = std::get<ReassignPayload>(ev.payload);
            for (const auto& [id, abs] : rp.new_absolute) view[jk][id].deadline = abs;
            break;
        }
        case EventKind::Drop: {
            auto it = view[jk].find(ev.node);
            if (it != view[jk].end()) it->second.gone = true;
            break;
        }
        case EventKind::Dispatch: {
            const auto& dp = std::get<DispatchPayload>(ev.payload);
            const NodeView& picked = view.at(jk).at(ev.node);
            auto picked_key = std::tie(picked.deadline, picked.release, ev.node, jk);
            for (const auto& [job, nodes] : view)
                for (const auto& [id, nv] : nodes) {
                    if (!nv.ready || nv.gone) continue;
                    auto key = std::tie(nv.deadline, nv.release, id, job);
                    if (key < picked_key)
                        bad.push_back("dispatch of " + jk + "/" + ev.node + " at t=" +
                                      std::to_string(ev.t) + " skips earlier-deadline " + job +
                                      "/" + id);
                }
            usec min_rel = dp.release, max_rel = dp.release;
            for (const auto& m : dp.members) {
                std::string mk = job_key(m.task, m.job);
                NodeView& mv = view.at(mk).at(m.node);
                if (dp.members.size() > 1) {
                    if (mv.kind != NodeKind::SharedEncoder || mv.group != picked.group)
                        bad.push_back("merged dispatch mixes groups at t=" +
                                      std::to_string(ev.t));
                    min_rel = std::min(min_rel, mv.release);
                    max_rel = std::max(max_rel, mv.release);
                }
                if (!mv.ready)
                    bad.push_back("dispatched non-ready node " + mk + "/" + m.node);
                mv.gone = true;
            }
            if (dp.members.size() > 1 && max_rel - min_rel > trace.gamma)
                bad.push_back("merged dispatch exceeds gamma window at t=" +
                              std::to_string(ev.t));
            break;
        }
        default: break;
        }
    }
    return bad;
}

/// Accelerator occupancy intervals (decision + execution, and sync costs)
/// must never overlap.
inline std::vector<std::string> check_non_preemption(const EventTrace& trace) {
    std::vector<std::string> bad;
    std::vector<std::pair<usec, usec>> busy;
    for (const auto& ev : trace.events) {
        if (ev.kind == EventKind::Dispatch) {
            const auto& dp = std::get<DispatchPayload>(ev.payload);
            busy.emplace_back(ev.t, ev.t + dp.decision_cost + dp.blocking + dp.duration);
        } else if (ev.kind == EventKind::Sync) {
            const auto& sp = std::get<SyncPayload>(ev.payload);
            if (sp.cost > 0) busy.emplace_back(ev.t, ev.t + sp.cost);
        }
    }
    std::sort(busy.begin(), busy.end());
    for (std::size_t i = 1; i < busy.size(); ++i)
        if (busy[i].first < busy[i - 1].second)
            bad.push_back("overlapping occupancy at t=" + std::to_string(busy[i].first));
    return bad;
}

/// Work conservation: whenever some entry is ready and no sync/decision/
/// execution cost is being paid, the accelerator must not sit idle.
inline std::vector<std::string> check_work_conservation(const EventTrace& trace) {
    std::vector<std::string> bad;
    // Ready spans: first Ready transition until dispatch/drop.
    std::map<std::string, usec> ready_since;
    std::vector<std::pair<usec, usec>> ready_spans;
    std::vector<std::pair<usec, usec>> busy;
    for (const auto& ev : trace.events) {
        std::string key = job_key(ev.task, ev.job) + "/" + ev.node;
        switch (ev.kind) {
        case EventKind::StateTransition: {
            const auto& tp = std::get<TransitionPayload>(ev.payload);
            if (tp.from == HandlerState::Created && tp.to == HandlerState::Ready)
                ready_since[key] = ev.t;
            break;
        }
        case EventKind::Dispatch: {
            const auto& dp = std::get<DispatchPayload>(ev.payload);
            for (const auto& m : dp.members) {
                std::string mk = job_key(m.task, m.job) + "/" + m.node;
                auto it = ready_since.find(mk);
                if (it != ready_since.end()) {
                    ready_spans.emplace_back(it->second, ev.t);
                    ready_since.erase(it);
                }
            }
            busy.emplace_back(ev.t, ev.t + dp.decision_cost + dp.blocking + dp.duration);
            break;
        }
        case EventKind::Drop: {
            auto it = ready_since.find(key);
            if (it != ready_since.end()) {
                ready_spans.emplace_back(it->second, ev.t);
                ready_since.erase(it);
            }
            break;
        }
        case EventKind::Sync: {
            const auto& sp = std::get<SyncPayload>(ev.payload);
            if (sp.cost > 0) busy.emplace_back(ev.t, ev.t + sp.cost);
            break;
        }
        default: break;
        }
    }
    // Union of ready spans minus union of busy spans must be empty.
    std::sort(ready_spans.begin(), ready_spans.end());
    std::sort(busy.begin(), busy.end());
    std::vector<std::pair<usec, usec>> merged;
    for (const auto& s : ready_spans) {
        if (s.first >= s.second) continue;
        if (!merged.empty() && s.first <= merged.back().second)
            merged.back().second = std::max(merged.back().second, s.second);
        else
            merged.push_back(s);
    }
    std::size_t bi = 0;
    for (const auto& [rs, re] : merged) {
        usec cur = rs;
        while (cur < re) {
            while (bi < busy.size() && busy[bi].second <= cur) ++bi;
            if (bi >= busy.size() || busy[bi].first > cur) {
                usec gap_end = (bi < busy.size()) ? std::min(busy[bi].first, re) : re;
                bad.push_back("idle while ready in [" + std::to_string(cur) + "," +
                              std::to_string(gap_end) + ")");
                cur = gap_end;
            } else {
                cur = busy[bi].second;
            }
        }
    }
    return bad;
}

/// Reassignment events must stay level-consistent: equal heights share one
/// absolute deadline, deeper levels never precede shallower ones, and the
/// deepest unfinished level stays anchored at the job's end-to-end
/// deadline.
inline std::vector<std::string> check_reassign_consistency(const EventTrace& trace) {
    std::vector<std::string> bad;
    std::map<std::string, std::map<NodeId, int>> heights;
    std::map<std::string, usec> e2e;
    for (const auto& ev : trace.events) {
        if (ev.kind == EventKind::Release) {
            const auto& rp = std::get<ReleasePayload>(ev.payload);
            std::string jk = job_key(ev.task, ev.job);
            e2e[jk] = rp.e2e_deadline;
            for (const auto& n : rp.nodes) heights[jk][n.id] = n.height;
            continue;
        }
        if (ev.kind != EventKind::Reassign) continue;
        std::string jk = job_key(ev.task, ev.job);
        const auto& rp = std::get<ReassignPayload>(ev.payload);
        std::map<int, usec> per_level;
        for (const auto& [id, abs] : rp.new_absolute) {
            int h = heights.at(jk).at(id);
            auto [it, fresh] = per_level.emplace(h, abs);
            if (!fresh && it->second != abs)
                bad.push_back(jk + ": level " + std::to_string(h) +
                              " re-assigned two different deadlines at t=" +
                              std::to_string(ev.t));
        }
        usec prev = 0;
        for (const auto& [h, abs] : per_level) {
            if (abs < prev)
                bad.push_back(jk + ": deeper level earlier than shallower at t=" +
                              std::to_string(ev.t));
            prev = abs;
        }
        if (!per_level.empty() && per_level.rbegin()->second != e2e.at(jk))
            bad.push_back(jk + ": deepest re-assigned level not anchored at the job deadline"
                          " at t=" + std::to_string(ev.t));
    }
    return bad;
}

/// Every dispatched node instance eventually completes or drops.
inline std::vector<std::string> check_dispatch_bracketing(const EventTrace& trace) {
    std::vector<std::string> bad;
    std::set<std::string> open;
    for (const auto& ev : trace.events) {
        if (ev.kind == EventKind::Dispatch) {
            for (const auto& m : std::get<DispatchPayload>(ev.payload).members)
                open.insert(job_key(m.task, m.job) + "/" + m.node);
        } else if (ev.kind == EventKind::Complete || ev.kind == EventKind::Drop) {
            open.erase(job_key(ev.task, ev.job) + "/" + ev.node);
        }
    }
    for (const auto& key : open) bad.push_back("dispatch without completion/drop: " + key);
    return bad;
}

inline std::vector<std::string> check_all_invariants(const EventTrace& trace) {
    std::vector<std::string> bad;
    auto collect = [&](std::vector<std::string> v) {
        bad.insert(bad.end(), v.begin(), v.end());
    };
    collect(check_event_order(trace));
    collect(check_fsm_legality(trace));
    collect(check_precedence(trace));
    collect(check_edf_dispatch(trace));
    collect(check_non_preemption(trace));
    collect(check_work_conservation(trace));
    collect(check_dispatch_bracketing(trace));
    collect(check_reassign_consistency(trace));
    return bad;
}

} // namespace red
