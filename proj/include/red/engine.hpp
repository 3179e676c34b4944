#pragma once

#include <algorithm>
#include <deque>
#include <map>
#include <memory>
#include <queue>
#include <set>
#include <string>
#include <vector>

#include "red/scenario.hpp"
#include "red/scheduler.hpp"
#include "red/trace.hpp"

namespace red {

/// Discrete-event simulator: advances virtual time over one non-preemptive
/// accelerator, applies periodic releases and DAG mutations, samples
/// execution times, dispatches by EDF over intermediate absolute deadlines,
/// and emits the full event trace. Deterministic for a fixed
/// (scenario, config, seed) triple.
class Engine {
public:
    Engine(Scenario scenario, SchedulerConfig config)
        : sc_(std::move(scenario)), cfg_(std::move(config)) {}

    EventTrace run() {
        validate();
        init();
        while (!queue_.empty() && queue_.top().t <= sc_.horizon) {
            QEvent ev = queue_.top();
            queue_.pop();
            now_ = ev.t;
            handle(ev);
            // Dispatch only after all simultaneous events have registered.
            if (queue_.empty() || queue_.top().t > now_) try_dispatch();
        }
        finish_at_horizon();
        trace_.total_busy = trace_.total_exec + trace_.total_sync_cost +
                            trace_.total_decision_cost + total_blocking_;
        return std::move(trace_);
    }

private:
    struct NodeRt {
        TraceNode info;
        std::vector<NodeId> succs;
        int preds_left = 0;
        HandlerState state = HandlerState::Created;
        bool settled = false;
        usec exec = 0; // sampled actual duration (interference applied)
        usec dispatched_at = -1;
        usec completed_at = -1;
    };

    struct JobRt {
        std::string task;
        std::int64_t index = 0;
        usec release = 0;
        usec deadline_abs = 0;
        std::map<NodeId, NodeRt> nodes;
        HeightMap heights;
        std::map<int, int> level_unfinished;
        int unfinished = 0;
        bool gated = false;
        bool live = true;
        std::vector<JobRt*> waiters; // cross-dependency consumers

        std::string key() const { return job_key(task, index); }
    };

    enum EvType { EvRelease, EvComplete, EvTick, EvMutation, EvWake, EvResume };

    struct QEvent {
        usec t = 0;
        std::uint64_t seq = 0;
        EvType type = EvRelease;
        int a = 0;          // task / mutation index
        std::int64_t b = 0; // job index / occupancy id
    };

    struct QCmp {
        bool operator()(const QEvent& x, const QEvent& y) const {
            return std::tie(x.t, x.seq) > std::tie(y.t, y.seq);
        }
    };

    struct Occupancy {
        std::int64_t id = 0;
        std::vector<std::pair<JobRt*, NodeId>> members;
        usec exec_dur = 0;
        usec started = 0;
    };

    struct SyncRequest {
        std::string reason;
        usec scheduled_at = 0;
    };

    // --- setup ---------------------------------------------------------

    void validate() {
        validate_scenario(sc_);
        if (cfg_.effective_sync() == SyncMode::Periodic && cfg_.sync_interval <= 0)
            throw ScenarioError("periodic sync needs a positive interval");
        if (cfg_.sync_cost < 0 || cfg_.decision_cost < 0 || cfg_.blocking_time < 0)
            throw ScenarioError("scheduler costs must be >= 0");
        // Mutations must apply cleanly in order; catch bad scripts up front.
        std::map<std::string, DagTask> cur;
        for (const auto& t : sc_.tasks) cur[t.dag.task_id] = t.dag;
        auto muts = sc_.mutations;
        std::stable_sort(muts.begin(), muts.end(),
                         [](const TimedMutation& a, const TimedMutation& b) {
                             return a.mutation.effective_time < b.mutation.effective_time;
                         });
        for (const auto& m : muts) {
            try {
                cur[m.task] = apply_mutation(cur.at(m.task), m.mutation);
            } catch (const InvalidMutation& e) {
                throw ScenarioError(std::string("mutation script invalid: ") + e.what());
            }
        }
    }

    void init() {
        trace_.scenario = sc_.name;
        trace_.policy = to_string(cfg_.policy);
        trace_.sync_mode = to_string(cfg_.effective_sync());
        trace_.seed = sc_.seed;
        trace_.horizon = sc_.horizon;
        trace_.gamma = sc_.refine.gamma;
        for (std::size_t i = 0; i < sc_.tasks.size(); ++i) {
            current_dag_[sc_.tasks[i].dag.task_id] = sc_.tasks[i].dag;
            if (sc_.tasks[i].release_offset < sc_.horizon)
                push(sc_.tasks[i].release_offset, EvRelease, static_cast<int>(i), 0);
        }
        auto muts = sc_.mutations;
        std::stable_sort(muts.begin(), muts.end(),
                         [](const TimedMutation& a, const TimedMutation& b) {
                             return a.mutation.effective_time < b.mutation.effective_time;
                         });
        mutations_ = std::move(muts);
        for (std::size_t i = 0; i < mutations_.size(); ++i)
            push(mutations_[i].mutation.effective_time, EvMutation, static_cast<int>(i), 0);
        for (const auto& f : sc_.faults) faults_.insert(f.task + "#" + std::to_string(f.job_index) + "/" + f.node);
    }

    // --- event handling ------------------------------------------------

    void handle(const QEvent& ev) {
        switch (ev.type) {
        case EvRelease: on_release(ev.a, ev.b); break;
        case EvComplete: on_complete(ev.b); break;
        case EvTick: on_tick(); break;
        case EvMutation: on_mutation(ev.a); break;
        case EvWake: break; // dispatch attempt follows
        case EvResume: on_resume(ev.b); break;
        }
    }

    void on_release(int task_idx, std::int64_t index) {
        const TaskEntry& entry = sc_.tasks[static_cast<std::size_t>(task_idx)];
        const DagTask& coarse = current_dag_.at(entry.dag.task_id);
        DagTask graph = cfg_.refines() ? split_mimonet_nodes(coarse, sc_.refine) : coarse;

        auto job = std::make_unique<JobRt>();
        job->task = coarse.task_id;
        job->index = index;
        job->release = now_;
        job->deadline_abs = now_ + coarse.end_to_end_deadline;
        job->heights = compute_heights(graph);
        DeadlineMap dm = absolutize(
            assign_proportional(graph, job->heights, cfg_.level_weight), job->heights, now_);

        ReleasePayload rp;
        rp.e2e_deadline = job->deadline_abs;
        rp.edges = graph.edges;
        std::sort(rp.edges.begin(), rp.edges.end());
        std::map<NodeId, std::vector<NodeId>> succs;
        std::map<NodeId, int> preds;
        for (const auto& n : graph.nodes) {
            succs[n.id];
            preds[n.id] = 0;
        }
        for (const auto& [u, v] : graph.edges) {
            succs[u].push_back(v);
            ++preds[v];
        }
        for (const auto& n : graph.nodes) {
            NodeRt rt;
            rt.info = {n.id, n.cost_estimate, dm.absolute.at(n.id), job->heights.at(n.id),
                       n.kind, n.share_group.value_or("")};
            rt.succs = succs.at(n.id);
            std::sort(rt.succs.begin(), rt.succs.end());
            rt.preds_left = preds.at(n.id);
            rt.exec = actual_duration(*job, n);
            ++job->level_unfinished[rt.info.height];
            ++job->unfinished;
            rp.nodes.push_back(rt.info);
            job->nodes.emplace(n.id, std::move(rt));
        }

        JobRt* jp = job.get();
        jobs_.push_back(std::move(job));
        by_task_[jp->task].push_back(jp);
        job_by_key_[jp->key()] = jp;
        live_order_.push_back(jp);
        ++live_jobs_;

        resolve_gate(*jp);
        rp.e2e_deadline = jp->deadline_abs;
        rp.nodes.clear();
        for (auto& [id, rt] : jp->nodes) rp.nodes.push_back(rt.info);
        emit(EventKind::Release, jp->task, jp->index, "", rp);
        if (!jp->gated)
            for (auto& [id, rt] : jp->nodes)
                if (rt.preds_left == 0) to_ready(*jp, id);

        bool more = entry.repeats == 0 || index + 1 < entry.repeats;
        if (more && coarse.period) {
            usec next = now_ + *coarse.period;
            if (next < sc_.horizon) push(next, EvRelease, task_idx, index + 1);
        }
        arm_tick();
    }

    // Freshest-sample gating: wait for the latest producer job released at
    // or before this one, if it is still in flight. Deadline-inheriting
    // dependencies re-anchor the consumer's deadline at that sample's
    // release and re-spread the node budgets over what is left.
    void resolve_gate(JobRt& job) {
        for (const auto& dep : sc_.cross_deps) {
            if (dep.consumer_task != job.task) continue;
            auto it = by_task_.find(dep.producer_task);
            if (it == by_task_.end()) continue;
            JobRt* latest = nullptr;
            for (JobRt* p : it->second)
                if (p->release <= job.release && p != &job) latest = p;
            if (!latest) continue;
            if (latest->unfinished > 0) {
                job.gated = true;
                latest->waiters.push_back(&job);
            }
            if (dep.inherit_deadline) {
                usec relative = job.deadline_abs - job.release;
                // Clamp at the release: a node deadline never precedes it.
                usec anchored = std::max(latest->release + relative, job.release);
                if (anchored < job.deadline_abs) {
                    job.deadline_abs = anchored;
                    ProgressSnapshot snap;
                    snap.now = job.release;
                    snap.job_release = job.release;
                    for (auto& [id, rt] : job.nodes)
                        snap.remaining_cost[id] = rt.info.cost_estimate;
                    auto res = reassign(job.heights, snap, job.deadline_abs, cfg_.level_weight);
                    for (auto& [id, rt] : job.nodes)
                        rt.info.abs_deadline = res ? res->absolute.at(id) : job.deadline_abs;
                }
            }
        }
    }

    void on_complete(std::int64_t occ_id) {
        if (!occ_ || occ_->id != occ_id) return;
        Occupancy occ = std::move(*occ_);
        occ_.reset();
        trace_.total_exec += occ.exec_dur;
        std::set<JobRt*> affected;
        std::vector<std::pair<JobRt*, int>> finished_levels;
        for (auto& [jp, id] : occ.members) {
            NodeRt& rt = jp->nodes.at(id);
            if (faults_.count(jp->key() + "/" + id)) {
                transition(*jp, id, HandlerState::FailedOom);
                emit(EventKind::Drop, jp->task, jp->index, id, DropPayload{"oom"});
                settle(*jp, id);
                drop_orphans(*jp, id);
                if (cfg_.effective_sync() == SyncMode::OnDemand)
                    sync_q_.push_back({"state-transition", now_});
                affected.insert(jp);
                continue;
            }
            transition(*jp, id, HandlerState::Completed);
            rt.completed_at = now_;
            const bool on_time = now_ <= rt.info.abs_deadline;
            emit(EventKind::Complete, jp->task, jp->index, id,
                 CompletePayload{rt.dispatched_at, occ.exec_dur, rt.info.abs_deadline, on_time});
            if (!on_time)
                emit(EventKind::Miss, jp->task, jp->index, id,
                     MissPayload{rt.info.abs_deadline, now_});
            settle(*jp, id);
            if (jp->level_unfinished.at(rt.info.height) == 0)
                finished_levels.emplace_back(jp, rt.info.height);
            for (const auto& s : rt.succs) {
                NodeRt& nx = jp->nodes.at(s);
                if (nx.settled) continue;
                if (--nx.preds_left == 0 && !jp->gated && nx.state == HandlerState::Created)
                    to_ready(*jp, s);
            }
            affected.insert(jp);
        }
        if (cfg_.reassigns())
            for (JobRt* jp : sorted(affected))
                if (jp->unfinished > 0) do_reassign(*jp);
        if (cfg_.effective_sync() == SyncMode::OnDemand)
            for (auto& [jp, level] : finished_levels) {
                (void)jp;
                (void)level;
                sync_q_.push_back({"level-complete", now_});
            }
    }

    void on_tick() {
        tick_armed_ = false;
        if (live_jobs_ > 0) {
            sync_q_.push_back({"tick", now_});
            usec next = now_ + cfg_.sync_interval;
            if (next < sc_.horizon) {
                push(next, EvTick, 0, 0);
                tick_armed_ = true;
            }
        }
    }

    void on_mutation(int idx) {
        const TimedMutation& m = mutations_[static_cast<std::size_t>(idx)];
        current_dag_[m.task] = apply_mutation(current_dag_.at(m.task), m.mutation);
        emit(EventKind::Mutation, m.task, -1, "", MutationPayload{m.mutation.describe()});
        // A structure change is a scheduling point: live jobs re-spread
        // their residual budgets (their own snapshots keep their shape).
        if (cfg_.reassigns())
            for (auto& jp : jobs_)
                if (jp->live && jp->unfinished > 0) do_reassign(*jp);
    }

    void on_resume(std::int64_t occ_id) {
        if (!occ_ || occ_->id != occ_id) return;
        for (auto& [jp, id] : occ_->members) {
            transition(*jp, id, HandlerState::Ready);
            transition(*jp, id, HandlerState::Running);
        }
    }

    // --- dispatching ----------------------------------------------------

    void try_dispatch() {
        while (busy_until_ <= now_) {
            if (!sync_q_.empty()) {
                SyncRequest rq = sync_q_.front();
                sync_q_.pop_front();
                emit(EventKind::Sync, "", -1, "",
                     SyncPayload{trace_.sync_mode, cfg_.sync_cost, rq.reason, rq.scheduled_at});
                trace_.total_sync_cost += cfg_.sync_cost;
                if (cfg_.sync_cost > 0) {
                    busy_until_ = now_ + cfg_.sync_cost;
                    push(busy_until_, EvWake, 0, 0);
                    return;
                }
                continue;
            }
            std::erase_if(live_order_, [](JobRt* j) { return !j->live; });
            sweep_drops();
            std::vector<ReadyEntry> ready;
            for (JobRt* jp : live_order_) {
                if (!jp->live) continue;
                for (auto& [id, rt] : jp->nodes)
                    if (rt.state == HandlerState::Ready)
                        ready.push_back({id, jp->key(), rt.info.abs_deadline, jp->release});
            }
            if (ready.empty()) return;
            ReadyEntry pick = next_task_to_schedule(ready);
            dispatch(pick, ready);
            return;
        }
    }

    void dispatch(const ReadyEntry& pick, const std::vector<ReadyEntry>& ready) {
        JobRt* owner = job_by_key_.count(pick.job) ? job_by_key_.at(pick.job) : nullptr;
        if (!owner) throw IllegalState("dispatch: unknown job " + pick.job);
        NodeRt& picked = owner->nodes.at(pick.node);

        Occupancy occ;
        occ.id = ++occ_seq_;
        occ.started = now_;
        if (picked.info.kind == NodeKind::SharedEncoder && cfg_.refines()) {
            // Runtime DynamicMerge over the ready set: dispatch the whole
            // gamma-window group the picked encoder belongs to.
            std::vector<MergeCandidate> cands;
            for (const auto& e : ready) {
                JobRt* jp = job_by_key_.at(e.job);
                const NodeRt& rt = jp->nodes.at(e.node);
                if (rt.info.kind == NodeKind::SharedEncoder &&
                    rt.info.share_group == picked.info.share_group)
                    cands.push_back({e.job + "|" + e.node, jp->release, NodeKind::SharedEncoder,
                                     rt.info.share_group, rt.exec});
            }
            auto groups = dynamic_merge(cands, sc_.refine);
            const std::string pick_id = pick.job + "|" + pick.node;
            for (const auto& g : groups) {
                if (std::find(g.members.begin(), g.members.end(), pick_id) == g.members.end())
                    continue;
                for (const auto& m : g.members) {
                    auto bar = m.find('|');
                    JobRt* jp = job_by_key_.at(m.substr(0, bar));
                    occ.members.emplace_back(jp, m.substr(bar + 1));
                }
                occ.exec_dur = g.merged_cost;
                break;
            }
        } else {
            occ.members.emplace_back(owner, pick.node);
            occ.exec_dur = picked.exec;
        }

        DispatchPayload dp;
        dp.abs_deadline = pick.abs_deadline;
        dp.release = pick.release;
        dp.duration = occ.exec_dur;
        dp.decision_cost = cfg_.decision_cost;
        dp.blocking = cfg_.blocking_time;
        for (auto& [jp, id] : occ.members) dp.members.push_back({jp->task, jp->index, id});
        emit(EventKind::Dispatch, owner->task, owner->index, pick.node, dp);
        for (auto& [jp, id] : occ.members) {
            transition(*jp, id, HandlerState::Running);
            jp->nodes.at(id).dispatched_at = now_;
        }
        trace_.total_decision_cost += cfg_.decision_cost;
        usec start_exec = now_ + cfg_.decision_cost;
        if (cfg_.blocking_time > 0) {
            for (auto& [jp, id] : occ.members) transition(*jp, id, HandlerState::Blocked);
            if (cfg_.effective_sync() == SyncMode::OnDemand)
                sync_q_.push_back({"state-transition", now_});
            total_blocking_ += cfg_.blocking_time;
            start_exec += cfg_.blocking_time;
            push(start_exec, EvResume, 0, occ.id);
        }
        busy_until_ = start_exec + occ.exec_dur;
        occ_ = std::move(occ);
        push(busy_until_, EvComplete, 0, occ_->id);
    }

    void sweep_drops() {
        if (cfg_.drop_policy == DropPolicy::NeverDrop) return;
        std::vector<std::pair<JobRt*, NodeId>> expired;
        for (JobRt* jp : live_order_) {
            if (!jp->live) continue;
            for (auto& [id, rt] : jp->nodes) {
                if (rt.state != HandlerState::Ready) continue;
                ReadyEntry e{id, jp->key(), rt.info.abs_deadline, jp->release};
                if (enforce_drop_policy(cfg_.drop_policy, e, now_) == DropDecision::Drop)
                    expired.push_back({jp, id});
            }
        }
        for (auto& [jp, id] : expired) {
            NodeRt& rt = jp->nodes.at(id);
            if (rt.settled) continue; // already cancelled via its job
            transition(*jp, id, HandlerState::Dropped);
            emit(EventKind::Drop, jp->task, jp->index, id, DropPayload{"deadline"});
            settle(*jp, id);
            drop_orphans(*jp, id);
            if (cfg_.drop_policy == DropPolicy::DropJobOnMiss) cancel_job(*jp, "job-cancel");
        }
    }

    // Descendants of a dead node can never run; settle them as dropped.
    void drop_orphans(JobRt& job, const NodeId& dead) {
        for (const auto& s : job.nodes.at(dead).succs) {
            NodeRt& rt = job.nodes.at(s);
            if (rt.settled) continue;
            if (rt.state == HandlerState::Ready) transition(job, s, HandlerState::Dropped);
            emit(EventKind::Drop, job.task, job.index, s, DropPayload{"orphaned"});
            settle(job, s);
            drop_orphans(job, s);
        }
    }

    void cancel_job(JobRt& job, const std::string& reason) {
        std::vector<NodeId> open;
        for (auto& [id, rt] : job.nodes)
            if (!rt.settled) open.push_back(id);
        for (const auto& id : open) {
            NodeRt& rt = job.nodes.at(id);
            if (rt.settled) continue;
            if (rt.state == HandlerState::Ready || rt.state == HandlerState::Running)
                transition(job, id, HandlerState::Dropped);
            // Created handlers have no legal path to Dropped; the drop event
            // records the cancellation and the handler is discarded.
            emit(EventKind::Drop, job.task, job.index, id, DropPayload{reason});
            settle(job, id);
        }
    }

    // --- bookkeeping ----------------------------------------------------

    void to_ready(JobRt& job, const NodeId& id) { transition(job, id, HandlerState::Ready); }

    void transition(JobRt& job, const NodeId& id, HandlerState to) {
        NodeRt& rt = job.nodes.at(id);
        if (!transition_allowed(rt.state, to))
            throw IllegalState("illegal transition " + std::string(to_string(rt.state)) +
                               " -> " + to_string(to) + " for " + job.key() + "/" + id);
        emit(EventKind::StateTransition, job.task, job.index, id,
             TransitionPayload{rt.state, to});
        rt.state = to;
    }

    void settle(JobRt& job, const NodeId& id) {
        NodeRt& rt = job.nodes.at(id);
        if (rt.settled) return;
        rt.settled = true;
        --job.unfinished;
        --job.level_unfinished.at(rt.info.height);
        if (job.unfinished == 0) {
            job.live = false;
            --live_jobs_;
            for (JobRt* w : job.waiters)
                if (w->gated) ungate(*w);
            job.waiters.clear();
        }
    }

    void ungate(JobRt& job) {
        job.gated = false;
        for (auto& [id, rt] : job.nodes)
            if (!rt.settled && rt.preds_left == 0 && rt.state == HandlerState::Created)
                to_ready(job, id);
    }

    void do_reassign(JobRt& job) {
        ProgressSnapshot snap;
        snap.now = now_;
        snap.job_release = job.release;
        for (auto& [id, rt] : job.nodes) {
            if (rt.state == HandlerState::Completed) {
                snap.completed.insert(id);
            } else if (!rt.settled) {
                usec rem = rt.info.cost_estimate;
                if (rt.state == HandlerState::Running || rt.state == HandlerState::Blocked)
                    rem = std::max<usec>(rt.info.cost_estimate - (now_ - rt.dispatched_at), 1);
                snap.remaining_cost[id] = rem;
            }
        }
        if (snap.remaining_cost.empty()) return;
        auto res = reassign(job.heights, snap, job.deadline_abs, cfg_.level_weight);
        if (!res) return; // budget exhausted; stale deadlines stand, drop policy decides
        ReassignPayload pl;
        for (const auto& [id, abs] : res->absolute) {
            job.nodes.at(id).info.abs_deadline = abs;
            pl.new_absolute[id] = abs;
        }
        emit(EventKind::Reassign, job.task, job.index, "", pl);
    }

    // Samples the node instance's actual duration. A split pair draws one
    // duration for its pre-split node and divides it by the configured
    // ratio, so encoder + decoder actuals always sum to the whole.
    usec actual_duration(const JobRt& job, const NodeSpec& n) {
        const bool enc = n.id.ends_with(".enc"), dec = n.id.ends_with(".dec");
        if (enc || dec) {
            NodeId original = n.id.substr(0, n.id.size() - 4);
            usec whole = sample_cost(sc_.exec, sc_.seed, job.task, job.index, original,
                                     whole_estimate(job.task, original));
            whole = scale(whole);
            usec enc_part = whole * sc_.refine.split_pct(n.share_group.value_or("")) / 100;
            return std::max<usec>(enc ? enc_part : whole - enc_part, 1);
        }
        return std::max<usec>(
            scale(sample_cost(sc_.exec, sc_.seed, job.task, job.index, n.id, n.cost_estimate)),
            1);
    }

    usec scale(usec v) const {
        if (sc_.interference == 1.0) return v;
        return static_cast<usec>(std::llround(static_cast<double>(v) * sc_.interference));
    }

    usec whole_estimate(const std::string& task, const NodeId& original) const {
        const DagTask& dag = current_dag_.at(task);
        const NodeSpec* n = dag.find(original);
        return n ? n->cost_estimate : 1;
    }

    void arm_tick() {
        if (tick_armed_ || cfg_.effective_sync() != SyncMode::Periodic) return;
        if (cfg_.sync_interval <= 0) return;
        usec next = (now_ / cfg_.sync_interval + 1) * cfg_.sync_interval;
        if (next < sc_.horizon) {
            push(next, EvTick, 0, 0);
            tick_armed_ = true;
        }
    }

    void finish_at_horizon() {
        now_ = sc_.horizon;
        for (auto& jp : jobs_)
            if (jp->live) cancel_job(*jp, "horizon");
    }

    template <typename T> std::vector<JobRt*> sorted(const std::set<T>& s) {
        std::vector<JobRt*> v(s.begin(), s.end());
        std::sort(v.begin(), v.end(), [](JobRt* a, JobRt* b) {
            return std::tie(a->task, a->index) < std::tie(b->task, b->index);
        });
        return v;
    }

    void push(usec t, EvType type, int a, std::int64_t b) {
        queue_.push({t, seq_++, type, a, b});
    }

    void emit(EventKind kind, const std::string& task, std::int64_t job, const NodeId& node,
              EventPayload payload) {
        trace_.events.push_back({now_, kind, task, job, node, std::move(payload)});
    }

    // --- state -----------------------------------------------------------

    Scenario sc_;
    SchedulerConfig cfg_;
    EventTrace trace_;
    std::priority_queue<QEvent, std::vector<QEvent>, QCmp> queue_;
    std::uint64_t seq_ = 0;
    usec now_ = 0;
    usec busy_until_ = 0;
    usec total_blocking_ = 0;
    std::optional<Occupancy> occ_;
    std::int64_t occ_seq_ = 0;
    std::deque<SyncRequest> sync_q_;
    bool tick_armed_ = false;
    int live_jobs_ = 0;
    std::vector<std::unique_ptr<JobRt>> jobs_;
    std::vector<JobRt*> live_order_; // release order, compacted lazily
    std::map<std::string, std::vector<JobRt*>> by_task_;
    std::map<std::string, JobRt*> job_by_key_;
    std::map<std::string, DagTask> current_dag_;
    std::vector<TimedMutation> mutations_;
    std::set<std::string> faults_;
};

/// Algorithm-2-style entry point: assignment, refinement, synchronizer
/// setup and the dispatch loop, driven over the scenario's virtual time.
inline EventTrace run(const Scenario& scenario, const SchedulerConfig& config) {
    return Engine(scenario, config).run();
}

} // namespace red
