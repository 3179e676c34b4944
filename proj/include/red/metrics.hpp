#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "red/trace.hpp"

namespace red {

/// QoE scoring knobs: lambda is the latency-tolerance hyperparameter; the
/// deadline overshoot is expressed in time_unit before entering the score
/// (the formula is unit-sensitive; seconds by default).
struct QoEParams {
    double lambda = 1.0;
    usec time_unit = 1'000'000; // one second
};

/// QoE of one task instance: 1 / (1 + e^lambda * max(0, C_r - S_r)).
/// Exactly 1 when the execution time fits the slack; strictly decreasing
/// in the overshoot and, for positive overshoot, in lambda.
inline double qoe_score(usec exec_time, usec slack, const QoEParams& p) {
    if (exec_time <= slack) return 1.0;
    double overshoot = static_cast<double>(exec_time - slack) / static_cast<double>(p.time_unit);
    return 1.0 / (1.0 + std::exp(p.lambda) * overshoot);
}

/// One job reconstructed from a trace. Traces are self-contained; this is
/// the shared substrate for every metric and replay check.
struct JobRecord {
    std::string task;
    std::int64_t index = 0;
    usec release = 0;
    usec e2e_deadline = 0; // absolute
    std::map<NodeId, TraceNode> nodes;
    std::vector<Edge> edges;
    std::map<NodeId, usec> completion;
    std::map<NodeId, CompletePayload> complete_info;
    std::map<NodeId, std::string> dropped; // node -> reason
    bool horizon_cut = false;

    bool completed() const { return completion.size() == nodes.size(); }
    bool was_dropped() const { return !dropped.empty(); }
    std::optional<usec> finish() const {
        if (!completed()) return std::nullopt;
        usec f = release;
        for (const auto& [id, t] : completion) f = std::max(f, t);
        return f;
    }
    std::optional<usec> response() const {
        auto f = finish();
        if (!f) return std::nullopt;
        return *f - release;
    }
};

inline std::vector<JobRecord> collect_jobs(const EventTrace& trace) {
    std::map<std::string, JobRecord> jobs;
    std::vector<std::string> order;
    for (const auto& ev : trace.events) {
        if (ev.kind == EventKind::Sync || ev.kind == EventKind::Mutation) continue;
        if (ev.job < 0) continue;
        std::string key = job_key(ev.task, ev.job);
        auto it = jobs.find(key);
        if (ev.kind == EventKind::Release) {
            if (it != jobs.end()) throw MalformedTrace("duplicate release for " + key);
            const auto& rp = std::get<ReleasePayload>(ev.payload);
            JobRecord r;
            r.task = ev.task;
            r.index = ev.job;
            r.release = ev.t;
            r.e2e_deadline = rp.e2e_deadline;
            for (const auto& n : rp.nodes) r.nodes[n.id] = n;
            r.edges = rp.edges;
            jobs.emplace(key, std::move(r));
            order.push_back(key);
            continue;
        }
        if (it == jobs.end()) throw MalformedTrace("event references unreleased job " + key);
        JobRecord& r = it->second;
        switch (ev.kind) {
        case EventKind::Complete:
            r.completion[ev.node] = ev.t;
            r.complete_info[ev.node] = std::get<CompletePayload>(ev.payload);
            break;
        case EventKind::Drop: {
            const auto& dp = std::get<DropPayload>(ev.payload);
            r.dropped[ev.node] = dp.reason;
            if (dp.reason == "horizon") r.horizon_cut = true;
            break;
        }
        default: break;
        }
    }
    std::vector<JobRecord> out;
    out.reserve(order.size());
    for (const auto& key : order) out.push_back(std::move(jobs.at(key)));
    return out;
}

/// Released / missed / dropped instance counts. A dropped instance counts
/// only in the drop rate; the categories partition the released set.
struct Rates {
    std::int64_t released = 0;
    std::int64_t missed = 0;
    std::int64_t dropped = 0;

    double miss_rate() const { return released ? double(missed) / double(released) : 0.0; }
    double drop_rate() const { return released ? double(dropped) / double(released) : 0.0; }
    double combined() const { return miss_rate() + drop_rate(); }
    double on_time_rate() const {
        return released ? double(released - missed - dropped) / double(released) : 0.0;
    }

    Rates& operator+=(const Rates& o) {
        released += o.released;
        missed += o.missed;
        dropped += o.dropped;
        return *this;
    }
};

struct MissDropReport {
    std::map<std::string, Rates> job_rates;                    // per task, job level
    std::map<std::string, std::map<NodeId, Rates>> node_rates; // per task, per node
    Rates overall_jobs;
    Rates overall_nodes;
};

/// Job-level: a job misses when it completes after release + D and drops
/// when any of its instances was abandoned. Node-level: an instance misses
/// when it completes after its (current) intermediate absolute deadline.
inline MissDropReport miss_drop_rates(const std::vector<JobRecord>& jobs) {
    MissDropReport rep;
    for (const auto& j : jobs) {
        Rates& jr = rep.job_rates[j.task];
        ++jr.released;
        if (j.was_dropped() || !j.completed()) {
            ++jr.dropped;
        } else if (*j.finish() > j.e2e_deadline) {
            ++jr.missed;
        }
        for (const auto& [id, n] : j.nodes) {
            Rates& nr = rep.node_rates[j.task][id];
            ++nr.released;
            auto c = j.complete_info.find(id);
            if (c != j.complete_info.end()) {
                if (!c->second.on_time) ++nr.missed;
            } else {
                ++nr.dropped;
            }
        }
    }
    for (const auto& [task, r] : rep.job_rates) rep.overall_jobs += r;
    for (const auto& [task, m] : rep.node_rates)
        for (const auto& [id, r] : m) rep.overall_nodes += r;
    return rep;
}

inline MissDropReport miss_drop_rates(const EventTrace& trace) {
    return miss_drop_rates(collect_jobs(trace));
}

struct ResponseStats {
    std::int64_t completed = 0;
    std::int64_t excluded = 0; // dropped / unfinished jobs, reported separately
    usec mean = 0;
    usec p50 = 0;
    usec p95 = 0;
    usec p99 = 0;
    usec max = 0;
};

namespace detail {

inline usec nearest_rank(const std::vector<usec>& sorted, double q) {
    if (sorted.empty()) return 0;
    std::size_t rank = static_cast<std::size_t>(
        std::ceil(q * static_cast<double>(sorted.size())));
    if (rank == 0) rank = 1;
    return sorted[std::min(rank - 1, sorted.size() - 1)];
}

inline ResponseStats stats_from(std::vector<usec> r, std::int64_t excluded) {
    ResponseStats s;
    s.excluded = excluded;
    if (r.empty()) return s;
    std::sort(r.begin(), r.end());
    s.completed = static_cast<std::int64_t>(r.size());
    usec sum = 0;
    for (usec v : r) sum += v;
    s.mean = sum / s.completed;
    s.p50 = nearest_rank(r, 0.50);
    s.p95 = nearest_rank(r, 0.95);
    s.p99 = nearest_rank(r, 0.99);
    s.max = r.back();
    return s;
}

} // namespace detail

/// End-to-end response time statistics per task and overall; response =
/// last completion - release. Dropped jobs are excluded and counted apart.
inline std::map<std::string, ResponseStats>
response_stats(const std::vector<JobRecord>& jobs) {
    std::map<std::string, std::vector<usec>> responses;
    std::map<std::string, std::int64_t> excluded;
    for (const auto& j : jobs) {
        auto r = j.response();
        if (r)
            responses[j.task].push_back(*r);
        else
            ++excluded[j.task];
        if (r)
            responses["*"].push_back(*r);
        else
            ++excluded["*"];
    }
    std::map<std::string, ResponseStats> out;
    for (auto& [task, rs] : responses)
        out[task] = detail::stats_from(std::move(rs), excluded[task]);
    for (auto& [task, n] : excluded)
        if (!out.count(task)) out[task] = detail::stats_from({}, n);
    return out;
}

inline std::map<std::string, ResponseStats> response_stats(const EventTrace& trace) {
    return response_stats(collect_jobs(trace));
}

/// Response-time histogram over completed jobs; buckets are
/// [k*width, (k+1)*width) and counts partition the completed set.
inline std::map<std::int64_t, std::int64_t> histogram(const std::vector<JobRecord>& jobs,
                                                      usec bucket_width) {
    if (bucket_width <= 0) throw MalformedTrace("histogram: bucket width must be > 0");
    std::map<std::int64_t, std::int64_t> buckets;
    for (const auto& j : jobs) {
        auto r = j.response();
        if (r) ++buckets[*r / bucket_width];
    }
    return buckets;
}

inline std::map<std::int64_t, std::int64_t> histogram(const EventTrace& trace,
                                                      usec bucket_width) {
    return histogram(collect_jobs(trace), bucket_width);
}

/// Mean node-level QoE over completed instances: C_r is the executed time,
/// S_r the distance from dispatch to the node's intermediate deadline, so
/// the overshoot equals the completion lateness.
inline double qoe_mean_node_level(const std::vector<JobRecord>& jobs, const QoEParams& p) {
    double sum = 0;
    std::int64_t n = 0;
    for (const auto& j : jobs)
        for (const auto& [id, c] : j.complete_info) {
            sum += qoe_score(c.executed, c.abs_deadline - c.dispatched_at, p);
            ++n;
        }
    return n ? sum / static_cast<double>(n) : 1.0;
}

/// Mean job-level QoE: C_r is the end-to-end response, S_r the relative
/// deadline D.
inline double qoe_mean_job_level(const std::vector<JobRecord>& jobs, const QoEParams& p) {
    double sum = 0;
    std::int64_t n = 0;
    for (const auto& j : jobs) {
        auto r = j.response();
        if (!r) continue;
        sum += qoe_score(*r, j.e2e_deadline - j.release, p);
        ++n;
    }
    return n ? sum / static_cast<double>(n) : 1.0;
}

/// Everything the comparison table needs for one (scenario, policy, seed)
/// run.
struct MetricsReport {
    std::string scenario;
    std::string policy;
    std::uint64_t seed = 0;
    MissDropReport rates;
    std::map<std::string, ResponseStats> response; // "*" holds the overall row
    std::vector<double> lambda_grid;
    std::map<std::string, double> qoe_node; // key: lambda rendered
    std::map<std::string, double> qoe_job;
    std::int64_t sync_events = 0;
    usec total_busy = 0;
};

inline std::string lambda_key(double lambda) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", lambda);
    return buf;
}

inline MetricsReport build_report(const EventTrace& trace,
                                  const std::vector<double>& lambda_grid,
                                  usec qoe_time_unit = 1'000'000) {
    auto jobs = collect_jobs(trace);
    MetricsReport rep;
    rep.scenario = trace.scenario;
    rep.policy = trace.policy;
    rep.seed = trace.seed;
    rep.rates = miss_drop_rates(jobs);
    rep.response = response_stats(jobs);
    rep.lambda_grid = lambda_grid;
    for (double l : lambda_grid) {
        QoEParams p{l, qoe_time_unit};
        rep.qoe_node[lambda_key(l)] = qoe_mean_node_level(jobs, p);
        rep.qoe_job[lambda_key(l)] = qoe_mean_job_level(jobs, p);
    }
    for (const auto& ev : trace.events)
        if (ev.kind == EventKind::Sync) ++rep.sync_events;
    rep.total_busy = trace.total_busy;
    return rep;
}

} // namespace red
