#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "red/metrics.hpp"
#include "red/trace.hpp"

namespace red {

namespace detail {

// Times are emitted as integer microseconds: trace bytes must not depend
// on float formatting.
inline nlohmann::json event_to_json(const Event& ev) {
    nlohmann::json j;
    j["t_us"] = ev.t;
    j["kind"] = to_string(ev.kind);
    if (!ev.task.empty()) j["task"] = ev.task;
    if (ev.job >= 0) j["job"] = ev.job;
    if (!ev.node.empty()) j["node"] = ev.node;
    std::visit(
        [&](const auto& p) {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, ReleasePayload>) {
                j["e2e_deadline_us"] = p.e2e_deadline;
                nlohmann::json nodes = nlohmann::json::array();
                for (const auto& n : p.nodes) {
                    nlohmann::json nj;
                    nj["id"] = n.id;
                    nj["cost_us"] = n.cost_estimate;
                    nj["deadline_us"] = n.abs_deadline;
                    nj["height"] = n.height;
                    nj["kind"] = to_string(n.kind);
                    if (!n.share_group.empty()) nj["group"] = n.share_group;
                    nodes.push_back(nj);
                }
                j["nodes"] = nodes;
                nlohmann::json edges = nlohmann::json::array();
                for (const auto& [u, v] : p.edges) edges.push_back({u, v});
                j["edges"] = edges;
            } else if constexpr (std::is_same_v<T, DispatchPayload>) {
                j["deadline_us"] = p.abs_deadline;
                j["release_us"] = p.release;
                j["duration_us"] = p.duration;
                j["decision_us"] = p.decision_cost;
                if (p.blocking > 0) j["blocking_us"] = p.blocking;
                if (p.members.size() > 1) {
                    nlohmann::json ms = nlohmann::json::array();
                    for (const auto& m : p.members)
                        ms.push_back({{"task", m.task}, {"job", m.job}, {"node", m.node}});
                    j["members"] = ms;
                }
            } else if constexpr (std::is_same_v<T, CompletePayload>) {
                j["dispatched_us"] = p.dispatched_at;
                j["executed_us"] = p.executed;
                j["deadline_us"] = p.abs_deadline;
                j["on_time"] = p.on_time;
            } else if constexpr (std::is_same_v<T, MissPayload>) {
                j["deadline_us"] = p.abs_deadline;
                j["completion_us"] = p.completion;
            } else if constexpr (std::is_same_v<T, DropPayload>) {
                j["reason"] = p.reason;
            } else if constexpr (std::is_same_v<T, MutationPayload>) {
                j["detail"] = p.detail;
            } else if constexpr (std::is_same_v<T, ReassignPayload>) {
                nlohmann::json m;
                for (const auto& [id, abs] : p.new_absolute) m[id] = abs;
                j["deadlines_us"] = m;
            } else if constexpr (std::is_same_v<T, SyncPayload>) {
                j["mode"] = p.mode;
                j["cost_us"] = p.cost;
                j["reason"] = p.reason;
                j["scheduled_us"] = p.scheduled_at;
            } else if constexpr (std::is_same_v<T, TransitionPayload>) {
                j["from"] = to_string(p.from);
                j["to"] = to_string(p.to);
            }
        },
        ev.payload);
    return j;
}

} // namespace detail

/// Line-delimited trace export: one header record, then one record per
/// event, all times in integer microseconds.
inline std::string trace_to_jsonl(const EventTrace& trace) {
    std::ostringstream out;
    nlohmann::json hdr;
    hdr["record"] = "header";
    hdr["scenario"] = trace.scenario;
    hdr["policy"] = trace.policy;
    hdr["sync"] = trace.sync_mode;
    hdr["seed"] = trace.seed;
    hdr["horizon_us"] = trace.horizon;
    hdr["gamma_us"] = trace.gamma;
    hdr["busy_us"] = trace.total_busy;
    hdr["exec_us"] = trace.total_exec;
    hdr["sync_cost_us"] = trace.total_sync_cost;
    hdr["decision_cost_us"] = trace.total_decision_cost;
    out << hdr.dump() << "\n";
    for (const auto& ev : trace.events) out << detail::event_to_json(ev).dump() << "\n";
    return out.str();
}

inline void save_trace_jsonl(const EventTrace& trace, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ScenarioError("cannot write '" + path + "'");
    out << trace_to_jsonl(trace);
}

namespace detail {

inline HandlerState state_from_string(const std::string& s) {
    for (HandlerState st : {HandlerState::Created, HandlerState::Ready, HandlerState::Running,
                            HandlerState::Blocked, HandlerState::Completed,
                            HandlerState::Dropped, HandlerState::FailedOom})
        if (s == to_string(st)) return st;
    throw MalformedTrace("unknown handler state '" + s + "'");
}

inline NodeKind kind_from_string(const std::string& s) {
    for (NodeKind k : {NodeKind::Monolithic, NodeKind::SharedEncoder, NodeKind::Decoder})
        if (s == to_string(k)) return k;
    throw MalformedTrace("unknown node kind '" + s + "'");
}

inline Event event_from_json(const nlohmann::json& j) {
    Event ev;
    ev.t = j.at("t_us").get<usec>();
    ev.task = j.value("task", "");
    ev.job = j.value("job", std::int64_t{-1});
    ev.node = j.value("node", "");
    std::string kind = j.at("kind").get<std::string>();
    if (kind == "release") {
        ev.kind = EventKind::Release;
        ReleasePayload p;
        p.e2e_deadline = j.at("e2e_deadline_us").get<usec>();
        for (const auto& nj : j.at("nodes"))
            p.nodes.push_back({nj.at("id").get<std::string>(), nj.at("cost_us").get<usec>(),
                               nj.at("deadline_us").get<usec>(), nj.at("height").get<int>(),
                               kind_from_string(nj.at("kind").get<std::string>()),
                               nj.value("group", "")});
        for (const auto& e : j.at("edges"))
            p.edges.emplace_back(e[0].get<std::string>(), e[1].get<std::string>());
        ev.payload = std::move(p);
    } else if (kind == "dispatch") {
        ev.kind = EventKind::Dispatch;
        DispatchPayload p;
        p.abs_deadline = j.at("deadline_us").get<usec>();
        p.release = j.at("release_us").get<usec>();
        p.duration = j.at("duration_us").get<usec>();
        p.decision_cost = j.at("decision_us").get<usec>();
        p.blocking = j.value("blocking_us", usec{0});
        if (j.contains("members"))
            for (const auto& m : j.at("members"))
                p.members.push_back({m.at("task").get<std::string>(),
                                     m.at("job").get<std::int64_t>(),
                                     m.at("node").get<std::string>()});
        else
            p.members.push_back({ev.task, ev.job, ev.node});
        ev.payload = std::move(p);
    } else if (kind == "complete") {
        ev.kind = EventKind::Complete;
        ev.payload = CompletePayload{j.at("dispatched_us").get<usec>(),
                                     j.at("executed_us").get<usec>(),
                                     j.at("deadline_us").get<usec>(), j.at("on_time").get<bool>()};
    } else if (kind == "miss") {
        ev.kind = EventKind::Miss;
        ev.payload = MissPayload{j.at("deadline_us").get<usec>(),
                                 j.at("completion_us").get<usec>()};
    } else if (kind == "drop") {
        ev.kind = EventKind::Drop;
        ev.payload = DropPayload{j.at("reason").get<std::string>()};
    } else if (kind == "mutation") {
        ev.kind = EventKind::Mutation;
        ev.payload = MutationPayload{j.at("detail").get<std::string>()};
    } else if (kind == "reassign") {
        ev.kind = EventKind::Reassign;
        ReassignPayload p;
        for (const auto& [id, abs] : j.at("deadlines_us").items())
            p.new_absolute[id] = abs.get<usec>();
        ev.payload = std::move(p);
    } else if (kind == "sync") {
        ev.kind = EventKind::Sync;
        ev.payload = SyncPayload{j.at("mode").get<std::string>(), j.at("cost_us").get<usec>(),
                                 j.at("reason").get<std::string>(),
                                 j.at("scheduled_us").get<usec>()};
    } else if (kind == "transition") {
        ev.kind = EventKind::StateTransition;
        ev.payload = TransitionPayload{state_from_string(j.at("from").get<std::string>()),
                                       state_from_string(j.at("to").get<std::string>())};
    } else {
        throw MalformedTrace("unknown event kind '" + kind + "'");
    }
    return ev;
}

} // namespace detail

/// Parses a trace back from its line-delimited form; inverse of
/// trace_to_jsonl.
inline EventTrace trace_from_jsonl(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    EventTrace trace;
    bool have_header = false;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw MalformedTrace(std::string("bad trace line: ") + e.what());
        }
        try {
            if (!have_header) {
                if (j.value("record", "") != "header")
                    throw MalformedTrace("trace must start with a header record");
                trace.scenario = j.at("scenario").get<std::string>();
                trace.policy = j.at("policy").get<std::string>();
                trace.sync_mode = j.at("sync").get<std::string>();
                trace.seed = j.at("seed").get<std::uint64_t>();
                trace.horizon = j.at("horizon_us").get<usec>();
                trace.gamma = j.at("gamma_us").get<usec>();
                trace.total_busy = j.at("busy_us").get<usec>();
                trace.total_exec = j.at("exec_us").get<usec>();
                trace.total_sync_cost = j.at("sync_cost_us").get<usec>();
                trace.total_decision_cost = j.at("decision_cost_us").get<usec>();
                have_header = true;
                continue;
            }
            trace.events.push_back(detail::event_from_json(j));
        } catch (const nlohmann::json::exception& e) {
            throw MalformedTrace(std::string("bad trace record: ") + e.what());
        }
    }
    if (!have_header) throw MalformedTrace("empty trace file");
    return trace;
}

inline EventTrace load_trace_jsonl(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw MalformedTrace("cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return trace_from_jsonl(buf.str());
}

/// Per-job CSV summary: one row per released job instance.
inline std::string trace_jobs_to_csv(const EventTrace& trace) {
    std::ostringstream out;
    out << "task,job,release_ms,deadline_ms,finish_ms,response_ms,outcome\n";
    for (const auto& j : collect_jobs(trace)) {
        out << j.task << "," << j.index << "," << format_ms(j.release) << ","
            << format_ms(j.e2e_deadline);
        auto f = j.finish();
        std::string outcome;
        if (!f) {
            outcome = j.horizon_cut ? "cut-at-horizon" : "dropped";
            out << ",,";
        } else {
            outcome = *f <= j.e2e_deadline ? "on-time" : "missed";
            out << "," << format_ms(*f) << "," << format_ms(*f - j.release);
        }
        out << "," << outcome << "\n";
    }
    return out.str();
}

} // namespace red
