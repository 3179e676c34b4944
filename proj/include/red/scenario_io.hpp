#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "red/scenario.hpp"
#include "red/scheduler.hpp"

namespace red {

using json = nlohmann::json;

namespace detail {

inline const json& require(const json& obj, const std::string& key, const std::string& path) {
    if (!obj.is_object())
        throw ScenarioError(path + ": expected an object");
    auto it = obj.find(key);
    if (it == obj.end()) throw ScenarioError(path + "." + key + " missing");
    return *it;
}

inline usec req_ms(const json& obj, const std::string& key, const std::string& path) {
    const json& v = require(obj, key, path);
    if (!v.is_number()) throw ScenarioError(path + "." + key + " must be a number (ms)");
    return ms_to_us(v.get<double>());
}

inline usec opt_ms(const json& obj, const std::string& key, usec fallback) {
    auto it = obj.find(key);
    if (it == obj.end()) return fallback;
    return ms_to_us(it->get<double>());
}

inline json ms_json(usec us) {
    if (us % 1000 == 0) return json(us / 1000);
    return json(us_to_ms(us));
}

} // namespace detail

inline NodeKind parse_kind(const std::string& s, const std::string& path) {
    if (s == "monolithic") return NodeKind::Monolithic;
    if (s == "shared-encoder") return NodeKind::SharedEncoder;
    if (s == "decoder") return NodeKind::Decoder;
    throw ScenarioError(path + ": unknown node kind '" + s + "'");
}

inline NodeSpec node_from_json(const json& j, const std::string& path) {
    NodeSpec n;
    n.id = detail::require(j, "id", path).get<std::string>();
    n.cost_estimate = detail::req_ms(j, "cost_ms", path);
    if (j.contains("kind")) n.kind = parse_kind(j.at("kind").get<std::string>(), path);
    if (j.contains("share_group")) n.share_group = j.at("share_group").get<std::string>();
    if (j.contains("decoder_of")) n.decoder_of = j.at("decoder_of").get<std::string>();
    return n;
}

inline json node_to_json(const NodeSpec& n) {
    json j;
    j["id"] = n.id;
    j["cost_ms"] = detail::ms_json(n.cost_estimate);
    if (n.kind != NodeKind::Monolithic) j["kind"] = to_string(n.kind);
    if (n.share_group) j["share_group"] = *n.share_group;
    if (n.decoder_of) j["decoder_of"] = *n.decoder_of;
    return j;
}

inline DagMutation mutation_from_json(const json& j, const std::string& path) {
    DagMutation m;
    m.effective_time = detail::req_ms(j, "at_ms", path);
    std::string op = detail::require(j, "op", path).get<std::string>();
    if (op == "add-node") {
        m.kind = MutationKind::AddNode;
        m.node = node_from_json(detail::require(j, "node", path), path + ".node");
    } else if (op == "remove-node") {
        m.kind = MutationKind::RemoveNode;
        m.node_id = detail::require(j, "id", path).get<std::string>();
    } else if (op == "add-edge" || op == "remove-edge") {
        m.kind = op == "add-edge" ? MutationKind::AddEdge : MutationKind::RemoveEdge;
        m.edge = {detail::require(j, "from", path).get<std::string>(),
                  detail::require(j, "to", path).get<std::string>()};
    } else {
        throw ScenarioError(path + ".op: unknown mutation op '" + op + "'");
    }
    return m;
}

inline json mutation_to_json(const DagMutation& m) {
    json j;
    j["at_ms"] = detail::ms_json(m.effective_time);
    j["op"] = to_string(m.kind);
    switch (m.kind) {
    case MutationKind::AddNode: j["node"] = node_to_json(*m.node); break;
    case MutationKind::RemoveNode: j["id"] = *m.node_id; break;
    case MutationKind::AddEdge:
    case MutationKind::RemoveEdge:
        j["from"] = m.edge->first;
        j["to"] = m.edge->second;
        break;
    }
    return j;
}

/// Parses a red-dag-v1 object. Mutations declared inside the file are
/// returned alongside the task.
inline std::pair<DagTask, std::vector<DagMutation>> dag_from_json(const json& j,
                                                                  const std::string& path) {
    DagTask dag;
    dag.task_id = detail::require(j, "task_id", path).get<std::string>();
    dag.end_to_end_deadline = detail::req_ms(j, "deadline_ms", path);
    if (j.contains("period_ms")) dag.period = detail::req_ms(j, "period_ms", path);
    const json& nodes = detail::require(j, "nodes", path);
    for (std::size_t i = 0; i < nodes.size(); ++i)
        dag.nodes.push_back(node_from_json(nodes[i], path + ".nodes[" + std::to_string(i) + "]"));
    if (j.contains("edges")) {
        const json& edges = j.at("edges");
        for (std::size_t i = 0; i < edges.size(); ++i) {
            const json& e = edges[i];
            if (!e.is_array() || e.size() != 2)
                throw ScenarioError(path + ".edges[" + std::to_string(i) +
                                    "]: expected [from, to]");
            dag.edges.emplace_back(e[0].get<std::string>(), e[1].get<std::string>());
        }
    }
    std::vector<DagMutation> muts;
    if (j.contains("mutations")) {
        const json& ms = j.at("mutations");
        for (std::size_t i = 0; i < ms.size(); ++i)
            muts.push_back(
                mutation_from_json(ms[i], path + ".mutations[" + std::to_string(i) + "]"));
    }
    return {dag, muts};
}

inline json dag_to_json(const DagTask& dag, const std::vector<DagMutation>& muts = {}) {
    json j;
    j["task_id"] = dag.task_id;
    j["deadline_ms"] = detail::ms_json(dag.end_to_end_deadline);
    if (dag.period) j["period_ms"] = detail::ms_json(*dag.period);
    j["nodes"] = json::array();
    for (const auto& n : dag.nodes) j["nodes"].push_back(node_to_json(n));
    j["edges"] = json::array();
    for (const auto& [u, v] : dag.edges) j["edges"].push_back(json::array({u, v}));
    if (!muts.empty()) {
        j["mutations"] = json::array();
        for (const auto& m : muts) j["mutations"].push_back(mutation_to_json(m));
    }
    return j;
}

inline CostDist dist_from_json(const json& j, const std::string& path) {
    std::string d = detail::require(j, "dist", path).get<std::string>();
    if (d == "constant") return ConstantDist{detail::req_ms(j, "value_ms", path)};
    if (d == "uniform")
        return UniformDist{detail::req_ms(j, "lo_ms", path), detail::req_ms(j, "hi_ms", path)};
    if (d == "truncnormal")
        return TruncNormalDist{detail::req_ms(j, "mean_ms", path),
                               detail::req_ms(j, "sd_ms", path),
                               detail::req_ms(j, "lo_ms", path),
                               detail::req_ms(j, "hi_ms", path)};
    throw ScenarioError(path + ".dist: unknown distribution '" + d + "'");
}

inline json dist_to_json(const CostDist& d) {
    json j;
    if (const auto* c = std::get_if<ConstantDist>(&d)) {
        j["dist"] = "constant";
        j["value_ms"] = detail::ms_json(c->value);
    } else if (const auto* u = std::get_if<UniformDist>(&d)) {
        j["dist"] = "uniform";
        j["lo_ms"] = detail::ms_json(u->lo);
        j["hi_ms"] = detail::ms_json(u->hi);
    } else {
        const auto& t = std::get<TruncNormalDist>(d);
        j["dist"] = "truncnormal";
        j["mean_ms"] = detail::ms_json(t.mean);
        j["sd_ms"] = detail::ms_json(t.sd);
        j["lo_ms"] = detail::ms_json(t.lo);
        j["hi_ms"] = detail::ms_json(t.hi);
    }
    return j;
}

inline SchedulerConfig scheduler_from_json(const json& j, const std::string& path) {
    SchedulerConfig c;
    if (j.contains("policy")) {
        auto p = parse_policy(j.at("policy").get<std::string>());
        if (!p) throw ScenarioError(path + ".policy: unknown policy");
        c.policy = *p;
    }
    if (j.contains("sync")) {
        std::string s = j.at("sync").get<std::string>();
        if (s == "periodic")
            c.sync = SyncMode::Periodic;
        else if (s == "on-demand")
            c.sync = SyncMode::OnDemand;
        else
            throw ScenarioError(path + ".sync: expected 'periodic' or 'on-demand'");
    }
    c.sync_interval = detail::opt_ms(j, "sync_interval_ms", c.sync_interval);
    c.sync_cost = detail::opt_ms(j, "sync_cost_ms", c.sync_cost);
    c.decision_cost = detail::opt_ms(j, "decision_cost_ms", c.decision_cost);
    c.blocking_time = detail::opt_ms(j, "blocking_ms", c.blocking_time);
    if (j.contains("drop_policy")) {
        auto d = parse_drop_policy(j.at("drop_policy").get<std::string>());
        if (!d) throw ScenarioError(path + ".drop_policy: unknown drop policy");
        c.drop_policy = *d;
    }
    if (j.contains("level_weight")) {
        std::string w = j.at("level_weight").get<std::string>();
        if (w == "max")
            c.level_weight = LevelWeight::MaxCost;
        else if (w == "sum")
            c.level_weight = LevelWeight::SumCost;
        else
            throw ScenarioError(path + ".level_weight: expected 'max' or 'sum'");
    }
    return c;
}

inline json scheduler_to_json(const SchedulerConfig& c) {
    json j;
    j["policy"] = to_string(c.policy);
    if (c.sync) j["sync"] = to_string(*c.sync);
    j["sync_interval_ms"] = detail::ms_json(c.sync_interval);
    j["sync_cost_ms"] = detail::ms_json(c.sync_cost);
    j["decision_cost_ms"] = detail::ms_json(c.decision_cost);
    j["blocking_ms"] = detail::ms_json(c.blocking_time);
    j["drop_policy"] = to_string(c.drop_policy);
    j["level_weight"] = c.level_weight == LevelWeight::MaxCost ? "max" : "sum";
    return j;
}

struct ScenarioFile {
    Scenario scenario;
    SchedulerConfig config; // scenario-supplied defaults; CLI may override
};

inline ScenarioFile scenario_from_json(const json& j) {
    ScenarioFile f;
    Scenario& s = f.scenario;
    if (j.contains("name")) s.name = j.at("name").get<std::string>();
    s.horizon = detail::req_ms(j, "horizon_ms", "scenario");
    if (j.contains("seed")) s.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("interference")) s.interference = j.at("interference").get<double>();
    if (j.contains("refine")) {
        const json& r = j.at("refine");
        s.refine.gamma = detail::opt_ms(r, "gamma_ms", s.refine.gamma);
        if (r.contains("default_encoder_pct"))
            s.refine.default_split_pct = r.at("default_encoder_pct").get<int>();
        if (r.contains("encoder_pct"))
            for (const auto& [k, v] : r.at("encoder_pct").items())
                s.refine.split_encoder_pct[k] = v.get<int>();
        s.refine.batch_base = detail::opt_ms(r, "batch_base_ms", 0);
        s.refine.batch_per_item = detail::opt_ms(r, "batch_per_item_ms", 0);
        if (r.contains("enable_batching"))
            s.refine.enable_batching = r.at("enable_batching").get<bool>();
        s.refine.merge_surcharge_per_extra = detail::opt_ms(r, "merge_surcharge_ms", 0);
    }
    if (j.contains("scheduler"))
        f.config = scheduler_from_json(j.at("scheduler"), "scenario.scheduler");
    const json& tasks = detail::require(j, "tasks", "scenario");
    for (std::size_t i = 0; i < tasks.size(); ++i) {
        std::string path = "scenario.tasks[" + std::to_string(i) + "]";
        const json& t = tasks[i];
        TaskEntry e;
        auto [dag, muts] = dag_from_json(detail::require(t, "dag", path), path + ".dag");
        e.dag = std::move(dag);
        e.release_offset = detail::opt_ms(t, "release_offset_ms", 0);
        if (t.contains("repeats")) e.repeats = t.at("repeats").get<int>();
        for (auto& m : muts) s.mutations.push_back({e.dag.task_id, std::move(m)});
        s.tasks.push_back(std::move(e));
    }
    if (j.contains("mutations")) {
        const json& ms = j.at("mutations");
        for (std::size_t i = 0; i < ms.size(); ++i) {
            std::string path = "scenario.mutations[" + std::to_string(i) + "]";
            TimedMutation tm;
            tm.task = detail::require(ms[i], "task", path).get<std::string>();
            tm.mutation = mutation_from_json(ms[i], path);
            s.mutations.push_back(std::move(tm));
        }
    }
    if (j.contains("exec"))
        for (const auto& [key, v] : j.at("exec").items())
            s.exec.per_node[key] = dist_from_json(v, "scenario.exec['" + key + "']");
    if (j.contains("cross_deps")) {
        const json& cd = j.at("cross_deps");
        for (std::size_t i = 0; i < cd.size(); ++i) {
            std::string path = "scenario.cross_deps[" + std::to_string(i) + "]";
            s.cross_deps.push_back(
                {detail::require(cd[i], "producer", path).get<std::string>(),
                 detail::require(cd[i], "consumer", path).get<std::string>(),
                 cd[i].value("inherit_deadline", false)});
        }
    }
    if (j.contains("faults")) {
        const json& fs = j.at("faults");
        for (std::size_t i = 0; i < fs.size(); ++i) {
            std::string path = "scenario.faults[" + std::to_string(i) + "]";
            s.faults.push_back({detail::require(fs[i], "task", path).get<std::string>(),
                                detail::require(fs[i], "job", path).get<std::int64_t>(),
                                detail::require(fs[i], "node", path).get<std::string>()});
        }
    }
    return f;
}

inline json scenario_to_json(const ScenarioFile& f) {
    const Scenario& s = f.scenario;
    json j;
    j["schema"] = "red-scenario-v1";
    j["name"] = s.name;
    j["horizon_ms"] = detail::ms_json(s.horizon);
    j["seed"] = s.seed;
    j["interference"] = s.interference;
    json r;
    r["gamma_ms"] = detail::ms_json(s.refine.gamma);
    r["default_encoder_pct"] = s.refine.default_split_pct;
    if (!s.refine.split_encoder_pct.empty()) {
        json pct;
        for (const auto& [k, v] : s.refine.split_encoder_pct) pct[k] = v;
        r["encoder_pct"] = pct;
    }
    r["batch_base_ms"] = detail::ms_json(s.refine.batch_base);
    r["batch_per_item_ms"] = detail::ms_json(s.refine.batch_per_item);
    r["enable_batching"] = s.refine.enable_batching;
    r["merge_surcharge_ms"] = detail::ms_json(s.refine.merge_surcharge_per_extra);
    j["refine"] = r;
    j["scheduler"] = scheduler_to_json(f.config);
    j["tasks"] = json::array();
    for (const auto& t : s.tasks) {
        json e;
        e["dag"] = dag_to_json(t.dag);
        e["release_offset_ms"] = detail::ms_json(t.release_offset);
        e["repeats"] = t.repeats;
        j["tasks"].push_back(e);
    }
    if (!s.mutations.empty()) {
        j["mutations"] = json::array();
        for (const auto& tm : s.mutations) {
            json m = mutation_to_json(tm.mutation);
            m["task"] = tm.task;
            j["mutations"].push_back(m);
        }
    }
    if (!s.exec.per_node.empty()) {
        json e;
        for (const auto& [k, v] : s.exec.per_node) e[k] = dist_to_json(v);
        j["exec"] = e;
    }
    if (!s.cross_deps.empty()) {
        j["cross_deps"] = json::array();
        for (const auto& c : s.cross_deps)
            j["cross_deps"].push_back({{"producer", c.producer_task},
                                       {"consumer", c.consumer_task},
                                       {"inherit_deadline", c.inherit_deadline}});
    }
    if (!s.faults.empty()) {
        j["faults"] = json::array();
        for (const auto& fl : s.faults)
            j["faults"].push_back({{"task", fl.task}, {"job", fl.job_index}, {"node", fl.node}});
    }
    return j;
}

inline json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ScenarioError("cannot open '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ScenarioError("'" + path + "': " + e.what());
    }
    return j;
}

inline ScenarioFile load_scenario_file(const std::string& path) {
    json j = load_json_file(path);
    if (j.value("schema", "") != "red-scenario-v1")
        throw ScenarioError("'" + path + "': schema must be \"red-scenario-v1\"");
    return scenario_from_json(j);
}

inline void save_scenario_file(const ScenarioFile& f, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ScenarioError("cannot write '" + path + "'");
    out << scenario_to_json(f).dump(2) << "\n";
}

} // namespace red
