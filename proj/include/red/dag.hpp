#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "red/errors.hpp"
#include "red/time.hpp"

namespace red {

using NodeId = std::string;
using Edge = std::pair<NodeId, NodeId>; // (predecessor, successor)

enum class NodeKind { Monolithic, SharedEncoder, Decoder };

inline const char* to_string(NodeKind k) {
    switch (k) {
    case NodeKind::Monolithic: return "monolithic";
    case NodeKind::SharedEncoder: return "shared-encoder";
    case NodeKind::Decoder: return "decoder";
    }
    return "?";
}

/// One schedulable unit. A Monolithic node carrying a share_group is a
/// fused encoder+decoder inference that the refinement pass may split.
struct NodeSpec {
    NodeId id;
    usec cost_estimate = 0;
    NodeKind kind = NodeKind::Monolithic;
    std::optional<std::string> share_group;
    std::optional<NodeId> decoder_of;

    friend bool operator==(const NodeSpec&, const NodeSpec&) = default;
};

/// A DAG of dependent computation nodes with one end-to-end relative
/// deadline; the unit of a robotic "operation".
struct DagTask {
    std::string task_id;
    std::vector<NodeSpec> nodes;
    std::vector<Edge> edges;
    usec end_to_end_deadline = 0;
    std::optional<usec> period;

    const NodeSpec* find(const NodeId& id) const {
        for (const auto& n : nodes)
            if (n.id == id) return &n;
        return nullptr;
    }
};

/// Order-insensitive structural comparison (node set, edge set, deadline,
/// period). Used by mutation round-trip checks.
inline bool structurally_equal(const DagTask& a, const DagTask& b) {
    auto na = a.nodes, nb = b.nodes;
    auto by_id = [](const NodeSpec& x, const NodeSpec& y) { return x.id < y.id; };
    std::sort(na.begin(), na.end(), by_id);
    std::sort(nb.begin(), nb.end(), by_id);
    auto ea = a.edges, eb = b.edges;
    std::sort(ea.begin(), ea.end());
    std::sort(eb.begin(), eb.end());
    return na == nb && ea == eb && a.end_to_end_deadline == b.end_to_end_deadline &&
           a.period == b.period;
}

struct Violation {
    std::string code;   // stable machine-readable tag, e.g. "cycle"
    std::string detail; // names the offending node/edge
};

struct ValidationReport {
    bool ok = true;
    std::vector<Violation> violations;

    void add(std::string code, std::string detail) {
        ok = false;
        violations.push_back({std::move(code), std::move(detail)});
    }
};

// Height of a node = edge count of the longest path from any source.
// Nodes of equal height share one deadline budget.
using HeightMap = std::map<NodeId, int>;

namespace detail {

inline std::map<NodeId, std::vector<NodeId>> successor_map(const DagTask& dag) {
    std::map<NodeId, std::vector<NodeId>> succ;
    for (const auto& n : dag.nodes) succ[n.id];
    for (const auto& [u, v] : dag.edges) succ[u].push_back(v);
    for (auto& [id, vs] : succ) std::sort(vs.begin(), vs.end());
    return succ;
}

inline std::map<NodeId, int> indegree_map(const DagTask& dag) {
    std::map<NodeId, int> indeg;
    for (const auto& n : dag.nodes) indeg[n.id] = 0;
    for (const auto& e : dag.edges) ++indeg[e.second];
    return indeg;
}

} // namespace detail

/// Checks every DagTask invariant. Violations are data, not failures.
inline ValidationReport validate_dag(const DagTask& dag) {
    ValidationReport report;
    std::set<NodeId> ids;
    for (const auto& n : dag.nodes) {
        if (!ids.insert(n.id).second)
            report.add("duplicate node id", "node '" + n.id + "' defined twice");
        if (n.cost_estimate <= 0)
            report.add("nonpositive cost", "node '" + n.id + "' has cost " +
                                               std::to_string(n.cost_estimate) + "us");
        if (n.kind == NodeKind::SharedEncoder && !n.share_group)
            report.add("encoder without share group", "node '" + n.id + "'");
        if (n.kind == NodeKind::Decoder && !n.decoder_of)
            report.add("dangling decoder reference",
                       "decoder '" + n.id + "' names no encoder");
    }
    for (const auto& n : dag.nodes) {
        if (n.kind != NodeKind::Decoder || !n.decoder_of) continue;
        const NodeSpec* enc = dag.find(*n.decoder_of);
        if (!enc)
            report.add("dangling decoder reference",
                       "decoder '" + n.id + "' names absent node '" + *n.decoder_of + "'");
        else if (enc->kind != NodeKind::SharedEncoder)
            report.add("dangling decoder reference",
                       "decoder '" + n.id + "' names non-encoder '" + *n.decoder_of + "'");
    }
    for (const auto& [u, v] : dag.edges) {
        if (!ids.count(u))
            report.add("edge endpoint missing", "edge (" + u + "," + v + "): no node '" + u + "'");
        if (!ids.count(v))
            report.add("edge endpoint missing", "edge (" + u + "," + v + "): no node '" + v + "'");
    }
    if (dag.end_to_end_deadline <= 0)
        report.add("nonpositive deadline",
                   "end-to-end deadline " + std::to_string(dag.end_to_end_deadline) + "us");
    if (dag.period && *dag.period <= 0)
        report.add("nonpositive period", "period " + std::to_string(*dag.period) + "us");

    // Cycle detection by Kahn peeling over the well-formed part.
    bool endpoints_ok = true;
    for (const auto& [u, v] : dag.edges)
        if (!ids.count(u) || !ids.count(v)) endpoints_ok = false;
    if (endpoints_ok) {
        auto indeg = detail::indegree_map(dag);
        auto succ = detail::successor_map(dag);
        std::set<NodeId> frontier;
        for (const auto& [id, d] : indeg)
            if (d == 0) frontier.insert(id);
        std::size_t seen = 0;
        while (!frontier.empty()) {
            NodeId u = *frontier.begin();
            frontier.erase(frontier.begin());
            ++seen;
            for (const auto& v : succ[u])
                if (--indeg[v] == 0) frontier.insert(v);
        }
        if (seen != dag.nodes.size()) {
            std::string stuck;
            for (const auto& [id, d] : indeg)
                if (d > 0) stuck += (stuck.empty() ? "" : ",") + id;
            report.add("cycle", "nodes {" + stuck + "} lie on a cycle");
        }
    }
    return report;
}

/// Deterministic topological order: Kahn's algorithm, ties broken by
/// ascending NodeId. Throws CycleError on cyclic input.
inline std::vector<NodeId> topological_sort(const DagTask& dag) {
    auto indeg = detail::indegree_map(dag);
    auto succ = detail::successor_map(dag);
    std::set<NodeId> frontier;
    for (const auto& [id, d] : indeg)
        if (d == 0) frontier.insert(id);
    std::vector<NodeId> order;
    order.reserve(dag.nodes.size());
    while (!frontier.empty()) {
        NodeId u = *frontier.begin();
        frontier.erase(frontier.begin());
        order.push_back(u);
        for (const auto& v : succ[u])
            if (--indeg[v] == 0) frontier.insert(v);
    }
    if (order.size() != dag.nodes.size())
        throw CycleError("topological_sort: '" + dag.task_id + "' contains a cycle");
    return order;
}

/// Longest-path edge count from any source node, per node.
inline HeightMap compute_heights(const DagTask& dag) {
    HeightMap heights;
    std::map<NodeId, std::vector<NodeId>> preds;
    for (const auto& n : dag.nodes) preds[n.id];
    for (const auto& [u, v] : dag.edges) preds[v].push_back(u);
    for (const auto& id : topological_sort(dag)) {
        int h = 0;
        for (const auto& p : preds[id]) h = std::max(h, heights[p] + 1);
        heights[id] = h;
    }
    return heights;
}

inline std::set<NodeId> indegree_zero_set(const DagTask& dag) {
    std::set<NodeId> out;
    for (const auto& [id, d] : detail::indegree_map(dag))
        if (d == 0) out.insert(id);
    return out;
}

enum class MutationKind { AddNode, RemoveNode, AddEdge, RemoveEdge };

inline const char* to_string(MutationKind k) {
    switch (k) {
    case MutationKind::AddNode: return "add-node";
    case MutationKind::RemoveNode: return "remove-node";
    case MutationKind::AddEdge: return "add-edge";
    case MutationKind::RemoveEdge: return "remove-edge";
    }
    return "?";
}

/// A timed structural change to a task's DAG (obstacle appearing or
/// clearing). RemoveNode also removes the node's incident edges.
struct DagMutation {
    MutationKind kind = MutationKind::AddNode;
    std::optional<NodeSpec> node; // AddNode
    std::optional<NodeId> node_id; // RemoveNode
    std::optional<Edge> edge;     // AddEdge / RemoveEdge
    usec effective_time = 0;

    std::string describe() const {
        std::string s = to_string(kind);
        if (node) return s + " " + node->id;
        if (node_id) return s + " " + *node_id;
        if (edge) return s + " (" + edge->first + "," + edge->second + ")";
        return s;
    }
};

/// Pure mutation application: returns a new DagTask, input untouched.
/// Throws InvalidMutation if the result would violate any DAG invariant.
inline DagTask apply_mutation(const DagTask& dag, const DagMutation& m) {
    DagTask out = dag;
    switch (m.kind) {
    case MutationKind::AddNode: {
        if (!m.node) throw InvalidMutation("add-node without node payload");
        if (dag.find(m.node->id))
            throw InvalidMutation("add-node: node '" + m.node->id + "' already exists");
        out.nodes.push_back(*m.node);
        break;
    }
    case MutationKind::RemoveNode: {
        if (!m.node_id) throw InvalidMutation("remove-node without node id");
        if (!dag.find(*m.node_id))
            throw InvalidMutation("remove-node: no node '" + *m.node_id + "'");
        std::erase_if(out.nodes, [&](const NodeSpec& n) { return n.id == *m.node_id; });
        std::erase_if(out.edges, [&](const Edge& e) {
            return e.first == *m.node_id || e.second == *m.node_id;
        });
        break;
    }
    case MutationKind::AddEdge: {
        if (!m.edge) throw InvalidMutation("add-edge without edge payload");
        if (std::find(out.edges.begin(), out.edges.end(), *m.edge) != out.edges.end())
            throw InvalidMutation("add-edge: edge (" + m.edge->first + "," +
                                  m.edge->second + ") already exists");
        out.edges.push_back(*m.edge);
        break;
    }
    case MutationKind::RemoveEdge: {
        if (!m.edge) throw InvalidMutation("remove-edge without edge payload");
        auto it = std::find(out.edges.begin(), out.edges.end(), *m.edge);
        if (it == out.edges.end())
            throw InvalidMutation("remove-edge: no edge (" + m.edge->first + "," +
                                  m.edge->second + ")");
        out.edges.erase(it);
        break;
    }
    }
    ValidationReport report = validate_dag(out);
    if (!report.ok)
        throw InvalidMutation("mutation '" + m.describe() + "' yields invalid DAG: " +
                              report.violations.front().code + " (" +
                              report.violations.front().detail + ")");
    return out;
}

} // namespace red
