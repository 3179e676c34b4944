#pragma once

// Test-only oracles and generators. Everything here recomputes expected
// values by a route independent of the library implementation it checks.

#include <algorithm>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "red/dag.hpp"
#include "red/refine.hpp"

namespace testsupport {

using red::DagTask;
using red::Edge;
using red::NodeId;
using red::NodeSpec;
using red::usec;

inline NodeSpec node(const std::string& id, usec cost_us,
                     red::NodeKind kind = red::NodeKind::Monolithic,
                     std::optional<std::string> group = std::nullopt,
                     std::optional<std::string> decoder_of = std::nullopt) {
    return {id, cost_us, kind, std::move(group), std::move(decoder_of)};
}

inline DagTask dag(const std::string& id, std::vector<NodeSpec> nodes, std::vector<Edge> edges,
                   usec deadline_us, std::optional<usec> period_us = std::nullopt) {
    DagTask d;
    d.task_id = id;
    d.nodes = std::move(nodes);
    d.edges = std::move(edges);
    d.end_to_end_deadline = deadline_us;
    d.period = period_us;
    return d;
}

inline std::string node_name(std::size_t i) {
    std::string s = "n";
    if (i < 10) s += "0";
    return s + std::to_string(i);
}

// Random DAG on n nodes: edges only from lower to higher index, so the
// result is acyclic by construction.
inline DagTask random_dag(std::mt19937_64& rng, std::size_t n, double edge_prob,
                          usec max_cost_us = 50'000) {
    DagTask d;
    d.task_id = "rand";
    std::uniform_int_distribution<usec> cost(1, max_cost_us);
    std::bernoulli_distribution edge(edge_prob);
    for (std::size_t i = 0; i < n; ++i) d.nodes.push_back(node(node_name(i), cost(rng)));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (edge(rng)) d.edges.emplace_back(node_name(i), node_name(j));
    d.end_to_end_deadline =
        std::uniform_int_distribution<usec>(static_cast<usec>(n), 10'000'000)(rng);
    return d;
}

// Exhaustive longest-path search: explores every path from every source.
inline int brute_force_height(const DagTask& d, const NodeId& target) {
    std::map<NodeId, std::vector<NodeId>> preds;
    for (const auto& n : d.nodes) preds[n.id];
    for (const auto& [u, v] : d.edges) preds[v].push_back(u);
    // Longest path ending at target, by depth-first enumeration.
    std::vector<NodeId> stack{target};
    int best = 0;
    struct Frame {
        NodeId id;
        int depth;
    };
    std::vector<Frame> work{{target, 0}};
    while (!work.empty()) {
        Frame f = work.back();
        work.pop_back();
        if (preds.at(f.id).empty()) best = std::max(best, f.depth);
        for (const auto& p : preds.at(f.id)) work.push_back({p, f.depth + 1});
    }
    return best;
}

// All DAGs on n nodes (n <= 4 is practical): every subset of the
// upper-triangular edge set.
inline std::vector<DagTask> all_dags(std::size_t n, usec deadline_us = 1'000'000) {
    std::vector<Edge> all_edges;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            all_edges.emplace_back(node_name(i), node_name(j));
    std::vector<DagTask> out;
    for (std::size_t mask = 0; mask < (1u << all_edges.size()); ++mask) {
        DagTask d;
        d.task_id = "enum";
        for (std::size_t i = 0; i < n; ++i)
            d.nodes.push_back(node(node_name(i), static_cast<usec>(1000 * (i + 1))));
        for (std::size_t b = 0; b < all_edges.size(); ++b)
            if (mask & (1u << b)) d.edges.push_back(all_edges[b]);
        d.end_to_end_deadline = deadline_us;
        out.push_back(std::move(d));
    }
    return out;
}

// Reachability over an explicit edge list.
inline bool reaches(const std::vector<Edge>& edges, const NodeId& from, const NodeId& to) {
    if (from == to) return true;
    std::map<NodeId, std::vector<NodeId>> succ;
    for (const auto& [u, v] : edges) succ[u].push_back(v);
    std::vector<NodeId> stack{from};
    std::set<NodeId> seen{from};
    while (!stack.empty()) {
        NodeId u = stack.back();
        stack.pop_back();
        for (const auto& v : succ[u]) {
            if (v == to) return true;
            if (seen.insert(v).second) stack.push_back(v);
        }
    }
    return false;
}

// Independent greedy-sweep grouping: O(n^2) pairwise absorption against
// the window anchor, per share group, written without the library's merge
// machinery.
struct OracleGroup {
    std::vector<std::string> members;
    usec span = 0;
};

inline std::vector<OracleGroup>
merge_oracle(std::vector<std::tuple<std::string, usec, std::string>> encoders, usec gamma) {
    // (id, release, group)
    std::sort(encoders.begin(), encoders.end(), [](const auto& a, const auto& b) {
        return std::tie(std::get<1>(a), std::get<0>(a)) <
               std::tie(std::get<1>(b), std::get<0>(b));
    });
    std::set<std::string> groups;
    for (const auto& e : encoders) groups.insert(std::get<2>(e));
    std::vector<OracleGroup> out;
    for (const auto& g : groups) {
        std::vector<std::pair<usec, std::string>> cohort;
        for (const auto& [id, rel, grp] : encoders)
            if (grp == g) cohort.emplace_back(rel, id);
        std::size_t i = 0;
        while (i < cohort.size()) {
            OracleGroup og;
            usec anchor = cohort[i].first;
            usec last = anchor;
            while (i < cohort.size() && cohort[i].first - anchor <= gamma) {
                og.members.push_back(cohort[i].second);
                last = cohort[i].first;
                ++i;
            }
            og.span = last - anchor;
            std::sort(og.members.begin(), og.members.end());
            out.push_back(std::move(og));
        }
    }
    std::sort(out.begin(), out.end(),
              [](const OracleGroup& a, const OracleGroup& b) { return a.members < b.members; });
    return out;
}

} // namespace testsupport
