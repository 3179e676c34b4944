#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "red/dag.hpp"

namespace red {

/// Refinement knobs. gamma is the merge window: same-group encoders whose
/// release times differ by at most gamma execute as one shared inference.
struct RefineConfig {
    usec gamma = ms_to_us_int(100);
    // Affine cost model for inter-DAG decoder batching (Fig-4-style); the
    // batch pass is off unless enable_batching is set.
    usec batch_base = 0;
    usec batch_per_item = 0;
    bool enable_batching = false;
    // Encoder share (percent) of a split node's cost, per share group.
    std::map<std::string, int> split_encoder_pct;
    int default_split_pct = 60;
    // Optional cost added to a merged encoder per extra input, for
    // sensitivity studies. Zero models free weight-shared batching.
    usec merge_surcharge_per_extra = 0;

    int split_pct(const std::string& group) const {
        auto it = split_encoder_pct.find(group);
        return it == split_encoder_pct.end() ? default_split_pct : it->second;
    }
};

/// One DynamicMerge output group. Singletons cover non-mergeable nodes.
struct MergedTask {
    std::vector<NodeId> members; // sorted
    std::string share_group;     // empty for non-encoder singletons
    usec merged_cost = 0;
    usec release_span = 0;
    usec release = 0; // max member release: merged work starts when all inputs exist
};

/// Result of the structure refinement: the fine-grained graph, the merge
/// groups it embeds, and per-node provenance back to (task, node) pairs of
/// the input DAGs.
struct RefinedDag {
    DagTask graph;
    std::vector<MergedTask> merge_groups;
    std::map<NodeId, std::vector<std::pair<std::string, NodeId>>> provenance;
    std::map<NodeId, usec> release; // effective release per refined node
};

namespace detail {

inline NodeId enc_id(const NodeId& id) { return id + ".enc"; }
inline NodeId dec_id(const NodeId& id) { return id + ".dec"; }

} // namespace detail

/// Splits each Monolithic node carrying a share_group into a SharedEncoder
/// -> Decoder pair; incoming edges attach to the encoder, outgoing edges to
/// the decoder, and the two costs sum to the original exactly. Nodes
/// without a share_group pass through unchanged.
inline DagTask split_mimonet_nodes(const DagTask& dag, const RefineConfig& cfg = {}) {
    DagTask out;
    out.task_id = dag.task_id;
    out.end_to_end_deadline = dag.end_to_end_deadline;
    out.period = dag.period;
    std::set<NodeId> split;
    for (const auto& n : dag.nodes) {
        if (n.kind == NodeKind::Monolithic && n.share_group) {
            const usec enc_cost = n.cost_estimate * cfg.split_pct(*n.share_group) / 100;
            const usec dec_cost = n.cost_estimate - enc_cost;
            NodeSpec enc{detail::enc_id(n.id), enc_cost, NodeKind::SharedEncoder,
                         n.share_group, std::nullopt};
            NodeSpec dec{detail::dec_id(n.id), dec_cost, NodeKind::Decoder, n.share_group,
                         enc.id};
            out.nodes.push_back(enc);
            out.nodes.push_back(dec);
            out.edges.emplace_back(enc.id, dec.id);
            split.insert(n.id);
        } else {
            out.nodes.push_back(n);
        }
    }
    for (const auto& [u, v] : dag.edges) {
        NodeId from = split.count(u) ? detail::dec_id(u) : u;
        NodeId to = split.count(v) ? detail::enc_id(v) : v;
        out.edges.emplace_back(from, to);
    }
    return out;
}

/// A node eligible for DynamicMerge, with the context the grouping rule
/// needs. `release` is when the node's inputs become available.
struct MergeCandidate {
    NodeId id;
    usec release = 0;
    NodeKind kind = NodeKind::Monolithic;
    std::string share_group; // empty when none
    usec cost = 0;
};

/// DynamicMerge: partitions ready (indegree-0) nodes into execution
/// groups. Same-group SharedEncoders are swept in release order; a group
/// opens at the earliest unassigned node and absorbs followers while their
/// release difference from the group's earliest member is <= gamma
/// (boundary inclusive). Everything else is a singleton. The merged cost
/// is one encoder cost (max across members), not the sum.
inline std::vector<MergedTask> dynamic_merge(std::vector<MergeCandidate> ready,
                                             const RefineConfig& cfg) {
    std::sort(ready.begin(), ready.end(), [](const MergeCandidate& a, const MergeCandidate& b) {
        return std::tie(a.release, a.id) < std::tie(b.release, b.id);
    });
    std::vector<MergedTask> groups;
    std::set<std::string> swept;
    for (const auto& c : ready) {
        if (c.kind != NodeKind::SharedEncoder) {
            MergedTask t;
            t.members = {c.id};
            t.merged_cost = c.cost;
            t.release = c.release;
            groups.push_back(std::move(t));
            continue;
        }
        if (swept.count(c.share_group)) continue;
        swept.insert(c.share_group);
        // Sweep all encoders of this share group, earliest release first.
        std::vector<const MergeCandidate*> cohort;
        for (const auto& e : ready)
            if (e.kind == NodeKind::SharedEncoder && e.share_group == c.share_group)
                cohort.push_back(&e);
        std::size_t i = 0;
        while (i < cohort.size()) {
            MergedTask t;
            t.share_group = c.share_group;
            const usec anchor = cohort[i]->release;
            usec last = anchor;
            while (i < cohort.size() && cohort[i]->release - anchor <= cfg.gamma) {
                t.members.push_back(cohort[i]->id);
                t.merged_cost = std::max(t.merged_cost, cohort[i]->cost);
                last = cohort[i]->release;
                ++i;
            }
            t.release_span = last - anchor;
            t.release = last;
            if (t.members.size() > 1)
                t.merged_cost +=
                    cfg.merge_surcharge_per_extra * static_cast<usec>(t.members.size() - 1);
            std::sort(t.members.begin(), t.members.end());
            groups.push_back(std::move(t));
        }
    }
    std::sort(groups.begin(), groups.end(), [](const MergedTask& a, const MergedTask& b) {
        return std::tie(a.members.front(), a.share_group) <
               std::tie(b.members.front(), b.share_group);
    });
    return groups;
}

/// Inter-DAG batch execution of same-height decoders: one node whose
/// completion releases every member's successors, with an affine cost.
/// Returns nullopt for an empty input set.
inline std::optional<NodeSpec> batch_group(const std::vector<NodeId>& decoders,
                                           const RefineConfig& cfg) {
    if (decoders.empty()) return std::nullopt;
    auto sorted = decoders;
    std::sort(sorted.begin(), sorted.end());
    NodeSpec n;
    n.id = "batch(";
    for (std::size_t i = 0; i < sorted.size(); ++i)
        n.id += (i ? "+" : "") + sorted[i];
    n.id += ")";
    n.kind = NodeKind::Monolithic;
    n.cost_estimate = cfg.batch_base + cfg.batch_per_item * static_cast<usec>(sorted.size());
    return n;
}

namespace detail {

inline NodeId merged_id(const std::vector<NodeId>& members) {
    if (members.size() == 1) return members.front();
    NodeId id = "merge(";
    for (std::size_t i = 0; i < members.size(); ++i) id += (i ? "+" : "") + members[i];
    return id + ")";
}

} // namespace detail

/// The full structure-refining loop: split shared-inference nodes, then
/// repeatedly peel the indegree-0 set of the combined graph, DynamicMerge
/// it, and append the groups to the fine-grained output graph. Edges
/// into/out of merged nodes are the unions of their members' edges.
inline RefinedDag refine(const std::vector<std::pair<DagTask, usec>>& dags,
                         const RefineConfig& cfg) {
    // Combined namespaced residual graph.
    struct Work {
        NodeSpec spec;
        usec release;
        std::string task;
        NodeId original; // pre-split id
    };
    std::map<NodeId, Work> pending;
    std::vector<Edge> combined_edges;
    for (const auto& [dag, release] : dags) {
        DagTask fine = split_mimonet_nodes(dag, cfg);
        for (const auto& n : fine.nodes) {
            NodeId qualified = dag.task_id + "/" + n.id;
            NodeId original = n.id;
            if (original.size() > 4 &&
                (original.ends_with(".enc") || original.ends_with(".dec")))
                original = original.substr(0, original.size() - 4);
            NodeSpec spec = n;
            spec.id = qualified;
            if (spec.decoder_of) *spec.decoder_of = dag.task_id + "/" + *spec.decoder_of;
            pending.emplace(qualified, Work{spec, release, dag.task_id, original});
        }
        for (const auto& [u, v] : fine.edges)
            combined_edges.emplace_back(dag.task_id + "/" + u, dag.task_id + "/" + v);
    }

    std::map<NodeId, int> indeg;
    std::map<NodeId, std::vector<NodeId>> succ;
    for (const auto& [id, w] : pending) indeg[id] = 0;
    for (const auto& [u, v] : combined_edges) {
        ++indeg[v];
        succ[u].push_back(v);
    }

    RefinedDag out;
    out.graph.task_id = "refined";
    std::map<NodeId, NodeId> refined_of; // combined node -> refined graph node
    std::map<int, std::vector<NodeId>> layer_decoders;
    int layer = 0;
    while (!pending.empty()) {
        std::vector<MergeCandidate> ready;
        for (const auto& [id, w] : pending)
            if (indeg.at(id) == 0)
                ready.push_back({id, w.release, w.spec.kind,
                                 w.spec.share_group.value_or(""), w.spec.cost_estimate});
        if (ready.empty())
            throw CycleError("refine: combined task graph contains a cycle");
        auto groups = dynamic_merge(ready, cfg);
        for (const auto& g : groups) {
            NodeId rid = detail::merged_id(g.members);
            NodeSpec spec = pending.at(g.members.front()).spec;
            spec.id = rid;
            spec.cost_estimate = g.merged_cost;
            if (g.members.size() > 1) {
                spec.kind = NodeKind::SharedEncoder;
                spec.share_group = g.share_group;
                spec.decoder_of.reset();
            }
            // Encoders peel in an earlier layer than their decoders, so the
            // reference is already refined.
            if (spec.decoder_of) spec.decoder_of = refined_of.at(*spec.decoder_of);
            out.graph.nodes.push_back(spec);
            out.merge_groups.push_back(g);
            out.release[rid] = g.release;
            for (const auto& m : g.members) {
                refined_of[m] = rid;
                const Work& w = pending.at(m);
                out.provenance[rid].emplace_back(w.task, w.original);
            }
            std::sort(out.provenance[rid].begin(), out.provenance[rid].end());
            if (spec.kind == NodeKind::Decoder) layer_decoders[layer].push_back(rid);
        }
        for (const auto& c : ready) {
            for (const auto& v : succ[c.id]) --indeg[v];
            pending.erase(c.id);
        }
        ++layer;
    }

    // Edges between refined nodes: union of member edges, deduplicated.
    std::set<Edge> edges;
    for (const auto& [u, v] : combined_edges) {
        NodeId ru = refined_of.at(u), rv = refined_of.at(v);
        if (ru != rv) edges.insert({ru, rv});
    }

    if (cfg.enable_batching) {
        for (const auto& [lyr, decs] : layer_decoders) {
            if (decs.size() < 2) continue;
            auto batch = batch_group(decs, cfg);
            usec rel = 0;
            for (const auto& d : decs) rel = std::max(rel, out.release.at(d));
            std::set<Edge> rewired;
            for (const auto& [u, v] : edges) {
                NodeId nu = u, nv = v;
                if (std::find(decs.begin(), decs.end(), u) != decs.end()) nu = batch->id;
                if (std::find(decs.begin(), decs.end(), v) != decs.end()) nv = batch->id;
                if (nu != nv) rewired.insert({nu, nv});
            }
            edges = std::move(rewired);
            std::vector<std::pair<std::string, NodeId>> prov;
            for (const auto& d : decs) {
                for (const auto& p : out.provenance.at(d)) prov.push_back(p);
                out.provenance.erase(d);
                out.release.erase(d);
                std::erase_if(out.graph.nodes,
                              [&](const NodeSpec& n) { return n.id == d; });
            }
            std::sort(prov.begin(), prov.end());
            out.graph.nodes.push_back(*batch);
            out.provenance[batch->id] = std::move(prov);
            out.release[batch->id] = rel;
        }
    }

    out.graph.edges.assign(edges.begin(), edges.end());
    // Structural container only: give it a valid deadline so validate_dag
    // holds (per-task deadlines keep their meaning in the originals).
    for (const auto& [dag, rel] : dags)
        out.graph.end_to_end_deadline =
            std::max(out.graph.end_to_end_deadline, dag.end_to_end_deadline);
    if (out.graph.end_to_end_deadline == 0) out.graph.end_to_end_deadline = 1;
    return out;
}

} // namespace red
