#pragma once

#include <map>
#include <optional>
#include <set>
#include <vector>

#include "red/dag.hpp"

namespace red {

/// Per-node intermediate deadlines. `relative` holds the budget of the
/// node's height level (all nodes of one level share it); `absolute` is
/// filled by absolutize()/reassign() and anchors budgets to a job release.
struct DeadlineMap {
    std::map<NodeId, usec> relative;
    std::map<NodeId, usec> absolute;
};

/// How a height level is weighted under proportional assignment when it
/// mixes nodes of different cost. MaxCost matches the worked reading (a
/// level is done when its slowest node is); SumCost is the documented
/// alternative.
enum class LevelWeight { MaxCost, SumCost };

namespace detail {

// Splits `total` across levels proportionally to `weights`, in integer
// units with an exact sum. Floor quotas first, then leftover units awarded
// by the d'Hondt rule (largest weight/(alloc+1)); ties go to the deeper
// level. A divisor completion keeps every budget non-decreasing in
// `total`, which largest-remainder apportionment does not guarantee.
inline std::vector<usec> apportion(usec total, const std::vector<usec>& weights) {
    const std::size_t n = weights.size();
    usec wsum = 0;
    for (usec w : weights) wsum += w;
    std::vector<usec> out(n, 0);
    if (n == 0 || wsum <= 0) return out;
    usec assigned = 0;
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = static_cast<usec>((static_cast<__int128>(total) * weights[i]) / wsum);
        assigned += out[i];
    }
    for (usec left = total - assigned; left > 0; --left) {
        std::size_t best = 0;
        bool have = false;
        for (std::size_t i = 0; i < n; ++i) {
            if (!have) {
                best = i;
                have = true;
                continue;
            }
            // weights[i]/(out[i]+1) vs weights[best]/(out[best]+1), exact.
            __int128 lhs = static_cast<__int128>(weights[i]) * (out[best] + 1);
            __int128 rhs = static_cast<__int128>(weights[best]) * (out[i] + 1);
            if (lhs > rhs || (lhs == rhs && i > best)) best = i;
        }
        ++out[best];
    }
    // Extreme weight ratios can starve a level to zero units; every level
    // must end positive, so pull single units back from the largest
    // budgets. Sums stay exact.
    if (total >= static_cast<usec>(n)) {
        for (std::size_t i = 0; i < n; ++i) {
            if (out[i] > 0) continue;
            std::size_t largest = 0;
            for (std::size_t k = 1; k < n; ++k)
                if (out[k] > out[largest]) largest = k;
            if (out[largest] <= 1) continue;
            --out[largest];
            ++out[i];
        }
    }
    return out;
}

// Distinct heights in ascending order with their weights.
inline std::vector<std::pair<int, usec>>
level_weights(const DagTask& dag, const HeightMap& heights, LevelWeight lw) {
    std::map<int, usec> acc;
    for (const auto& n : dag.nodes) {
        auto it = heights.find(n.id);
        if (it == heights.end()) continue;
        usec& w = acc[it->second];
        if (lw == LevelWeight::MaxCost)
            w = std::max(w, n.cost_estimate);
        else
            w += n.cost_estimate;
    }
    return {acc.begin(), acc.end()};
}

} // namespace detail

/// Proportional intermediate deadline assignment: level j receives
/// D * w_j / sum(w), where w_j is the level weight (max node cost by
/// default). Budgets sum to D exactly.
inline DeadlineMap assign_proportional(const DagTask& dag, const HeightMap& heights,
                                       LevelWeight lw = LevelWeight::MaxCost) {
    if (dag.nodes.empty())
        throw EmptyDagError("assign_proportional: '" + dag.task_id + "' has no nodes");
    auto levels = detail::level_weights(dag, heights, lw);
    std::vector<usec> weights;
    weights.reserve(levels.size());
    for (const auto& [h, w] : levels) weights.push_back(w);
    auto budgets = detail::apportion(dag.end_to_end_deadline, weights);
    std::map<int, usec> by_height;
    for (std::size_t i = 0; i < levels.size(); ++i) by_height[levels[i].first] = budgets[i];
    DeadlineMap dm;
    for (const auto& n : dag.nodes) dm.relative[n.id] = by_height.at(heights.at(n.id));
    return dm;
}

/// Equal assignment: each of the L levels receives floor(D/L); the
/// remainder goes to the deepest level so the sum stays exactly D.
inline DeadlineMap assign_equal(const DagTask& dag, const HeightMap& heights) {
    if (dag.nodes.empty())
        throw EmptyDagError("assign_equal: '" + dag.task_id + "' has no nodes");
    std::set<int> hs;
    for (const auto& [id, h] : heights) hs.insert(h);
    const usec levels = static_cast<usec>(hs.size());
    const usec share = dag.end_to_end_deadline / levels;
    const usec remainder = dag.end_to_end_deadline - share * levels;
    const int deepest = *hs.rbegin();
    DeadlineMap dm;
    for (const auto& n : dag.nodes) {
        int h = heights.at(n.id);
        dm.relative[n.id] = share + (h == deepest ? remainder : 0);
    }
    return dm;
}

/// Anchors relative budgets to a release time: absolute(n) = release +
/// cumulative budget of all levels up to and including n's level.
inline DeadlineMap absolutize(const DeadlineMap& dm, const HeightMap& heights, usec release) {
    std::map<int, usec> level_budget;
    for (const auto& [id, rel] : dm.relative) level_budget[heights.at(id)] = rel;
    std::map<int, usec> cumulative;
    usec acc = 0;
    for (const auto& [h, b] : level_budget) {
        acc += b;
        cumulative[h] = acc;
    }
    DeadlineMap out = dm;
    out.absolute.clear();
    for (const auto& [id, rel] : dm.relative)
        out.absolute[id] = release + cumulative.at(heights.at(id));
    return out;
}

/// Runtime progress of one job, captured at a scheduling point.
struct ProgressSnapshot {
    usec now = 0;
    usec job_release = 0;
    std::set<NodeId> completed;
    std::map<NodeId, usec> remaining_cost; // unfinished nodes only
};

/// Re-assigns intermediate deadlines at a scheduling point: the residual
/// budget (deadline_abs - now) is split proportionally over the unfinished
/// levels, each weighted by its max remaining cost, and anchored at `now`.
/// Finished nodes keep their recorded completion and are absent from the
/// result. Returns nullopt when the budget is already exhausted
/// (deadline_abs <= now), signalling the drop policy.
inline std::optional<DeadlineMap> reassign(const HeightMap& heights,
                                           const ProgressSnapshot& snap, usec deadline_abs,
                                           LevelWeight lw = LevelWeight::MaxCost) {
    if (deadline_abs <= snap.now) return std::nullopt;
    std::map<int, usec> level_weight;
    for (const auto& [id, cost] : snap.remaining_cost) {
        if (snap.completed.count(id)) continue;
        usec& w = level_weight[heights.at(id)];
        if (lw == LevelWeight::MaxCost)
            w = std::max(w, cost);
        else
            w += cost;
    }
    if (level_weight.empty()) return std::nullopt; // nothing unfinished
    // A residual smaller than the level count cannot give every level a
    // positive budget; that job is as good as out of budget.
    if (deadline_abs - snap.now < static_cast<usec>(level_weight.size()))
        return std::nullopt;
    std::vector<usec> weights;
    weights.reserve(level_weight.size());
    for (const auto& [h, w] : level_weight) weights.push_back(w);
    auto budgets = detail::apportion(deadline_abs - snap.now, weights);
    std::map<int, usec> rel_by_height, abs_by_height;
    usec acc = snap.now;
    std::size_t i = 0;
    for (const auto& [h, w] : level_weight) {
        rel_by_height[h] = budgets[i];
        acc += budgets[i];
        abs_by_height[h] = acc;
        ++i;
    }
    DeadlineMap out;
    for (const auto& [id, cost] : snap.remaining_cost) {
        int h = heights.at(id);
        out.relative[id] = rel_by_height.at(h);
        out.absolute[id] = abs_by_height.at(h);
    }
    return out;
}

} // namespace red
