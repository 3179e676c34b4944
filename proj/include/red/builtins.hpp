#pragma once

#include <optional>
#include <string>
#include <vector>

#include "red/scenario_io.hpp"

namespace red {

enum class Tightness { Tight, Loose };

/// Synthetic per-platform stage costs for the minibenchmark. The published
/// end-to-end deadlines are real; the stage costs are fabricated so that
/// the tight deadline sits just under the coarse-schedule response and the
/// loose one sits above it.
struct PlatformProfile {
    std::string name;
    usec tight_deadline;
    usec loose_deadline;
    usec lane;      // L
    usec segment;   // S
    usec obstacle;  // O
    usec cruise;    // C
};

inline const std::vector<PlatformProfile>& platform_profiles() {
    static const std::vector<PlatformProfile> profiles = {
        {"nano", ms_to_us_int(9815), ms_to_us_int(11325), ms_to_us_int(2800),
         ms_to_us_int(2800), ms_to_us_int(2800), ms_to_us_int(1200)},
        {"tx2", ms_to_us_int(8400), ms_to_us_int(10080), ms_to_us_int(2500),
         ms_to_us_int(2500), ms_to_us_int(2500), ms_to_us_int(1300)},
        {"xavier", ms_to_us_int(6500), ms_to_us_int(7315), ms_to_us_int(1900),
         ms_to_us_int(1900), ms_to_us_int(1900), ms_to_us_int(900)},
        {"orin", ms_to_us_int(2400), ms_to_us_int(3600), ms_to_us_int(750),
         ms_to_us_int(750), ms_to_us_int(750), ms_to_us_int(350)},
    };
    return profiles;
}

inline const PlatformProfile& platform_profile(const std::string& name) {
    for (const auto& p : platform_profiles())
        if (p.name == name) return p;
    throw UnknownPlatform("unknown platform '" + name +
                          "' (expected nano, tx2, xavier or orin)");
}

namespace detail {

inline NodeSpec stage_node(const std::string& id, usec cost) {
    NodeSpec n;
    n.id = id;
    n.cost_estimate = cost;
    n.kind = NodeKind::Monolithic;
    n.share_group = "mimonet";
    return n;
}

} // namespace detail

/// The two-task-set navigation minibenchmark: ten obstacle-free cruising
/// jobs (L -> S -> C) followed by ten obstacle cruising jobs
/// (L -> S+O -> C), gamma = 100ms, constant execution at the profile
/// costs. All four stages are shared-encoder work, so the S+O stage merges
/// under refining policies.
inline ScenarioFile generate_minibench(const std::string& platform, Tightness tightness) {
    const PlatformProfile& p = platform_profile(platform);
    const usec deadline = tightness == Tightness::Tight ? p.tight_deadline : p.loose_deadline;
    const usec period = p.loose_deadline + ms_to_us_int(1000);

    DagTask free_set;
    free_set.task_id = "cruise-free";
    free_set.nodes = {detail::stage_node("L", p.lane), detail::stage_node("S", p.segment),
                      detail::stage_node("C", p.cruise)};
    free_set.edges = {{"L", "S"}, {"S", "C"}};
    free_set.end_to_end_deadline = deadline;
    free_set.period = period;

    DagTask obstacle_set;
    obstacle_set.task_id = "cruise-obstacle";
    obstacle_set.nodes = {detail::stage_node("L", p.lane), detail::stage_node("S", p.segment),
                          detail::stage_node("O", p.obstacle),
                          detail::stage_node("C", p.cruise)};
    obstacle_set.edges = {{"L", "S"}, {"L", "O"}, {"S", "C"}, {"O", "C"}};
    obstacle_set.end_to_end_deadline = deadline;
    obstacle_set.period = period;

    ScenarioFile f;
    f.scenario.name = "minibench:" + platform + ":" +
                      (tightness == Tightness::Tight ? "tight" : "loose");
    f.scenario.tasks.push_back({free_set, 0, 10});
    f.scenario.tasks.push_back({obstacle_set, 10 * period, 10});
    f.scenario.horizon = 21 * period;
    f.scenario.seed = 1;
    f.scenario.refine.gamma = ms_to_us_int(100);
    f.config.policy = Policy::RED;
    f.config.sync_interval = ms_to_us_int(200);
    f.config.sync_cost = ms_to_us_int(10);
    f.config.drop_policy = DropPolicy::NeverDrop;
    return f;
}

enum class CaseStudy { DynamicWorkload, AsyncDependent, AsyncIndependent };

inline std::optional<CaseStudy> parse_case_study(const std::string& s) {
    if (s == "dynamic-workload") return CaseStudy::DynamicWorkload;
    if (s == "async-dependent") return CaseStudy::AsyncDependent;
    if (s == "async-independent") return CaseStudy::AsyncIndependent;
    return std::nullopt;
}

inline const char* to_string(CaseStudy c) {
    switch (c) {
    case CaseStudy::DynamicWorkload: return "dynamic-workload";
    case CaseStudy::AsyncDependent: return "async-dependent";
    case CaseStudy::AsyncIndependent: return "async-independent";
    }
    return "?";
}

namespace detail {

// A 10Hz navigation pipeline that gains an object-detection node between
// cruising control and segmentation while obstacles are present
// (t in [3s, 6s)). Execution times vary, so the added stage overloads the
// accelerator and misses concentrate inside the window.
inline ScenarioFile dynamic_workload() {
    DagTask nav;
    nav.task_id = "nav";
    nav.nodes = {{"A", ms_to_us_int(50), NodeKind::Monolithic, {}, {}},
                 {"B", ms_to_us_int(30), NodeKind::Monolithic, {}, {}}};
    nav.edges = {{"A", "B"}};
    nav.end_to_end_deadline = ms_to_us_int(130);
    nav.period = ms_to_us_int(100);

    NodeSpec obstacle{"C", ms_to_us_int(50), NodeKind::Monolithic, {}, {}};

    ScenarioFile f;
    f.scenario.name = "case:dynamic-workload";
    f.scenario.tasks.push_back({nav, 0, 0});
    f.scenario.horizon = ms_to_us_int(9000);
    auto at = [&](usec t, DagMutation m) {
        m.effective_time = t;
        f.scenario.mutations.push_back({"nav", std::move(m)});
    };
    usec appear = ms_to_us_int(3000), clear = ms_to_us_int(6000);
    at(appear, {MutationKind::AddNode, obstacle, {}, {}, 0});
    at(appear, {MutationKind::AddEdge, {}, {}, Edge{"A", "C"}, 0});
    at(appear, {MutationKind::AddEdge, {}, {}, Edge{"C", "B"}, 0});
    at(appear, {MutationKind::RemoveEdge, {}, {}, Edge{"A", "B"}, 0});
    at(clear, {MutationKind::AddEdge, {}, {}, Edge{"A", "B"}, 0});
    at(clear, {MutationKind::RemoveEdge, {}, {}, Edge{"A", "C"}, 0});
    at(clear, {MutationKind::RemoveEdge, {}, {}, Edge{"C", "B"}, 0});
    at(clear, {MutationKind::RemoveNode, {}, NodeId{"C"}, {}, 0});
    f.scenario.exec.per_node["nav/A"] = UniformDist{ms_to_us_int(35), ms_to_us_int(75)};
    f.scenario.exec.per_node["nav/B"] = UniformDist{ms_to_us_int(15), ms_to_us_int(35)};
    f.scenario.exec.per_node["nav/C"] = UniformDist{ms_to_us_int(30), ms_to_us_int(55)};
    f.config.policy = Policy::EDF;
    f.config.drop_policy = DropPolicy::DropNodeOnMiss;
    f.config.sync_cost = 0;
    return f;
}

// Two single-node tasks at 30Hz and 33Hz, both with a 30ms deadline. In
// the dependent variant the detector consumes the freshest cruise sample:
// it waits for that job and its deadline is anchored at the sample's
// release, so the drifting phase between the two rates produces a periodic
// band of stale-sample misses. Independently the two tasks always fit.
inline ScenarioFile async_case(bool dependent) {
    DagTask cruise;
    cruise.task_id = "cruise";
    cruise.nodes = {{"A", ms_to_us_int(12), NodeKind::Monolithic, {}, {}}};
    cruise.end_to_end_deadline = ms_to_us_int(30);
    cruise.period = ms_to_us(1000.0 / 30.0);

    DagTask detect;
    detect.task_id = "detect";
    detect.nodes = {{"B", ms_to_us_int(5), NodeKind::Monolithic, {}, {}}};
    detect.end_to_end_deadline = ms_to_us_int(30);
    detect.period = ms_to_us(1000.0 / 33.0);

    ScenarioFile f;
    f.scenario.name = dependent ? "case:async-dependent" : "case:async-independent";
    f.scenario.tasks.push_back({cruise, 0, 0});
    f.scenario.tasks.push_back({detect, 0, 0});
    f.scenario.horizon = ms_to_us_int(10000);
    if (dependent) f.scenario.cross_deps.push_back({"cruise", "detect", true});
    f.config.policy = Policy::EDF;
    f.config.drop_policy = DropPolicy::NeverDrop;
    f.config.sync_cost = 0;
    return f;
}

} // namespace detail

inline ScenarioFile generate_case_study(CaseStudy which) {
    switch (which) {
    case CaseStudy::DynamicWorkload: return detail::dynamic_workload();
    case CaseStudy::AsyncDependent: return detail::async_case(true);
    case CaseStudy::AsyncIndependent: return detail::async_case(false);
    }
    throw ScenarioError("unknown case study");
}

/// The two-level fan-in example: A (20ms) and B (20ms) feed C (40ms),
/// end-to-end deadline 120ms. One job, constant costs.
inline ScenarioFile generate_worked_example() {
    DagTask op;
    op.task_id = "op";
    op.nodes = {{"A", ms_to_us_int(20), NodeKind::Monolithic, {}, {}},
                {"B", ms_to_us_int(20), NodeKind::Monolithic, {}, {}},
                {"C", ms_to_us_int(40), NodeKind::Monolithic, {}, {}}};
    op.edges = {{"A", "C"}, {"B", "C"}};
    op.end_to_end_deadline = ms_to_us_int(120);

    ScenarioFile f;
    f.scenario.name = "worked-example";
    f.scenario.tasks.push_back({op, 0, 1});
    f.scenario.horizon = ms_to_us_int(200);
    f.config.policy = Policy::EDF;
    f.config.sync_cost = 0;
    return f;
}

/// Three one-node tasks in one share group released together: refining
/// policies split them and execute one merged encoder plus three decoders.
inline ScenarioFile generate_mimo_demo() {
    ScenarioFile f;
    f.scenario.name = "mimo-demo";
    for (const std::string id : {"a", "b", "c"}) {
        DagTask t;
        t.task_id = id;
        NodeSpec n;
        n.id = "infer";
        n.cost_estimate = ms_to_us_int(100);
        n.share_group = "mimo";
        t.nodes = {n};
        t.end_to_end_deadline = ms_to_us_int(400);
        f.scenario.tasks.push_back({t, 0, 1});
    }
    f.scenario.horizon = ms_to_us_int(1000);
    f.config.policy = Policy::RED;
    f.config.sync_cost = 0;
    return f;
}

/// Throughput exercise: 25 staggered two-node pipelines, 400 jobs each,
/// comfortably over 10^5 trace events.
inline ScenarioFile generate_stress() {
    ScenarioFile f;
    f.scenario.name = "stress";
    for (int i = 0; i < 25; ++i) {
        DagTask t;
        t.task_id = "t" + std::string(i < 10 ? "0" : "") + std::to_string(i);
        t.nodes = {{"a", 400, NodeKind::Monolithic, {}, {}},
                   {"b", 500, NodeKind::Monolithic, {}, {}}};
        t.edges = {{"a", "b"}};
        t.end_to_end_deadline = ms_to_us_int(25);
        t.period = ms_to_us_int(25);
        f.scenario.tasks.push_back({t, i * 1000, 400});
    }
    f.scenario.horizon = ms_to_us_int(10100);
    f.config.policy = Policy::EDF;
    f.config.sync_cost = 0;
    return f;
}

inline std::vector<std::string> list_builtins() {
    std::vector<std::string> names;
    for (const auto& p : platform_profiles()) {
        names.push_back("minibench:" + p.name + ":tight");
        names.push_back("minibench:" + p.name + ":loose");
    }
    names.insert(names.end(), {"case:dynamic-workload", "case:async-dependent",
                               "case:async-independent", "worked-example", "mimo-demo",
                               "stress"});
    return names;
}

/// Resolves a builtin scenario name; nullopt when the name is not one.
inline std::optional<ScenarioFile> builtin_scenario(const std::string& name) {
    if (name.rfind("minibench:", 0) == 0) {
        auto rest = name.substr(10);
        auto colon = rest.find(':');
        if (colon == std::string::npos)
            throw UnknownPlatform("expected minibench:<platform>:<tight|loose>");
        std::string platform = rest.substr(0, colon);
        std::string t = rest.substr(colon + 1);
        if (t != "tight" && t != "loose")
            throw UnknownPlatform("expected minibench:<platform>:<tight|loose>");
        return generate_minibench(platform, t == "tight" ? Tightness::Tight : Tightness::Loose);
    }
    if (name.rfind("case:", 0) == 0) {
        auto c = parse_case_study(name.substr(5));
        if (!c) return std::nullopt;
        return generate_case_study(*c);
    }
    if (name == "worked-example") return generate_worked_example();
    if (name == "mimo-demo") return generate_mimo_demo();
    if (name == "stress") return generate_stress();
    return std::nullopt;
}

} // namespace red
