#include <doctest.h>

#include <random>

#include "red/dag.hpp"

#include "support.hpp"

using namespace red;
using namespace testsupport;

TEST_CASE("validate accepts a minimal one-node task") {
    auto d = dag("t", {node("a", 1000)}, {}, ms_to_us_int(100));
    CHECK(validate_dag(d).ok);
}

TEST_CASE("validate names a two-node cycle") {
    auto d = dag("t", {node("a", 1000), node("b", 1000)}, {{"a", "b"}, {"b", "a"}},
                 ms_to_us_int(100));
    auto report = validate_dag(d);
    REQUIRE_FALSE(report.ok);
    bool found = false;
    for (const auto& v : report.violations) found |= v.code == "cycle";
    CHECK(found);
}

TEST_CASE("validate flags each invariant clause on mutated fixtures") {
    auto base = dag("t",
                    {node("e", 1000, NodeKind::SharedEncoder, "g"),
                     node("d", 1000, NodeKind::Decoder, "g", "e")},
                    {{"e", "d"}}, ms_to_us_int(100));
    REQUIRE(validate_dag(base).ok);

    auto has = [](const ValidationReport& r, const std::string& code) {
        for (const auto& v : r.violations)
            if (v.code == code) return true;
        return false;
    };

    SUBCASE("dangling decoder reference: encoder missing") {
        auto d = base;
        d.nodes.erase(d.nodes.begin()); // drop the encoder, keep its edge endpoints broken
        d.edges.clear();
        CHECK(has(validate_dag(d), "dangling decoder reference"));
    }
    SUBCASE("dangling decoder reference: no encoder named") {
        auto d = base;
        d.nodes[1].decoder_of.reset();
        CHECK(has(validate_dag(d), "dangling decoder reference"));
    }
    SUBCASE("dangling decoder reference: names a non-encoder") {
        auto d = base;
        d.nodes[0].kind = NodeKind::Monolithic;
        d.nodes[0].share_group.reset();
        CHECK(has(validate_dag(d), "dangling decoder reference"));
    }
    SUBCASE("encoder without share group") {
        auto d = base;
        d.nodes[0].share_group.reset();
        CHECK(has(validate_dag(d), "encoder without share group"));
    }
    SUBCASE("nonpositive cost") {
        auto d = base;
        d.nodes[0].cost_estimate = 0;
        CHECK(has(validate_dag(d), "nonpositive cost"));
    }
    SUBCASE("edge endpoint missing") {
        auto d = base;
        d.edges.push_back({"e", "zz"});
        CHECK(has(validate_dag(d), "edge endpoint missing"));
    }
    SUBCASE("duplicate node id") {
        auto d = base;
        d.nodes.push_back(d.nodes[0]);
        CHECK(has(validate_dag(d), "duplicate node id"));
    }
    SUBCASE("nonpositive deadline") {
        auto d = base;
        d.end_to_end_deadline = 0;
        CHECK(has(validate_dag(d), "nonpositive deadline"));
    }
    SUBCASE("nonpositive period") {
        auto d = base;
        d.period = 0;
        CHECK(has(validate_dag(d), "nonpositive period"));
    }
}

TEST_CASE("topological sort of a chain is forced") {
    auto d = dag("t", {node("a", 1), node("b", 1), node("c", 1)}, {{"a", "b"}, {"b", "c"}},
                 1000);
    CHECK(topological_sort(d) == std::vector<NodeId>{"a", "b", "c"});
}

TEST_CASE("topological sort breaks diamond ties by ascending id") {
    auto d = dag("t", {node("src", 1), node("a", 1), node("b", 1), node("sink", 1)},
                 {{"src", "a"}, {"src", "b"}, {"a", "sink"}, {"b", "sink"}}, 1000);
    CHECK(topological_sort(d) == std::vector<NodeId>{"src", "a", "b", "sink"});
}

TEST_CASE("topological sort of an empty task is empty") {
    DagTask d;
    d.task_id = "t";
    d.end_to_end_deadline = 1;
    CHECK(topological_sort(d).empty());
}

TEST_CASE("topological sort throws on a cycle") {
    auto d = dag("t", {node("a", 1), node("b", 1)}, {{"a", "b"}, {"b", "a"}}, 1000);
    CHECK_THROWS_AS(topological_sort(d), CycleError);
}

TEST_CASE("topological sort respects every edge on random graphs") {
    std::mt19937_64 rng(7);
    for (int iter = 0; iter < 60; ++iter) {
        auto d = random_dag(rng, 1 + static_cast<std::size_t>(rng() % 200), 0.05);
        auto order = topological_sort(d);
        std::map<NodeId, std::size_t> pos;
        for (std::size_t i = 0; i < order.size(); ++i) pos[order[i]] = i;
        for (const auto& [u, v] : d.edges) CHECK(pos.at(u) < pos.at(v));
        CHECK(validate_dag(d).ok);
    }
}

TEST_CASE("heights: single node is a source at height zero") {
    auto d = dag("t", {node("n", 1)}, {}, 1000);
    CHECK(compute_heights(d) == HeightMap{{"n", 0}});
}

TEST_CASE("heights on the diamond match the path structure") {
    auto d = dag("t", {node("src", 1), node("a", 1), node("b", 1), node("sink", 1)},
                 {{"src", "a"}, {"src", "b"}, {"a", "sink"}, {"b", "sink"}}, 1000);
    HeightMap expect{{"src", 0}, {"a", 1}, {"b", 1}, {"sink", 2}};
    CHECK(compute_heights(d) == expect);
}

TEST_CASE("heights of a merged-encoder fan-out are {0,1}") {
    auto d = dag("t",
                 {node("E", 3000, NodeKind::SharedEncoder, "g"),
                  node("dA", 1000, NodeKind::Decoder, "g", "E"),
                  node("dB", 1000, NodeKind::Decoder, "g", "E"),
                  node("dC", 1000, NodeKind::Decoder, "g", "E")},
                 {{"E", "dA"}, {"E", "dB"}, {"E", "dC"}}, 10000);
    auto h = compute_heights(d);
    CHECK(h.at("E") == 0);
    CHECK(h.at("dA") == 1);
    CHECK(h.at("dB") == 1);
    CHECK(h.at("dC") == 1);
}

TEST_CASE("heights equal brute-force longest-path search on small DAGs") {
    for (auto& d : all_dags(4)) {
        auto h = compute_heights(d);
        for (const auto& n : d.nodes) CHECK(h.at(n.id) == brute_force_height(d, n.id));
    }
    std::mt19937_64 rng(11);
    for (int iter = 0; iter < 200; ++iter) {
        auto d = random_dag(rng, 5 + rng() % 4, 0.35);
        auto h = compute_heights(d);
        for (const auto& n : d.nodes) CHECK(h.at(n.id) == brute_force_height(d, n.id));
    }
}

TEST_CASE("indegree-zero set") {
    auto chain = dag("t", {node("a", 1), node("b", 1), node("c", 1)},
                     {{"a", "b"}, {"b", "c"}}, 1000);
    CHECK(indegree_zero_set(chain) == std::set<NodeId>{"a"});
    auto disconnected = dag("t", {node("a", 1), node("b", 1)}, {}, 1000);
    CHECK(indegree_zero_set(disconnected) == std::set<NodeId>{"a", "b"});
    auto diamond = dag("t", {node("src", 1), node("a", 1), node("b", 1), node("sink", 1)},
                       {{"src", "a"}, {"src", "b"}, {"a", "sink"}, {"b", "sink"}}, 1000);
    CHECK(indegree_zero_set(diamond) == std::set<NodeId>{"src"});
}

TEST_CASE("mutation: obstacle-detection insertion yields a valid three-node DAG") {
    auto d = dag("nav", {node("A", 50'000), node("B", 30'000)}, {{"A", "B"}},
                 ms_to_us_int(130));
    d = apply_mutation(d, {MutationKind::AddNode, node("C", 50'000), {}, {}, 0});
    d = apply_mutation(d, {MutationKind::AddEdge, {}, {}, Edge{"A", "C"}, 0});
    d = apply_mutation(d, {MutationKind::AddEdge, {}, {}, Edge{"C", "B"}, 0});
    d = apply_mutation(d, {MutationKind::RemoveEdge, {}, {}, Edge{"A", "B"}, 0});
    CHECK(validate_dag(d).ok);
    CHECK(d.nodes.size() == 3);
    auto h = compute_heights(d);
    CHECK(h.at("A") == 0);
    CHECK(h.at("C") == 1);
    CHECK(h.at("B") == 2); // B stays the sink
}

TEST_CASE("mutation round trips are identity") {
    auto d = dag("t", {node("a", 1000), node("b", 1000)}, {{"a", "b"}}, 1000);
    SUBCASE("add node then remove it") {
        auto d2 = apply_mutation(d, {MutationKind::AddNode, node("c", 500), {}, {}, 0});
        auto d3 = apply_mutation(d2, {MutationKind::RemoveNode, {}, NodeId{"c"}, {}, 0});
        CHECK(structurally_equal(d, d3));
    }
    SUBCASE("add edge then remove it") {
        DagTask base = d;
        base.nodes.push_back(node("c", 500));
        auto d2 = apply_mutation(base, {MutationKind::AddEdge, {}, {}, Edge{"b", "c"}, 0});
        auto d3 = apply_mutation(d2, {MutationKind::RemoveEdge, {}, {}, Edge{"b", "c"}, 0});
        CHECK(structurally_equal(base, d3));
    }
}

TEST_CASE("mutations rejecting invalid results") {
    auto d = dag("t", {node("a", 1000), node("b", 1000)}, {{"a", "b"}}, 1000);
    CHECK_THROWS_AS(apply_mutation(d, {MutationKind::AddEdge, {}, {}, Edge{"b", "a"}, 0}),
                    InvalidMutation); // would close a cycle
    CHECK_THROWS_AS(apply_mutation(d, {MutationKind::RemoveNode, {}, NodeId{"zz"}, {}, 0}),
                    InvalidMutation);
    CHECK_THROWS_AS(apply_mutation(d, {MutationKind::AddEdge, {}, {}, Edge{"a", "b"}, 0}),
                    InvalidMutation); // duplicate edge
    CHECK_THROWS_AS(apply_mutation(d, {MutationKind::RemoveEdge, {}, {}, Edge{"b", "a"}, 0}),
                    InvalidMutation);
    CHECK_THROWS_AS(apply_mutation(d, {MutationKind::AddNode, node("a", 1), {}, {}, 0}),
                    InvalidMutation); // duplicate id
    // Purity: the input is untouched by all of the above.
    CHECK(structurally_equal(d, dag("t", {node("a", 1000), node("b", 1000)}, {{"a", "b"}},
                                    1000)));
}

TEST_CASE("random mutation round trips preserve structure") {
    std::mt19937_64 rng(23);
    for (int iter = 0; iter < 100; ++iter) {
        auto d = random_dag(rng, 2 + rng() % 12, 0.3);
        // Pick a non-edge (u < v order keeps it acyclic), add then remove.
        std::vector<Edge> candidates;
        for (std::size_t i = 0; i < d.nodes.size(); ++i)
            for (std::size_t j = i + 1; j < d.nodes.size(); ++j) {
                Edge e{d.nodes[i].id, d.nodes[j].id};
                if (std::find(d.edges.begin(), d.edges.end(), e) == d.edges.end())
                    candidates.push_back(e);
            }
        if (candidates.empty()) continue;
        Edge pick = candidates[rng() % candidates.size()];
        auto d2 = apply_mutation(d, {MutationKind::AddEdge, {}, {}, pick, 0});
        CHECK(validate_dag(d2).ok);
        auto d3 = apply_mutation(d2, {MutationKind::RemoveEdge, {}, {}, pick, 0});
        CHECK(structurally_equal(d, d3));
    }
}
