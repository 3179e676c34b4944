#include <doctest.h>

#include <random>

#include "red/deadline.hpp"

#include "support.hpp"

using namespace red;
using namespace testsupport;

namespace {

DagTask worked_example() {
    return dag("op", {node("A", ms_to_us_int(20)), node("B", ms_to_us_int(20)),
                      node("C", ms_to_us_int(40))},
               {{"A", "C"}, {"B", "C"}}, ms_to_us_int(120));
}

usec budget_sum(const HeightMap& h, const DeadlineMap& dm) {
    std::map<int, usec> per_level;
    for (const auto& [id, rel] : dm.relative) per_level[h.at(id)] = rel;
    usec sum = 0;
    for (const auto& [lvl, b] : per_level) sum += b;
    return sum;
}

} // namespace

TEST_CASE("proportional assignment reproduces the 40/40/80 example") {
    auto d = worked_example();
    auto dm = assign_proportional(d, compute_heights(d));
    CHECK(dm.relative.at("A") == ms_to_us_int(40));
    CHECK(dm.relative.at("B") == ms_to_us_int(40));
    CHECK(dm.relative.at("C") == ms_to_us_int(80));
}

TEST_CASE("a single node receives the whole deadline") {
    auto d = dag("t", {node("n", 123)}, {}, ms_to_us_int(77));
    auto dm = assign_proportional(d, compute_heights(d));
    CHECK(dm.relative.at("n") == ms_to_us_int(77));
}

TEST_CASE("proportional split of a 10/20/30 chain under D=120") {
    auto d = dag("t",
                 {node("a", ms_to_us_int(10)), node("b", ms_to_us_int(20)),
                  node("c", ms_to_us_int(30))},
                 {{"a", "b"}, {"b", "c"}}, ms_to_us_int(120));
    auto dm = assign_proportional(d, compute_heights(d));
    CHECK(dm.relative.at("a") == ms_to_us_int(20));
    CHECK(dm.relative.at("b") == ms_to_us_int(40));
    CHECK(dm.relative.at("c") == ms_to_us_int(60));
}

TEST_CASE("equal assignment splits evenly, remainder to the deepest level") {
    SUBCASE("two levels divide cleanly") {
        auto d = dag("t", {node("a", 1), node("b", 1)}, {{"a", "b"}}, ms_to_us_int(120));
        auto dm = assign_equal(d, compute_heights(d));
        CHECK(dm.relative.at("a") == ms_to_us_int(60));
        CHECK(dm.relative.at("b") == ms_to_us_int(60));
    }
    SUBCASE("remainder lands on the deepest level") {
        auto d = dag("t", {node("a", 1), node("b", 1), node("c", 1)},
                     {{"a", "b"}, {"b", "c"}}, 100);
        auto dm = assign_equal(d, compute_heights(d));
        CHECK(dm.relative.at("a") == 33);
        CHECK(dm.relative.at("b") == 33);
        CHECK(dm.relative.at("c") == 34);
    }
    SUBCASE("one level gets everything") {
        auto d = dag("t", {node("a", 1), node("b", 1)}, {}, 999);
        auto dm = assign_equal(d, compute_heights(d));
        CHECK(dm.relative.at("a") == 999);
        CHECK(dm.relative.at("b") == 999);
    }
}

TEST_CASE("empty task is rejected") {
    DagTask d;
    d.task_id = "t";
    d.end_to_end_deadline = 1000;
    CHECK_THROWS_AS(assign_proportional(d, {}), EmptyDagError);
    CHECK_THROWS_AS(assign_equal(d, {}), EmptyDagError);
}

TEST_CASE("absolutize accumulates level budgets from the release") {
    auto d = worked_example();
    auto h = compute_heights(d);
    auto dm = assign_proportional(d, h);
    SUBCASE("release at zero") {
        auto abs = absolutize(dm, h, 0);
        CHECK(abs.absolute.at("A") == ms_to_us_int(40));
        CHECK(abs.absolute.at("B") == ms_to_us_int(40));
        CHECK(abs.absolute.at("C") == ms_to_us_int(120));
    }
    SUBCASE("release translation shifts every absolute") {
        auto base = absolutize(dm, h, 0);
        auto shifted = absolutize(dm, h, ms_to_us_int(1000));
        for (const auto& [id, abs] : base.absolute)
            CHECK(shifted.absolute.at(id) == abs + ms_to_us_int(1000));
    }
    SUBCASE("single node") {
        auto d1 = dag("t", {node("n", 5)}, {}, ms_to_us_int(77));
        auto h1 = compute_heights(d1);
        auto abs = absolutize(assign_proportional(d1, h1), h1, ms_to_us_int(3));
        CHECK(abs.absolute.at("n") == ms_to_us_int(80));
    }
}

TEST_CASE("reassign spreads the residual budget") {
    auto d = worked_example();
    auto h = compute_heights(d);
    SUBCASE("after the first level finished early, the sink owns the residual") {
        ProgressSnapshot snap;
        snap.now = ms_to_us_int(30);
        snap.job_release = 0;
        snap.completed = {"A", "B"};
        snap.remaining_cost = {{"C", ms_to_us_int(40)}};
        auto dm = reassign(h, snap, ms_to_us_int(120));
        REQUIRE(dm.has_value());
        CHECK(dm->relative.at("C") == ms_to_us_int(90));
        CHECK(dm->absolute.at("C") == ms_to_us_int(120));
        CHECK_FALSE(dm->relative.count("A"));
    }
    SUBCASE("at release with nothing done it matches the initial assignment") {
        ProgressSnapshot snap;
        snap.now = ms_to_us_int(500);
        snap.job_release = ms_to_us_int(500);
        for (const auto& n : d.nodes) snap.remaining_cost[n.id] = n.cost_estimate;
        auto dm = reassign(h, snap, ms_to_us_int(620));
        REQUIRE(dm.has_value());
        auto initial = absolutize(assign_proportional(d, h), h, ms_to_us_int(500));
        for (const auto& [id, abs] : initial.absolute) {
            CHECK(dm->absolute.at(id) == abs);
            CHECK(dm->relative.at(id) == initial.relative.at(id));
        }
    }
    SUBCASE("an exhausted budget is signalled, not distributed") {
        ProgressSnapshot snap;
        snap.now = ms_to_us_int(130);
        snap.remaining_cost = {{"C", ms_to_us_int(40)}};
        CHECK_FALSE(reassign(h, snap, ms_to_us_int(120)).has_value());
        snap.now = ms_to_us_int(120); // boundary: nothing left either
        CHECK_FALSE(reassign(h, snap, ms_to_us_int(120)).has_value());
    }
    SUBCASE("a residual too small for a budget per level counts as exhausted") {
        ProgressSnapshot snap;
        snap.now = ms_to_us_int(120) - 1; // 1us left over two levels
        for (const auto& n : d.nodes) snap.remaining_cost[n.id] = n.cost_estimate;
        CHECK_FALSE(reassign(h, snap, ms_to_us_int(120)).has_value());
    }
    SUBCASE("a partially finished level is weighted by its max remaining cost") {
        // A done, B still pending at level 0 with 15ms left, C untouched.
        ProgressSnapshot snap;
        snap.now = ms_to_us_int(20);
        snap.completed = {"A"};
        snap.remaining_cost = {{"B", ms_to_us_int(15)}, {"C", ms_to_us_int(40)}};
        auto dm = reassign(h, snap, ms_to_us_int(130));
        REQUIRE(dm.has_value());
        // residual 110 split 15:40 -> 30000us and 80000us
        CHECK(dm->relative.at("B") == ms_to_us_int(30));
        CHECK(dm->relative.at("C") == ms_to_us_int(80));
        CHECK(dm->absolute.at("B") == ms_to_us_int(50));
        CHECK(dm->absolute.at("C") == ms_to_us_int(130));
    }
}

TEST_CASE("budget sums are exact for random tasks under both strategies") {
    std::mt19937_64 rng(5);
    for (int iter = 0; iter < 300; ++iter) {
        auto d = random_dag(rng, 1 + rng() % 60, 0.08);
        auto h = compute_heights(d);
        CHECK(budget_sum(h, assign_proportional(d, h)) == d.end_to_end_deadline);
        CHECK(budget_sum(h, assign_equal(d, h)) == d.end_to_end_deadline);
        CHECK(budget_sum(h, assign_proportional(d, h, LevelWeight::SumCost)) ==
              d.end_to_end_deadline);
    }
}

TEST_CASE("level consistency: nodes of one height share one relative deadline") {
    std::mt19937_64 rng(6);
    for (int iter = 0; iter < 100; ++iter) {
        auto d = random_dag(rng, 2 + rng() % 40, 0.1);
        auto h = compute_heights(d);
        for (const auto& dm : {assign_proportional(d, h), assign_equal(d, h)}) {
            std::map<int, usec> seen;
            for (const auto& [id, rel] : dm.relative) {
                CHECK(rel > 0);
                auto [it, fresh] = seen.emplace(h.at(id), rel);
                if (!fresh) CHECK(it->second == rel);
            }
        }
    }
}

TEST_CASE("proportional weights are scale-equivariant") {
    std::mt19937_64 rng(9);
    for (int iter = 0; iter < 100; ++iter) {
        auto d = random_dag(rng, 1 + rng() % 20, 0.2, 5000);
        auto h = compute_heights(d);
        auto base = assign_proportional(d, h);
        auto scaled_dag = d;
        usec k = 1 + static_cast<usec>(rng() % 7);
        for (auto& n : scaled_dag.nodes) n.cost_estimate *= k;
        auto scaled = assign_proportional(scaled_dag, h);
        CHECK(base.relative == scaled.relative);
    }
}

TEST_CASE("budgets stay positive even under extreme weight ratios") {
    auto d = dag("t", {node("big", 10'000'000), node("tiny", 1)}, {{"big", "tiny"}},
                 120'000);
    auto h = compute_heights(d);
    for (auto lw : {LevelWeight::MaxCost, LevelWeight::SumCost}) {
        auto dm = assign_proportional(d, h, lw);
        CHECK(dm.relative.at("big") > 0);
        CHECK(dm.relative.at("tiny") > 0);
        CHECK(dm.relative.at("big") + dm.relative.at("tiny") == 120'000);
    }
}

TEST_CASE("monotonicity holds through the positivity repair") {
    auto d = dag("t", {node("big", 10'000'000), node("mid", 9'999'999), node("tiny", 1)},
                 {{"big", "mid"}, {"mid", "tiny"}}, 2);
    auto h = compute_heights(d);
    std::map<NodeId, usec> prev;
    for (usec D = 3; D < 400; ++D) {
        auto grown = d;
        grown.end_to_end_deadline = D;
        auto dm = assign_proportional(grown, h);
        usec sum = 0;
        for (const auto& [id, rel] : dm.relative) {
            CHECK(rel > 0);
            if (prev.count(id)) CHECK(rel >= prev.at(id));
            sum += rel;
        }
        CHECK(sum == D);
        prev = dm.relative;
    }
}

TEST_CASE("enlarging the deadline never shrinks a level budget") {
    std::mt19937_64 rng(13);
    for (int iter = 0; iter < 400; ++iter) {
        auto d = random_dag(rng, 1 + rng() % 15, 0.25, 2000);
        auto h = compute_heights(d);
        auto before = assign_proportional(d, h);
        auto grown = d;
        grown.end_to_end_deadline += 1 + static_cast<usec>(rng() % 1000);
        auto after = assign_proportional(grown, h);
        for (const auto& [id, rel] : before.relative) CHECK(after.relative.at(id) >= rel);
    }
}
