#include <doctest.h>

#include <cmath>

#include "red/builtins.hpp"
#include "red/engine.hpp"
#include "red/metrics.hpp"

#include "support.hpp"

using namespace red;
using namespace testsupport;

namespace {

JobRecord make_job(const std::string& task, std::int64_t index, usec release, usec deadline,
                   std::optional<usec> finish, bool dropped = false) {
    JobRecord j;
    j.task = task;
    j.index = index;
    j.release = release;
    j.e2e_deadline = release + deadline;
    j.nodes["n"] = TraceNode{"n", 1000, release + deadline, 0, NodeKind::Monolithic, ""};
    if (finish) {
        j.completion["n"] = *finish;
        j.complete_info["n"] =
            CompletePayload{release, *finish - release, release + deadline,
                            *finish <= release + deadline};
    } else if (dropped) {
        j.dropped["n"] = "deadline";
    }
    return j;
}

} // namespace

TEST_CASE("QoE is exactly one when execution fits the slack") {
    QoEParams p;
    CHECK(qoe_score(ms_to_us_int(20), ms_to_us_int(20), p) == 1.0);
    CHECK(qoe_score(0, 0, p) == 1.0);
    CHECK(qoe_score(ms_to_us_int(5), ms_to_us_int(500), p) == 1.0);
}

TEST_CASE("QoE closed-form spot values") {
    QoEParams p; // lambda 1, unit = 1s
    CHECK(std::abs(qoe_score(2'000'000, 1'000'000, p) - 1.0 / (1.0 + std::exp(1.0))) < 1e-12);
    p.lambda = 0.0;
    CHECK(std::abs(qoe_score(2'000'000, 1'000'000, p) - 0.5) < 1e-12);
}

TEST_CASE("QoE decreases in overshoot, and in lambda for positive overshoot") {
    for (double lambda : {0.001, 0.01, 0.1, 1.0, 10.0}) {
        QoEParams p{lambda, 1'000'000};
        double prev = 1.0;
        for (usec over = 100'000; over <= 3'000'000; over += 100'000) {
            double s = qoe_score(1'000'000 + over, 1'000'000, p);
            CHECK(s < prev);
            CHECK(s > 0.0);
            prev = s;
        }
    }
    double prev = 1.0;
    for (double lambda : {0.001, 0.01, 0.1, 1.0, 10.0}) {
        double s = qoe_score(1'500'000, 1'000'000, QoEParams{lambda, 1'000'000});
        CHECK(s < prev);
        prev = s;
    }
}

TEST_CASE("miss and drop rates count disjoint categories") {
    std::vector<JobRecord> jobs;
    SUBCASE("one late completion in ten releases") {
        for (int i = 0; i < 10; ++i) {
            usec release = i * 100'000;
            usec finish = release + (i == 3 ? 60'000 : 40'000);
            jobs.push_back(make_job("t", i, release, 50'000, finish));
        }
        auto rep = miss_drop_rates(jobs);
        CHECK(rep.job_rates.at("t").miss_rate() == doctest::Approx(0.1));
        CHECK(rep.job_rates.at("t").drop_rate() == 0.0);
    }
    SUBCASE("all on time") {
        for (int i = 0; i < 5; ++i)
            jobs.push_back(make_job("t", i, 0, 50'000, usec{10'000}));
        auto rep = miss_drop_rates(jobs);
        CHECK(rep.job_rates.at("t").miss_rate() == 0.0);
        CHECK(rep.job_rates.at("t").drop_rate() == 0.0);
    }
    SUBCASE("all dropped") {
        for (int i = 0; i < 5; ++i)
            jobs.push_back(make_job("t", i, 0, 50'000, std::nullopt, true));
        auto rep = miss_drop_rates(jobs);
        CHECK(rep.job_rates.at("t").miss_rate() == 0.0);
        CHECK(rep.job_rates.at("t").drop_rate() == 1.0);
    }
}

TEST_CASE("rate categories partition the released set on real traces") {
    auto f = generate_case_study(CaseStudy::DynamicWorkload);
    auto trace = run(f.scenario, f.config);
    auto rep = miss_drop_rates(trace);
    for (const auto& [task, r] : rep.job_rates) {
        CHECK(r.miss_rate() + r.drop_rate() + r.on_time_rate() == doctest::Approx(1.0));
        CHECK(r.missed + r.dropped <= r.released);
    }
    for (const auto& [task, nodes] : rep.node_rates)
        for (const auto& [node, r] : nodes)
            CHECK(r.miss_rate() + r.drop_rate() + r.on_time_rate() == doctest::Approx(1.0));
}

TEST_CASE("response statistics") {
    SUBCASE("single job") {
        std::vector<JobRecord> jobs{make_job("t", 0, 0, 200'000, usec{80'000})};
        auto stats = response_stats(jobs);
        CHECK(stats.at("t").mean == 80'000);
        CHECK(stats.at("t").max == 80'000);
        CHECK(stats.at("t").completed == 1);
    }
    SUBCASE("empty input is a report, not an error") {
        auto stats = response_stats(std::vector<JobRecord>{});
        CHECK(stats.empty());
    }
    SUBCASE("two jobs") {
        std::vector<JobRecord> jobs{make_job("t", 0, 0, 500'000, usec{80'000}),
                                    make_job("t", 1, 0, 500'000, usec{120'000})};
        auto stats = response_stats(jobs);
        CHECK(stats.at("t").mean == 100'000);
        CHECK(stats.at("t").max == 120'000);
    }
    SUBCASE("dropped jobs are excluded and counted apart") {
        std::vector<JobRecord> jobs{make_job("t", 0, 0, 500'000, usec{80'000}),
                                    make_job("t", 1, 0, 500'000, std::nullopt, true)};
        auto stats = response_stats(jobs);
        CHECK(stats.at("t").completed == 1);
        CHECK(stats.at("t").excluded == 1);
        CHECK(stats.at("t").mean == 80'000);
    }
}

TEST_CASE("percentiles are ordered on benchmark traces") {
    auto f = generate_minibench("xavier", Tightness::Tight);
    f.config.policy = Policy::EDF;
    auto stats = response_stats(run(f.scenario, f.config));
    for (const auto& [task, s] : stats) {
        CHECK(s.p50 <= s.p95);
        CHECK(s.p95 <= s.p99);
        CHECK(s.p99 <= s.max);
        CHECK(s.mean <= s.max);
    }
}

TEST_CASE("histogram buckets partition completed jobs") {
    std::vector<JobRecord> jobs{make_job("t", 0, 0, 500'000, usec{80'000}),
                                make_job("t", 1, 0, 500'000, usec{85'000}),
                                make_job("t", 2, 0, 500'000, usec{120'000})};
    SUBCASE("width 50ms") {
        auto h = histogram(jobs, ms_to_us_int(50));
        CHECK(h == std::map<std::int64_t, std::int64_t>{{1, 2}, {2, 1}});
    }
    SUBCASE("width beyond the max gives a single bucket") {
        auto h = histogram(jobs, ms_to_us_int(1000));
        CHECK(h == std::map<std::int64_t, std::int64_t>{{0, 3}});
    }
    SUBCASE("empty") {
        CHECK(histogram(std::vector<JobRecord>{}, ms_to_us_int(10)).empty());
    }
    SUBCASE("zero width is rejected") {
        CHECK_THROWS_AS(histogram(jobs, 0), MalformedTrace);
    }
    SUBCASE("counts sum to the completed total") {
        jobs.push_back(make_job("t", 3, 0, 500'000, std::nullopt, true));
        auto h = histogram(jobs, ms_to_us_int(30));
        std::int64_t total = 0;
        for (const auto& [k, n] : h) total += n;
        CHECK(total == 3);
    }
}

TEST_CASE("node-level QoE uses dispatch-to-deadline slack") {
    // One node dispatched at 10, deadline 60, executed 50 -> exactly on
    // time -> score 1; executed 1s past the slack at lambda 0 -> 0.5.
    JobRecord j = make_job("t", 0, 0, 2'000'000, usec{1'500'000});
    j.complete_info["n"] = CompletePayload{0, 3'000'000, 2'000'000, false};
    double score = qoe_mean_node_level({j}, QoEParams{0.0, 1'000'000});
    CHECK(score == doctest::Approx(0.5));
}

TEST_CASE("traces violating causality are rejected") {
    EventTrace t;
    t.horizon = 1000;
    Event ev;
    ev.t = 0;
    ev.kind = EventKind::Complete;
    ev.task = "ghost";
    ev.job = 0;
    ev.node = "n";
    ev.payload = CompletePayload{};
    t.events.push_back(ev);
    CHECK_THROWS_AS(collect_jobs(t), MalformedTrace);
}

TEST_CASE("full report carries the lambda grid") {
    auto f = generate_worked_example();
    auto trace = run(f.scenario, f.config);
    auto rep = build_report(trace, {0.001, 0.01, 0.1, 1, 10});
    CHECK(rep.qoe_node.size() == 5);
    for (const auto& [l, v] : rep.qoe_node) CHECK(v == 1.0); // nothing is late
    CHECK(rep.response.at("*").mean == ms_to_us_int(80));
}
