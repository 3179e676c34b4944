#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "red/bench.hpp"
#include "red/trace_checks.hpp"

#include "support.hpp"

using namespace red;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    REQUIRE(in.good());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

struct TempDir {
    std::filesystem::path path;
    explicit TempDir(const std::string& name)
        : path(std::filesystem::temp_directory_path() / name) {
        std::filesystem::remove_all(path);
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
    std::string str() const { return path.string(); }
};

} // namespace

TEST_CASE("cmd_run on an unknown builtin exits 2 and names the builtins") {
    RunSpec spec;
    spec.scenario = "minibench:unknown:tight";
    std::ostringstream out, err;
    CHECK(cmd_run(spec, out, err) == 2);
    CHECK(err.str().find("minibench:nano:tight") != std::string::npos);
}

TEST_CASE("cmd_run produces traces, reports and a comparison table") {
    TempDir dir("red_run_test");
    RunSpec spec;
    spec.scenario = "worked-example";
    spec.policies = {Policy::EDF, Policy::RED};
    spec.out_dir = dir.str();
    spec.format = "csv";
    std::ostringstream out, err;
    REQUIRE(cmd_run(spec, out, err) == 0);
    CHECK(std::filesystem::exists(dir.path / "worked-example_EDF_s1.trace.jsonl"));
    CHECK(std::filesystem::exists(dir.path / "worked-example_RED_s1.trace.jsonl"));
    CHECK(std::filesystem::exists(dir.path / "worked-example_EDF_s1.report.csv"));
    CHECK(std::filesystem::exists(dir.path / "worked-example_comparison.csv"));
    CHECK(out.str().find("EDF") != std::string::npos);
    CHECK(out.str().find("RED") != std::string::npos);

    SUBCASE("the same spec twice is byte-identical") {
        std::string first = read_file((dir.path / "worked-example_comparison.csv").string());
        std::string trace1 = read_file((dir.path / "worked-example_EDF_s1.trace.jsonl").string());
        std::ostringstream out2, err2;
        REQUIRE(cmd_run(spec, out2, err2) == 0);
        CHECK(read_file((dir.path / "worked-example_comparison.csv").string()) == first);
        CHECK(read_file((dir.path / "worked-example_EDF_s1.trace.jsonl").string()) == trace1);
        CHECK(out2.str() == out.str());
    }

    SUBCASE("every report row re-derives from the written trace alone") {
        auto trace = load_trace_jsonl((dir.path / "worked-example_EDF_s1.trace.jsonl").string());
        auto rep = build_report(trace, spec.lambda_grid);
        CHECK(report_to_csv(rep) ==
              read_file((dir.path / "worked-example_EDF_s1.report.csv").string()));
    }
}

TEST_CASE("cmd_run honours gamma, sync and seed overrides") {
    TempDir dir("red_run_override");
    RunSpec spec;
    spec.scenario = "mimo-demo";
    spec.policies = {Policy::RED};
    spec.gamma = ms_to_us_int(7);
    spec.sync = SyncMode::Periodic;
    spec.sync_interval = ms_to_us_int(50);
    spec.sync_cost = ms_to_us_int(1);
    spec.seeds = {42};
    spec.out_dir = dir.str();
    spec.format = "csv";
    std::ostringstream out, err;
    REQUIRE(cmd_run(spec, out, err) == 0);
    auto trace = load_trace_jsonl((dir.path / "mimo-demo_RED_s42.trace.jsonl").string());
    CHECK(trace.gamma == ms_to_us_int(7));
    CHECK(trace.sync_mode == "periodic");
    CHECK(trace.seed == 42);
    bool saw_tick = false;
    for (const auto& ev : trace.events)
        if (ev.kind == EventKind::Sync)
            saw_tick |= std::get<SyncPayload>(ev.payload).reason == "tick";
    CHECK(saw_tick);
}

TEST_CASE("cmd_run accepts scenario files and emits json when asked") {
    TempDir dir("red_run_file");
    std::string path = dir.str() + "/scenario.json";
    save_scenario_file(generate_worked_example(), path);
    RunSpec spec;
    spec.scenario = path;
    spec.policies = {Policy::EDF};
    spec.out_dir = dir.str();
    spec.format = "json";
    std::ostringstream out, err;
    REQUIRE(cmd_run(spec, out, err) == 0);
    auto parsed = json::parse(out.str());
    REQUIRE(parsed.is_array());
    REQUIRE(parsed.size() == 1);
    CHECK(parsed[0].at("policy") == "EDF");
    CHECK(parsed[0].at("response").at("*").at("mean_ms") == 80.0);
}

TEST_CASE("cmd_validate distinguishes clean and broken files") {
    TempDir dir("red_validate");
    std::ostringstream out, err;
    SUBCASE("a clean scenario passes") {
        save_scenario_file(generate_worked_example(), dir.str() + "/ok.json");
        CHECK(cmd_validate(dir.str() + "/ok.json", out, err) == 0);
        CHECK(out.str().find("ok") != std::string::npos);
    }
    SUBCASE("a cyclic DAG file fails and names the cycle") {
        std::ofstream f(dir.str() + "/cyclic.json");
        f << R"({"schema":"red-dag-v1","task_id":"t","deadline_ms":100,
                 "nodes":[{"id":"a","cost_ms":5},{"id":"b","cost_ms":5}],
                 "edges":[["a","b"],["b","a"]]})";
        f.close();
        CHECK(cmd_validate(dir.str() + "/cyclic.json", out, err) == 1);
        CHECK(out.str().find("cycle") != std::string::npos);
    }
    SUBCASE("a missing field is reported with its path") {
        std::ofstream f(dir.str() + "/missing.json");
        f << R"({"schema":"red-dag-v1","task_id":"t","nodes":[]})";
        f.close();
        CHECK(cmd_validate(dir.str() + "/missing.json", out, err) == 1);
        CHECK(err.str().find("deadline_ms") != std::string::npos);
    }
    SUBCASE("unknown schema fails") {
        std::ofstream f(dir.str() + "/odd.json");
        f << R"({"schema":"something-else"})";
        f.close();
        CHECK(cmd_validate(dir.str() + "/odd.json", out, err) == 1);
    }
    SUBCASE("unreadable file fails") {
        CHECK(cmd_validate(dir.str() + "/nope.json", out, err) == 1);
    }
}

TEST_CASE("cmd_case_study runs and prints the qualitative summaries") {
    TempDir dir("red_case");
    SUBCASE("unknown name exits 2") {
        std::ostringstream out, err;
        CHECK(cmd_case_study("unknown", dir.str(), out, err) == 2);
    }
    SUBCASE("dynamic workload emits the per-phase table") {
        std::ostringstream out, err;
        REQUIRE(cmd_case_study("dynamic-workload", dir.str(), out, err) == 0);
        CHECK(out.str().find("3000.000") != std::string::npos);
        CHECK(out.str().find("6000.000") != std::string::npos);
        CHECK(std::filesystem::exists(dir.path / "case_dynamic-workload.phases.csv"));
    }
    SUBCASE("async studies emit per-window misses and a histogram") {
        std::ostringstream out, err;
        REQUIRE(cmd_case_study("async-dependent", dir.str(), out, err) == 0);
        CHECK(out.str().find("hyperperiod_window") != std::string::npos);
        CHECK(std::filesystem::exists(dir.path / "case_async-dependent.histogram.csv"));
    }
}

TEST_CASE("per-window miss helper groups jobs in release order") {
    std::vector<JobRecord> jobs;
    for (int i = 0; i < 7; ++i) {
        JobRecord j;
        j.task = "t";
        j.index = i;
        j.release = i * 1000;
        j.e2e_deadline = j.release + 100;
        j.nodes["n"] = TraceNode{};
        j.completion["n"] = j.release + (i % 3 == 0 ? 200 : 50); // indices 0,3,6 miss
        jobs.push_back(j);
    }
    auto w = misses_per_window(jobs, "t", 3);
    CHECK(w == std::vector<std::int64_t>{1, 1}); // trailing partial window discarded
}
