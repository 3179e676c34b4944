#pragma once

#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "red/builtins.hpp"
#include "red/engine.hpp"
#include "red/report_io.hpp"
#include "red/trace_io.hpp"

namespace red {

inline const std::vector<double>& default_lambda_grid() {
    static const std::vector<double> grid = {0.001, 0.01, 0.1, 1.0, 10.0};
    return grid;
}

struct RunSpec {
    std::string scenario; // path or builtin name
    std::vector<Policy> policies = {Policy::EDF, Policy::RED_FG, Policy::RED_IDA, Policy::RED};
    std::vector<std::uint64_t> seeds;     // empty: scenario's own seed
    std::vector<double> lambda_grid = default_lambda_grid();
    std::optional<usec> gamma;
    std::optional<SyncMode> sync;
    std::optional<usec> sync_interval;
    std::optional<usec> sync_cost;
    std::optional<usec> decision_cost;
    std::optional<DropPolicy> drop_policy;
    std::string out_dir = "out";
    std::string format = "human"; // human | csv | json
};

namespace detail {

inline std::string sanitize(const std::string& name) {
    std::string s = name;
    for (char& c : s)
        if (c == ':' || c == '/' || c == ' ') c = '_';
    return s;
}

} // namespace detail

/// Loads a scenario by builtin name or file path.
inline ScenarioFile resolve_scenario(const std::string& ref) {
    auto with_builtins = [](std::string msg) {
        msg += "; builtins are:";
        for (const auto& b : list_builtins()) msg += "\n  " + b;
        return msg;
    };
    std::optional<ScenarioFile> builtin;
    try {
        builtin = builtin_scenario(ref);
    } catch (const UnknownPlatform& e) {
        throw UnknownPlatform(with_builtins(e.what()));
    }
    if (builtin) return *builtin;
    if (!std::filesystem::exists(ref))
        throw UnknownPlatform(with_builtins("'" + ref + "' is neither a file nor a builtin"));
    return load_scenario_file(ref);
}

/// Runs every (policy, seed) pair, writes one trace and one report per
/// pair plus a cross-policy comparison table, and prints the table.
inline int cmd_run(const RunSpec& spec, std::ostream& out, std::ostream& err) {
    ScenarioFile file;
    try {
        file = resolve_scenario(spec.scenario);
    } catch (const UnknownPlatform& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const ScenarioError& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    if (spec.gamma) file.scenario.refine.gamma = *spec.gamma;
    if (spec.sync) file.config.sync = *spec.sync;
    if (spec.sync_interval) file.config.sync_interval = *spec.sync_interval;
    if (spec.sync_cost) file.config.sync_cost = *spec.sync_cost;
    if (spec.decision_cost) file.config.decision_cost = *spec.decision_cost;
    if (spec.drop_policy) file.config.drop_policy = *spec.drop_policy;

    if (spec.policies.empty()) {
        err << "error: at least one policy is required\n";
        return 2;
    }
    std::vector<std::uint64_t> seeds = spec.seeds;
    if (seeds.empty()) seeds.push_back(file.scenario.seed);

    std::filesystem::create_directories(spec.out_dir);
    // Each (policy, seed) run is isolated; sweep them in parallel and
    // write results back in grid order so output stays deterministic.
    std::vector<std::pair<Policy, std::uint64_t>> grid;
    for (Policy policy : spec.policies)
        for (std::uint64_t seed : seeds) grid.emplace_back(policy, seed);
    std::vector<std::future<EventTrace>> futures;
    for (const auto& [policy, seed] : grid)
        futures.push_back(std::async(std::launch::async, [&file, policy, seed = seed] {
            Scenario sc = file.scenario;
            sc.seed = seed;
            SchedulerConfig cfg = file.config;
            cfg.policy = policy;
            return run(sc, cfg);
        }));
    std::vector<MetricsReport> reports;
    try {
        for (std::size_t i = 0; i < grid.size(); ++i) {
            EventTrace trace = futures[i].get();
            MetricsReport rep = build_report(trace, spec.lambda_grid);
            std::string base = spec.out_dir + "/" + detail::sanitize(file.scenario.name) +
                               "_" + detail::sanitize(to_string(grid[i].first)) + "_s" +
                               std::to_string(grid[i].second);
            save_trace_jsonl(trace, base + ".trace.jsonl");
            std::ofstream(base + ".jobs.csv") << trace_jobs_to_csv(trace);
            std::ofstream(base + ".report.csv") << report_to_csv(rep);
            std::ofstream(base + ".report.json") << report_to_json(rep).dump(2) << "\n";
            reports.push_back(std::move(rep));
        }
    } catch (const ScenarioError& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    std::ofstream(spec.out_dir + "/" + detail::sanitize(file.scenario.name) +
                  "_comparison.csv")
        << comparison_to_csv(reports);
    if (spec.format == "csv") {
        out << comparison_to_csv(reports);
    } else if (spec.format == "json") {
        nlohmann::json j = nlohmann::json::array();
        for (const auto& r : reports) j.push_back(report_to_json(r));
        out << j.dump(2) << "\n";
    } else {
        out << "scenario: " << file.scenario.name << "\n"
            << comparison_to_text(reports);
    }
    return 0;
}

/// Validates a DAG or scenario file; prints one line per violation.
inline int cmd_validate(const std::string& path, std::ostream& out, std::ostream& err) {
    json j;
    try {
        j = load_json_file(path);
    } catch (const ScenarioError& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    std::string schema = j.value("schema", "");
    try {
        if (schema == "red-dag-v1") {
            auto [dag, muts] = dag_from_json(j, "dag");
            ValidationReport report = validate_dag(dag);
            for (const auto& v : report.violations)
                out << "violation: " << v.code << ": " << v.detail << "\n";
            // Mutations must keep the DAG valid at every step.
            if (report.ok) {
                DagTask cur = dag;
                for (const auto& m : muts) cur = apply_mutation(cur, m);
            }
            if (!report.ok) return 1;
        } else if (schema == "red-scenario-v1") {
            ScenarioFile f = scenario_from_json(j);
            validate_scenario(f.scenario);
            std::map<std::string, DagTask> cur;
            for (const auto& t : f.scenario.tasks) cur[t.dag.task_id] = t.dag;
            auto muts = f.scenario.mutations;
            std::stable_sort(muts.begin(), muts.end(),
                             [](const TimedMutation& a, const TimedMutation& b) {
                                 return a.mutation.effective_time < b.mutation.effective_time;
                             });
            for (const auto& m : muts) cur[m.task] = apply_mutation(cur.at(m.task), m.mutation);
        } else {
            err << "error: '" << path << "': unknown or missing schema (expected "
                << "red-dag-v1 or red-scenario-v1)\n";
            return 1;
        }
    } catch (const std::exception& e) {
        err << "invalid: " << e.what() << "\n";
        return 1;
    }
    out << path << ": ok\n";
    return 0;
}

/// Rates of one node id over jobs released inside [from, to).
inline Rates node_rates_in_window(const std::vector<JobRecord>& jobs, const std::string& task,
                                  const NodeId& node, usec from, usec to) {
    Rates r;
    for (const auto& j : jobs) {
        if (j.task != task || j.release < from || j.release >= to) continue;
        if (!j.nodes.count(node)) continue;
        ++r.released;
        auto c = j.complete_info.find(node);
        if (c != j.complete_info.end()) {
            if (!c->second.on_time) ++r.missed;
        } else {
            ++r.dropped;
        }
    }
    return r;
}

/// Per-window job-level miss counts: consecutive groups of `window` jobs
/// of one task, in release order.
inline std::vector<std::int64_t> misses_per_window(const std::vector<JobRecord>& jobs,
                                                   const std::string& task, int window) {
    std::vector<std::int64_t> out;
    int in_window = 0;
    for (const auto& j : jobs) {
        if (j.task != task) continue;
        if (in_window == 0) out.push_back(0);
        auto f = j.finish();
        if (f && *f > j.e2e_deadline) ++out.back();
        if (++in_window == window) in_window = 0;
    }
    if (in_window > 0) out.pop_back(); // partial trailing window
    return out;
}

/// Runs one case study and prints its qualitative summary (per-phase rate
/// table for the dynamic workload, per-window misses and a response
/// histogram for the asynchronous pair).
inline int cmd_case_study(const std::string& which, const std::string& out_dir,
                          std::ostream& out, std::ostream& err) {
    auto cs = parse_case_study(which);
    if (!cs) {
        err << "error: unknown case study '" << which
            << "' (expected dynamic-workload, async-dependent or async-independent)\n";
        return 2;
    }
    ScenarioFile file = generate_case_study(*cs);
    std::filesystem::create_directories(out_dir);
    save_scenario_file(file, out_dir + "/" + detail::sanitize(file.scenario.name) +
                                 ".scenario.json");
    EventTrace trace = run(file.scenario, file.config);
    std::string base = out_dir + "/" + detail::sanitize(file.scenario.name);
    save_trace_jsonl(trace, base + ".trace.jsonl");
    MetricsReport rep = build_report(trace, default_lambda_grid());
    std::ofstream(base + ".report.csv") << report_to_csv(rep);
    auto jobs = collect_jobs(trace);

    if (*cs == CaseStudy::DynamicWorkload) {
        std::vector<usec> bounds;
        for (const auto& m : file.scenario.mutations)
            if (bounds.empty() || bounds.back() != m.mutation.effective_time)
                bounds.push_back(m.mutation.effective_time);
        std::sort(bounds.begin(), bounds.end());
        bounds.erase(std::unique(bounds.begin(), bounds.end()), bounds.end());
        std::vector<std::pair<usec, usec>> phases;
        usec prev = 0;
        for (usec b : bounds) {
            phases.emplace_back(prev, b);
            prev = b;
        }
        phases.emplace_back(prev, file.scenario.horizon);
        out << "phase_from_ms,phase_to_ms,node,released,missed,dropped,miss+drop\n";
        std::ostringstream csv;
        csv << "phase_from_ms,phase_to_ms,node,released,missed,dropped,combined\n";
        for (const auto& [from, to] : phases) {
            for (const NodeId node : {"A", "B", "C"}) {
                Rates r = node_rates_in_window(jobs, "nav", node, from, to);
                if (r.released == 0) continue;
                out << format_ms(from) << "," << format_ms(to) << "," << node << ","
                    << r.released << "," << r.missed << "," << r.dropped << ","
                    << detail::rate6(r.combined()) << "\n";
                csv << format_ms(from) << "," << format_ms(to) << "," << node << ","
                    << r.released << "," << r.missed << "," << r.dropped << ","
                    << detail::rate6(r.combined()) << "\n";
            }
        }
        std::ofstream(base + ".phases.csv") << csv.str();
    } else {
        auto windows = misses_per_window(jobs, "detect", 33);
        out << "hyperperiod_window,misses\n";
        for (std::size_t i = 0; i < windows.size(); ++i)
            out << i << "," << windows[i] << "\n";
        auto buckets = histogram(jobs, ms_to_us_int(5));
        std::ofstream(base + ".histogram.csv")
            << histogram_to_csv(buckets, ms_to_us_int(5));
        out << "histogram written to " << base << ".histogram.csv\n";
    }
    return 0;
}

} // namespace red
