#pragma once

#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "red/metrics.hpp"

namespace red {

namespace detail {

inline std::string rate6(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

} // namespace detail

inline std::string report_to_csv(const MetricsReport& rep) {
    std::ostringstream out;
    out << "section,task,node,released,missed,dropped,miss_rate,drop_rate,combined\n";
    auto rates_row = [&](const std::string& section, const std::string& task,
                         const std::string& node, const Rates& r) {
        out << section << "," << task << "," << node << "," << r.released << "," << r.missed
            << "," << r.dropped << "," << detail::rate6(r.miss_rate()) << ","
            << detail::rate6(r.drop_rate()) << "," << detail::rate6(r.combined()) << "\n";
    };
    rates_row("jobs", "*", "", rep.rates.overall_jobs);
    for (const auto& [task, r] : rep.rates.job_rates) rates_row("jobs", task, "", r);
    for (const auto& [task, nodes] : rep.rates.node_rates)
        for (const auto& [node, r] : nodes) rates_row("nodes", task, node, r);
    out << "\nsection,task,completed,excluded,mean_ms,p50_ms,p95_ms,p99_ms,max_ms\n";
    for (const auto& [task, s] : rep.response)
        out << "response," << task << "," << s.completed << "," << s.excluded << ","
            << format_ms(s.mean) << "," << format_ms(s.p50) << "," << format_ms(s.p95) << ","
            << format_ms(s.p99) << "," << format_ms(s.max) << "\n";
    out << "\nsection,lambda,qoe_node,qoe_job\n";
    for (double l : rep.lambda_grid)
        out << "qoe," << lambda_key(l) << "," << detail::rate6(rep.qoe_node.at(lambda_key(l)))
            << "," << detail::rate6(rep.qoe_job.at(lambda_key(l))) << "\n";
    out << "\nsection,value\n";
    out << "sync_events," << rep.sync_events << "\n";
    out << "busy_ms," << format_ms(rep.total_busy) << "\n";
    return out.str();
}

inline nlohmann::json report_to_json(const MetricsReport& rep) {
    nlohmann::json j;
    j["scenario"] = rep.scenario;
    j["policy"] = rep.policy;
    j["seed"] = rep.seed;
    auto rates_json = [](const Rates& r) {
        nlohmann::json x;
        x["released"] = r.released;
        x["missed"] = r.missed;
        x["dropped"] = r.dropped;
        x["miss_rate"] = r.miss_rate();
        x["drop_rate"] = r.drop_rate();
        x["combined"] = r.combined();
        return x;
    };
    j["jobs"]["*"] = rates_json(rep.rates.overall_jobs);
    for (const auto& [task, r] : rep.rates.job_rates) j["jobs"][task] = rates_json(r);
    for (const auto& [task, nodes] : rep.rates.node_rates)
        for (const auto& [node, r] : nodes) j["node_rates"][task][node] = rates_json(r);
    for (const auto& [task, s] : rep.response) {
        nlohmann::json x;
        x["completed"] = s.completed;
        x["excluded"] = s.excluded;
        x["mean_ms"] = us_to_ms(s.mean);
        x["p50_ms"] = us_to_ms(s.p50);
        x["p95_ms"] = us_to_ms(s.p95);
        x["p99_ms"] = us_to_ms(s.p99);
        x["max_ms"] = us_to_ms(s.max);
        j["response"][task] = x;
    }
    j["qoe_node"] = rep.qoe_node;
    j["qoe_job"] = rep.qoe_job;
    j["sync_events"] = rep.sync_events;
    j["busy_ms"] = us_to_ms(rep.total_busy);
    return j;
}

/// Cross-policy comparison table, one row per (policy, seed).
inline std::string comparison_to_csv(const std::vector<MetricsReport>& reports) {
    std::ostringstream out;
    out << "policy,seed,jobs,mean_ms,p95_ms,max_ms,miss_rate,drop_rate,sync_events";
    std::vector<double> grid;
    if (!reports.empty()) grid = reports.front().lambda_grid;
    for (double l : grid) out << ",qoe@" << lambda_key(l);
    out << "\n";
    for (const auto& r : reports) {
        auto it = r.response.find("*");
        ResponseStats s = it == r.response.end() ? ResponseStats{} : it->second;
        out << r.policy << "," << r.seed << "," << r.rates.overall_jobs.released << ","
            << format_ms(s.mean) << "," << format_ms(s.p95) << "," << format_ms(s.max) << ","
            << detail::rate6(r.rates.overall_jobs.miss_rate()) << ","
            << detail::rate6(r.rates.overall_jobs.drop_rate()) << "," << r.sync_events;
        for (double l : grid) out << "," << detail::rate6(r.qoe_node.at(lambda_key(l)));
        out << "\n";
    }
    return out.str();
}

/// Human-readable comparison table for terminal output.
inline std::string comparison_to_text(const std::vector<MetricsReport>& reports) {
    std::ostringstream out;
    out << std::left << std::setw(9) << "policy" << std::setw(6) << "seed" << std::right
        << std::setw(6) << "jobs" << std::setw(12) << "mean_ms" << std::setw(12) << "p95_ms"
        << std::setw(11) << "miss" << std::setw(11) << "drop" << std::setw(7) << "sync"
        << std::setw(10) << "qoe(l=1)" << "\n";
    for (const auto& r : reports) {
        auto it = r.response.find("*");
        ResponseStats s = it == r.response.end() ? ResponseStats{} : it->second;
        double qoe1 = r.qoe_node.count("1") ? r.qoe_node.at("1") : 1.0;
        out << std::left << std::setw(9) << r.policy << std::setw(6) << r.seed << std::right
            << std::setw(6) << r.rates.overall_jobs.released << std::setw(12)
            << format_ms(s.mean) << std::setw(12) << format_ms(s.p95) << std::setw(11)
            << detail::rate6(r.rates.overall_jobs.miss_rate()) << std::setw(11)
            << detail::rate6(r.rates.overall_jobs.drop_rate()) << std::setw(7) << r.sync_events
            << std::setw(10) << detail::rate6(qoe1) << "\n";
    }
    return out.str();
}

inline std::string histogram_to_csv(const std::map<std::int64_t, std::int64_t>& buckets,
                                    usec width) {
    std::ostringstream out;
    out << "bucket_lo_ms,bucket_hi_ms,count\n";
    for (const auto& [k, n] : buckets)
        out << format_ms(k * width) << "," << format_ms((k + 1) * width) << "," << n << "\n";
    return out.str();
}

} // namespace red
