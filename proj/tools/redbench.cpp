// redbench: scenario runner for the RED scheduling simulator.
//
//   redbench run --scenario minibench:xavier:tight --policy EDF,RED
//   redbench validate scenarios/worked_example.json
//   redbench case-study dynamic-workload
//   redbench list

#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "red/red.hpp"

namespace {

std::vector<std::string> split_csv(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(item);
    return out;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"RED real-time DAG scheduling benchmark"};
    app.require_subcommand(1);

    // run
    auto* run_cmd = app.add_subcommand("run", "run a scenario across policies and seeds");
    std::string scenario_ref;
    std::string policies_arg = "EDF,RED-FG,RED-IDA,RED";
    std::string seeds_arg;
    std::string lambdas_arg;
    std::string sync_arg;
    std::string drop_arg;
    std::string format = "human";
    std::string out_dir = "out";
    double gamma_ms = -1, sync_interval_ms = -1, sync_cost_ms = -1, decision_cost_ms = -1;
    run_cmd->add_option("--scenario", scenario_ref, "scenario file or builtin name")
        ->required();
    run_cmd->add_option("--policy", policies_arg, "comma list: EDF,RED-FG,RED-IDA,RED");
    run_cmd->add_option("--seed", seeds_arg, "comma list of seeds (default: scenario seed)");
    run_cmd->add_option("--lambda", lambdas_arg, "comma list of QoE lambda values");
    run_cmd->add_option("--gamma-ms", gamma_ms, "merge window override (ms)");
    run_cmd->add_option("--sync", sync_arg, "sync mode override: periodic|on-demand");
    run_cmd->add_option("--sync-interval-ms", sync_interval_ms, "periodic sync interval (ms)");
    run_cmd->add_option("--sync-cost-ms", sync_cost_ms, "cost per sync event (ms)");
    run_cmd->add_option("--decision-cost-ms", decision_cost_ms, "cost per dispatch (ms)");
    run_cmd->add_option("--drop-policy", drop_arg, "drop-node|drop-job|never");
    run_cmd->add_option("--format", format, "stdout format: human|csv|json");
    run_cmd->add_option("--out", out_dir, "output directory (default: out)");

    // validate
    auto* validate_cmd = app.add_subcommand("validate", "validate a DAG or scenario file");
    std::string validate_path;
    validate_cmd->add_option("path", validate_path, "file to validate")->required();

    // case-study
    auto* case_cmd = app.add_subcommand("case-study", "run a motivation case study");
    std::string case_name;
    std::string case_out = "out";
    case_cmd->add_option("name", case_name,
                         "dynamic-workload|async-dependent|async-independent")
        ->required();
    case_cmd->add_option("--out", case_out, "output directory (default: out)");

    // list
    auto* list_cmd = app.add_subcommand("list", "list builtin scenarios");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e); // --help
        app.exit(e);
        return 2;
    }

    try {
        if (list_cmd->parsed()) {
            for (const auto& b : red::list_builtins()) std::cout << b << "\n";
            return 0;
        }
        if (validate_cmd->parsed())
            return red::cmd_validate(validate_path, std::cout, std::cerr);
        if (case_cmd->parsed())
            return red::cmd_case_study(case_name, case_out, std::cout, std::cerr);

        red::RunSpec spec;
        spec.scenario = scenario_ref;
        spec.policies.clear();
        for (const auto& p : split_csv(policies_arg)) {
            auto policy = red::parse_policy(p);
            if (!policy) {
                std::cerr << "error: unknown policy '" << p << "'\n";
                return 2;
            }
            spec.policies.push_back(*policy);
        }
        if (spec.policies.empty()) {
            std::cerr << "error: at least one policy required\n";
            return 2;
        }
        for (const auto& s : split_csv(seeds_arg)) spec.seeds.push_back(std::stoull(s));
        if (!lambdas_arg.empty()) {
            spec.lambda_grid.clear();
            for (const auto& l : split_csv(lambdas_arg))
                spec.lambda_grid.push_back(std::stod(l));
        }
        if (gamma_ms >= 0) spec.gamma = red::ms_to_us(gamma_ms);
        if (!sync_arg.empty()) {
            if (sync_arg == "periodic")
                spec.sync = red::SyncMode::Periodic;
            else if (sync_arg == "on-demand")
                spec.sync = red::SyncMode::OnDemand;
            else {
                std::cerr << "error: --sync must be periodic or on-demand\n";
                return 2;
            }
        }
        if (sync_interval_ms >= 0) spec.sync_interval = red::ms_to_us(sync_interval_ms);
        if (sync_cost_ms >= 0) spec.sync_cost = red::ms_to_us(sync_cost_ms);
        if (decision_cost_ms >= 0) spec.decision_cost = red::ms_to_us(decision_cost_ms);
        if (!drop_arg.empty()) {
            auto d = red::parse_drop_policy(drop_arg);
            if (!d) {
                std::cerr << "error: unknown drop policy '" << drop_arg << "'\n";
                return 2;
            }
            spec.drop_policy = *d;
        }
        spec.format = format;
        spec.out_dir = out_dir;
        return red::cmd_run(spec, std::cout, std::cerr);
    } catch (const std::invalid_argument&) {
        std::cerr << "error: malformed numeric argument\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
