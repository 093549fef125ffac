#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "chatpc/commands.hpp"

namespace {

using chatpc::RunConfig;

// Flag values land directly in the layered config; CLI11 touches a field only
// when its flag was actually passed, which keeps the precedence
// flags > config file > environment > defaults.
void add_common_options(CLI::App* cmd, RunConfig& config, std::vector<std::string>& policies) {
    static std::string config_flag;  // value consumed by the pre-scan
    cmd->add_option("--config", config_flag, "JSON config file (layered below flags)");
    cmd->add_option("--problem", config.problem_path, "problem file (JSON)");
    cmd->add_option("--oracle", config.oracle, "CI oracle: dsep|llm|noisy|gsq");
    cmd->add_option("--policy", policies,
                    "decision policy: majority|weighted|stat|unanimity|stat_indep|stat_dep "
                    "(repeatable for bench)");
    cmd->add_option("--h0", config.h0, "null hypothesis for --policy stat: indep|dep");
    cmd->add_option("--alpha", config.alpha, "significance level");
    cmd->add_option("--test", config.test, "p-value method: exact|normal");
    cmd->add_option("--n", config.llm.batch_size, "batch size per direction");
    cmd->add_option("--max-cond-size", config.max_cond_size, "conditioning-set bound (-1 = unlimited)");
    cmd->add_flag("--both-orders,!--no-both-orders", config.both_orders,
                  "query both variable orders and sum the tallies");
    cmd->add_option("--cassette", config.cassette_path, "record/replay cassette file");
    cmd->add_flag("--replay-only,!--record", config.replay_only,
                  "forbid live calls; answer only from the cassette");
    cmd->add_option("--base-url", config.llm.base_url, "chat-completions endpoint base URL");
    cmd->add_option("--model", config.llm.model, "model name");
    cmd->add_option("--temperature", config.llm.temperature, "sampling temperature");
    cmd->add_option("--timeout", config.llm.timeout_seconds, "request timeout (seconds)");
    cmd->add_option("--retries", config.llm.max_retries, "transport retry budget");
    cmd->add_option("--api-key-env", config.llm.api_key_source,
                    "environment variable holding the API key");
    cmd->add_option("--false-indep-rate", config.false_indep_rate,
                    "noisy oracle: dependent answered independent");
    cmd->add_option("--false-dep-rate", config.false_dep_rate,
                    "noisy oracle: independent answered dependent");
    cmd->add_option("--data", config.data_path, "sample table (CSV) for the gsq oracle");
    cmd->add_option("--min-rows", config.gsq_min_rows, "gsq row floor");
    cmd->add_flag("--stable,!--no-stable", config.stable, "order-independent skeleton phase");
    cmd->add_flag("--orient,!--no-orient", config.orient, "orient the skeleton");
    cmd->add_option("--query-budget", config.query_budget, "abort after this many CI queries");
    cmd->add_option("--jobs", config.jobs, "parallel CI queries per level");
    cmd->add_option("--seed", config.seed, "top-level seed for randomized components");
    cmd->add_option("--out", config.out_dir, "output directory for reports and graphs");
}

std::string config_path_from_argv(int argc, char** argv) {
    for (int i = 1; i < argc; ++i) {
        const std::string arg = argv[i];
        if (arg == "--config" && i + 1 < argc) return argv[i + 1];
        if (arg.rfind("--config=", 0) == 0) return arg.substr(9);
    }
    return "";
}

}  // namespace

int main(int argc, char** argv) {
    RunConfig config;
    chatpc::apply_env_layer(config);
    const std::string config_path = config_path_from_argv(argc, argv);
    if (!config_path.empty()) {
        std::ifstream in(config_path);
        if (!in) {
            std::cerr << "error: cannot open config file: " << config_path << "\n";
            return 2;
        }
        try {
            chatpc::apply_file_layer(config, nlohmann::json::parse(in));
        } catch (const std::exception& e) {
            std::cerr << "error: " << e.what() << "\n";
            return 2;
        }
    }

    CLI::App app{"constraint-based causal discovery with pluggable CI oracles"};
    app.require_subcommand(1);
    std::string config_flag;
    app.add_option("--config", config_flag, "JSON config file (layered below flags)");

    std::vector<std::string> policies;
    std::string qx, qy;
    std::vector<std::string> qz;

    CLI::App* query = app.add_subcommand("query", "answer one CI query");
    query->add_option("x", qx, "first variable")->required();
    query->add_option("y", qy, "second variable")->required();
    query->add_option("z", qz, "conditioning variables");
    add_common_options(query, config, policies);

    CLI::App* discover = app.add_subcommand("discover", "run PC and export the graph");
    add_common_options(discover, config, policies);

    CLI::App* bench = app.add_subcommand("bench", "evaluate CI decisions against ground truth");
    add_common_options(bench, config, policies);

    CLI::App* consistency =
        app.add_subcommand("consistency", "cross-tabulate the two query directions");
    add_common_options(consistency, config, policies);

    CLI::App* spurious =
        app.add_subcommand("spurious", "marginal-independence table for designated pairs");
    add_common_options(spurious, config, policies);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    if (!policies.empty()) {
        config.policy = policies.front();
        config.bench_policies = policies;
    }

    try {
        chatpc::CommandResult result;
        if (query->parsed())
            result = chatpc::cmd_query(config, qx, qy, qz);
        else if (discover->parsed())
            result = chatpc::cmd_discover(config);
        else if (bench->parsed())
            result = chatpc::cmd_bench(config);
        else if (consistency->parsed())
            result = chatpc::cmd_consistency(config);
        else
            result = chatpc::cmd_spurious(config);
        std::cout << result.output;
        return result.exit_code;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return chatpc::exit_code_for(e);
    }
}
