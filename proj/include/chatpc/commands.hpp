#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "chatpc/eval.hpp"
#include "chatpc/oracle.hpp"
#include "chatpc/pc.hpp"

namespace chatpc {

/// One fully resolved run: problem, oracle choice and parameters, decision
/// policy, PC options, and output management.
struct RunConfig {
    std::string problem_path;
    std::string oracle = "dsep";  // dsep | llm | noisy | gsq

    std::string policy = "majority";  // majority | weighted | stat | unanimity
    std::string h0 = "indep";         // indep | dep
    double alpha = 0.05;
    std::string test = "exact";  // exact | normal
    std::vector<std::string> bench_policies;  // empty -> majority, stat_dep, stat_indep

    LlmConfig llm;
    std::string cassette_path;
    bool replay_only = false;

    double false_indep_rate = 0.0;
    double false_dep_rate = 0.0;

    std::string data_path;  // gsq sample table
    long gsq_min_rows = kDefaultGsqMinRows;

    int max_cond_size = kUnlimitedCondSize;
    bool both_orders = true;
    bool stable = true;
    bool orient = true;
    std::optional<long> query_budget;

    std::string out_dir;
    std::uint64_t seed = 0;
    int jobs = 1;
};

/// Environment layer (between defaults and the config file). Recognized:
/// CHATPC_BASE_URL, CHATPC_MODEL, CHATPC_CASSETTE, CHATPC_OUT, CHATPC_SEED.
void apply_env_layer(RunConfig& config,
                     const std::map<std::string, std::string>& env);
void apply_env_layer(RunConfig& config);  // reads the process environment

/// Config-file layer: a JSON object whose keys mirror the CLI flag names
/// (e.g. "base-url", "model", "alpha"). Unknown keys are usage errors.
void apply_file_layer(RunConfig& config, const nlohmann::json& file_config);

DecisionPolicy resolve_policy(const RunConfig& config);
std::vector<DecisionPolicy> resolve_bench_policies(const RunConfig& config);

std::shared_ptr<CassetteStore> open_cassette(const RunConfig& config);
std::unique_ptr<CiOracle> make_oracle(const RunConfig& config);

struct CommandResult {
    int exit_code = 0;
    std::string output;        // printed to stdout by the CLI
    std::string payload_json;  // report payload, when the command emits one
};

CommandResult cmd_query(const RunConfig& config, const std::string& x, const std::string& y,
                        const std::vector<std::string>& z);
CommandResult cmd_discover(const RunConfig& config);
CommandResult cmd_bench(const RunConfig& config);
CommandResult cmd_consistency(const RunConfig& config);
CommandResult cmd_spurious(const RunConfig& config);

/// Exit-code mapping shared by the CLI: 0 success (UNDECIDED included),
/// 2 usage errors, 3 transport/auth failures, 1 anything else.
int exit_code_for(const std::exception& e);

}  // namespace chatpc
