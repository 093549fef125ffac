#include "chatpc/commands.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "chatpc/report.hpp"
#include "chatpc/util.hpp"

extern char** environ;

namespace chatpc {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

void write_file(const std::string& dir, const std::string& name, const std::string& content) {
    fs::create_directories(dir);
    const fs::path path = fs::path(dir) / name;
    std::ofstream out(path);
    if (!out) throw StoreIoError("cannot write " + path.string());
    out << content;
    if (!out.good()) throw StoreIoError("write failed: " + path.string());
}

Problem load_configured_problem(const RunConfig& config) {
    if (config.problem_path.empty()) throw UsageError("no problem file given (--problem)");
    return load_problem_file(config.problem_path);
}

std::string tally_suffix(const VoteTally& t) {
    if (t.n_total == 0) return "";
    std::ostringstream os;
    os << " (" << t.n_no << "-" << t.n_yes << ")";  // NO-YES order
    return os.str();
}

std::string decision_word(Outcome o) {
    switch (o) {
        case Outcome::INDEPENDENT: return "YES";
        case Outcome::DEPENDENT: return "NO";
        default: return "UNDECIDED";
    }
}

json options_payload(const RunConfig& config, const std::vector<DecisionPolicy>& policies) {
    json names = json::array();
    for (const auto& p : policies) names.push_back(p.name());
    return json{{"oracle", config.oracle},
                {"policies", names},
                {"alpha", config.alpha},
                {"test", config.test},
                {"n", config.llm.batch_size},
                {"model", config.llm.model},
                {"both_orders", config.both_orders},
                {"max_cond_size", config.max_cond_size},
                {"seed", config.seed},
                {"template_version", kPromptTemplateVersion}};
}

}  // namespace

void apply_env_layer(RunConfig& config, const std::map<std::string, std::string>& env) {
    auto get = [&](const char* key) -> const std::string* {
        auto it = env.find(key);
        return it == env.end() ? nullptr : &it->second;
    };
    if (const auto* v = get("CHATPC_BASE_URL")) config.llm.base_url = *v;
    if (const auto* v = get("CHATPC_MODEL")) config.llm.model = *v;
    if (const auto* v = get("CHATPC_CASSETTE")) config.cassette_path = *v;
    if (const auto* v = get("CHATPC_OUT")) config.out_dir = *v;
    if (const auto* v = get("CHATPC_SEED")) config.seed = std::stoull(*v);
}

void apply_env_layer(RunConfig& config) {
    std::map<std::string, std::string> env;
    for (char** e = environ; e != nullptr && *e != nullptr; ++e) {
        const std::string entry(*e);
        auto eq = entry.find('=');
        if (eq != std::string::npos) env[entry.substr(0, eq)] = entry.substr(eq + 1);
    }
    apply_env_layer(config, env);
}

void apply_file_layer(RunConfig& config, const json& file_config) {
    if (!file_config.is_object()) throw UsageError("config file must hold a JSON object");
    for (const auto& [key, value] : file_config.items()) {
        try {
            if (key == "problem")
                config.problem_path = value.get<std::string>();
            else if (key == "oracle")
                config.oracle = value.get<std::string>();
            else if (key == "policy")
                config.policy = value.get<std::string>();
            else if (key == "h0")
                config.h0 = value.get<std::string>();
            else if (key == "alpha")
                config.alpha = value.get<double>();
            else if (key == "test")
                config.test = value.get<std::string>();
            else if (key == "base-url")
                config.llm.base_url = value.get<std::string>();
            else if (key == "model")
                config.llm.model = value.get<std::string>();
            else if (key == "n")
                config.llm.batch_size = value.get<int>();
            else if (key == "temperature")
                config.llm.temperature = value.get<double>();
            else if (key == "timeout")
                config.llm.timeout_seconds = value.get<double>();
            else if (key == "retries")
                config.llm.max_retries = value.get<int>();
            else if (key == "api-key-env")
                config.llm.api_key_source = value.get<std::string>();
            else if (key == "cassette")
                config.cassette_path = value.get<std::string>();
            else if (key == "replay-only")
                config.replay_only = value.get<bool>();
            else if (key == "false-indep-rate")
                config.false_indep_rate = value.get<double>();
            else if (key == "false-dep-rate")
                config.false_dep_rate = value.get<double>();
            else if (key == "data")
                config.data_path = value.get<std::string>();
            else if (key == "min-rows")
                config.gsq_min_rows = value.get<long>();
            else if (key == "max-cond-size")
                config.max_cond_size = value.get<int>();
            else if (key == "both-orders")
                config.both_orders = value.get<bool>();
            else if (key == "stable")
                config.stable = value.get<bool>();
            else if (key == "orient")
                config.orient = value.get<bool>();
            else if (key == "query-budget")
                config.query_budget = value.get<long>();
            else if (key == "out")
                config.out_dir = value.get<std::string>();
            else if (key == "seed")
                config.seed = value.get<std::uint64_t>();
            else if (key == "jobs")
                config.jobs = value.get<int>();
            else
                throw UsageError("unknown config file key: " + key);
        } catch (const json::exception& e) {
            throw UsageError("config file key " + key + ": " + e.what());
        }
    }
}

namespace {

DecisionPolicy policy_by_name(const RunConfig& config, const std::string& name) {
    const PvalMethod method =
        config.test == "normal" ? PvalMethod::NormalUnpooled : PvalMethod::ExactBinomial;
    if (config.test != "exact" && config.test != "normal")
        throw UsageError("unknown test: " + config.test + " (expected exact|normal)");
    if (name == "majority") return DecisionPolicy::majority();
    if (name == "weighted") return DecisionPolicy::weighted();
    if (name == "unanimity") return DecisionPolicy::unanimity();
    if (name == "stat_indep")
        return DecisionPolicy::statistical(NullHypothesis::NULL_INDEPENDENT, config.alpha, method);
    if (name == "stat_dep")
        return DecisionPolicy::statistical(NullHypothesis::NULL_DEPENDENT, config.alpha, method);
    if (name == "stat") {
        if (config.h0 != "indep" && config.h0 != "dep")
            throw UsageError("unknown h0: " + config.h0 + " (expected indep|dep)");
        return DecisionPolicy::statistical(config.h0 == "indep"
                                               ? NullHypothesis::NULL_INDEPENDENT
                                               : NullHypothesis::NULL_DEPENDENT,
                                           config.alpha, method);
    }
    throw UsageError("unknown policy: " + name);
}

}  // namespace

DecisionPolicy resolve_policy(const RunConfig& config) {
    if (config.alpha <= 0.0 || config.alpha >= 1.0)
        throw UsageError("alpha must lie in (0, 1)");
    return policy_by_name(config, config.policy);
}

std::vector<DecisionPolicy> resolve_bench_policies(const RunConfig& config) {
    if (config.alpha <= 0.0 || config.alpha >= 1.0)
        throw UsageError("alpha must lie in (0, 1)");
    std::vector<std::string> names = config.bench_policies;
    if (names.empty()) names = {"majority", "stat_dep", "stat_indep"};
    std::vector<DecisionPolicy> out;
    out.reserve(names.size());
    for (const auto& name : names) out.push_back(policy_by_name(config, name));
    return out;
}

std::shared_ptr<CassetteStore> open_cassette(const RunConfig& config) {
    if (config.cassette_path.empty()) return nullptr;
    return std::make_shared<CassetteStore>(config.cassette_path);
}

std::unique_ptr<CiOracle> make_oracle(const RunConfig& config) {
    if (config.oracle == "dsep") return std::make_unique<DsepOracle>();
    if (config.oracle == "noisy") {
        NoiseSpec spec;
        spec.false_independence_rate = config.false_indep_rate;
        spec.false_dependence_rate = config.false_dep_rate;
        spec.seed = derive_seed(config.seed, "noisy-oracle");
        return std::make_unique<NoisyOracle>(spec);
    }
    if (config.oracle == "gsq") {
        if (config.data_path.empty()) throw UsageError("gsq oracle needs --data");
        return std::make_unique<GsqOracle>(SampleTable::from_csv_file(config.data_path),
                                           config.alpha, config.gsq_min_rows);
    }
    if (config.oracle == "llm") {
        auto cassette = open_cassette(config);
        if (config.replay_only && cassette == nullptr)
            throw UsageError("--replay-only needs --cassette");
        auto client = std::make_shared<LlmClient>(config.llm, cassette, config.replay_only);
        return std::make_unique<LlmOracle>(client, resolve_policy(config), config.both_orders);
    }
    throw UsageError("unknown oracle: " + config.oracle + " (expected dsep|llm|noisy|gsq)");
}

CommandResult cmd_query(const RunConfig& config, const std::string& x, const std::string& y,
                        const std::vector<std::string>& z) {
    const Problem problem = load_configured_problem(config);
    for (const auto& name : std::vector<std::string>{x, y}) {
        if (!problem.has_variable(name)) throw UsageError("unknown variable: " + name);
    }
    for (const auto& name : z)
        if (!problem.has_variable(name)) throw UsageError("unknown variable: " + name);

    auto oracle = make_oracle(config);
    const OracleVerdict verdict = oracle->query(problem, CiQuery(x, y, z));

    std::ostringstream os;
    os << to_string(verdict.decision.outcome) << tally_suffix(verdict.decision.tally) << "\n";
    const VoteTally& t = verdict.decision.tally;
    if (t.n_total > 0)
        os << "votes: " << t.n_total << " total, " << t.n_no << " NO, " << t.n_yes << " YES, "
           << t.n_uncertain << " uncertain\n";
    if (verdict.decision.p_value) {
        os << "p-value: " << *verdict.decision.p_value;
        if (verdict.decision.alpha) os << " (alpha " << *verdict.decision.alpha << ")";
        os << "\n";
    }
    if (verdict.g_squared) os << "G2: " << *verdict.g_squared << " (dof " << *verdict.dof << ")\n";
    os << "source: " << verdict.source << "\n";
    return {0, os.str(), ""};
}

CommandResult cmd_discover(const RunConfig& config) {
    const Problem problem = load_configured_problem(config);
    auto oracle = make_oracle(config);

    PcOptions opts;
    opts.max_cond_size = config.max_cond_size;
    opts.stable = config.stable;
    opts.orient = config.orient;
    opts.query_budget = config.query_budget;
    opts.jobs = config.jobs;

    auto emit = [&](const Pdag& graph, const PcTrace& trace) {
        json payload{{"command", "discover"},
                     {"problem", problem.id},
                     {"options", options_payload(config, {})},
                     {"graph", report::graph_json(graph)},
                     {"trace", report::to_json(trace)}};
        std::string payload_text = report::render(payload);
        if (!config.out_dir.empty()) {
            write_file(config.out_dir, "graph.dot", graph.to_dot());
            write_file(config.out_dir, "graph.json",
                       report::render(report::make_document(report::graph_json(graph))));
            write_file(config.out_dir, "trace.json",
                       report::render(report::make_document(payload)));
        }
        std::ostringstream os;
        os << graph.to_dot();
        os << "queries: " << trace.total_queries << "\n";
        return CommandResult{0, os.str(), payload_text};
    };

    try {
        PcResult result = run_pc(problem, *oracle, opts);
        return emit(result.graph, result.trace);
    } catch (const QueryBudgetExceeded& e) {
        emit(e.partial, e.trace);  // partial artifacts before propagating
        throw;
    }
}

CommandResult cmd_bench(const RunConfig& config) {
    const Problem problem = load_configured_problem(config);
    auto oracle = make_oracle(config);
    const auto policies = resolve_bench_policies(config);

    BenchOptions opts;
    opts.max_cond_size = config.max_cond_size;
    opts.both_orders = config.both_orders;
    BenchResult result = run_benchmark(problem, *oracle, policies, opts);

    json records = json::array();
    for (const auto& r : result.records) records.push_back(report::to_json(r));
    json metrics = json::object();
    for (const auto& [name, m] : result.metrics) metrics[name] = report::to_json(m);
    json consistency = json::object();
    for (const auto& [name, m] : result.consistency) consistency[name] = report::to_json(m);
    json payload{{"command", "bench"},
                 {"problem", problem.id},
                 {"options", options_payload(config, policies)},
                 {"records", records},
                 {"metrics", metrics},
                 {"consistency", consistency}};

    std::string table = report::metrics_table(problem.id, result.metrics);
    if (!config.out_dir.empty()) {
        write_file(config.out_dir, "report.json",
                   report::render(report::make_document(payload)));
        write_file(config.out_dir, "report.txt", table);
    }
    return {0, table, report::render(payload)};
}

CommandResult cmd_consistency(const RunConfig& config) {
    const Problem problem = load_configured_problem(config);
    auto oracle = make_oracle(config);
    const auto policies = resolve_bench_policies(config);

    BenchOptions opts;
    opts.max_cond_size = config.max_cond_size;
    opts.both_orders = true;  // the whole point of the command
    BenchResult result = run_consistency(problem, *oracle, policies, opts);

    json records = json::array();
    for (const auto& r : result.records) records.push_back(report::to_json(r));
    json consistency = json::object();
    for (const auto& [name, m] : result.consistency) consistency[name] = report::to_json(m);
    json payload{{"command", "consistency"},
                 {"problem", problem.id},
                 {"options", options_payload(config, policies)},
                 {"records", records},
                 {"consistency", consistency}};

    std::string text = report::consistency_text(result.consistency);
    if (!config.out_dir.empty()) {
        write_file(config.out_dir, "report.json",
                   report::render(report::make_document(payload)));
        write_file(config.out_dir, "report.txt", text);
    }
    return {0, text, report::render(payload)};
}

CommandResult cmd_spurious(const RunConfig& config) {
    const Problem problem = load_configured_problem(config);
    if (problem.pairs.empty())
        throw UsageError("problem " + problem.id + " declares no designated pairs");
    if (config.oracle != "llm")
        throw UsageError("the spurious table needs the llm oracle (vote counts)");

    auto cassette = open_cassette(config);
    if (config.replay_only && cassette == nullptr)
        throw UsageError("--replay-only needs --cassette");
    auto client = std::make_shared<LlmClient>(config.llm, cassette, config.replay_only);
    LlmOracle oracle(client, DecisionPolicy::majority(), false);

    const PvalMethod method =
        config.test == "normal" ? PvalMethod::NormalUnpooled : PvalMethod::ExactBinomial;
    const DecisionPolicy stat_indep =
        DecisionPolicy::statistical(NullHypothesis::NULL_INDEPENDENT, config.alpha, method);
    const DecisionPolicy stat_dep =
        DecisionPolicy::statistical(NullHypothesis::NULL_DEPENDENT, config.alpha, method);

    std::ostringstream table;
    table << std::left << std::setw(26) << "pair" << std::right << std::setw(9) << "NO-YES"
          << std::setw(11) << "voting" << std::setw(22) << "stat (h0 indep)" << std::setw(22)
          << "stat (h0 dep)" << "\n";

    json rows = json::array();
    for (const auto& [x, y] : problem.pairs) {
        const CiQuery q(x, y);
        DirectionalAnswers answers = oracle.answers_for(problem, q);
        const VoteTally t = tally(answers.answers);
        const Decision voting = decide_majority(t);
        const Decision indep = apply_policy(stat_indep, t);
        const Decision dep = apply_policy(stat_dep, t);

        std::ostringstream votes;
        votes << t.n_no << "-" << t.n_yes;
        auto stat_cell = [](const Decision& d) {
            std::ostringstream os;
            os << decision_word(d.outcome) << " (p=" << std::setprecision(3) << *d.p_value << ")";
            return os.str();
        };
        table << std::left << std::setw(26) << (x + " / " + y) << std::right << std::setw(9)
              << votes.str() << std::setw(11) << decision_word(voting.outcome) << std::setw(22)
              << stat_cell(indep) << std::setw(22) << stat_cell(dep) << "\n";

        rows.push_back(json{{"x", x},
                            {"y", y},
                            {"tally", report::to_json(t)},
                            {"voting", report::to_json(voting)},
                            {"stat_indep", report::to_json(indep)},
                            {"stat_dep", report::to_json(dep)}});
    }

    json payload{{"command", "spurious"},
                 {"problem", problem.id},
                 {"options", options_payload(config, {stat_indep, stat_dep})},
                 {"rows", rows}};
    if (!config.out_dir.empty()) {
        write_file(config.out_dir, "report.json",
                   report::render(report::make_document(payload)));
        write_file(config.out_dir, "report.txt", table.str());
    }
    return {0, table.str(), report::render(payload)};
}

int exit_code_for(const std::exception& e) {
    if (dynamic_cast<const UsageError*>(&e) || dynamic_cast<const UnknownVariable*>(&e) ||
        dynamic_cast<const InvalidQuery*>(&e) || dynamic_cast<const SchemaError*>(&e))
        return 2;
    if (dynamic_cast<const TransportError*>(&e) || dynamic_cast<const AuthError*>(&e) ||
        dynamic_cast<const RateLimited*>(&e))
        return 3;
    return 1;
}

}  // namespace chatpc
