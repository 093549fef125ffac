#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <memory>
#include <sstream>

#include "chatpc/eval.hpp"
#include "chatpc/pc.hpp"
#include "chatpc/report.hpp"

namespace py = pybind11;
using namespace chatpc;

namespace {

NullHypothesis h0_from(const std::string& name) {
    if (name == "indep") return NullHypothesis::NULL_INDEPENDENT;
    if (name == "dep") return NullHypothesis::NULL_DEPENDENT;
    throw py::value_error("h0 must be 'indep' or 'dep'");
}

PvalMethod method_from(const std::string& name) {
    if (name == "exact") return PvalMethod::ExactBinomial;
    if (name == "normal") return PvalMethod::NormalUnpooled;
    throw py::value_error("method must be 'exact' or 'normal'");
}

DecisionPolicy policy_from(const std::string& name, const std::string& h0, double alpha,
                           const std::string& method) {
    if (name == "majority") return DecisionPolicy::majority();
    if (name == "weighted") return DecisionPolicy::weighted();
    if (name == "unanimity") return DecisionPolicy::unanimity();
    if (name == "stat") return DecisionPolicy::statistical(h0_from(h0), alpha, method_from(method));
    throw py::value_error("policy must be majority|weighted|stat|unanimity");
}

py::dict metrics_dict(const MetricsReport& m) {
    py::dict d;
    d["tp"] = m.tp;
    d["fp"] = m.fp;
    d["tn"] = m.tn;
    d["fn"] = m.fn;
    d["undecided"] = m.undecided;
    d["positive_class"] = m.positive_class;
    d["accuracy"] = m.accuracy ? py::cast(*m.accuracy) : py::none();
    d["precision"] = m.precision ? py::cast(*m.precision) : py::none();
    d["recall"] = m.recall ? py::cast(*m.recall) : py::none();
    d["f1"] = m.f1 ? py::cast(*m.f1) : py::none();
    return d;
}

}  // namespace

PYBIND11_MODULE(chatpc, m) {
    m.doc() = "constraint-based causal discovery with pluggable CI oracles";

    py::register_exception<Error>(m, "ChatpcError");

    py::class_<Dag>(m, "Dag")
        .def(py::init<std::vector<std::string>,
                      const std::vector<std::pair<std::string, std::string>>&>(),
             py::arg("nodes"), py::arg("edges"))
        .def_property_readonly("nodes", &Dag::nodes)
        .def("edges", &Dag::edge_names)
        .def("to_dot", &Dag::to_dot);

    py::class_<Pdag>(m, "Pdag")
        .def(py::init<std::vector<std::string>>(), py::arg("nodes"))
        .def_static("from_dag", &Pdag::from_dag)
        .def_property_readonly("nodes", &Pdag::nodes)
        .def("directed_edges", &Pdag::directed_edge_names)
        .def("undirected_edges", &Pdag::undirected_edge_names)
        .def("skeleton_pairs", &Pdag::skeleton_pairs)
        .def("equals", &Pdag::equals)
        .def("to_dot", &Pdag::to_dot)
        .def("__repr__", [](const Pdag& g) {
            std::ostringstream os;
            os << "Pdag(" << g.num_nodes() << " nodes, " << g.directed_edge_names().size()
               << " directed, " << g.undirected_edge_names().size() << " undirected)";
            return os.str();
        });

    m.def("d_separated", &d_separated, py::arg("dag"), py::arg("x"), py::arg("y"),
          py::arg("z") = std::vector<std::string>{});
    m.def("cpdag_of", &cpdag_of);
    m.def("shd", &shd);
    m.def("skeleton_metrics", [](const Pdag& predicted, const Dag& truth) {
        return metrics_dict(skeleton_metrics(predicted, truth));
    });

    py::class_<Variable>(m, "Variable")
        .def_readonly("name", &Variable::name)
        .def_readonly("description", &Variable::description);

    py::class_<CiQuery>(m, "CiQuery")
        .def(py::init<std::string, std::string, std::vector<std::string>>(), py::arg("x"),
             py::arg("y"), py::arg("z") = std::vector<std::string>{})
        .def_readonly("x", &CiQuery::x)
        .def_readonly("y", &CiQuery::y)
        .def_readonly("z", &CiQuery::z)
        .def("swapped", &CiQuery::swapped)
        .def("__repr__", &CiQuery::display);

    py::class_<Problem>(m, "Problem")
        .def_readonly("id", &Problem::id)
        .def_readonly("field", &Problem::field)
        .def_readonly("context", &Problem::context)
        .def_readonly("variables", &Problem::variables)
        .def_readonly("pairs", &Problem::pairs)
        .def_property_readonly("ground_truth",
                               [](const Problem& p) {
                                   return p.ground_truth ? py::cast(*p.ground_truth) : py::none();
                               })
        .def("variable_names", &Problem::variable_names);

    m.def("load_problem_file", &load_problem_file);
    m.def("load_problem_string", &load_problem_string);
    m.def("serialize_problem", &serialize_problem);
    m.def("enumerate_ci_statements", &enumerate_ci_statements, py::arg("problem"),
          py::arg("max_cond_size") = kUnlimitedCondSize, py::arg("both_orders") = true);
    m.def("ground_truth_label", [](const Problem& p, const CiQuery& q) {
        return std::string(to_string(ground_truth_label(p, q)));
    });

    py::class_<PromptBundle>(m, "PromptBundle")
        .def_property_readonly("messages",
                               [](const PromptBundle& b) {
                                   std::vector<std::pair<std::string, std::string>> out;
                                   for (const auto& msg : b.messages)
                                       out.emplace_back(msg.role, msg.text);
                                   return out;
                               })
        .def_readonly("fingerprint", &PromptBundle::fingerprint);
    m.def("build_prompt", &build_prompt);

    py::class_<RawAnswer>(m, "RawAnswer")
        .def_property_readonly("verdict",
                               [](const RawAnswer& a) { return std::string(to_string(a.verdict)); })
        .def_property_readonly("confidence",
                               [](const RawAnswer& a) {
                                   return a.confidence ? py::cast(*a.confidence) : py::none();
                               })
        .def_readonly("raw_text", &RawAnswer::raw_text);
    m.def("parse_response", &parse_response);

    py::class_<VoteTally>(m, "VoteTally")
        .def(py::init([](long total, long yes, long no, long uncertain) {
                 return VoteTally{total, yes, no, uncertain};
             }),
             py::arg("total"), py::arg("yes"), py::arg("no"), py::arg("uncertain") = 0)
        .def_readonly("total", &VoteTally::n_total)
        .def_readonly("yes", &VoteTally::n_yes)
        .def_readonly("no", &VoteTally::n_no)
        .def_readonly("uncertain", &VoteTally::n_uncertain);

    py::class_<Decision>(m, "Decision")
        .def_property_readonly("outcome",
                               [](const Decision& d) { return std::string(to_string(d.outcome)); })
        .def_readonly("method", &Decision::method)
        .def_property_readonly("p_value",
                               [](const Decision& d) {
                                   return d.p_value ? py::cast(*d.p_value) : py::none();
                               })
        .def_readonly("tally", &Decision::tally);

    m.def("tally", &tally);
    m.def("decide_majority", &decide_majority);
    m.def("decide_weighted", &decide_weighted);
    m.def("decide_unanimity", &decide_unanimity);
    m.def("symmetrize", &symmetrize);
    m.def(
        "p_value",
        [](const VoteTally& t, const std::string& h0, const std::string& method) {
            return p_value(t, h0_from(h0), method_from(method));
        },
        py::arg("tally"), py::arg("h0") = "indep", py::arg("method") = "exact");
    m.def(
        "decide_statistical",
        [](const VoteTally& t, const std::string& h0, double alpha, const std::string& method) {
            return decide_statistical(t, h0_from(h0), alpha, method_from(method));
        },
        py::arg("tally"), py::arg("h0") = "indep", py::arg("alpha") = 0.05,
        py::arg("method") = "exact");

    py::class_<OracleVerdict>(m, "OracleVerdict")
        .def_readonly("decision", &OracleVerdict::decision)
        .def_readonly("source", &OracleVerdict::source);

    py::class_<CiOracle, std::shared_ptr<CiOracle>>(m, "CiOracle")
        .def("query", &CiOracle::query)
        .def_property_readonly("name", &CiOracle::name);
    py::class_<DsepOracle, CiOracle, std::shared_ptr<DsepOracle>>(m, "DsepOracle")
        .def(py::init<>());
    py::class_<NoisyOracle, CiOracle, std::shared_ptr<NoisyOracle>>(m, "NoisyOracle")
        .def(py::init([](double false_indep, double false_dep, std::uint64_t seed) {
                 return std::make_shared<NoisyOracle>(NoiseSpec{false_indep, false_dep, seed});
             }),
             py::arg("false_independence_rate"), py::arg("false_dependence_rate"),
             py::arg("seed"));
    py::class_<LlmOracle, CiOracle, std::shared_ptr<LlmOracle>>(m, "LlmOracle")
        .def(py::init([](const std::string& cassette_path, const std::string& policy,
                         const std::string& h0, double alpha, const std::string& method,
                         bool both_orders, const std::string& base_url, const std::string& model,
                         int n, bool replay_only) {
                 LlmConfig config;
                 config.base_url = base_url;
                 config.model = model;
                 config.batch_size = n;
                 auto store = cassette_path.empty()
                                  ? nullptr
                                  : std::make_shared<CassetteStore>(cassette_path);
                 auto client = std::make_shared<LlmClient>(config, store, replay_only);
                 return std::make_shared<LlmOracle>(client,
                                                    policy_from(policy, h0, alpha, method),
                                                    both_orders);
             }),
             py::arg("cassette") = "", py::arg("policy") = "majority", py::arg("h0") = "indep",
             py::arg("alpha") = 0.05, py::arg("method") = "exact", py::arg("both_orders") = true,
             py::arg("base_url") = "https://api.openai.com/v1", py::arg("model") = "gpt-4",
             py::arg("n") = 10, py::arg("replay_only") = true);

    py::class_<PcOptions>(m, "PcOptions")
        .def(py::init<>())
        .def_readwrite("max_cond_size", &PcOptions::max_cond_size)
        .def_readwrite("stable", &PcOptions::stable)
        .def_readwrite("orient", &PcOptions::orient)
        .def_readwrite("jobs", &PcOptions::jobs);

    m.def(
        "run_pc",
        [](const Problem& problem, const CiOracle& oracle, const PcOptions& opts) {
            PcResult r = run_pc(problem, oracle, opts);
            return py::make_tuple(r.graph, report::to_json(r.trace).dump());
        },
        py::arg("problem"), py::arg("oracle"), py::arg("options") = PcOptions{},
        "Runs PC; returns (graph, trace_json)");

    py::class_<SampleTable>(m, "SampleTable")
        .def(py::init([](std::vector<std::string> columns,
                         std::vector<std::vector<std::string>> rows) {
                 SampleTable t;
                 t.columns = std::move(columns);
                 t.rows = std::move(rows);
                 return t;
             }),
             py::arg("columns"), py::arg("rows"))
        .def_static("from_csv_file", &SampleTable::from_csv_file, py::arg("path"),
                    py::arg("delimiter") = ',');
    m.def(
        "gsq_ci_test",
        [](const SampleTable& data, const CiQuery& q, double alpha, long min_rows) {
            return gsq_ci_test(data, q, alpha, min_rows);
        },
        py::arg("data"), py::arg("query"), py::arg("alpha") = 0.05,
        py::arg("min_rows") = kDefaultGsqMinRows);
}
