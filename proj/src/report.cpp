#include "chatpc/report.hpp"

#include <algorithm>
#include <iomanip>
#include <sstream>

#include "chatpc/cassette.hpp"

namespace chatpc::report {

using nlohmann::json;

json to_json(const VoteTally& t) {
    return json{{"total", t.n_total},
                {"yes", t.n_yes},
                {"no", t.n_no},
                {"uncertain", t.n_uncertain}};
}

json to_json(const Decision& d) {
    json j{{"outcome", to_string(d.outcome)}, {"method", d.method}, {"tally", to_json(d.tally)}};
    if (d.p_value) j["p_value"] = *d.p_value;
    if (d.alpha) j["alpha"] = *d.alpha;
    return j;
}

json to_json(const MetricsReport& m) {
    json j{{"tp", m.tp},
           {"fp", m.fp},
           {"tn", m.tn},
           {"fn", m.fn},
           {"undecided", m.undecided},
           {"positive_class", m.positive_class}};
    if (m.accuracy) j["accuracy"] = *m.accuracy;
    if (m.precision) j["precision"] = *m.precision;
    if (m.recall) j["recall"] = *m.recall;
    if (m.f1) j["f1"] = *m.f1;
    return j;
}

json to_json(const ConsistencyMatrix& m) {
    json counts = json::array();
    for (const auto& row : m.counts) counts.push_back(json{row[0], row[1], row[2]});
    return json{{"labels", {"YES", "NO", "UNCERTAIN"}},
                {"counts", counts},
                {"total", m.total},
                {"agreement", m.agreement}};
}

json to_json(const CitRecord& r) {
    json decisions = json::object();
    for (const auto& [name, d] : r.decisions) decisions[name] = to_json(d);
    json j{{"x", r.query.x}, {"y", r.query.y}, {"z", r.query.z}, {"decisions", decisions}};
    if (r.label) j["label"] = to_string(*r.label);
    if (!r.direction_decisions.empty()) {
        json dirs = json::object();
        for (const auto& [name, pair] : r.direction_decisions)
            dirs[name] = json::array({to_json(pair.first), to_json(pair.second)});
        j["direction_decisions"] = dirs;
    }
    if (r.direction_tallies)
        j["direction_tallies"] = json::array(
            {to_json(r.direction_tallies->first), to_json(r.direction_tallies->second)});
    return j;
}

json to_json(const PcTrace& t) {
    json entries = json::array();
    for (const auto& e : t.entries) {
        json je{{"action", e.action}};
        if (e.query) {
            je["x"] = e.query->x;
            je["y"] = e.query->y;
            je["z"] = e.query->z;
        }
        if (e.verdict) je["verdict"] = *e.verdict;
        if (!e.detail.empty()) je["detail"] = e.detail;
        entries.push_back(std::move(je));
    }
    return json{{"entries", entries}, {"total_queries", t.total_queries}};
}

json graph_json(const Pdag& g) {
    json directed = json::array();
    for (const auto& [a, b] : g.directed_edge_names()) directed.push_back({a, b});
    json undirected = json::array();
    for (const auto& [a, b] : g.undirected_edge_names()) undirected.push_back({a, b});
    return json{{"nodes", g.nodes()}, {"directed_edges", directed}, {"undirected_edges", undirected}};
}

json make_document(json payload) {
    return json{{"meta", {{"tool", "chatpc"}, {"created_at", now_utc_iso8601()}}},
                {"payload", std::move(payload)}};
}

std::string render(const json& doc) { return doc.dump(2) + "\n"; }

namespace {

std::string fmt2(const std::optional<double>& v) {
    if (!v) return "";
    std::ostringstream os;
    os << std::fixed << std::setprecision(2) << *v;
    return os.str();
}

}  // namespace

std::vector<std::string> policy_order(const std::map<std::string, MetricsReport>& metrics) {
    static const std::vector<std::string> canon{"majority", "weighted", "unanimity", "stat_dep",
                                                "stat_indep"};
    std::vector<std::string> out;
    for (const auto& name : canon)
        if (metrics.count(name)) out.push_back(name);
    for (const auto& [name, m] : metrics)
        if (std::find(out.begin(), out.end(), name) == out.end()) out.push_back(name);
    return out;
}

std::string metrics_table(const std::string& problem_id,
                          const std::map<std::string, MetricsReport>& metrics) {
    std::ostringstream os;
    os << std::left << std::setw(12) << "problem" << std::setw(12) << "policy" << std::right
       << std::setw(10) << "accuracy" << std::setw(8) << "f1" << std::setw(11) << "precision"
       << std::setw(8) << "recall" << "\n";
    for (const auto& name : policy_order(metrics)) {
        const MetricsReport& m = metrics.at(name);
        os << std::left << std::setw(12) << problem_id << std::setw(12) << name << std::right
           << std::setw(10) << fmt2(m.accuracy) << std::setw(8) << fmt2(m.f1) << std::setw(11)
           << fmt2(m.precision) << std::setw(8) << fmt2(m.recall) << "\n";
    }
    return os.str();
}

std::string consistency_text(const std::map<std::string, ConsistencyMatrix>& matrices) {
    std::ostringstream os;
    static const char* labels[3] = {"YES", "NO", "UNCERTAIN"};
    for (const auto& [name, m] : matrices) {
        os << "policy " << name << " (rows: x,y order / columns: y,x order)\n";
        os << std::setw(11) << "";
        for (const auto* l : labels) os << std::setw(11) << l;
        os << "\n";
        for (int i = 0; i < 3; ++i) {
            os << std::setw(11) << labels[i];
            for (int j = 0; j < 3; ++j)
                os << std::setw(11)
                   << m.counts[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
            os << "\n";
        }
        os << "agreement: " << std::fixed << std::setprecision(4) << m.agreement << "\n\n";
    }
    return os.str();
}

}  // namespace chatpc::report
