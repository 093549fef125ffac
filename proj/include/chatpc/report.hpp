#pragma once

#include <map>
#include <string>

#include <nlohmann/json.hpp>

#include "chatpc/eval.hpp"
#include "chatpc/pc.hpp"

namespace chatpc::report {

nlohmann::json to_json(const VoteTally& t);
nlohmann::json to_json(const Decision& d);
nlohmann::json to_json(const MetricsReport& m);
nlohmann::json to_json(const ConsistencyMatrix& m);
nlohmann::json to_json(const CitRecord& r);
nlohmann::json to_json(const PcTrace& t);
nlohmann::json graph_json(const Pdag& g);

/// Wraps a payload with run metadata. Reruns with identical inputs produce a
/// byte-identical payload section; only meta carries timestamps.
nlohmann::json make_document(nlohmann::json payload);

std::string render(const nlohmann::json& doc);  // stable two-space dump

/// Aligned text table of per-policy metrics, one row per policy.
std::string metrics_table(const std::string& problem_id,
                          const std::map<std::string, MetricsReport>& metrics);

std::string consistency_text(const std::map<std::string, ConsistencyMatrix>& matrices);

/// Canonical policy-row order for text output.
std::vector<std::string> policy_order(const std::map<std::string, MetricsReport>& metrics);

}  // namespace chatpc::report
