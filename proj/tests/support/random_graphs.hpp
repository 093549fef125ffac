#pragma once

#include <algorithm>
#include <random>
#include <string>
#include <vector>

#include "chatpc/graph.hpp"
#include "chatpc/problem.hpp"

namespace chatpc_test {

inline chatpc::Dag random_dag(std::mt19937_64& rng, int num_nodes, double edge_prob) {
    std::vector<std::string> names;
    names.reserve(static_cast<std::size_t>(num_nodes));
    for (int i = 0; i < num_nodes; ++i) names.push_back("V" + std::to_string(i));

    std::vector<int> order(static_cast<std::size_t>(num_nodes));
    for (int i = 0; i < num_nodes; ++i) order[static_cast<std::size_t>(i)] = i;
    std::shuffle(order.begin(), order.end(), rng);

    std::vector<std::pair<std::string, std::string>> edges;
    const auto threshold = static_cast<std::uint64_t>(edge_prob * 1000.0);
    for (int i = 0; i < num_nodes; ++i)
        for (int j = i + 1; j < num_nodes; ++j)
            if (rng() % 1000 < threshold)
                edges.emplace_back(names[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])],
                                   names[static_cast<std::size_t>(order[static_cast<std::size_t>(j)])]);
    return chatpc::Dag(names, edges);
}

/// Wraps a DAG as a Problem so oracle/PC code can run on it.
inline chatpc::Problem problem_from_dag(const chatpc::Dag& dag, const std::string& id) {
    chatpc::Problem p;
    p.id = id;
    p.field = "synthetic systems";
    p.context = "Synthetic benchmark graph.";
    for (const auto& name : dag.nodes()) p.variables.push_back({name, "synthetic variable " + name});
    p.ground_truth = dag;
    return p;
}

}  // namespace chatpc_test
