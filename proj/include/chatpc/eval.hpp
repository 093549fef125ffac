#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

#include "chatpc/metrics.hpp"
#include "chatpc/oracle.hpp"
#include "chatpc/problem.hpp"

namespace chatpc {

/// One evaluated CI statement: ground-truth label plus the decision each
/// policy reached, with per-direction decisions kept for consistency checks.
struct CitRecord {
    CiQuery query{"x", "y"};  // canonical direction
    std::optional<CiLabel> label;
    std::map<std::string, Decision> decisions;  // policy name -> symmetrized decision
    std::map<std::string, std::pair<Decision, Decision>> direction_decisions;
    std::optional<std::pair<VoteTally, VoteTally>> direction_tallies;
};

/// Cross-tabulation of the two query directions' outcomes over
/// {YES, NO, UNCERTAIN}; agreement is the diagonal share.
struct ConsistencyMatrix {
    std::array<std::array<long, 3>, 3> counts{};  // [direction A][direction B]
    long total = 0;
    double agreement = 0.0;
};

/// Confusion counts and metrics for one policy across the records. UNDECIDED
/// decisions land in their own bucket (see MetricsReport).
MetricsReport evaluate_cit(const std::vector<CitRecord>& records, const std::string& policy,
                           const std::string& positive_class = "INDEPENDENT");

ConsistencyMatrix consistency_matrix(const std::vector<CitRecord>& records,
                                     const std::string& policy);

struct BenchOptions {
    int max_cond_size = kUnlimitedCondSize;
    bool both_orders = true;
    /// Restrict to the problem's designated pairs, marginal queries only.
    bool pairs_only = false;
    /// Per-problem conventions applied when no explicit bound is given:
    /// problems with 10+ variables cap conditioning sets at size 1, and
    /// pair-list problems run marginal-only.
    bool auto_conventions = true;
};

struct BenchResult {
    std::vector<CitRecord> records;
    std::map<std::string, MetricsReport> metrics;
    std::map<std::string, ConsistencyMatrix> consistency;
    BenchOptions options;
};

/// Enumerates statements, queries the oracle once per direction, then
/// re-aggregates the collected answers under every requested policy without
/// touching the oracle again. The problem must carry a ground truth.
BenchResult run_benchmark(const Problem& problem, const CiOracle& oracle,
                          const std::vector<DecisionPolicy>& policies, const BenchOptions& opts);

/// Label-free variant for problems without ground truth: per-direction
/// decisions and consistency matrices only, no metrics.
BenchResult run_consistency(const Problem& problem, const CiOracle& oracle,
                            const std::vector<DecisionPolicy>& policies,
                            const BenchOptions& opts);

}  // namespace chatpc
