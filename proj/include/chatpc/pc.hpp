#pragma once

#include <optional>
#include <string>
#include <vector>

#include "chatpc/errors.hpp"
#include "chatpc/graph.hpp"
#include "chatpc/oracle.hpp"
#include "chatpc/problem.hpp"

namespace chatpc {

struct PcOptions {
    int max_cond_size = kUnlimitedCondSize;
    /// Order-independent variant: adjacency sets frozen per level, removals
    /// applied at level end.
    bool stable = true;
    bool orient = true;
    std::optional<long> query_budget;
    /// Tie policy: UNDECIDED oracle verdicts keep the edge (conservative
    /// toward density) unless this is flipped.
    bool undecided_keeps_edge = true;
    /// CI queries for distinct pairs within a level may run concurrently.
    int jobs = 1;
};

struct TraceEntry {
    std::string action;  // edge_removed | edge_kept | collider_oriented |
                         // meek_applied | orientation_conflict
    std::optional<CiQuery> query;
    std::optional<std::string> verdict;
    /// Node names involved in an orientation (triple or edge), plus the Meek
    /// rule tag where applicable.
    std::vector<std::string> detail;
};

struct PcTrace {
    std::vector<TraceEntry> entries;
    long total_queries = 0;
};

struct QueryBudgetExceeded : Error {
    QueryBudgetExceeded(PcTrace trace_, Pdag partial_)
        : Error("query budget exceeded after " + std::to_string(trace_.total_queries) +
                " queries"),
          trace(std::move(trace_)),
          partial(std::move(partial_)) {}
    PcTrace trace;    // partial results up to the budget point
    Pdag partial;
};

struct SkeletonResult {
    Pdag skeleton;  // undirected edges only
    SepSets sepsets;
    PcTrace trace;
};

struct PcResult {
    Pdag graph;
    PcTrace trace;
};

/// Skeleton phase: starts fully connected and, per level l = 0,1,..., tests
/// each adjacent pair against every size-l subset of either endpoint's other
/// neighbors, removing the edge on INDEPENDENT and recording the witness.
SkeletonResult pc_skeleton(const Problem& problem, const CiOracle& oracle,
                           const PcOptions& opts);

/// Orients x->c<-y for every unshielded triple whose middle node is absent
/// from the recorded separation set of (x,y). A pair of triples demanding both
/// directions of one edge leaves it undirected (logged when a trace is given).
Pdag orient_v_structures(const Pdag& skeleton, const SepSets& sepsets, PcTrace* trace = nullptr);

/// Meek rules R1-R4 to fixed point; logs applications and conflicts.
Pdag apply_meek_rules(const Pdag& pdag, PcTrace* trace = nullptr);

/// skeleton -> v-structures -> Meek closure. With opts.orient false the
/// undirected skeleton comes back as-is.
PcResult run_pc(const Problem& problem, const CiOracle& oracle, const PcOptions& opts);

}  // namespace chatpc
