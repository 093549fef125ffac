#pragma once

#include <array>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "chatpc/metrics.hpp"

namespace chatpc {

/// Directed acyclic graph over named nodes. Node identity is the variable's
/// short name; comparisons are exact and case-sensitive. Immutable after
/// construction; the constructor enforces all invariants (no self-loops, no
/// duplicate edges, declared endpoints, acyclicity).
class Dag {
public:
    Dag(std::vector<std::string> nodes,
        const std::vector<std::pair<std::string, std::string>>& edges);

    const std::vector<std::string>& nodes() const { return nodes_; }
    std::size_t num_nodes() const { return nodes_.size(); }

    /// Edges as (parent, child) index pairs, sorted.
    const std::vector<std::pair<int, int>>& edges() const { return edges_; }
    std::vector<std::pair<std::string, std::string>> edge_names() const;

    int index_of(const std::string& name) const;  // throws UnknownNode
    bool has_node(const std::string& name) const;
    const std::string& name_of(int i) const { return nodes_.at(static_cast<std::size_t>(i)); }

    const std::vector<int>& parents(int i) const { return parents_[static_cast<std::size_t>(i)]; }
    const std::vector<int>& children(int i) const { return children_[static_cast<std::size_t>(i)]; }
    bool has_edge(int parent, int child) const;
    bool adjacent(int a, int b) const { return has_edge(a, b) || has_edge(b, a); }

    std::string to_dot() const;

private:
    std::vector<std::string> nodes_;
    std::map<std::string, int> index_;
    std::vector<std::pair<int, int>> edges_;
    std::vector<std::vector<int>> parents_;
    std::vector<std::vector<int>> children_;
};

/// Checks the Dag invariants over raw parts; throws CycleDetected (naming one
/// cycle), UnknownNode or SelfLoop. The Dag constructor runs this.
void validate_dag(const std::vector<std::string>& nodes,
                  const std::vector<std::pair<std::string, std::string>>& edges);

/// Partially directed graph (CPDAG representative). A node pair holds at most
/// one edge: directed one way or undirected.
class Pdag {
public:
    explicit Pdag(std::vector<std::string> nodes);
    static Pdag complete(std::vector<std::string> nodes);  // all pairs undirected
    static Pdag from_dag(const Dag& dag);                  // keeps orientations

    const std::vector<std::string>& nodes() const { return nodes_; }
    std::size_t num_nodes() const { return nodes_.size(); }
    int index_of(const std::string& name) const;
    const std::string& name_of(int i) const { return nodes_.at(static_cast<std::size_t>(i)); }

    bool has_directed(int from, int to) const;
    bool has_undirected(int a, int b) const;
    bool adjacent(int a, int b) const;

    void add_directed(int from, int to);
    void add_undirected(int a, int b);
    void remove_edge(int a, int b);  // either kind
    /// Turns the undirected edge a-b into a->b; the edge must be undirected.
    void orient(int from, int to);

    std::vector<int> adjacency(int i) const;              // sorted
    std::vector<int> parents_of(int i) const;             // sorted
    std::vector<int> undirected_neighbors(int i) const;   // sorted

    std::size_t num_edges() const;
    /// Name pairs, deterministically ordered.
    std::vector<std::pair<std::string, std::string>> directed_edge_names() const;
    std::vector<std::pair<std::string, std::string>> undirected_edge_names() const;
    std::vector<std::pair<std::string, std::string>> skeleton_pairs() const;

    /// Structural equality by node-name sets and edge status per pair.
    bool equals(const Pdag& other) const;

    std::string to_dot() const;

private:
    void check_index(int i) const;
    std::vector<std::string> nodes_;
    std::map<std::string, int> index_;
    std::set<std::pair<int, int>> directed_;    // (from, to)
    std::set<std::pair<int, int>> undirected_;  // (min, max)
};

/// Witnessing conditioning sets recorded when the skeleton phase removes an
/// edge; keyed by unordered name pair (min, max), witnesses sorted.
using SepSets = std::map<std::pair<std::string, std::string>, std::vector<std::string>>;

std::pair<std::string, std::string> canonical_pair(const std::string& a, const std::string& b);

/// True iff every path between x and y is blocked given z. Runs reachability
/// on the moralized ancestral subgraph (Bayes-ball equivalent), O(V+E).
bool d_separated(const Dag& dag, const std::string& x, const std::string& y,
                 const std::vector<std::string>& z);

/// Orientation conflict observed during Meek closure: the rule demanded the
/// reverse of an already-directed edge. The edge is left as-is and reported.
struct MeekConflict {
    std::string from, to;  // demanded orientation that was refused
    std::string rule;
};

struct MeekApplication {
    std::string from, to;
    std::string rule;  // R1..R4
};

/// Repeated application of Meek rules R1-R4 until fixed point. Never removes
/// an edge, never reverses a directed edge, never creates a new v-structure.
Pdag meek_closure(const Pdag& pdag, std::vector<MeekConflict>* conflicts = nullptr,
                  std::vector<MeekApplication>* applications = nullptr);

/// The CPDAG of `dag`: skeleton, v-structures oriented, Meek closure applied.
Pdag cpdag_of(const Dag& dag);

/// Skeleton precision/recall/F1/accuracy over all unordered node pairs,
/// treating truth-skeleton edges as positives.
MetricsReport skeleton_metrics(const Pdag& predicted, const Dag& truth);

/// Structural Hamming distance: node pairs whose edge status (absent /
/// undirected / directed-with-direction) differs. A direction flip counts 1.
int shd(const Pdag& a, const Pdag& b);

}  // namespace chatpc
