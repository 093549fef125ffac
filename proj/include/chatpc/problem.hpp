#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "chatpc/graph.hpp"

namespace chatpc {

struct Variable {
    std::string name;
    std::string description;
    bool operator==(const Variable&) const = default;
};

/// A conditional-independence query "x independent of y given z". z is kept in
/// the order given (duplicate-free, excludes both endpoints).
struct CiQuery {
    CiQuery(std::string x_, std::string y_, std::vector<std::string> z_ = {});
    std::string x;
    std::string y;
    std::vector<std::string> z;

    CiQuery swapped() const { return {y, x, z}; }
    /// (min(x,y), max(x,y), sorted z) — one identity for both orders.
    CiQuery canonical() const;
    std::string display() const;  // "x _||_ y | z1, z2"
    bool operator==(const CiQuery&) const = default;
};

enum class CiLabel { INDEPENDENT, DEPENDENT };

/// A causal-discovery problem: variables with descriptions, the expert field,
/// a context paragraph, and optionally a ground-truth DAG. Immutable once
/// loaded.
struct Problem {
    std::string id;
    std::string field;
    std::string context;
    std::vector<Variable> variables;
    std::optional<Dag> ground_truth;
    std::optional<std::string> provenance;
    std::optional<std::string> notes;
    /// Designated variable pairs for marginal-only corpora; empty otherwise.
    std::vector<std::pair<std::string, std::string>> pairs;

    const Variable& variable(const std::string& name) const;  // throws UnknownVariable
    bool has_variable(const std::string& name) const;
    std::vector<std::string> variable_names() const;
};

bool operator==(const Problem& a, const Problem& b);

/// Parses and fully validates one problem document (see data/problems for the
/// schema). The ground truth, when present, passes validate_dag.
Problem load_problem(std::istream& in);
Problem load_problem_string(const std::string& text);
Problem load_problem_file(const std::string& path);

std::string serialize_problem(const Problem& p);

/// Marker for "no conditioning-set bound".
inline constexpr int kUnlimitedCondSize = -1;

/// All (x,y,Z) with Z ⊆ V∖{x,y} and |Z| ≤ max_cond_size (kUnlimitedCondSize
/// lifts the bound). Deterministic order: lexicographic by x, then y, then
/// subset size and rank. When both_orders, each unordered pair appears in both
/// directions.
std::vector<CiQuery> enumerate_ci_statements(const Problem& problem, int max_cond_size,
                                             bool both_orders);

/// INDEPENDENT iff the query is d-separated in the ground truth.
CiLabel ground_truth_label(const Problem& problem, const CiQuery& q);

const char* to_string(CiLabel label);

}  // namespace chatpc
