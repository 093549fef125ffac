#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "chatpc/aggregate.hpp"
#include "chatpc/llm_client.hpp"
#include "chatpc/problem.hpp"

namespace chatpc {

struct OracleVerdict {
    Decision decision;
    std::string source;  // dsep | llm | noisy | gsq | cached
    /// Per-direction tallies, present only for LLM-backed verdicts.
    std::optional<std::pair<VoteTally, VoteTally>> direction_tallies;
    std::optional<double> g_squared;  // gsq only
    std::optional<long> dof;          // gsq only
};

/// Uniform CI-oracle interface. Implementations are safely shareable across
/// concurrent callers.
class CiOracle {
public:
    virtual ~CiOracle() = default;
    virtual OracleVerdict query(const Problem& problem, const CiQuery& q) const = 0;
    virtual std::string name() const = 0;
};

/// Perfect oracle: answers by d-separation on the problem's ground truth.
class DsepOracle : public CiOracle {
public:
    OracleVerdict query(const Problem& problem, const CiQuery& q) const override;
    std::string name() const override { return "dsep"; }
};

struct NoiseSpec {
    double false_independence_rate = 0.0;  // truth DEPENDENT answered INDEPENDENT
    double false_dependence_rate = 0.0;    // truth INDEPENDENT answered DEPENDENT
    std::uint64_t seed = 0;
};

/// Ground-truth oracle with seeded verdict flips. Flips are decided by hashing
/// (seed, canonical query), so a verdict is a pure function of its inputs and
/// parallel runs reproduce serial ones.
class NoisyOracle : public CiOracle {
public:
    explicit NoisyOracle(NoiseSpec spec);
    OracleVerdict query(const Problem& problem, const CiQuery& q) const override;
    std::string name() const override { return "noisy"; }

private:
    NoiseSpec spec_;
};

/// Discrete sample table: header names plus rows of category values.
struct SampleTable {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    int column_index(const std::string& name) const;  // throws ColumnMissing
    static SampleTable from_csv(std::istream& in, char delimiter = ',');
    static SampleTable from_csv_file(const std::string& path, char delimiter = ',');
};

inline constexpr long kDefaultGsqMinRows = 10;

/// G² (likelihood-ratio) conditional independence test on discrete data:
/// G² = 2·N·MI(x;y|z) over observed counts, chi-square null with
/// (|X|-1)(|Y|-1)·(observed z-strata) degrees of freedom. Unobserved strata
/// contribute nothing and shed their degrees of freedom.
OracleVerdict gsq_ci_test(const SampleTable& data, const CiQuery& q, double alpha,
                          long min_rows = kDefaultGsqMinRows);

class GsqOracle : public CiOracle {
public:
    GsqOracle(SampleTable data, double alpha, long min_rows = kDefaultGsqMinRows);
    OracleVerdict query(const Problem& problem, const CiQuery& q) const override;
    std::string name() const override { return "gsq"; }

private:
    SampleTable data_;
    double alpha_;
    long min_rows_;
};

struct DirectionalAnswers {
    std::vector<RawAnswer> answers;
    bool from_cassette = false;
};

/// LLM-backed oracle: prompts for (x,y,z) and, when symmetrizing, also
/// (y,x,z); parses the batches, sums the per-direction tallies and applies the
/// decision policy. Live completions are recorded through the client.
class LlmOracle : public CiOracle {
public:
    LlmOracle(std::shared_ptr<LlmClient> client, DecisionPolicy policy,
              bool symmetrize_orders = true);

    OracleVerdict query(const Problem& problem, const CiQuery& q) const override;
    std::string name() const override { return "llm"; }

    /// One direction's parsed batch, exactly as prompted. Evaluation code uses
    /// this to re-aggregate under several policies without re-querying.
    DirectionalAnswers answers_for(const Problem& problem, const CiQuery& q) const;

    const DecisionPolicy& policy() const { return policy_; }
    bool symmetrize_orders() const { return symmetrize_; }

private:
    std::shared_ptr<LlmClient> client_;
    DecisionPolicy policy_;
    bool symmetrize_;
};

}  // namespace chatpc
