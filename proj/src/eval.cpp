#include "chatpc/eval.hpp"

#include <algorithm>

#include "chatpc/errors.hpp"

namespace chatpc {

namespace {

int outcome_slot(Outcome o) {
    switch (o) {
        case Outcome::INDEPENDENT: return 0;  // YES
        case Outcome::DEPENDENT: return 1;    // NO
        default: return 2;                    // UNCERTAIN
    }
}

const Decision& decision_for(const CitRecord& r, const std::string& policy) {
    auto it = r.decisions.find(policy);
    if (it == r.decisions.end())
        throw UnknownPolicy("record " + r.query.display() + " carries no policy " + policy);
    return it->second;
}

BenchOptions effective_options(const Problem& problem, const BenchOptions& opts) {
    BenchOptions effective = opts;
    if (effective.auto_conventions) {
        if (!problem.pairs.empty()) effective.pairs_only = true;
        // Full enumeration explodes combinatorially; large corpora stop at
        // conditioning sets of size 1 unless told otherwise.
        if (effective.max_cond_size == kUnlimitedCondSize && problem.variables.size() >= 10)
            effective.max_cond_size = 1;
    }
    return effective;
}

BenchResult collect(const Problem& problem, const CiOracle& oracle,
                    const std::vector<DecisionPolicy>& policies, const BenchOptions& opts,
                    bool with_labels) {
    if (policies.empty()) throw UnknownPolicy("benchmark needs at least one policy");
    const BenchOptions effective = effective_options(problem, opts);

    // Canonical (unordered) statements; the reverse direction is queried
    // separately rather than enumerated.
    std::vector<CiQuery> statements;
    if (effective.pairs_only) {
        for (const auto& [x, y] : problem.pairs) statements.emplace_back(x, y);
    } else {
        statements = enumerate_ci_statements(problem, effective.max_cond_size, false);
    }

    const auto* llm = dynamic_cast<const LlmOracle*>(&oracle);

    BenchResult result;
    result.options = effective;
    for (const auto& q : statements) {
        CitRecord rec;
        rec.query = q;
        if (with_labels) rec.label = ground_truth_label(problem, q);

        if (llm != nullptr) {
            DirectionalAnswers fwd = llm->answers_for(problem, q);
            DirectionalAnswers rev;
            if (effective.both_orders) rev = llm->answers_for(problem, q.swapped());
            std::vector<RawAnswer> all = fwd.answers;
            all.insert(all.end(), rev.answers.begin(), rev.answers.end());
            rec.direction_tallies = std::make_pair(tally(fwd.answers), tally(rev.answers));
            for (const auto& policy : policies) {
                rec.decisions[policy.name()] = apply_policy(policy, all);
                if (effective.both_orders)
                    rec.direction_decisions[policy.name()] = {apply_policy(policy, fwd.answers),
                                                              apply_policy(policy, rev.answers)};
            }
        } else {
            OracleVerdict fwd = oracle.query(problem, q);
            OracleVerdict rev = effective.both_orders ? oracle.query(problem, q.swapped()) : fwd;
            for (const auto& policy : policies) {
                rec.decisions[policy.name()] = fwd.decision;
                if (effective.both_orders)
                    rec.direction_decisions[policy.name()] = {fwd.decision, rev.decision};
            }
        }
        result.records.push_back(std::move(rec));
    }

    for (const auto& policy : policies) {
        if (with_labels)
            result.metrics[policy.name()] = evaluate_cit(result.records, policy.name());
        if (effective.both_orders)
            result.consistency[policy.name()] = consistency_matrix(result.records, policy.name());
    }
    return result;
}

}  // namespace

MetricsReport evaluate_cit(const std::vector<CitRecord>& records, const std::string& policy,
                           const std::string& positive_class) {
    if (positive_class != "INDEPENDENT" && positive_class != "DEPENDENT")
        throw UnknownPolicy("positive_class must be INDEPENDENT or DEPENDENT");
    const CiLabel positive =
        positive_class == "INDEPENDENT" ? CiLabel::INDEPENDENT : CiLabel::DEPENDENT;
    const Outcome positive_outcome =
        positive == CiLabel::INDEPENDENT ? Outcome::INDEPENDENT : Outcome::DEPENDENT;

    long tp = 0, fp = 0, tn = 0, fn = 0, undecided_pos = 0, undecided_neg = 0;
    for (const auto& r : records) {
        const Decision& d = decision_for(r, policy);
        if (!r.label) throw NoGroundTruth("record " + r.query.display() + " carries no label");
        const bool label_positive = *r.label == positive;
        if (d.outcome == Outcome::UNDECIDED) {
            (label_positive ? undecided_pos : undecided_neg) += 1;
            continue;
        }
        const bool predicted_positive = d.outcome == positive_outcome;
        if (predicted_positive && label_positive)
            ++tp;
        else if (predicted_positive && !label_positive)
            ++fp;
        else if (!predicted_positive && label_positive)
            ++fn;
        else
            ++tn;
    }
    return make_metrics(tp, fp, tn, fn, undecided_pos, undecided_neg, positive_class);
}

ConsistencyMatrix consistency_matrix(const std::vector<CitRecord>& records,
                                     const std::string& policy) {
    ConsistencyMatrix m;
    for (const auto& r : records) {
        auto it = r.direction_decisions.find(policy);
        if (it == r.direction_decisions.end())
            throw MissingDirection("record " + r.query.display() +
                                   " carries no per-direction decisions for policy " + policy);
        const int a = outcome_slot(it->second.first.outcome);
        const int b = outcome_slot(it->second.second.outcome);
        ++m.counts[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)];
        ++m.total;
    }
    if (m.total > 0) {
        long agree = m.counts[0][0] + m.counts[1][1] + m.counts[2][2];
        m.agreement = static_cast<double>(agree) / static_cast<double>(m.total);
    }
    return m;
}

BenchResult run_benchmark(const Problem& problem, const CiOracle& oracle,
                          const std::vector<DecisionPolicy>& policies, const BenchOptions& opts) {
    if (!problem.ground_truth)
        throw NoGroundTruth("problem " + problem.id + " carries no ground-truth graph");
    return collect(problem, oracle, policies, opts, true);
}

BenchResult run_consistency(const Problem& problem, const CiOracle& oracle,
                            const std::vector<DecisionPolicy>& policies,
                            const BenchOptions& opts) {
    return collect(problem, oracle, policies, opts, false);
}

}  // namespace chatpc
