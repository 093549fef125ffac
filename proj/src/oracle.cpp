#include "chatpc/oracle.hpp"

#include <algorithm>

#include "chatpc/errors.hpp"
#include "chatpc/util.hpp"

namespace chatpc {

namespace {

void check_query(const Problem& problem, const CiQuery& q) {
    problem.variable(q.x);
    problem.variable(q.y);
    for (const auto& z : q.z) problem.variable(z);
}

Decision plain_decision(Outcome outcome) {
    Decision d;
    d.outcome = outcome;
    d.method = "oracle";
    return d;
}

}  // namespace

OracleVerdict DsepOracle::query(const Problem& problem, const CiQuery& q) const {
    check_query(problem, q);
    const CiLabel label = ground_truth_label(problem, q);
    OracleVerdict v;
    v.decision = plain_decision(label == CiLabel::INDEPENDENT ? Outcome::INDEPENDENT
                                                              : Outcome::DEPENDENT);
    v.source = "dsep";
    return v;
}

NoisyOracle::NoisyOracle(NoiseSpec spec) : spec_(spec) {
    if (spec_.false_independence_rate < 0 || spec_.false_independence_rate > 1 ||
        spec_.false_dependence_rate < 0 || spec_.false_dependence_rate > 1)
        throw InvalidQuery("noise rates must lie in [0, 1]");
}

OracleVerdict NoisyOracle::query(const Problem& problem, const CiQuery& q) const {
    check_query(problem, q);
    const CiLabel label = ground_truth_label(problem, q);

    const CiQuery canon = q.canonical();
    std::uint64_t h = fnv1a64(problem.id);
    h = fnv1a64("\x1f", h);
    h = fnv1a64(canon.x, h);
    h = fnv1a64("\x1f", h);
    h = fnv1a64(canon.y, h);
    for (const auto& z : canon.z) {
        h = fnv1a64("\x1f", h);
        h = fnv1a64(z, h);
    }
    const double u = hash_to_unit(splitmix64(spec_.seed ^ h));

    Outcome out;
    if (label == CiLabel::DEPENDENT)
        out = u < spec_.false_independence_rate ? Outcome::INDEPENDENT : Outcome::DEPENDENT;
    else
        out = u < spec_.false_dependence_rate ? Outcome::DEPENDENT : Outcome::INDEPENDENT;

    OracleVerdict v;
    v.decision = plain_decision(out);
    v.source = "noisy";
    return v;
}

int SampleTable::column_index(const std::string& name) const {
    auto it = std::find(columns.begin(), columns.end(), name);
    if (it == columns.end()) throw ColumnMissing("no such column: " + name);
    return static_cast<int>(it - columns.begin());
}

GsqOracle::GsqOracle(SampleTable data, double alpha, long min_rows)
    : data_(std::move(data)), alpha_(alpha), min_rows_(min_rows) {}

OracleVerdict GsqOracle::query(const Problem& problem, const CiQuery& q) const {
    check_query(problem, q);
    return gsq_ci_test(data_, q, alpha_, min_rows_);
}

LlmOracle::LlmOracle(std::shared_ptr<LlmClient> client, DecisionPolicy policy,
                     bool symmetrize_orders)
    : client_(std::move(client)), policy_(policy), symmetrize_(symmetrize_orders) {}

DirectionalAnswers LlmOracle::answers_for(const Problem& problem, const CiQuery& q) const {
    PromptBundle prompt = build_prompt(problem, q);
    auto batch = client_->complete_batch(prompt);
    DirectionalAnswers out;
    out.from_cassette = batch.from_cassette;
    out.answers.reserve(batch.completions.size());
    for (const auto& text : batch.completions) out.answers.push_back(parse_response(text));
    return out;
}

OracleVerdict LlmOracle::query(const Problem& problem, const CiQuery& q) const {
    check_query(problem, q);
    DirectionalAnswers fwd = answers_for(problem, q);
    DirectionalAnswers rev;
    if (symmetrize_) rev = answers_for(problem, q.swapped());

    const VoteTally t_fwd = tally(fwd.answers);
    const VoteTally t_rev = tally(rev.answers);

    std::vector<RawAnswer> all = fwd.answers;
    all.insert(all.end(), rev.answers.begin(), rev.answers.end());

    OracleVerdict v;
    v.decision = apply_policy(policy_, all);
    v.source = (fwd.from_cassette && (!symmetrize_ || rev.from_cassette)) ? "cached" : "llm";
    v.direction_tallies = std::make_pair(t_fwd, t_rev);
    return v;
}

}  // namespace chatpc
