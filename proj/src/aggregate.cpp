#include "chatpc/aggregate.hpp"

#include <cmath>

#include "chatpc/errors.hpp"
#include "chatpc/stats.hpp"

namespace chatpc {

bool operator==(const VoteTally& a, const VoteTally& b) {
    return a.n_total == b.n_total && a.n_yes == b.n_yes && a.n_no == b.n_no &&
           a.n_uncertain == b.n_uncertain;
}

const char* to_string(Outcome o) {
    switch (o) {
        case Outcome::INDEPENDENT: return "INDEPENDENT";
        case Outcome::DEPENDENT: return "DEPENDENT";
        default: return "UNDECIDED";
    }
}

const char* to_string(NullHypothesis h0) {
    return h0 == NullHypothesis::NULL_INDEPENDENT ? "indep" : "dep";
}

const char* to_string(PvalMethod m) {
    return m == PvalMethod::ExactBinomial ? "exact" : "normal";
}

VoteTally tally(const std::vector<RawAnswer>& answers) {
    VoteTally t;
    t.n_total = static_cast<long>(answers.size());
    for (const auto& a : answers) {
        switch (a.verdict) {
            case Verdict::YES: ++t.n_yes; break;
            case Verdict::NO: ++t.n_no; break;
            default: ++t.n_uncertain; break;
        }
    }
    return t;
}

Decision decide_majority(const VoteTally& t) {
    Decision d;
    d.method = "majority";
    d.tally = t;
    if (t.n_yes > t.n_no)
        d.outcome = Outcome::INDEPENDENT;
    else if (t.n_no > t.n_yes)
        d.outcome = Outcome::DEPENDENT;
    else
        d.outcome = Outcome::UNDECIDED;
    return d;
}

Decision decide_weighted(const std::vector<RawAnswer>& answers) {
    Decision d;
    d.method = "weighted";
    d.tally = tally(answers);
    double yes_mass = 0.0, no_mass = 0.0;
    for (const auto& a : answers) {
        const double w = a.confidence.value_or(0.5);
        if (a.verdict == Verdict::YES) yes_mass += w;
        if (a.verdict == Verdict::NO) no_mass += w;
    }
    if (yes_mass > no_mass)
        d.outcome = Outcome::INDEPENDENT;
    else if (no_mass > yes_mass)
        d.outcome = Outcome::DEPENDENT;
    else
        d.outcome = Outcome::UNDECIDED;
    return d;
}

Decision decide_unanimity(const VoteTally& t) {
    Decision d;
    d.method = "unanimity";
    d.tally = t;
    if (t.n_yes > 0)
        d.outcome = Outcome::INDEPENDENT;
    else if (t.n_no > 0)
        d.outcome = Outcome::DEPENDENT;
    else
        d.outcome = Outcome::UNDECIDED;
    return d;
}

double p_value(const VoteTally& t, NullHypothesis h0, PvalMethod method) {
    const long m = t.n_yes + t.n_no;
    if (method == PvalMethod::ExactBinomial) {
        if (m < 1) throw NoDecisiveAnswers("exact test needs at least one YES/NO answer");
        const long k = h0 == NullHypothesis::NULL_INDEPENDENT ? t.n_no : t.n_yes;
        return stats::binomial_half_upper_tail(static_cast<int>(m), static_cast<int>(k));
    }
    if (m < 2) throw NoDecisiveAnswers("normal test needs at least two YES/NO answers");
    const double n = static_cast<double>(t.n_total);
    const double p_no = static_cast<double>(t.n_no) / n;
    const double p_yes = static_cast<double>(t.n_yes) / n;
    const double diff =
        h0 == NullHypothesis::NULL_INDEPENDENT ? p_no - p_yes : p_yes - p_no;
    const double var = (p_no + p_yes - (p_no - p_yes) * (p_no - p_yes)) / n;
    if (var <= 0.0) return diff > 0.0 ? 0.0 : 1.0;
    return stats::normal_upper_tail(diff / std::sqrt(var));
}

Decision decide_statistical(const VoteTally& t, NullHypothesis h0, double alpha,
                            PvalMethod method) {
    Decision d;
    d.method = "statistical";
    d.tally = t;
    d.alpha = alpha;
    const double p = p_value(t, h0, method);
    d.p_value = p;
    const bool rejected = p <= alpha;
    if (h0 == NullHypothesis::NULL_INDEPENDENT)
        d.outcome = rejected ? Outcome::DEPENDENT : Outcome::INDEPENDENT;
    else
        d.outcome = rejected ? Outcome::INDEPENDENT : Outcome::DEPENDENT;
    return d;
}

VoteTally symmetrize(const VoteTally& a, const VoteTally& b) {
    return {a.n_total + b.n_total, a.n_yes + b.n_yes, a.n_no + b.n_no,
            a.n_uncertain + b.n_uncertain};
}

std::string DecisionPolicy::name() const {
    switch (kind) {
        case Kind::Majority: return "majority";
        case Kind::Weighted: return "weighted";
        case Kind::Unanimity: return "unanimity";
        case Kind::Statistical:
            return h0 == NullHypothesis::NULL_INDEPENDENT ? "stat_indep" : "stat_dep";
    }
    return "unknown";
}

DecisionPolicy DecisionPolicy::majority() { return {}; }

DecisionPolicy DecisionPolicy::weighted() {
    DecisionPolicy p;
    p.kind = Kind::Weighted;
    return p;
}

DecisionPolicy DecisionPolicy::unanimity() {
    DecisionPolicy p;
    p.kind = Kind::Unanimity;
    return p;
}

DecisionPolicy DecisionPolicy::statistical(NullHypothesis h0, double alpha, PvalMethod method) {
    DecisionPolicy p;
    p.kind = Kind::Statistical;
    p.h0 = h0;
    p.alpha = alpha;
    p.method = method;
    return p;
}

Decision apply_policy(const DecisionPolicy& policy, const std::vector<RawAnswer>& answers) {
    if (policy.kind == DecisionPolicy::Kind::Weighted) return decide_weighted(answers);
    return apply_policy(policy, tally(answers));
}

Decision apply_policy(const DecisionPolicy& policy, const VoteTally& t) {
    switch (policy.kind) {
        case DecisionPolicy::Kind::Majority: return decide_majority(t);
        case DecisionPolicy::Kind::Unanimity: return decide_unanimity(t);
        case DecisionPolicy::Kind::Statistical:
            return decide_statistical(t, policy.h0, policy.alpha, policy.method);
        case DecisionPolicy::Kind::Weighted:
            throw UnknownPolicy("weighted voting needs per-answer confidences, not a tally");
    }
    throw UnknownPolicy("unhandled policy kind");
}

}  // namespace chatpc
