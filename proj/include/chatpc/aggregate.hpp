#pragma once

#include <optional>
#include <string>
#include <vector>

#include "chatpc/llm.hpp"

namespace chatpc {

struct VoteTally {
    long n_total = 0;
    long n_yes = 0;
    long n_no = 0;
    long n_uncertain = 0;  // includes parse failures
};

bool operator==(const VoteTally& a, const VoteTally& b);

/// NULL_DEPENDENT: H0 is p_no >= p_yes (dependence holds until strong YES
/// evidence); NULL_INDEPENDENT: H0 is p_yes >= p_no.
enum class NullHypothesis { NULL_DEPENDENT, NULL_INDEPENDENT };

enum class PvalMethod { ExactBinomial, NormalUnpooled };

enum class Outcome { INDEPENDENT, DEPENDENT, UNDECIDED };

const char* to_string(Outcome o);
const char* to_string(NullHypothesis h0);
const char* to_string(PvalMethod m);

struct Decision {
    Outcome outcome = Outcome::UNDECIDED;
    std::string method;              // majority | weighted | statistical | unanimity
    std::optional<double> p_value;   // present iff method == statistical
    std::optional<double> alpha;
    VoteTally tally;
};

VoteTally tally(const std::vector<RawAnswer>& answers);

/// Simple voting: INDEPENDENT if yes > no, DEPENDENT if no > yes, UNDECIDED on
/// a tie or when every answer was uncertain.
Decision decide_majority(const VoteTally& t);

/// Confidence-weighted voting; a missing confidence weighs 0.5, UNCERTAIN
/// answers contribute no mass.
Decision decide_weighted(const std::vector<RawAnswer>& answers);

/// Unanimity variant: dependence stands only on complete NO agreement; a
/// single YES vote flips the verdict to INDEPENDENT.
Decision decide_unanimity(const VoteTally& t);

/// One-sided p-value against the boundary of the composite null (p = 1/2 for
/// the exact sign test). UNCERTAIN answers are excluded from the decisive
/// count m but remain in n_total (the normal test's proportions use n_total).
double p_value(const VoteTally& t, NullHypothesis h0, PvalMethod method);

/// Rejects h0 iff p_value <= alpha; rejecting NULL_INDEPENDENT gives
/// DEPENDENT, rejecting NULL_DEPENDENT gives INDEPENDENT.
Decision decide_statistical(const VoteTally& t, NullHypothesis h0, double alpha,
                            PvalMethod method);

/// Componentwise sum of the two per-direction tallies.
VoteTally symmetrize(const VoteTally& t_xy, const VoteTally& t_yx);

/// Selects one of the aggregation strategies above.
struct DecisionPolicy {
    enum class Kind { Majority, Weighted, Statistical, Unanimity };
    Kind kind = Kind::Majority;
    NullHypothesis h0 = NullHypothesis::NULL_INDEPENDENT;
    double alpha = 0.05;
    PvalMethod method = PvalMethod::ExactBinomial;

    /// Stable report key: majority, weighted, unanimity, stat_indep, stat_dep.
    std::string name() const;
    static DecisionPolicy majority();
    static DecisionPolicy weighted();
    static DecisionPolicy unanimity();
    static DecisionPolicy statistical(NullHypothesis h0, double alpha = 0.05,
                                      PvalMethod method = PvalMethod::ExactBinomial);
};

Decision apply_policy(const DecisionPolicy& policy, const std::vector<RawAnswer>& answers);

/// Tally-only variant; throws UnknownPolicy for the weighted policy, which
/// needs per-answer confidences.
Decision apply_policy(const DecisionPolicy& policy, const VoteTally& t);

}  // namespace chatpc
