#pragma once

#include <optional>
#include <string>

namespace chatpc {

// Classification metrics over decided predictions. `undecided` predictions are
// excluded from accuracy's denominator; for recall they count as misses (an
// undecided prediction is not a positive prediction). precision/recall are
// absent exactly when their denominators are zero.
struct MetricsReport {
    std::optional<double> accuracy;
    std::optional<double> precision;
    std::optional<double> recall;
    std::optional<double> f1;
    long tp = 0;
    long fp = 0;
    long tn = 0;
    long fn = 0;
    long undecided = 0;
    std::string positive_class;  // "INDEPENDENT", "DEPENDENT", or "edge"
};

// undecided_positive: undecided predictions whose record label is the positive
// class; they enter recall's denominator but not accuracy's.
inline MetricsReport make_metrics(long tp, long fp, long tn, long fn, long undecided_positive,
                                  long undecided_negative, std::string positive_class) {
    MetricsReport r;
    r.tp = tp;
    r.fp = fp;
    r.tn = tn;
    r.fn = fn;
    r.undecided = undecided_positive + undecided_negative;
    r.positive_class = std::move(positive_class);
    const long decided = tp + fp + tn + fn;
    if (decided > 0) r.accuracy = static_cast<double>(tp + tn) / static_cast<double>(decided);
    if (tp + fp > 0) r.precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
    const long positives = tp + fn + undecided_positive;
    if (positives > 0) r.recall = static_cast<double>(tp) / static_cast<double>(positives);
    if (r.precision && r.recall && (*r.precision + *r.recall) > 0.0)
        r.f1 = 2.0 * *r.precision * *r.recall / (*r.precision + *r.recall);
    return r;
}

}  // namespace chatpc
