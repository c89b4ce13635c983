#include "qlogad/harness.hpp"

namespace qlogad::harness {

Metrics compute_metrics(const ConfusionCounts& counts) {
    Metrics m;
    const double tp = static_cast<double>(counts.tp);
    const double fp = static_cast<double>(counts.fp);
    const double tn = static_cast<double>(counts.tn);
    const double fn = static_cast<double>(counts.fn);
    m.precision = (counts.tp + counts.fp) > 0 ? tp / (tp + fp) : 0.0;
    m.recall = (counts.tp + counts.fn) > 0 ? tp / (tp + fn) : 0.0;
    m.specificity = (counts.tn + counts.fp) > 0 ? tn / (tn + fp) : 0.0;
    m.f1 = (m.precision + m.recall) > 0.0
               ? 2.0 * m.precision * m.recall / (m.precision + m.recall)
               : 0.0;
    return m;
}

} // namespace qlogad::harness
