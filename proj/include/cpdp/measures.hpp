#pragma once

#include <cmath>
#include <cstdint>
#include <span>

namespace cpdp {

struct ConfusionMatrix {
    std::int64_t tp = 0;
    std::int64_t fp = 0;
    std::int64_t tn = 0;
    std::int64_t fn = 0;

    std::int64_t total() const { return tp + fp + tn + fn; }
};

struct Measures {
    double precision = 0.0;
    double recall = 0.0;
    double specificity = 0.0;
    double f = 0.0;
    double gmean = 0.0;
    double fitness = 0.0;
};

inline ConfusionMatrix confusion(std::span<const bool> actual, std::span<const bool> predicted) {
    ConfusionMatrix cm;
    for (std::size_t i = 0; i < actual.size(); ++i) {
        if (actual[i])
            (predicted[i] ? cm.tp : cm.fn)++;
        else
            (predicted[i] ? cm.fp : cm.tn)++;
    }
    return cm;
}

inline ConfusionMatrix confusion(std::span<const std::uint8_t> actual,
                                 std::span<const std::uint8_t> predicted) {
    ConfusionMatrix cm;
    for (std::size_t i = 0; i < actual.size(); ++i) {
        if (actual[i])
            (predicted[i] ? cm.tp : cm.fn)++;
        else
            (predicted[i] ? cm.fp : cm.tn)++;
    }
    return cm;
}

// Every ratio with an empty denominator is 0, so degenerate predictions score
// 0 instead of poisoning downstream aggregation with NaN.
inline double safe_ratio(double num, double den) { return den > 0.0 ? num / den : 0.0; }

inline Measures measures(const ConfusionMatrix& cm) {
    Measures m;
    m.precision = safe_ratio(static_cast<double>(cm.tp), static_cast<double>(cm.tp + cm.fp));
    m.recall = safe_ratio(static_cast<double>(cm.tp), static_cast<double>(cm.tp + cm.fn));
    m.specificity = safe_ratio(static_cast<double>(cm.tn), static_cast<double>(cm.tn + cm.fp));
    m.f = safe_ratio(2.0 * m.precision * m.recall, m.precision + m.recall);
    m.gmean = std::sqrt(m.recall * m.specificity);
    m.fitness = m.f * m.gmean;
    return m;
}

}  // namespace cpdp
