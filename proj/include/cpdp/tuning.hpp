#pragma once

#include <span>
#include <vector>

#include "cpdp/learners.hpp"
#include "cpdp/validation.hpp"

namespace cpdp {

struct TuningResult {
    LearnerSpec best_spec;
    std::vector<double> scores;  // mean fitness per grid entry, grid order
    int validation_count = 0;
};

// Scores every spec in grid(kind) by mean F x GMean over the validation sets
// after training on `training`; returns the argmax, ties to the earlier spec.
// A spec whose training fails scores 0 rather than aborting the search.
TuningResult grid_search(LearnerKind kind, std::span<const Instance> training,
                         std::span<const ValidationSet> validation);

}  // namespace cpdp
