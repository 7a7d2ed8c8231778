#pragma once

#include <vector>

#include "cpdp/data_io.hpp"
#include "cpdp/kernels.hpp"
#include "cpdp/rng.hpp"

namespace cpdp {

// A dataset sampled for fitness assignment during tuning and selection.
struct ValidationSet {
    std::vector<Instance> instances;
};

// count random subsets of the pool; each set's size is uniform in [125, 250],
// drawn without replacement, and redrawn (up to 100 tries) until both classes
// are present.
std::vector<ValidationSet> gen_random_validation(const Pool& pool, int count, Rng& rng);

// Union of the k nearest pool instances per test row (min-max geometry fitted
// on the pool), deduplicated, in ascending pool order.
ValidationSet gen_nn_validation(const Pool& pool, const Matrix& test_features, int k = 10);

}  // namespace cpdp
