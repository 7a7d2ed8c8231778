#include "cpdp/validation.hpp"

#include "cpdp/selectors.hpp"

namespace cpdp {

std::vector<ValidationSet> gen_random_validation(const Pool& pool, int count, Rng& rng) {
    if (pool.size() < 250) throw Error("gen_random_validation: pool smaller than 250 instances");
    std::vector<ValidationSet> sets;
    sets.reserve(static_cast<std::size_t>(count));
    std::vector<int> scratch;
    for (int s = 0; s < count; ++s) {
        for (int attempt = 0;; ++attempt) {
            if (attempt >= 100)
                throw Error("gen_random_validation: no two-class sample after 100 tries");
            long size = rng.uniform_int(125, 250);
            std::vector<int> idx =
                rng.sample_without_replacement(static_cast<int>(pool.size()),
                                               static_cast<int>(size), scratch);
            bool has_pos = false, has_neg = false;
            for (int i : idx) (pool.instances[std::size_t(i)].label ? has_pos : has_neg) = true;
            if (!has_pos || !has_neg) continue;

            ValidationSet vs;
            vs.instances.reserve(idx.size());
            for (int i : idx) vs.instances.push_back(pool.instances[std::size_t(i)]);
            sets.push_back(std::move(vs));
            break;
        }
    }
    return sets;
}

ValidationSet gen_nn_validation(const Pool& pool, const Matrix& test_features, int k) {
    ValidationSet vs;
    vs.instances = nn_filter_select(pool, test_features, k);
    return vs;
}

}  // namespace cpdp
