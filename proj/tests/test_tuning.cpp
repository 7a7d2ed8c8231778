#include <doctest.h>

#include <vector>

#include "cpdp/rng.hpp"
#include "cpdp/tuning.hpp"

using namespace cpdp;

namespace {

std::vector<Instance> blob_data(std::size_t n, unsigned seed) {
    std::vector<Instance> out(n);
    Rng rng(seed);
    for (std::size_t i = 0; i < n; ++i) {
        bool defect = i % 2 == 0;
        double base = defect ? 0.75 : 0.25;
        out[i].features = {base + 0.1 * rng.uniform(), base + 0.1 * rng.uniform()};
        out[i].label = defect;
        out[i].origin.row = int(i);
    }
    return out;
}

std::vector<Instance> noisy_data(std::size_t n, unsigned seed, double flip) {
    std::vector<Instance> out = blob_data(n, seed);
    Rng rng(seed + 9);
    for (auto& in : out)
        if (rng.uniform() < flip) in.label = !in.label;
    return out;
}

std::vector<ValidationSet> wrap(std::vector<std::vector<Instance>> sets) {
    std::vector<ValidationSet> out;
    for (auto& s : sets) out.push_back(ValidationSet{std::move(s)});
    return out;
}

}  // namespace

TEST_CASE("grid search scores every candidate and reports the validation count") {
    auto training = blob_data(40, 1);
    auto validation = wrap({blob_data(30, 2), blob_data(30, 3)});

    TuningResult res = grid_search(LearnerKind::naive_bayes, training, validation);
    CHECK(res.scores.size() == 2);
    CHECK(res.validation_count == 2);
    for (double s : res.scores) {
        CHECK(s >= 0.0);
        CHECK(s <= 1.0);
    }
    bool in_grid = false;
    for (const auto& spec : grid(LearnerKind::naive_bayes))
        if (spec.describe() == res.best_spec.describe()) in_grid = true;
    CHECK(in_grid);
}

TEST_CASE("grid search replays the argmax with ties to the earlier spec") {
    auto training = noisy_data(80, 11, 0.2);
    auto validation = wrap({noisy_data(40, 12, 0.1), noisy_data(40, 13, 0.1),
                            noisy_data(40, 14, 0.1)});

    TuningResult res = grid_search(LearnerKind::tree, training, validation);
    auto specs = grid(LearnerKind::tree);
    REQUIRE(res.scores.size() == specs.size());

    std::size_t want = 0;
    double best = -1.0;
    for (std::size_t i = 0; i < specs.size(); ++i) {
        double fit = 0.0;
        try {
            TrainedModel m = train(specs[i], training);
            for (const auto& vs : validation) {
                Matrix x = to_matrix(vs.instances);
                auto y = to_labels(vs.instances);
                fit += evaluate(m, x, y).fitness;
            }
            fit /= double(validation.size());
        } catch (const Error&) {
            fit = 0.0;
        }
        CHECK(res.scores[i] == doctest::Approx(fit));
        if (fit > best) {
            best = fit;
            want = i;
        }
    }
    CHECK(res.best_spec.describe() == specs[want].describe());
}

TEST_CASE("an across-the-board tie keeps the stock configuration") {
    // Cleanly separable data: every configuration is perfect, so the first
    // grid entry wins.
    auto training = blob_data(60, 21);
    auto validation = wrap({blob_data(40, 22)});

    for (LearnerKind kind :
         {LearnerKind::naive_bayes, LearnerKind::logistic, LearnerKind::tree}) {
        TuningResult res = grid_search(kind, training, validation);
        CHECK(res.scores[0] == doctest::Approx(1.0));
        CHECK(res.best_spec.describe() == default_spec(kind).describe());
    }
}

TEST_CASE("candidates that cannot score at all leave the stock configuration") {
    auto training = blob_data(30, 31);
    auto bad = blob_data(20, 32);
    for (auto& in : bad) in.features.push_back(0.5);  // arity mismatch
    auto validation = wrap({std::move(bad)});

    TuningResult res = grid_search(LearnerKind::logistic, training, validation);
    for (double s : res.scores) CHECK(s == 0.0);
    CHECK(res.best_spec.describe() == default_spec(LearnerKind::logistic).describe());
}

TEST_CASE("grid search rejects empty inputs") {
    auto training = blob_data(30, 41);
    auto validation = wrap({blob_data(20, 42)});
    CHECK_THROWS_AS(grid_search(LearnerKind::naive_bayes, {}, validation), Error);
    CHECK_THROWS_AS(
        grid_search(LearnerKind::naive_bayes, training, std::span<const ValidationSet>{}),
        Error);
}
