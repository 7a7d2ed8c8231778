#include <doctest.h>

#include <cmath>
#include <limits>
#include <set>
#include <variant>
#include <vector>

#include "cpdp/learners.hpp"

using namespace cpdp;

namespace {

Matrix make_matrix(std::initializer_list<std::initializer_list<double>> rows) {
    Matrix m(rows.size(), rows.begin()->size());
    std::size_t i = 0;
    for (const auto& r : rows) {
        std::size_t j = 0;
        for (double v : r) m.at(i, j++) = v;
        ++i;
    }
    return m;
}

using Labels = std::vector<std::uint8_t>;

}  // namespace

TEST_CASE("spec descriptions and grids") {
    CHECK(default_spec(LearnerKind::naive_bayes).describe() == "NB(discretize=0)");
    CHECK(default_spec(LearnerKind::logistic).describe() == "LOG(ridge=1e-08)");
    CHECK(default_spec(LearnerKind::tree).describe() == "J48(conf=0.25,min_leaf=2)");

    auto nb = grid(LearnerKind::naive_bayes);
    auto lg = grid(LearnerKind::logistic);
    auto tr = grid(LearnerKind::tree);
    CHECK(nb.size() == 2);
    CHECK(lg.size() == 5);
    CHECK(tr.size() == 12);
    CHECK(nb[0].describe() == default_spec(LearnerKind::naive_bayes).describe());
    CHECK(lg[0].describe() == default_spec(LearnerKind::logistic).describe());
    CHECK(tr[0].describe() == default_spec(LearnerKind::tree).describe());

    for (const auto& g : {nb, lg, tr}) {
        std::set<std::string> seen;
        for (const auto& s : g) CHECK(seen.insert(s.describe()).second);
    }
}

TEST_CASE("gaussian naive bayes separates two blobs") {
    Matrix x = make_matrix(
        {{0.0, 0.1}, {0.2, 0.0}, {0.1, 0.3}, {0.8, 0.9}, {1.0, 0.7}, {0.9, 1.0}});
    Labels y = {0, 0, 0, 1, 1, 1};
    TrainedModel m = train(default_spec(LearnerKind::naive_bayes), x, y);

    CHECK(m.predict_one(std::vector<double>{0.15, 0.15}) == false);
    CHECK(m.predict_one(std::vector<double>{0.85, 0.85}) == true);
    CHECK(std::holds_alternative<NbModel>(m.model()));
}

TEST_CASE("naive bayes score tie goes to the clean class") {
    // One point per class; the query sits exactly halfway, priors are equal,
    // and both sides contribute bitwise-identical likelihoods.
    Matrix x = make_matrix({{0.25}, {0.75}});
    Labels y = {0, 1};
    TrainedModel m = train(default_spec(LearnerKind::naive_bayes), x, y);
    CHECK(m.predict_one(std::vector<double>{0.5}) == false);
}

TEST_CASE("naive bayes falls back to the prior on constant features") {
    Matrix x = make_matrix({{0.7}, {0.7}, {0.7}, {0.7}, {0.7}, {0.7}});
    TrainedModel maj0 = train(default_spec(LearnerKind::naive_bayes), x,
                              Labels{0, 0, 0, 0, 1, 1});
    TrainedModel maj1 = train(default_spec(LearnerKind::naive_bayes), x,
                              Labels{1, 1, 1, 1, 0, 0});
    CHECK(maj0.predict_one(std::vector<double>{0.7}) == false);
    CHECK(maj1.predict_one(std::vector<double>{0.7}) == true);
}

TEST_CASE("naive bayes trained on one class always answers it") {
    Matrix x = make_matrix({{0.1, 0.2}, {0.3, 0.4}, {0.5, 0.6}});
    TrainedModel all1 = train(default_spec(LearnerKind::naive_bayes), x, Labels{1, 1, 1});
    TrainedModel all0 = train(default_spec(LearnerKind::naive_bayes), x, Labels{0, 0, 0});
    for (double v : {0.0, 0.35, 0.9}) {
        CHECK(all1.predict_one(std::vector<double>{v, v}) == true);
        CHECK(all0.predict_one(std::vector<double>{v, v}) == false);
    }
}

TEST_CASE("entropy discretization accepts an informative cut and rejects noise") {
    LearnerSpec disc{LearnerKind::naive_bayes, {{"discretize", 1}}};

    Matrix sep(40, 1);
    Labels ysep(40);
    for (int i = 0; i < 20; ++i) {
        sep.at(i, 0) = 0.01 * i;
        ysep[i] = 0;
        sep.at(20 + i, 0) = 0.80 + 0.01 * i;
        ysep[20 + i] = 1;
    }
    TrainedModel m = train(disc, sep, ysep);
    const auto& nb = std::get<NbModel>(m.model());
    CHECK(nb.discretized);
    REQUIRE(nb.cuts.size() == 1);
    CHECK(nb.cuts[0].size() == 1);
    CHECK(m.predict_one(std::vector<double>{0.10}) == false);
    CHECK(m.predict_one(std::vector<double>{0.90}) == true);

    // Alternating labels: no cut clears the description-length bar, every
    // value lands in one bin, and equal smoothed counts tie toward clean.
    Matrix alt = make_matrix({{0.1}, {0.2}, {0.3}, {0.4}});
    TrainedModel m2 = train(disc, alt, Labels{0, 1, 0, 1});
    const auto& nb2 = std::get<NbModel>(m2.model());
    CHECK(nb2.cuts[0].empty());
    CHECK(m2.predict_one(std::vector<double>{0.25}) == false);
}

namespace {

// Two mostly separated classes along the x+(-y) direction with two swapped
// points, so the ridge path is informative but the fit is not degenerate.
Matrix logistic_x() {
    return make_matrix({{0.0, 1.0},
                        {0.1, 0.8},
                        {0.2, 0.9},
                        {0.3, 0.65},
                        {0.4, 0.75},
                        {0.55, 0.3},
                        {0.6, 0.45},
                        {0.75, 0.2},
                        {0.9, 0.1},
                        {1.0, 0.0},
                        {0.35, 0.4},
                        {0.65, 0.7}});
}

const Labels kLogisticY = {0, 0, 0, 0, 0, 1, 1, 1, 1, 1, 1, 0};

double coef_norm(const TrainedModel& m) {
    const auto& w = std::get<LogModel>(m.model()).w;
    double s = 0.0;
    for (std::size_t j = 1; j < w.size(); ++j) s += w[j] * w[j];
    return std::sqrt(s);
}

}  // namespace

TEST_CASE("penalized logistic regression reproduces reference coefficients") {
    Matrix x = logistic_x();

    TrainedModel m1 = train({LearnerKind::logistic, {{"ridge", 1.0}}}, x, kLogisticY);
    const auto& w1 = std::get<LogModel>(m1.model()).w;
    REQUIRE(w1.size() == 3);
    CHECK(std::abs(w1[0] - 0.23468575) < 5e-4);
    CHECK(std::abs(w1[1] - 0.77713343) < 5e-4);
    CHECK(std::abs(w1[2] - -1.16686589) < 5e-4);

    TrainedModel m10 = train({LearnerKind::logistic, {{"ridge", 10.0}}}, x, kLogisticY);
    const auto& w10 = std::get<LogModel>(m10.model()).w;
    CHECK(std::abs(w10[0] - 0.02631952) < 5e-4);
    CHECK(std::abs(w10[1] - 0.11785559) < 5e-4);
    CHECK(std::abs(w10[2] - -0.15988855) < 5e-4);

    for (std::size_t i = 0; i < kLogisticY.size(); ++i) {
        std::vector<double> q(x.row(i), x.row(i) + 2);
        CHECK(m1.predict_one(q) == (kLogisticY[i] != 0));
    }
}

TEST_CASE("stronger ridge shrinks the logistic coefficients") {
    Matrix x = logistic_x();
    double prev = std::numeric_limits<double>::infinity();
    for (double ridge : {1e-4, 1e-2, 1.0, 10.0}) {
        TrainedModel m = train({LearnerKind::logistic, {{"ridge", ridge}}}, x, kLogisticY);
        double nrm = coef_norm(m);
        CHECK(nrm < prev);
        prev = nrm;
    }
    TrainedModel m1 = train({LearnerKind::logistic, {{"ridge", 1.0}}}, x, kLogisticY);
    TrainedModel m10 = train({LearnerKind::logistic, {{"ridge", 10.0}}}, x, kLogisticY);
    CHECK(coef_norm(m1) == doctest::Approx(1.402).epsilon(0.01));
    CHECK(coef_norm(m10) == doctest::Approx(0.1986).epsilon(0.01));
}

TEST_CASE("tree finds the pure midpoint split") {
    Matrix x = make_matrix({{0.0, 0.5},
                            {0.1, 0.9},
                            {0.2, 0.1},
                            {0.3, 0.7},
                            {0.7, 0.6},
                            {0.8, 0.2},
                            {0.9, 0.8},
                            {1.0, 0.3}});
    Labels y = {0, 0, 0, 0, 1, 1, 1, 1};
    TrainedModel m = train(default_spec(LearnerKind::tree), x, y);
    const auto& t = std::get<TreeModel>(m.model());

    const TreeNode& root = t.nodes[0];
    REQUIRE(root.feature == 0);
    CHECK(root.threshold == doctest::Approx(0.5));
    CHECK(t.nodes[root.left].feature == -1);
    CHECK(t.nodes[root.right].feature == -1);
    CHECK(t.nodes[root.left].label == false);
    CHECK(t.nodes[root.right].label == true);

    CHECK(m.predict_one(std::vector<double>{0.25, 0.5}) == false);
    CHECK(m.predict_one(std::vector<double>{0.85, 0.5}) == true);
}

TEST_CASE("pruning collapses noisy children but keeps a sound root") {
    Matrix x = make_matrix(
        {{0.0}, {0.1}, {0.15}, {0.2}, {0.3}, {0.7}, {0.8}, {0.85}, {0.9}, {1.0}});
    Labels y = {0, 0, 1, 0, 0, 1, 1, 0, 1, 1};
    TrainedModel m = train(default_spec(LearnerKind::tree), x, y);
    const auto& t = std::get<TreeModel>(m.model());

    const TreeNode& root = t.nodes[0];
    REQUIRE(root.feature == 0);
    CHECK(root.threshold == doctest::Approx(0.5));
    CHECK(t.nodes[root.left].feature == -1);
    CHECK(t.nodes[root.right].feature == -1);
    CHECK(t.nodes[root.left].label == false);
    CHECK(t.nodes[root.right].label == true);
}

TEST_CASE("min_leaf blocks splits that would starve a side") {
    Matrix x = make_matrix({{0.0}, {0.1}, {0.2}, {0.9}, {1.0}});
    Labels y = {0, 0, 0, 1, 1};
    TrainedModel m =
        train({LearnerKind::tree, {{"conf", 0.25}, {"min_leaf", 3}}}, x, y);
    const auto& t = std::get<TreeModel>(m.model());
    CHECK(t.nodes[0].feature == -1);  // 5 rows cannot give both sides 3
    CHECK(t.nodes[0].label == false);
}

TEST_CASE("evaluate counts a confusion matrix on raw rows") {
    Matrix x = make_matrix({{0.0, 0.5},
                            {0.1, 0.9},
                            {0.2, 0.1},
                            {0.3, 0.7},
                            {0.7, 0.6},
                            {0.8, 0.2},
                            {0.9, 0.8},
                            {1.0, 0.3}});
    Labels y = {0, 0, 0, 0, 1, 1, 1, 1};
    TrainedModel m = train(default_spec(LearnerKind::tree), x, y);

    Matrix q = make_matrix({{0.2, 0.4}, {0.25, 0.6}, {0.9, 0.4}, {0.95, 0.6}});
    Labels qy = {0, 1, 1, 0};  // preds will be 0,0,1,1
    Measures got = evaluate(m, q, qy);
    CHECK(got.precision == doctest::Approx(0.5));
    CHECK(got.recall == doctest::Approx(0.5));
    CHECK(got.specificity == doctest::Approx(0.5));
    CHECK(got.f == doctest::Approx(0.5));
    CHECK(got.gmean == doctest::Approx(0.5));
    CHECK(got.fitness == doctest::Approx(0.25));
}

TEST_CASE("training input errors") {
    Matrix empty(0, 3);
    Labels none;
    CHECK_THROWS_AS(train(default_spec(LearnerKind::naive_bayes), empty, none), Error);

    Matrix x = make_matrix({{0.0}, {1.0}});
    Labels bad = {0, 1, 1};
    CHECK_THROWS_AS(train(default_spec(LearnerKind::logistic), x, bad), Error);

    TrainedModel m = train(default_spec(LearnerKind::naive_bayes), x, Labels{0, 1});
    CHECK_THROWS_WITH_AS(m.predict_one(std::vector<double>{0.1, 0.2}),
                         doctest::Contains("expected 1 features"), Error);
}

TEST_CASE("instance-span training matches the matrix path") {
    std::vector<Instance> data(6);
    Matrix x = make_matrix(
        {{0.0, 0.1}, {0.2, 0.0}, {0.1, 0.3}, {0.8, 0.9}, {1.0, 0.7}, {0.9, 1.0}});
    for (std::size_t i = 0; i < 6; ++i) {
        data[i].features = {x.at(i, 0), x.at(i, 1)};
        data[i].label = i >= 3;
    }
    TrainedModel a = train(default_spec(LearnerKind::logistic), data);
    TrainedModel b = train(default_spec(LearnerKind::logistic), x, Labels{0, 0, 0, 1, 1, 1});
    const auto& wa = std::get<LogModel>(a.model()).w;
    const auto& wb = std::get<LogModel>(b.model()).w;
    REQUIRE(wa.size() == wb.size());
    for (std::size_t j = 0; j < wa.size(); ++j) CHECK(wa[j] == wb[j]);

    auto preds = a.predict(data);
    REQUIRE(preds.size() == 6);
    for (std::size_t i = 0; i < 6; ++i) CHECK(preds[i] == data[i].label);
}
