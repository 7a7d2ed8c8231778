#pragma once

#include <map>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "cpdp/data_io.hpp"
#include "cpdp/kernels.hpp"
#include "cpdp/measures.hpp"

namespace cpdp {

enum class LearnerKind { naive_bayes, logistic, tree };

const char* kind_name(LearnerKind kind);  // "NB", "LOG", "J48"

struct LearnerSpec {
    LearnerKind kind = LearnerKind::naive_bayes;
    std::map<std::string, double> params;

    double param(const std::string& key, double fallback) const;
    std::string describe() const;  // e.g. "J48(conf=0.25,min_leaf=2)"
};

// Hyper-parameter grid per learner; the first entry is the stock
// configuration that untuned benchmarks run with.
LearnerSpec default_spec(LearnerKind kind);
std::vector<LearnerSpec> grid(LearnerKind kind);

struct NbModel {
    bool discretized = false;
    double log_prior[2] = {0.0, 0.0};
    bool class_seen[2] = {false, false};
    std::vector<double> mean[2], var[2];          // plain Gaussian path
    std::vector<std::vector<double>> cuts;        // per feature, ascending
    std::vector<std::vector<double>> log_bin[2];  // per feature, per bin
};

struct LogModel {
    std::vector<double> w;  // w[0] is the intercept
};

struct TreeNode {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    int left = -1, right = -1;
    bool label = false;
    double n = 0.0, e = 0.0;  // training reach count / misclassified count
};

struct TreeModel {
    std::vector<TreeNode> nodes;  // nodes[0] is the root
};

class TrainedModel {
  public:
    LearnerKind kind() const { return kind_; }
    std::size_t dim() const { return norm_.dim(); }

    bool predict_one(std::span<const double> raw_features) const;
    std::vector<bool> predict(std::span<const Instance> test) const;
    // Row-major raw feature matrix; out[i] in {0,1}.
    void predict_rows(const Matrix& x, std::vector<std::uint8_t>& out) const;

    // Fitted parameters, for diagnostics and tests.
    const std::variant<NbModel, LogModel, TreeModel>& model() const { return model_; }

    friend TrainedModel train(const LearnerSpec&, const Matrix&,
                              std::span<const std::uint8_t>);

  private:
    LearnerKind kind_ = LearnerKind::naive_bayes;
    Normalizer norm_;
    std::variant<NbModel, LogModel, TreeModel> model_;

    bool predict_normalized(const double* x) const;
};

// Both overloads normalize features internally (min-max fitted on the
// training rows) and expect raw feature values at predict time.
TrainedModel train(const LearnerSpec& spec, const Matrix& x, std::span<const std::uint8_t> y);
TrainedModel train(const LearnerSpec& spec, std::span<const Instance> data);

Matrix to_matrix(std::span<const Instance> data);
std::vector<std::uint8_t> to_labels(std::span<const Instance> data);

Measures evaluate(const TrainedModel& model, const Matrix& x, std::span<const std::uint8_t> y);

}  // namespace cpdp
