#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace cpdp {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Where an instance came from, so leave-one-project-out splits can be audited.
struct Origin {
    std::string dataset;
    int row = 0;  // zero-based data row (header excluded)
};

struct Instance {
    std::vector<double> features;
    bool label = false;  // true = defect-prone
    Origin origin;
};

struct Dataset {
    std::string name;
    std::vector<Instance> instances;

    int defect_count() const;
    std::size_t size() const { return instances.size(); }
};

// Concatenation of every dataset except the holdout project.
struct Pool {
    std::string holdout;
    std::vector<Instance> instances;

    std::size_t size() const { return instances.size(); }
};

// Column roles for the CSV layout. Identifier columns are recognized by name
// and skipped; every column that is neither an identifier nor the bug count
// is taken as a metric, in file order.
struct Schema {
    std::vector<std::string> id_columns;
    std::string bug_column = "bug";
    std::size_t expected_metrics = 20;

    static Schema promise_default();
    static Schema load(const std::string& path);  // small JSON manifest
};

Dataset load_dataset(const std::string& path, const Schema& schema = Schema::promise_default());
void save_dataset(const Dataset& ds, const std::string& path,
                  const Schema& schema = Schema::promise_default());

Pool build_pool(const std::vector<Dataset>& datasets, const std::string& holdout);

// Per-feature affine [min,max] -> [0,1] map. Values outside the reference
// range are not clamped; constant features map to 0.
class Normalizer {
public:
    Normalizer() = default;

    static Normalizer fit(std::span<const Instance> reference);
    static Normalizer fit_rows(const double* data, std::size_t rows, std::size_t dim);

    Instance apply(const Instance& x) const;
    void apply_features(std::span<const double> in, std::span<double> out) const;
    double apply_one(std::size_t feature, double v) const;

    std::size_t dim() const { return min_.size(); }

private:
    std::vector<double> min_;
    std::vector<double> max_;
};

}  // namespace cpdp
