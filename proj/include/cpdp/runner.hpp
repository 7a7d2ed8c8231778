#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cpdp/data_io.hpp"
#include "cpdp/measures.hpp"
#include "cpdp/selectors.hpp"
#include "cpdp/stats.hpp"

namespace cpdp {

struct BenchmarkId {
    enum class Method { lsh, nnf, gis };

    Method method = Method::lsh;
    LearnerKind learner = LearnerKind::naive_bayes;
    bool tuned = false;                              // learner tuning; LSH/NNF only
    SizeMode size_mode = SizeMode::FX;               // GIS only
    ValidationMode val_mode = ValidationMode::VMUL;  // GIS only

    std::string name() const;  // e.g. "LSH-TunedNB", "GIS(VR-VNN)-J48"
};

std::vector<BenchmarkId> all_benchmarks();

// Comma-separated glob patterns ('*' and '?') matched against name().
bool glob_match(const std::string& pattern, const std::string& text);
std::vector<BenchmarkId> filter_benchmarks(const std::string& patterns);

struct RunRecord {
    std::string benchmark;
    std::string holdout;
    int rep = 0;  // 1-based
    std::uint64_t seed = 0;
    ConfusionMatrix cm;
    double selection_seconds = 0.0;
    bool fallback = false;
};

struct ResultStore {
    std::vector<RunRecord> records;
    std::vector<std::string> failures;  // "benchmark/holdout/rep: what"
};

struct RunConfig {
    std::string data_dir;
    std::string pattern = "*";
    int reps = 20;
    std::uint64_t seed = 1;
    int jobs = 1;
    std::string out_dir;  // empty = keep results in memory only
};

// Loads every .csv in dir (using dir/schema.json when present), sorted by name.
std::vector<Dataset> load_corpus_dir(const std::string& dir);

// Leave-one-project-out sweep over every (benchmark, holdout, repetition)
// cell. Deterministic for a fixed (datasets, config): records come back in
// canonical order and per-cell seeds derive from the base seed.
ResultStore run_experiment(const RunConfig& config, const std::vector<Dataset>& datasets);

// runs.csv (deterministic fields only), timings.csv (wall-clock selection
// seconds), manifest.json.
void save_store(const ResultStore& store, const RunConfig& config,
                const std::vector<Dataset>& datasets, const std::string& dir);
ResultStore load_store(const std::string& dir);

struct SummaryRow {
    std::string benchmark;
    std::vector<double> per_dataset;  // median over repetitions
    double median = 0.0, avg = 0.0, stddev = 0.0, time_s = 0.0;
};

struct SummaryTable {
    std::string measure;
    std::vector<std::string> datasets;  // lexicographic
    std::vector<SummaryRow> rows;       // ascending by overall median
};

double measure_value(const ConfusionMatrix& cm, const std::string& measure);
SummaryTable summarize(const ResultStore& store, const std::string& measure);
void write_summary_csv(const SummaryTable& table, const std::string& path);

struct RankReport {
    std::string measure;
    double alpha = 0.05, negligible_d = 0.2;
    std::vector<RankGroup> groups;
    std::vector<std::pair<std::string, double>> means;  // benchmark -> mean value
    std::vector<std::vector<double>> group_delta;       // Cliff's delta between groups
};

RankReport rank_report(const ResultStore& store, const std::string& measure, double alpha,
                       double negligible_d);
void write_rank_files(const RankReport& report, const std::string& csv_path,
                      const std::string& txt_path);

}  // namespace cpdp
