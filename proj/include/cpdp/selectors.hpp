#pragma once

#include <span>
#include <vector>

#include "cpdp/data_io.hpp"
#include "cpdp/kernels.hpp"
#include "cpdp/learners.hpp"
#include "cpdp/rng.hpp"
#include "cpdp/validation.hpp"

namespace cpdp {

// Output of one instance-selection method: the chosen training instances plus
// how long the selection phase itself took. Learner tuning, final training,
// and prediction are never part of `seconds`.
struct SelectionResult {
    std::vector<Instance> data;
    double seconds = 0.0;
    bool fallback = false;  // LSH only: no eligible bucket, whole pool returned
};

// ---- NN-Filter ---------------------------------------------------------------

// Union of the k nearest pool instances per test row, deduplicated, ascending
// pool order. Distances are Euclidean on min-max features fitted on the pool.
std::vector<Instance> nn_filter_select(const Pool& pool, const Matrix& test_features, int k);

// Mean validation fitness (F x GMean) of nn_filter_select for k = 1..10;
// returns the argmax, ties to the smaller k.
int tune_nn_k(const Pool& pool, const Matrix& test_features,
              std::span<const ValidationSet> validation, const LearnerSpec& learner);

// tune_nn_k + final nn_filter_select, timed as one selection phase.
SelectionResult nnf_select(const Pool& pool, const Matrix& test_features,
                           std::span<const ValidationSet> validation,
                           const LearnerSpec& learner);

// ---- LSH bucket selection ------------------------------------------------------

struct LshParams {
    std::size_t depth;    // N: vectors per orthogonalized batch
    std::size_t batches;  // L
    std::size_t buckets;  // B
};

// N in {4,10,20} crossed with target code lengths K in {8,16,32} (L rounded
// up, duplicates dropped), then B in {5,10,20}.
std::vector<LshParams> default_lsh_grid();

// Hash the pool for every grid point, score each eligible bucket (>= 25
// members, both classes) by mean fitness over the validation sets using
// `learner`, and return the best bucket. `seconds` covers hashing and
// bucketing only; bucket model evaluation is scored but not timed.
SelectionResult lsh_select(const Pool& pool, std::span<const ValidationSet> validation,
                           const LearnerSpec& learner, std::span<const LshParams> grid,
                           Rng& rng);

// ---- genetic instance selection -------------------------------------------------

enum class SizeMode { FX, VR };              // fixed 1% vs variable [100, |pool|]
enum class ValidationMode { VNN, VMUL };     // 10-NN set vs shared random sets

struct GisConfig {
    int population_size = 40;
    int max_generations = 20;
    SizeMode size_mode = SizeMode::FX;
    ValidationMode validation_mode = ValidationMode::VMUL;
    double mutation_rate = 0.1;       // per offspring
    double gene_replace_prob = 0.05;  // per gene, once mutation fires
    double label_flip_prob = 0.02;    // per gene, once mutation fires
};

// Distinct pool indices plus per-gene label overrides.
struct Chromosome {
    std::vector<std::uint32_t> genes;
    std::vector<std::uint8_t> flips;  // 1 = use the opposite of the pool label
    double fitness = 0.0;
};

// Swaps the segments [a1,a2) of a and [b1,b2) of b (genes and flips move
// together). Fixed-size crossover passes the same cuts for both parents.
void crossover_with_cuts(const Chromosome& a, const Chromosome& b, std::size_t a1,
                         std::size_t a2, std::size_t b1, std::size_t b2, Chromosome& c1,
                         Chromosome& c2);

struct GisResult {
    SelectionResult selection;
    std::vector<double> best_trace;  // best fitness per generation, initial first
    int trainings = 0;               // learner fits spent on fitness assignment
};

// `shared_validation` is used in VMUL mode; VNN mode builds its own 10-NN set
// (that work counts toward the timed selection phase).
GisResult gis_select(const Pool& pool, const Matrix& test_features,
                     std::span<const ValidationSet> shared_validation,
                     const LearnerSpec& learner, const GisConfig& config, Rng& rng);

}  // namespace cpdp
