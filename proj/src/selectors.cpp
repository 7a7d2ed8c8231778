#include "cpdp/selectors.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "cpdp/superbit.hpp"

namespace cpdp {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Validation sets converted once to flat matrices so the thousands of fitness
// evaluations behind tuning and GIS stay cheap.
struct ValidationEval {
    std::vector<Matrix> xs;
    std::vector<std::vector<std::uint8_t>> ys;

    explicit ValidationEval(std::span<const ValidationSet> sets) {
        xs.reserve(sets.size());
        ys.reserve(sets.size());
        for (const auto& s : sets) {
            xs.push_back(to_matrix(s.instances));
            ys.push_back(to_labels(s.instances));
        }
    }

    double mean_fitness(const TrainedModel& model) const {
        double total = 0.0;
        for (std::size_t i = 0; i < xs.size(); ++i)
            total += evaluate(model, xs[i], ys[i]).fitness;
        return xs.empty() ? 0.0 : total / double(xs.size());
    }
};

double scored_fitness(const LearnerSpec& spec, const Matrix& x,
                      std::span<const std::uint8_t> y, const ValidationEval& val) {
    try {
        return val.mean_fitness(train(spec, x, y));
    } catch (const Error&) {
        return 0.0;  // degenerate candidate scores worst instead of aborting the search
    }
}

std::vector<Instance> gather(const Pool& pool, std::span<const std::uint32_t> idx) {
    std::vector<Instance> out;
    out.reserve(idx.size());
    for (std::uint32_t i : idx) out.push_back(pool.instances[i]);
    return out;
}

void gather_rows(const Matrix& src, std::span<const std::uint32_t> idx, Matrix& dst) {
    dst.rows = idx.size();
    dst.cols = src.cols;
    dst.data.resize(dst.rows * dst.cols);
    for (std::size_t i = 0; i < idx.size(); ++i)
        std::copy(src.row(idx[i]), src.row(idx[i]) + src.cols, dst.row(i));
}

}  // namespace

// ---- NN-Filter ---------------------------------------------------------------

std::vector<Instance> nn_filter_select(const Pool& pool, const Matrix& test_features, int k) {
    Normalizer norm = Normalizer::fit(pool.instances);
    Matrix pool_n = to_matrix(pool.instances);
    for (std::size_t i = 0; i < pool_n.rows; ++i)
        norm.apply_features({pool.instances[i].features.data(), pool_n.cols},
                            {pool_n.row(i), pool_n.cols});
    Matrix test_n(test_features.rows, test_features.cols);
    for (std::size_t i = 0; i < test_features.rows; ++i)
        norm.apply_features({test_features.row(i), test_features.cols},
                            {test_n.row(i), test_n.cols});

    std::vector<std::uint32_t> nn;
    knn_indices(test_n, pool_n, std::size_t(k), nn);

    std::vector<std::uint8_t> seen(pool.size(), 0);
    for (std::uint32_t i : nn) seen[i] = 1;
    std::vector<Instance> out;
    for (std::size_t i = 0; i < pool.size(); ++i)
        if (seen[i]) out.push_back(pool.instances[i]);
    return out;
}

int tune_nn_k(const Pool& pool, const Matrix& test_features,
              std::span<const ValidationSet> validation, const LearnerSpec& learner) {
    ValidationEval val(validation);
    int best_k = 1;
    double best_fit = -1.0;
    for (int k = 1; k <= 10; ++k) {
        std::vector<Instance> selected = nn_filter_select(pool, test_features, k);
        Matrix x = to_matrix(selected);
        std::vector<std::uint8_t> y = to_labels(selected);
        double fit = scored_fitness(learner, x, y, val);
        if (fit > best_fit) {
            best_fit = fit;
            best_k = k;
        }
    }
    return best_k;
}

SelectionResult nnf_select(const Pool& pool, const Matrix& test_features,
                           std::span<const ValidationSet> validation,
                           const LearnerSpec& learner) {
    SelectionResult res;
    auto t0 = Clock::now();
    int k = tune_nn_k(pool, test_features, validation, learner);
    res.data = nn_filter_select(pool, test_features, k);
    res.seconds = seconds_since(t0);
    return res;
}

// ---- LSH bucket selection ------------------------------------------------------

std::vector<LshParams> default_lsh_grid() {
    std::vector<LshParams> out;
    std::vector<std::pair<std::size_t, std::size_t>> seen;
    for (std::size_t depth : {4, 10, 20})
        for (std::size_t target_bits : {8, 16, 32}) {
            std::size_t batches = (target_bits + depth - 1) / depth;
            if (std::find(seen.begin(), seen.end(), std::make_pair(depth, batches)) !=
                seen.end())
                continue;
            seen.emplace_back(depth, batches);
            for (std::size_t buckets : {5, 10, 20}) out.push_back({depth, batches, buckets});
        }
    return out;
}

SelectionResult lsh_select(const Pool& pool, std::span<const ValidationSet> validation,
                           const LearnerSpec& learner, std::span<const LshParams> grid,
                           Rng& rng) {
    SelectionResult res;
    ValidationEval val(validation);
    Matrix pool_raw = to_matrix(pool.instances);
    std::vector<std::uint8_t> pool_y = to_labels(pool.instances);

    auto t0 = Clock::now();
    Normalizer norm = Normalizer::fit(pool.instances);
    Matrix centered(pool_raw.rows, pool_raw.cols);
    for (std::size_t i = 0; i < pool_raw.rows; ++i)
        norm.apply_features({pool_raw.row(i), pool_raw.cols}, {centered.row(i), centered.cols});
    std::vector<double> mu(centered.cols, 0.0);
    for (std::size_t i = 0; i < centered.rows; ++i)
        for (std::size_t f = 0; f < centered.cols; ++f) mu[f] += centered.at(i, f);
    for (double& m : mu) m /= double(centered.rows);
    for (std::size_t i = 0; i < centered.rows; ++i)
        for (std::size_t f = 0; f < centered.cols; ++f) centered.at(i, f) -= mu[f];
    res.seconds += seconds_since(t0);

    struct Best {
        double fitness = -1.0;
        std::size_t size = 0;
        std::uint64_t id = 0;
        std::vector<std::uint32_t> members;
    } best;

    std::vector<std::uint8_t> bits;
    Matrix bucket_x;
    std::vector<std::uint8_t> bucket_y;

    std::size_t g = 0;
    while (g < grid.size()) {
        t0 = Clock::now();
        SuperBitHasher hasher(centered.cols, grid[g].depth, grid[g].batches, rng);
        hasher.signatures(centered, bits);
        res.seconds += seconds_since(t0);

        // All bucket counts sharing this (depth, batches) pair reuse the
        // signatures computed above.
        for (; g < grid.size() && grid[g].depth == hasher.depth() &&
               grid[g].batches == hasher.batches();
             ++g) {
            t0 = Clock::now();
            std::vector<Bucket> buckets =
                bucketize(bits, centered.rows, hasher.bits(), grid[g].buckets);
            res.seconds += seconds_since(t0);

            for (const Bucket& b : buckets) {
                if (b.members.size() < 25) continue;
                bool pos = false, neg = false;
                for (std::uint32_t i : b.members) (pool_y[i] ? pos : neg) = true;
                if (!pos || !neg) continue;

                gather_rows(pool_raw, b.members, bucket_x);
                bucket_y.resize(b.members.size());
                for (std::size_t i = 0; i < b.members.size(); ++i)
                    bucket_y[i] = pool_y[b.members[i]];
                double fit = scored_fitness(learner, bucket_x, bucket_y, val);

                bool better = fit > best.fitness ||
                              (fit == best.fitness && b.members.size() > best.size) ||
                              (fit == best.fitness && b.members.size() == best.size &&
                               best.fitness >= 0.0 && b.id < best.id);
                if (better) {
                    best.fitness = fit;
                    best.size = b.members.size();
                    best.id = b.id;
                    best.members = b.members;
                }
            }
        }
    }

    if (best.fitness < 0.0) {
        res.data = pool.instances;
        res.fallback = true;
    } else {
        res.data = gather(pool, best.members);
    }
    return res;
}

// ---- genetic instance selection -------------------------------------------------

void crossover_with_cuts(const Chromosome& a, const Chromosome& b, std::size_t a1,
                         std::size_t a2, std::size_t b1, std::size_t b2, Chromosome& c1,
                         Chromosome& c2) {
    auto splice = [](const Chromosome& head, std::size_t h1, std::size_t h2,
                     const Chromosome& mid, std::size_t m1, std::size_t m2, Chromosome& out) {
        out.genes.clear();
        out.flips.clear();
        out.genes.insert(out.genes.end(), head.genes.begin(), head.genes.begin() + h1);
        out.flips.insert(out.flips.end(), head.flips.begin(), head.flips.begin() + h1);
        out.genes.insert(out.genes.end(), mid.genes.begin() + m1, mid.genes.begin() + m2);
        out.flips.insert(out.flips.end(), mid.flips.begin() + m1, mid.flips.begin() + m2);
        out.genes.insert(out.genes.end(), head.genes.begin() + h2, head.genes.end());
        out.flips.insert(out.flips.end(), head.flips.begin() + h2, head.flips.end());
        out.fitness = 0.0;
    };
    splice(a, a1, a2, b, b1, b2, c1);
    splice(b, b1, b2, a, a1, a2, c2);
}

namespace {

// Draws an index not yet marked used; falls back to a scan when rejection
// sampling keeps missing (nearly full chromosomes).
std::uint32_t draw_unused(std::vector<std::uint8_t>& used, std::size_t n, Rng& rng) {
    for (int tries = 0; tries < 64; ++tries) {
        auto i = std::uint32_t(rng.index(n));
        if (!used[i]) {
            used[i] = 1;
            return i;
        }
    }
    std::vector<std::uint32_t> free_idx;
    for (std::uint32_t i = 0; i < n; ++i)
        if (!used[i]) free_idx.push_back(i);
    std::uint32_t pick = free_idx[std::size_t(rng.index(free_idx.size()))];
    used[pick] = 1;
    return pick;
}

// Remove duplicate genes (keeping first occurrences), then pad with random
// unused indices up to min_size.
void repair(Chromosome& ch, std::size_t min_size, std::size_t pool_size, Rng& rng,
            std::vector<std::uint8_t>& used) {
    std::fill(used.begin(), used.end(), 0);
    std::size_t w = 0;
    for (std::size_t r = 0; r < ch.genes.size(); ++r) {
        if (used[ch.genes[r]]) continue;
        used[ch.genes[r]] = 1;
        ch.genes[w] = ch.genes[r];
        ch.flips[w] = ch.flips[r];
        ++w;
    }
    ch.genes.resize(w);
    ch.flips.resize(w);
    while (ch.genes.size() < std::min(min_size, pool_size)) {
        ch.genes.push_back(draw_unused(used, pool_size, rng));
        ch.flips.push_back(0);
    }
}

void mutate(Chromosome& ch, const GisConfig& cfg, std::size_t pool_size, Rng& rng,
            std::vector<std::uint8_t>& used) {
    if (!rng.bernoulli(cfg.mutation_rate)) return;
    std::fill(used.begin(), used.end(), 0);
    for (std::uint32_t g : ch.genes) used[g] = 1;
    for (std::size_t i = 0; i < ch.genes.size(); ++i) {
        if (rng.bernoulli(cfg.gene_replace_prob)) {
            used[ch.genes[i]] = 0;
            ch.genes[i] = draw_unused(used, pool_size, rng);
            ch.flips[i] = 0;
        }
    }
    for (std::size_t i = 0; i < ch.flips.size(); ++i)
        if (rng.bernoulli(cfg.label_flip_prob)) ch.flips[i] ^= 1;
}

int tournament(const std::vector<Chromosome>& pop, Rng& rng) {
    int i = rng.index(pop.size());
    int j = rng.index(pop.size());
    return pop[std::size_t(i)].fitness >= pop[std::size_t(j)].fitness ? i : j;
}

}  // namespace

GisResult gis_select(const Pool& pool, const Matrix& test_features,
                     std::span<const ValidationSet> shared_validation,
                     const LearnerSpec& learner, const GisConfig& config, Rng& rng) {
    GisResult res;
    auto t0 = Clock::now();

    Matrix pool_x = to_matrix(pool.instances);
    std::vector<std::uint8_t> pool_y = to_labels(pool.instances);
    std::size_t n = pool.size();

    ValidationSet vnn;
    std::vector<ValidationSet> own;
    std::span<const ValidationSet> val_sets = shared_validation;
    if (config.validation_mode == ValidationMode::VNN) {
        vnn = gen_nn_validation(pool, test_features, 10);
        own.push_back(std::move(vnn));
        val_sets = own;
    }
    ValidationEval val(val_sets);

    std::size_t fx_size = std::max<std::size_t>(10, std::size_t(std::llround(0.01 * double(n))));
    std::size_t vr_lo = std::min<std::size_t>(100, n);

    auto eval_batch = [&](std::vector<Chromosome*>& batch) {
#pragma omp parallel for schedule(dynamic)
        for (std::size_t i = 0; i < batch.size(); ++i) {
            Chromosome& ch = *batch[i];
            Matrix x;
            gather_rows(pool_x, ch.genes, x);
            std::vector<std::uint8_t> y(ch.genes.size());
            for (std::size_t j = 0; j < ch.genes.size(); ++j)
                y[j] = pool_y[ch.genes[j]] ^ ch.flips[j];
            ch.fitness = scored_fitness(learner, x, y, val);
        }
        res.trainings += int(batch.size());
    };

    std::vector<Chromosome> pop(std::size_t(config.population_size));
    std::vector<int> scratch;
    for (auto& ch : pop) {
        std::size_t size = config.size_mode == SizeMode::FX
                               ? std::min(fx_size, n)
                               : std::size_t(rng.uniform_int(long(vr_lo), long(n)));
        std::vector<int> idx = rng.sample_without_replacement(int(n), int(size), scratch);
        ch.genes.assign(idx.begin(), idx.end());
        ch.flips.assign(size, 0);
    }
    {
        std::vector<Chromosome*> batch;
        for (auto& ch : pop) batch.push_back(&ch);
        eval_batch(batch);
    }
    auto best_of = [](const std::vector<Chromosome>& p) {
        double b = -1.0;
        for (const auto& ch : p) b = std::max(b, ch.fitness);
        return b;
    };
    res.best_trace.push_back(best_of(pop));

    std::vector<std::uint8_t> used(n, 0);
    for (int gen = 0; gen < config.max_generations; ++gen) {
        std::vector<Chromosome> offspring;
        offspring.reserve(pop.size());
        while (offspring.size() < pop.size()) {
            const Chromosome& pa = pop[std::size_t(tournament(pop, rng))];
            const Chromosome& pb = pop[std::size_t(tournament(pop, rng))];

            std::size_t a1, a2, b1, b2;
            a1 = std::size_t(rng.index(pa.genes.size() + 1));
            a2 = std::size_t(rng.index(pa.genes.size() + 1));
            if (a1 > a2) std::swap(a1, a2);
            if (config.size_mode == SizeMode::FX) {
                b1 = a1;
                b2 = a2;
            } else {
                b1 = std::size_t(rng.index(pb.genes.size() + 1));
                b2 = std::size_t(rng.index(pb.genes.size() + 1));
                if (b1 > b2) std::swap(b1, b2);
            }

            Chromosome c1, c2;
            crossover_with_cuts(pa, pb, a1, a2, b1, b2, c1, c2);
            for (Chromosome* c : {&c1, &c2}) {
                std::size_t min_size = config.size_mode == SizeMode::FX ? fx_size : vr_lo;
                repair(*c, min_size, n, rng, used);
                mutate(*c, config, n, rng, used);
            }
            offspring.push_back(std::move(c1));
            if (offspring.size() < pop.size()) offspring.push_back(std::move(c2));
        }

        std::vector<Chromosome*> batch;
        for (auto& ch : offspring) batch.push_back(&ch);
        eval_batch(batch);

        // Parents and offspring compete together; ties keep the parent, so
        // the best fitness can never regress.
        std::vector<Chromosome> combined;
        combined.reserve(pop.size() + offspring.size());
        for (auto& ch : pop) combined.push_back(std::move(ch));
        for (auto& ch : offspring) combined.push_back(std::move(ch));
        std::stable_sort(combined.begin(), combined.end(),
                         [](const Chromosome& a, const Chromosome& b) {
                             return a.fitness > b.fitness;
                         });
        combined.resize(pop.size());
        pop = std::move(combined);
        res.best_trace.push_back(pop[0].fitness);
    }

    const Chromosome& best = pop[0];
    res.selection.data.reserve(best.genes.size());
    for (std::size_t i = 0; i < best.genes.size(); ++i) {
        Instance inst = pool.instances[best.genes[i]];
        if (best.flips[i]) inst.label = !inst.label;
        res.selection.data.push_back(std::move(inst));
    }
    res.selection.seconds = seconds_since(t0);
    return res;
}

}  // namespace cpdp
