#include "cpdp/runner.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <tuple>

#include <json.hpp>

#include "cpdp/mathutil.hpp"
#include "cpdp/rng.hpp"
#include "cpdp/tuning.hpp"

namespace fs = std::filesystem;

namespace cpdp {
namespace {

const char* method_prefix(BenchmarkId::Method m) {
    switch (m) {
        case BenchmarkId::Method::lsh: return "LSH";
        case BenchmarkId::Method::nnf: return "NNF";
        default: return "GIS";
    }
}

std::vector<std::string> split_fields(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        std::size_t pos = line.find(sep, start);
        if (pos == std::string::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
}

RunRecord run_one(const BenchmarkId& bm, const Pool& pool, const Dataset& holdout,
                  const Matrix& test_x, const std::vector<std::uint8_t>& test_y,
                  std::span<const ValidationSet> validation, std::uint64_t seed) {
    Rng rng(seed);
    const LearnerSpec stock = default_spec(bm.learner);

    SelectionResult sel;
    switch (bm.method) {
        case BenchmarkId::Method::lsh: {
            auto grid_points = default_lsh_grid();
            sel = lsh_select(pool, validation, stock, grid_points, rng);
            break;
        }
        case BenchmarkId::Method::nnf:
            sel = nnf_select(pool, test_x, validation, stock);
            break;
        case BenchmarkId::Method::gis: {
            GisConfig cfg;
            cfg.size_mode = bm.size_mode;
            cfg.validation_mode = bm.val_mode;
            sel = gis_select(pool, test_x, validation, stock, cfg, rng).selection;
            break;
        }
    }

    for (const Instance& inst : sel.data)
        if (inst.origin.dataset == holdout.name)
            throw Error("holdout instance leaked into training data: " + holdout.name);

    const LearnerSpec final_spec =
        bm.tuned ? grid_search(bm.learner, sel.data, validation).best_spec : stock;
    TrainedModel model = train(final_spec, sel.data);

    std::vector<std::uint8_t> pred;
    model.predict_rows(test_x, pred);

    RunRecord rec;
    rec.benchmark = bm.name();
    rec.holdout = holdout.name;
    rec.seed = seed;
    rec.cm = confusion(std::span<const std::uint8_t>(test_y), std::span<const std::uint8_t>(pred));
    rec.selection_seconds = sel.seconds;
    rec.fallback = sel.fallback;
    return rec;
}

}  // namespace

std::string BenchmarkId::name() const {
    std::string out = method_prefix(method);
    if (method == Method::gis) {
        out += size_mode == SizeMode::FX ? "(FX-" : "(VR-";
        out += val_mode == ValidationMode::VNN ? "VNN)" : "VMUL)";
    }
    out += '-';
    if (tuned) out += "Tuned";
    out += kind_name(learner);
    return out;
}

std::vector<BenchmarkId> all_benchmarks() {
    const LearnerKind kinds[] = {LearnerKind::naive_bayes, LearnerKind::logistic,
                                 LearnerKind::tree};
    std::vector<BenchmarkId> out;
    for (auto method : {BenchmarkId::Method::lsh, BenchmarkId::Method::nnf})
        for (bool tuned : {false, true})
            for (auto kind : kinds) {
                BenchmarkId bm;
                bm.method = method;
                bm.learner = kind;
                bm.tuned = tuned;
                out.push_back(bm);
            }
    for (auto size : {SizeMode::FX, SizeMode::VR})
        for (auto val : {ValidationMode::VNN, ValidationMode::VMUL})
            for (auto kind : kinds) {
                BenchmarkId bm;
                bm.method = BenchmarkId::Method::gis;
                bm.learner = kind;
                bm.size_mode = size;
                bm.val_mode = val;
                out.push_back(bm);
            }
    return out;
}

bool glob_match(const std::string& pattern, const std::string& text) {
    std::size_t p = 0, t = 0;
    std::size_t star = std::string::npos, mark = 0;
    while (t < text.size()) {
        if (p < pattern.size() && (pattern[p] == '?' || pattern[p] == text[t])) {
            ++p;
            ++t;
        } else if (p < pattern.size() && pattern[p] == '*') {
            star = p++;
            mark = t;
        } else if (star != std::string::npos) {
            p = star + 1;
            t = ++mark;
        } else {
            return false;
        }
    }
    while (p < pattern.size() && pattern[p] == '*') ++p;
    return p == pattern.size();
}

std::vector<BenchmarkId> filter_benchmarks(const std::string& patterns) {
    std::vector<std::string> parts;
    for (std::string& raw : split_fields(patterns, ',')) {
        std::size_t a = raw.find_first_not_of(" \t");
        if (a == std::string::npos) continue;
        std::size_t b = raw.find_last_not_of(" \t");
        parts.push_back(raw.substr(a, b - a + 1));
    }
    std::vector<BenchmarkId> out;
    for (const BenchmarkId& bm : all_benchmarks()) {
        const std::string name = bm.name();
        for (const std::string& pat : parts)
            if (glob_match(pat, name)) {
                out.push_back(bm);
                break;
            }
    }
    return out;
}

std::vector<Dataset> load_corpus_dir(const std::string& dir) {
    if (!fs::is_directory(dir)) throw Error("not a directory: " + dir);
    Schema schema = Schema::promise_default();
    const fs::path schema_path = fs::path(dir) / "schema.json";
    if (fs::exists(schema_path)) schema = Schema::load(schema_path.string());

    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir))
        if (entry.is_regular_file() && entry.path().extension() == ".csv")
            files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    if (files.empty()) throw Error("no .csv files in " + dir);

    std::vector<Dataset> out;
    out.reserve(files.size());
    for (const fs::path& f : files) out.push_back(load_dataset(f.string(), schema));
    std::sort(out.begin(), out.end(),
              [](const Dataset& a, const Dataset& b) { return a.name < b.name; });
    return out;
}

ResultStore run_experiment(const RunConfig& config, const std::vector<Dataset>& datasets) {
    if (datasets.size() < 2) throw Error("need at least two datasets");
    if (config.reps < 1) throw Error("reps must be positive");
    const std::vector<BenchmarkId> benchmarks = filter_benchmarks(config.pattern);
    if (benchmarks.empty()) throw Error("no benchmark matches pattern: " + config.pattern);

    const int holdouts = static_cast<int>(datasets.size());
    std::vector<std::vector<RunRecord>> records(holdouts);
    std::vector<std::vector<std::string>> failures(holdouts);

    omp_set_num_threads(std::max(1, config.jobs));
#pragma omp parallel for schedule(dynamic)
    for (int h = 0; h < holdouts; ++h) {
        const Dataset& holdout = datasets[h];
        Pool pool = build_pool(datasets, holdout.name);
        const Matrix test_x = to_matrix(holdout.instances);
        const std::vector<std::uint8_t> test_y = to_labels(holdout.instances);

        for (int rep = 1; rep <= config.reps; ++rep) {
            const std::uint64_t vseed = SeedMixer(config.seed)
                                            .add("validation")
                                            .add(holdout.name)
                                            .add(static_cast<std::uint64_t>(rep))
                                            .value();
            std::vector<ValidationSet> validation;
            try {
                Rng vrng(vseed);
                validation = gen_random_validation(pool, 20, vrng);
            } catch (const std::exception& e) {
                failures[h].push_back("validation/" + holdout.name + "/" +
                                      std::to_string(rep) + ": " + e.what());
                continue;
            }
            for (const BenchmarkId& bm : benchmarks) {
                const std::uint64_t seed = SeedMixer(config.seed)
                                               .add(bm.name())
                                               .add(holdout.name)
                                               .add(static_cast<std::uint64_t>(rep))
                                               .value();
                try {
                    RunRecord rec =
                        run_one(bm, pool, holdout, test_x, test_y, validation, seed);
                    rec.rep = rep;
                    records[h].push_back(std::move(rec));
                } catch (const std::exception& e) {
                    failures[h].push_back(bm.name() + "/" + holdout.name + "/" +
                                          std::to_string(rep) + ": " + e.what());
                }
            }
        }
    }

    ResultStore store;
    for (auto& part : records)
        store.records.insert(store.records.end(), std::make_move_iterator(part.begin()),
                             std::make_move_iterator(part.end()));
    for (auto& part : failures)
        store.failures.insert(store.failures.end(), part.begin(), part.end());
    std::sort(store.records.begin(), store.records.end(),
              [](const RunRecord& a, const RunRecord& b) {
                  return std::tie(a.benchmark, a.holdout, a.rep) <
                         std::tie(b.benchmark, b.holdout, b.rep);
              });
    std::sort(store.failures.begin(), store.failures.end());

    if (!config.out_dir.empty()) save_store(store, config, datasets, config.out_dir);
    return store;
}

void save_store(const ResultStore& store, const RunConfig& config,
                const std::vector<Dataset>& datasets, const std::string& dir) {
    fs::create_directories(dir);
    {
        std::ofstream out(fs::path(dir) / "runs.csv", std::ios::binary);
        if (!out) throw Error("cannot write runs.csv in " + dir);
        out << "benchmark,holdout,rep,seed,tp,fp,tn,fn,fallback\n";
        for (const RunRecord& r : store.records)
            out << r.benchmark << ',' << r.holdout << ',' << r.rep << ',' << r.seed << ','
                << r.cm.tp << ',' << r.cm.fp << ',' << r.cm.tn << ',' << r.cm.fn << ','
                << (r.fallback ? 1 : 0) << '\n';
    }
    {
        std::ofstream out(fs::path(dir) / "timings.csv", std::ios::binary);
        if (!out) throw Error("cannot write timings.csv in " + dir);
        out << "benchmark,holdout,rep,selection_seconds\n";
        char buf[64];
        for (const RunRecord& r : store.records) {
            std::snprintf(buf, sizeof buf, "%.6f", r.selection_seconds);
            out << r.benchmark << ',' << r.holdout << ',' << r.rep << ',' << buf << '\n';
        }
    }
    {
        nlohmann::ordered_json j;
        j["format"] = 1;
        j["seed"] = config.seed;
        j["reps"] = config.reps;
        j["pattern"] = config.pattern;
        j["jobs"] = config.jobs;
        j["data_dir"] = config.data_dir;
        auto ds = nlohmann::ordered_json::array();
        for (const Dataset& d : datasets)
            ds.push_back({{"name", d.name},
                          {"instances", d.size()},
                          {"defects", d.defect_count()}});
        j["datasets"] = std::move(ds);
        auto bms = nlohmann::ordered_json::array();
        for (const BenchmarkId& bm : filter_benchmarks(config.pattern)) bms.push_back(bm.name());
        j["benchmarks"] = std::move(bms);
        j["records"] = store.records.size();
        j["failures"] = store.failures;
        std::ofstream out(fs::path(dir) / "manifest.json", std::ios::binary);
        if (!out) throw Error("cannot write manifest.json in " + dir);
        out << j.dump(2) << '\n';
    }
}

ResultStore load_store(const std::string& dir) {
    std::ifstream in(fs::path(dir) / "runs.csv");
    if (!in) throw Error("cannot open runs.csv in " + dir);
    std::string line;
    if (!std::getline(in, line) || line != "benchmark,holdout,rep,seed,tp,fp,tn,fn,fallback")
        throw Error("unexpected runs.csv header in " + dir);

    ResultStore store;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const auto f = split_fields(line, ',');
        if (f.size() != 9)
            throw Error("runs.csv line " + std::to_string(lineno) + ": expected 9 fields");
        try {
            RunRecord r;
            r.benchmark = f[0];
            r.holdout = f[1];
            r.rep = std::stoi(f[2]);
            r.seed = std::stoull(f[3]);
            r.cm.tp = std::stoll(f[4]);
            r.cm.fp = std::stoll(f[5]);
            r.cm.tn = std::stoll(f[6]);
            r.cm.fn = std::stoll(f[7]);
            r.fallback = f[8] == "1";
            store.records.push_back(std::move(r));
        } catch (const std::exception&) {
            throw Error("runs.csv line " + std::to_string(lineno) + ": bad value");
        }
    }

    std::ifstream tin(fs::path(dir) / "timings.csv");
    if (tin && std::getline(tin, line)) {
        std::map<std::tuple<std::string, std::string, int>, double> seconds;
        while (std::getline(tin, line)) {
            if (line.empty()) continue;
            const auto f = split_fields(line, ',');
            if (f.size() != 4) throw Error("timings.csv: expected 4 fields per line");
            seconds[{f[0], f[1], std::stoi(f[2])}] = std::stod(f[3]);
        }
        for (RunRecord& r : store.records) {
            auto it = seconds.find({r.benchmark, r.holdout, r.rep});
            if (it != seconds.end()) r.selection_seconds = it->second;
        }
    }
    return store;
}

double measure_value(const ConfusionMatrix& cm, const std::string& measure) {
    const Measures m = measures(cm);
    if (measure == "f") return m.f;
    if (measure == "precision") return m.precision;
    if (measure == "recall") return m.recall;
    if (measure == "gmean") return m.gmean;
    throw Error("unknown measure: " + measure + " (expected f, precision, recall, gmean)");
}

SummaryTable summarize(const ResultStore& store, const std::string& measure) {
    if (store.records.empty()) throw Error("no records to summarize");
    measure_value(ConfusionMatrix{}, measure);

    SummaryTable table;
    table.measure = measure;
    std::set<std::string> names;
    for (const RunRecord& r : store.records) names.insert(r.holdout);
    table.datasets.assign(names.begin(), names.end());

    std::map<std::string, std::map<std::string, std::vector<double>>> values;
    std::map<std::string, std::vector<double>> seconds;
    for (const RunRecord& r : store.records) {
        values[r.benchmark][r.holdout].push_back(measure_value(r.cm, measure));
        seconds[r.benchmark].push_back(r.selection_seconds);
    }

    for (auto& [bm, per_ds] : values) {
        SummaryRow row;
        row.benchmark = bm;
        std::vector<double> present;
        for (const std::string& ds : table.datasets) {
            auto it = per_ds.find(ds);
            if (it == per_ds.end()) {
                row.per_dataset.push_back(std::numeric_limits<double>::quiet_NaN());
            } else {
                const double med = median(it->second);
                row.per_dataset.push_back(med);
                present.push_back(med);
            }
        }
        row.median = median(present);
        row.avg = mean(present);
        row.stddev = present.size() > 1 ? std::sqrt(variance(present)) : 0.0;
        row.time_s = median(seconds[bm]);
        table.rows.push_back(std::move(row));
    }
    std::sort(table.rows.begin(), table.rows.end(),
              [](const SummaryRow& a, const SummaryRow& b) {
                  if (a.median != b.median) return a.median < b.median;
                  return a.benchmark < b.benchmark;
              });
    return table;
}

void write_summary_csv(const SummaryTable& table, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path);
    out << "benchmark";
    for (const std::string& ds : table.datasets) out << ',' << ds;
    out << ",median,mean,stddev,time_s\n";
    char buf[64];
    auto cell = [&](double v) {
        out << ',';
        if (std::isnan(v)) return;
        std::snprintf(buf, sizeof buf, "%.4f", v);
        out << buf;
    };
    for (const SummaryRow& row : table.rows) {
        out << row.benchmark;
        for (double v : row.per_dataset) cell(v);
        cell(row.median);
        cell(row.avg);
        cell(row.stddev);
        cell(row.time_s);
        out << '\n';
    }
}

RankReport rank_report(const ResultStore& store, const std::string& measure, double alpha,
                       double negligible_d) {
    const SummaryTable table = summarize(store, measure);

    std::vector<TreatmentSample> treatments;
    std::map<std::string, std::vector<double>> by_name;
    for (const SummaryRow& row : table.rows) {
        TreatmentSample t;
        t.name = row.benchmark;
        for (double v : row.per_dataset)
            if (!std::isnan(v)) t.values.push_back(v);
        by_name[t.name] = t.values;
        treatments.push_back(std::move(t));
    }

    RankReport report;
    report.measure = measure;
    report.alpha = alpha;
    report.negligible_d = negligible_d;
    report.groups = scott_knott_esd(treatments, alpha, negligible_d);
    for (const RankGroup& g : report.groups)
        for (const std::string& m : g.members) report.means.push_back({m, mean(by_name[m])});

    std::vector<std::vector<double>> pooled;
    for (const RankGroup& g : report.groups) {
        std::vector<double> all;
        for (const std::string& m : g.members)
            all.insert(all.end(), by_name[m].begin(), by_name[m].end());
        pooled.push_back(std::move(all));
    }
    report.group_delta.assign(pooled.size(), std::vector<double>(pooled.size(), 0.0));
    for (std::size_t i = 0; i < pooled.size(); ++i)
        for (std::size_t j = 0; j < pooled.size(); ++j)
            if (i != j) report.group_delta[i][j] = cliffs_delta(pooled[i], pooled[j]);
    return report;
}

void write_rank_files(const RankReport& report, const std::string& csv_path,
                      const std::string& txt_path) {
    {
        std::ofstream out(csv_path, std::ios::binary);
        if (!out) throw Error("cannot write " + csv_path);
        out << "rank,benchmark,mean\n";
        char buf[64];
        std::size_t cursor = 0;
        for (const RankGroup& g : report.groups)
            for (const std::string& m : g.members) {
                std::snprintf(buf, sizeof buf, "%.4f", report.means[cursor++].second);
                out << g.rank << ',' << m << ',' << buf << '\n';
            }
    }
    {
        std::ofstream out(txt_path, std::ios::binary);
        if (!out) throw Error("cannot write " + txt_path);
        char buf[128];
        std::snprintf(buf, sizeof buf,
                      "Scott-Knott ESD ranking  (measure=%s, alpha=%g, negligible_d=%g)\n\n",
                      report.measure.c_str(), report.alpha, report.negligible_d);
        out << buf;
        std::size_t cursor = 0;
        for (const RankGroup& g : report.groups) {
            std::snprintf(buf, sizeof buf, "rank %d  (means %.4f .. %.4f)\n", g.rank,
                          g.mean_hi, g.mean_lo);
            out << buf;
            for (const std::string& m : g.members) {
                std::snprintf(buf, sizeof buf, "    %-22s %.4f\n", m.c_str(),
                              report.means[cursor++].second);
                out << buf;
            }
        }
        out << "\nCliff's delta between groups (row vs column):\n";
        auto pad = [&](std::string s) {
            s.resize(std::max<std::size_t>(s.size(), 20), ' ');
            out << s;
        };
        pad("");
        for (const RankGroup& g : report.groups) pad("rank " + std::to_string(g.rank));
        out << '\n';
        for (std::size_t i = 0; i < report.groups.size(); ++i) {
            pad("rank " + std::to_string(report.groups[i].rank));
            for (std::size_t j = 0; j < report.groups.size(); ++j) {
                if (i == j) {
                    pad("-");
                    continue;
                }
                const double d = report.group_delta[i][j];
                std::snprintf(buf, sizeof buf, "%+.3f (%s)", d,
                              magnitude_name(magnitude(d)));
                pad(buf);
            }
            out << '\n';
        }
    }
}

}  // namespace cpdp
