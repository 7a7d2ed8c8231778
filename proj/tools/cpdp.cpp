#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <exception>
#include <string>

#include "cpdp/runner.hpp"
#include "cpdp/synth.hpp"

namespace {

void print_summary(const cpdp::SummaryTable& table) {
    std::printf("%-22s", ("median " + table.measure).c_str());
    for (const std::string& ds : table.datasets) std::printf(" %10s", ds.c_str());
    std::printf(" %8s %8s %8s %9s\n", "median", "mean", "stddev", "time_s");
    for (const cpdp::SummaryRow& row : table.rows) {
        std::printf("%-22s", row.benchmark.c_str());
        for (double v : row.per_dataset) {
            if (std::isnan(v))
                std::printf(" %10s", "-");
            else
                std::printf(" %10.4f", v);
        }
        std::printf(" %8.4f %8.4f %8.4f %9.3f\n", row.median, row.avg, row.stddev,
                    row.time_s);
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"similarity-based training-data selection benchmarks for defect prediction"};
    app.require_subcommand(1);

    cpdp::RunConfig config;
    auto* run_cmd = app.add_subcommand("run", "execute benchmarks over a project corpus");
    run_cmd->add_option("--data-dir", config.data_dir, "directory with project CSVs")
        ->required();
    run_cmd->add_option("--benchmarks", config.pattern,
                        "comma-separated glob patterns over benchmark names");
    run_cmd->add_option("--reps", config.reps, "repetitions per holdout project");
    run_cmd->add_option("--seed", config.seed, "base seed");
    run_cmd->add_option("--jobs", config.jobs, "holdout projects processed in parallel");
    run_cmd->add_option("--out", config.out_dir, "output directory")->required();

    std::string in_dir;
    std::string measure = "f";
    double alpha = 0.05;
    double negligible_d = 0.2;
    const auto measure_check = CLI::IsMember({"f", "precision", "recall", "gmean"});

    auto* sum_cmd = app.add_subcommand("summarize", "per-dataset median table of a run");
    sum_cmd->add_option("--in", in_dir, "directory written by run")->required();
    sum_cmd->add_option("--measure", measure, "measure to aggregate")->check(measure_check);

    auto* rank_cmd = app.add_subcommand("rank", "Scott-Knott ESD ranking of a run");
    rank_cmd->add_option("--in", in_dir, "directory written by run")->required();
    rank_cmd->add_option("--measure", measure, "measure to rank on")->check(measure_check);
    rank_cmd->add_option("--alpha", alpha, "significance level for splits");
    rank_cmd->add_option("--negligible-d", negligible_d,
                         "Cohen's d below which a split is rejected");

    std::string gen_out;
    std::uint64_t gen_seed = 7;
    auto* gen_cmd = app.add_subcommand("gen-data", "write the synthetic project corpus");
    gen_cmd->add_option("--out", gen_out, "corpus directory")->required();
    gen_cmd->add_option("--seed", gen_seed, "corpus seed");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run_cmd->parsed()) {
            auto datasets = cpdp::load_corpus_dir(config.data_dir);
            std::printf("loaded %zu projects from %s\n", datasets.size(),
                        config.data_dir.c_str());
            auto store = cpdp::run_experiment(config, datasets);
            for (const std::string& f : store.failures)
                std::fprintf(stderr, "warning: failed run %s\n", f.c_str());
            std::printf("wrote %zu records to %s\n", store.records.size(),
                        config.out_dir.c_str());
            return store.records.empty() ? 1 : 0;
        }
        if (sum_cmd->parsed()) {
            auto store = cpdp::load_store(in_dir);
            auto table = cpdp::summarize(store, measure);
            const std::string path = in_dir + "/summary_" + measure + ".csv";
            cpdp::write_summary_csv(table, path);
            print_summary(table);
            std::printf("wrote %s\n", path.c_str());
            return 0;
        }
        if (rank_cmd->parsed()) {
            auto store = cpdp::load_store(in_dir);
            auto report = cpdp::rank_report(store, measure, alpha, negligible_d);
            const std::string csv = in_dir + "/ranks_" + measure + ".csv";
            const std::string txt = in_dir + "/ranks_" + measure + ".txt";
            cpdp::write_rank_files(report, csv, txt);
            std::size_t cursor = 0;
            for (const cpdp::RankGroup& g : report.groups)
                for (const std::string& m : g.members)
                    std::printf("%2d  %-22s %.4f\n", g.rank, m.c_str(),
                                report.means[cursor++].second);
            std::printf("wrote %s and %s\n", csv.c_str(), txt.c_str());
            return 0;
        }
        cpdp::write_corpus(gen_out, gen_seed);
        for (const auto& ds : cpdp::load_corpus_dir(gen_out))
            std::printf("%-14s %4zu instances  %3d defective\n", ds.name.c_str(), ds.size(),
                        ds.defect_count());
        return 0;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
