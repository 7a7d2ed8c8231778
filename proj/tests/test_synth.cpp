#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cpdp/runner.hpp"
#include "cpdp/synth.hpp"

using namespace cpdp;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& tag) {
        path = fs::temp_directory_path() / ("cpdp_" + tag);
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string str() const { return path.string(); }
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct Shape {
    const char* name;
    int n, defects;
};

constexpr Shape kExpected[] = {
    {"ant-1.7", 745, 166},   {"camel-1.6", 965, 188},   {"ivy-2.0", 352, 40},
    {"jedit-4.3", 492, 11},  {"log4j-1.2", 205, 189},   {"lucene-2.4", 340, 203},
    {"poi-3.0", 442, 281},   {"prop-6.0", 660, 66},     {"synapse-1.2", 256, 86},
    {"tomcat-6.0", 885, 77}, {"velocity-1.6", 229, 78}, {"xalan-2.7", 885, 411},
    {"xerces-1.4", 588, 437},
};

}  // namespace

TEST_CASE("corpus recipe pins thirteen projects with exact shapes") {
    auto specs = corpus_specs();
    REQUIRE(specs.size() == 13);
    int total = 0, total_defects = 0;
    for (std::size_t i = 0; i < specs.size(); ++i) {
        CHECK(specs[i].name == kExpected[i].name);
        CHECK(specs[i].instances == kExpected[i].n);
        CHECK(specs[i].defects == kExpected[i].defects);
        total += specs[i].instances;
        total_defects += specs[i].defects;
    }
    CHECK(total == 7044);
    CHECK(total_defects == 2233);
}

TEST_CASE("generated projects hit their instance and defect counts exactly") {
    for (const auto& spec : corpus_specs()) {
        Rng rng(SeedMixer(3).add("corpus").add(spec.name).value());
        Dataset ds = synth_project(spec, rng);
        CHECK(ds.name == spec.name);
        CHECK(int(ds.size()) == spec.instances);
        CHECK(ds.defect_count() == spec.defects);
        for (const auto& in : ds.instances) {
            REQUIRE(in.features.size() == 20);
            for (double v : in.features) CHECK(std::isfinite(v));
        }
    }
}

TEST_CASE("project generation is seed-deterministic") {
    auto spec = corpus_specs()[2];
    Rng a(42), b(42), c(43);
    Dataset da = synth_project(spec, a);
    Dataset db = synth_project(spec, b);
    Dataset dc = synth_project(spec, c);

    REQUIRE(da.size() == db.size());
    bool same = true, differs = false;
    for (std::size_t i = 0; i < da.size(); ++i) {
        if (da.instances[i].features != db.instances[i].features ||
            da.instances[i].label != db.instances[i].label)
            same = false;
        if (da.instances[i].features != dc.instances[i].features) differs = true;
    }
    CHECK(same);
    CHECK(differs);
}

TEST_CASE("written corpus loads back with the pinned counts") {
    TempDir dir("synth_corpus");
    write_corpus(dir.str(), 7);

    auto datasets = load_corpus_dir(dir.str());
    REQUIRE(datasets.size() == 13);
    for (std::size_t i = 0; i < datasets.size(); ++i) {
        CHECK(datasets[i].name == kExpected[i].name);
        CHECK(int(datasets[i].size()) == kExpected[i].n);
        CHECK(datasets[i].defect_count() == kExpected[i].defects);
        for (const auto& in : datasets[i].instances)
            REQUIRE(in.features.size() == 20);
    }
}

TEST_CASE("corpus files are byte-stable for a fixed seed") {
    TempDir d1("synth_a"), d2("synth_b");
    write_corpus(d1.str(), 11);
    write_corpus(d2.str(), 11);

    std::vector<std::string> names;
    for (const auto& e : fs::directory_iterator(d1.path)) names.push_back(e.path().filename().string());
    CHECK(names.size() == 14);  // 13 projects + schema manifest
    for (const auto& n : names) {
        CHECK(slurp(d1.path / n) == slurp(d2.path / n));
    }

    TempDir d3("synth_c");
    write_corpus(d3.str(), 12);
    CHECK(slurp(d1.path / "ivy-2.0.csv") != slurp(d3.path / "ivy-2.0.csv"));
}
