#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <string>

#include "cpdp/data_io.hpp"

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
    std::string file(const std::string& name) const { return (path / name).string(); }
};

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
}

Schema tiny_schema() {
    Schema s;
    s.id_columns = {"name"};
    s.bug_column = "bug";
    s.expected_metrics = 2;
    return s;
}

}  // namespace

TEST_CASE("csv loading maps columns by role") {
    TempDir dir("io_roles");
    write_file(dir.file("alpha.csv"),
               "name,m1,bug,m2\n"
               "a,1.5,0,2.5\n"
               "b,3.0,2,4.0\n"
               "c,-1.0,0,0.25\n");
    Dataset ds = load_dataset(dir.file("alpha.csv"), tiny_schema());
    CHECK(ds.name == "alpha");
    REQUIRE(ds.size() == 3);
    CHECK(ds.defect_count() == 1);
    CHECK(ds.instances[0].features == std::vector<double>{1.5, 2.5});
    CHECK(ds.instances[1].label);          // bug count 2 -> defect-prone
    CHECK_FALSE(ds.instances[2].label);
    CHECK(ds.instances[2].origin.dataset == "alpha");
    CHECK(ds.instances[2].origin.row == 2);
}

TEST_CASE("loader rejects malformed files with located errors") {
    TempDir dir("io_errors");
    Schema schema = tiny_schema();

    write_file(dir.file("nobug.csv"), "name,m1,m2\na,1,2\n");
    CHECK_THROWS_WITH_AS(load_dataset(dir.file("nobug.csv"), schema),
                         doctest::Contains("no 'bug' column"), Error);

    write_file(dir.file("badcell.csv"), "name,m1,m2,bug\na,1,oops,0\n");
    CHECK_THROWS_WITH_AS(load_dataset(dir.file("badcell.csv"), schema),
                         doctest::Contains("column 'm2'"), Error);

    write_file(dir.file("width.csv"), "name,m1,m2,m3,bug\na,1,2,3,0\n");
    CHECK_THROWS_AS(load_dataset(dir.file("width.csv"), schema), Error);

    write_file(dir.file("empty.csv"), "name,m1,m2,bug\n");
    CHECK_THROWS_AS(load_dataset(dir.file("empty.csv"), schema), Error);

    CHECK_THROWS_AS(load_dataset(dir.file("missing.csv"), schema), Error);
}

TEST_CASE("save then load round-trips instances") {
    TempDir dir("io_roundtrip");
    Dataset ds;
    ds.name = "beta";
    for (int i = 0; i < 5; ++i) {
        Instance inst;
        inst.features = {i * 0.5, 10.0 - i};
        inst.label = i % 2 == 1;
        inst.origin = {"beta", i};
        ds.instances.push_back(inst);
    }
    save_dataset(ds, dir.file("beta.csv"), tiny_schema());
    Dataset back = load_dataset(dir.file("beta.csv"), tiny_schema());
    REQUIRE(back.size() == ds.size());
    CHECK(back.defect_count() == ds.defect_count());
    for (std::size_t i = 0; i < ds.size(); ++i) {
        CHECK(back.instances[i].features == ds.instances[i].features);
        CHECK(back.instances[i].label == ds.instances[i].label);
        CHECK(back.instances[i].origin.row == int(i));
    }
}

TEST_CASE("schema manifest round-trip") {
    TempDir dir("io_schema");
    write_file(dir.file("schema.json"),
               R"({"id_columns":["name","version"],"bug_column":"defects","metric_count":3})");
    Schema s = Schema::load(dir.file("schema.json"));
    CHECK(s.id_columns == std::vector<std::string>{"name", "version"});
    CHECK(s.bug_column == "defects");
    CHECK(s.expected_metrics == 3);
    CHECK_THROWS_AS(Schema::load(dir.file("nope.json")), Error);
}

TEST_CASE("pool excludes the holdout and keeps both classes") {
    std::vector<Dataset> sets(3);
    const char* names[] = {"p1", "p2", "p3"};
    for (int d = 0; d < 3; ++d) {
        sets[d].name = names[d];
        for (int i = 0; i < 4; ++i) {
            Instance inst;
            inst.features = {double(d), double(i)};
            inst.label = i == 0;
            inst.origin = {names[d], i};
            sets[d].instances.push_back(inst);
        }
    }
    Pool pool = build_pool(sets, "p2");
    CHECK(pool.holdout == "p2");
    CHECK(pool.size() == 8);
    for (const Instance& inst : pool.instances) CHECK(inst.origin.dataset != "p2");
    // order preserved: p1 rows then p3 rows
    CHECK(pool.instances[0].origin.dataset == "p1");
    CHECK(pool.instances[4].origin.dataset == "p3");

    CHECK_THROWS_AS(build_pool(sets, "unknown"), Error);

    for (auto& inst : sets[0].instances) inst.label = false;
    for (auto& inst : sets[2].instances) inst.label = false;
    CHECK_THROWS_AS(build_pool(sets, "p2"), Error);  // single-class pool
}

TEST_CASE("normalizer maps the reference span onto [0,1]") {
    std::vector<Instance> ref(3);
    ref[0].features = {0.0, 10.0, 7.0};
    ref[1].features = {5.0, 20.0, 7.0};
    ref[2].features = {10.0, 15.0, 7.0};
    Normalizer n = Normalizer::fit(ref);
    CHECK(n.dim() == 3);

    Instance probe;
    probe.features = {5.0, 10.0, 7.0};
    Instance mapped = n.apply(probe);
    CHECK(mapped.features[0] == doctest::Approx(0.5));
    CHECK(mapped.features[1] == doctest::Approx(0.0));
    CHECK(mapped.features[2] == doctest::Approx(0.0));  // constant feature -> 0

    CHECK(n.apply_one(0, 20.0) == doctest::Approx(2.0));   // out of range: no clamping
    CHECK(n.apply_one(0, -5.0) == doctest::Approx(-0.5));

    double flat[3] = {2.5, 12.5, 7.0};
    double out[3];
    n.apply_features(flat, out);
    CHECK(out[0] == doctest::Approx(0.25));
    CHECK(out[1] == doctest::Approx(0.25));
}
