#include "cpdp/data_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace cpdp {

int Dataset::defect_count() const {
    int n = 0;
    for (const auto& inst : instances) n += inst.label ? 1 : 0;
    return n;
}

Schema Schema::promise_default() {
    Schema s;
    s.id_columns = {"name", "version", "classname"};
    s.bug_column = "bug";
    s.expected_metrics = 20;
    return s;
}

Schema Schema::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("schema manifest not found: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw Error("schema manifest " + path + ": " + e.what());
    }
    Schema s;
    for (const auto& c : j.at("id_columns")) s.id_columns.push_back(c.get<std::string>());
    s.bug_column = j.at("bug_column").get<std::string>();
    s.expected_metrics = j.value("metric_count", std::size_t{20});
    return s;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

bool parse_double(const std::string& s, double& out) {
    const char* b = s.data();
    const char* e = b + s.size();
    while (b < e && (*b == ' ' || *b == '\t')) ++b;
    auto [ptr, ec] = std::from_chars(b, e, out);
    if (ec != std::errc()) return false;
    while (ptr < e && (*ptr == ' ' || *ptr == '\t')) ++ptr;
    return ptr == e;
}

std::string stem_of(const std::string& path) {
    std::size_t slash = path.find_last_of("/\\");
    std::string base = slash == std::string::npos ? path : path.substr(slash + 1);
    std::size_t dot = base.find_last_of('.');
    return dot == std::string::npos ? base : base.substr(0, dot);
}

}  // namespace

Dataset load_dataset(const std::string& path, const Schema& schema) {
    std::ifstream in(path);
    if (!in) throw Error("missing file: " + path);

    std::string line;
    if (!std::getline(in, line)) throw Error(path + ": empty file, no header row");
    std::vector<std::string> header = split_csv_line(line);

    std::vector<bool> is_id(header.size(), false);
    int bug_col = -1;
    for (std::size_t c = 0; c < header.size(); ++c) {
        const std::string& h = header[c];
        if (h == schema.bug_column) {
            bug_col = static_cast<int>(c);
            continue;
        }
        for (const auto& id : schema.id_columns) {
            if (h.rfind(id, 0) == 0) {  // recognized by name prefix
                is_id[c] = true;
                break;
            }
        }
    }
    if (bug_col < 0) throw Error(path + ": header has no '" + schema.bug_column + "' column");

    std::size_t metric_cols = 0;
    for (std::size_t c = 0; c < header.size(); ++c)
        if (!is_id[c] && static_cast<int>(c) != bug_col) ++metric_cols;
    if (metric_cols != schema.expected_metrics)
        throw Error(path + ": header declares " + std::to_string(metric_cols) + " metrics, expected " +
                    std::to_string(schema.expected_metrics));

    Dataset ds;
    ds.name = stem_of(path);

    int row = 0;
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        std::vector<std::string> cells = split_csv_line(line);
        if (cells.size() != header.size())
            throw Error(path + ": row " + std::to_string(row + 1) + " has " +
                        std::to_string(cells.size()) + " cells, expected " +
                        std::to_string(header.size()));

        Instance inst;
        inst.features.reserve(schema.expected_metrics);
        double bug = 0.0;
        for (std::size_t c = 0; c < cells.size(); ++c) {
            if (is_id[c]) continue;
            double v;
            if (!parse_double(cells[c], v))
                throw Error(path + ": row " + std::to_string(row + 1) + ", column '" + header[c] +
                            "': non-numeric cell '" + cells[c] + "'");
            if (!std::isfinite(v))
                throw Error(path + ": row " + std::to_string(row + 1) + ", column '" + header[c] +
                            "': non-finite value");
            if (static_cast<int>(c) == bug_col)
                bug = v;
            else
                inst.features.push_back(v);
        }
        inst.label = bug > 0.0;
        inst.origin = {ds.name, row};
        ds.instances.push_back(std::move(inst));
        ++row;
    }
    if (ds.instances.empty()) throw Error(path + ": empty data section");
    return ds;
}

void save_dataset(const Dataset& ds, const std::string& path, const Schema& schema) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write: " + path);

    std::ostringstream header;
    for (const auto& id : schema.id_columns) header << id << ",";
    std::size_t dim = ds.instances.empty() ? schema.expected_metrics : ds.instances[0].features.size();
    for (std::size_t f = 0; f < dim; ++f) header << "m" << f + 1 << ",";
    header << schema.bug_column;
    out << header.str() << "\n";

    char buf[64];
    for (const auto& inst : ds.instances) {
        for (const auto& id : schema.id_columns) {
            (void)id;
            out << ds.name << ",";
        }
        for (double v : inst.features) {
            auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
            (void)ec;
            out.write(buf, ptr - buf);
            out << ",";
        }
        out << (inst.label ? 1 : 0) << "\n";
    }
}

Pool build_pool(const std::vector<Dataset>& datasets, const std::string& holdout) {
    if (datasets.size() < 2) throw Error("build_pool: need at least two datasets");

    bool found = false;
    for (const auto& ds : datasets) found = found || ds.name == holdout;
    if (!found) throw Error("build_pool: unknown holdout '" + holdout + "'");

    Pool pool;
    pool.holdout = holdout;
    for (const auto& ds : datasets) {
        if (ds.name == holdout) continue;
        pool.instances.insert(pool.instances.end(), ds.instances.begin(), ds.instances.end());
    }

    bool has_pos = false, has_neg = false;
    for (const auto& inst : pool.instances) (inst.label ? has_pos : has_neg) = true;
    if (!has_pos || !has_neg)
        throw Error("build_pool: pool for holdout '" + holdout + "' is single-class");
    return pool;
}

Normalizer Normalizer::fit(std::span<const Instance> reference) {
    if (reference.empty()) throw Error("Normalizer::fit: empty reference collection");
    std::size_t dim = reference[0].features.size();
    Normalizer n;
    n.min_.assign(dim, std::numeric_limits<double>::infinity());
    n.max_.assign(dim, -std::numeric_limits<double>::infinity());
    for (const auto& inst : reference) {
        for (std::size_t f = 0; f < dim; ++f) {
            n.min_[f] = std::min(n.min_[f], inst.features[f]);
            n.max_[f] = std::max(n.max_[f], inst.features[f]);
        }
    }
    return n;
}

Normalizer Normalizer::fit_rows(const double* data, std::size_t rows, std::size_t dim) {
    if (rows == 0) throw Error("Normalizer::fit_rows: empty reference collection");
    Normalizer n;
    n.min_.assign(dim, std::numeric_limits<double>::infinity());
    n.max_.assign(dim, -std::numeric_limits<double>::infinity());
    for (std::size_t r = 0; r < rows; ++r) {
        const double* x = data + r * dim;
        for (std::size_t f = 0; f < dim; ++f) {
            n.min_[f] = std::min(n.min_[f], x[f]);
            n.max_[f] = std::max(n.max_[f], x[f]);
        }
    }
    return n;
}

double Normalizer::apply_one(std::size_t f, double v) const {
    double range = max_[f] - min_[f];
    if (range <= 0.0) return 0.0;
    return (v - min_[f]) / range;
}

void Normalizer::apply_features(std::span<const double> in, std::span<double> out) const {
    for (std::size_t f = 0; f < in.size(); ++f) out[f] = apply_one(f, in[f]);
}

Instance Normalizer::apply(const Instance& x) const {
    Instance out = x;
    apply_features(x.features, out.features);
    return out;
}

}  // namespace cpdp
