#include "cpdp/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>

namespace cpdp {

namespace {

enum MetricKind { kCount, kRatio, kSmallInt, kFloat2 };

struct MetricSpec {
    const char* name;
    double base, load, path, coup, coh, noise;
    MetricKind kind;
    double lo, hi;
};

// Object-oriented code metrics. `load` couples the metric to the latent size
// axis; `coup` and `coh` couple it (in units of its own noise) to the latent
// coupling-culture and cohesion-discipline factors that make real metric
// suites strongly collinear; `path` is its response to the pathology axis
// defective classes degrade along; `noise` scales the metric's variability,
// of which only a reduced residual is feature-specific.
constexpr MetricSpec kMetrics[] = {
    {"wmc", 7.0, 9.0, 0.3, 0.4, 0.5, 4.5, kCount, 0, 0},
    {"dit", 2.2, 0.27, 0.0, 0.2, 0.1, 1.0, kSmallInt, 1, 8},
    {"noc", 0.5, 0.33, 0.0, 0.1, 0.1, 1.1, kCount, 0, 0},
    {"cbo", 6.0, 7.0, 0.9, 1.2, 0.2, 3.5, kCount, 0, 0},
    {"rfc", 16.0, 23.0, 0.4, 1.0, 0.4, 10.0, kCount, 0, 0},
    {"lcom", 30.0, 70.0, 1.0, 0.3, 1.3, 40.0, kCount, 0, 0},
    {"ca", 3.5, 0.67, 0.8, 0.9, 0.1, 4.5, kCount, 0, 0},
    {"ce", 4.5, 5.7, 0.9, 1.1, 0.2, 2.8, kCount, 0, 0},
    {"npm", 5.5, 7.0, 0.0, 0.2, 0.3, 3.6, kCount, 0, 0},
    {"lcom3", 1.05, 0.23, 0.9, 0.1, 1.2, 0.28, kRatio, 0, 2},
    {"loc", 140.0, 280.0, 0.2, 0.5, 0.5, 120.0, kCount, 0, 0},
    {"dam", 0.72, -0.17, -0.7, -0.1, -0.8, 0.20, kRatio, 0, 1},
    {"moa", 1.0, 0.9, 0.0, 0.4, 0.2, 1.2, kCount, 0, 0},
    {"mfa", 0.46, -0.07, 0.0, 0.1, -0.3, 0.24, kRatio, 0, 1},
    {"cam", 0.50, -0.13, -0.9, -0.2, -1.1, 0.16, kRatio, 0, 1},
    {"ic", 0.6, 0.3, 0.7, 0.8, 0.2, 0.8, kSmallInt, 0, 5},
    {"cbm", 1.2, 1.0, 0.8, 0.9, 0.3, 1.5, kCount, 0, 0},
    {"amc", 20.0, 10.0, 0.3, 0.4, 0.3, 13.0, kFloat2, 0, 0},
    {"max_cc", 3.5, 6.0, 0.5, 0.5, 0.4, 2.5, kCount, 0, 0},
    {"avg_cc", 1.15, 0.8, 0.6, 0.4, 0.4, 0.5, kFloat2, 0, 0},
};
constexpr std::size_t kMetricCount = sizeof(kMetrics) / sizeof(kMetrics[0]);

double shape(const MetricSpec& m, double v) {
    switch (m.kind) {
        case kCount: return std::max(0.0, std::round(v));
        case kRatio: return std::round(std::clamp(v, m.lo, m.hi) * 1000.0) / 1000.0;
        case kSmallInt: return std::clamp(std::round(v), m.lo, m.hi);
        case kFloat2: return std::round(std::max(0.0, v) * 100.0) / 100.0;
    }
    return v;
}

// Typical severity of a defective class along its pathology direction, and
// the residual stress of clean classes. The distributions overlap on
// purpose: single metrics grade code health, they do not separate it.
constexpr double kDefectSevMean = 1.05;
constexpr double kDefectSevSd = 0.55;
constexpr double kCleanSevSd = 0.42;
constexpr double kShellLo = 0.30;
constexpr double kShellHi = 0.70;
// Pathology directions share a strong positive lean (coupling and cohesion
// decay travel together) with per-class wobble.
constexpr double kDirBias = 1.0;
constexpr double kDirSpread = 0.4;
// Share of each metric's variability that is feature-specific rather than
// carried by the shared latent factors.
constexpr double kResidShare = 0.5;

// How far island corners sit from the healthy core, in units of each
// affected metric's noise. Twin rows use the same distance so the healthy
// descendants of island code land in the same corner.
constexpr double kIslandOffset = 3.0;
constexpr double kIslandSpanLo = 0.9;
constexpr double kIslandSpanHi = 2.6;

// Corner directions for legacy-island code, over design-shape metrics the
// pathology axis leaves alone (dit, noc, npm, moa, mfa). Each style is one
// recognizable architectural idiom, and an idiom can recur across projects.
// The last two styles mark churned subsystems instead of islands: the same
// palette, but used at a fraction of the island distance.
constexpr double kOffsetStyles[5][kMetricCount] = {
    // interface bloat: deep, method-heavy, aggregation-rich classes
    {0, 1.2, 0.6, 0, 0, 0, 0, 0, 1.5, 0, 0, 0, 1.3, 0.4, 0, 0, 0, 0, 0, 0},
    // generated parsers: child-heavy flat classes, few public methods
    {0, 0.8, 1.5, 0, 0, 0, 0, 0, -1.2, 0, 0, 0, 0.9, 0.5, 0, 0, 0, 0, 0, 0},
    // utility sprawl: wide public surface, shallow, little aggregation
    {0, -0.9, 1.1, 0, 0, 0, 0, 0, 1.4, 0, 0, 0, -0.8, 0.7, 0, 0, 0, 0, 0, 0},
    // churn styles: event plumbing and config glue, the perpetually edited
    // corners of a maintained codebase
    {0, 1.1, -0.8, 0, 0, 0, 0, 0, 1.2, 0, 0, 0, -1.0, 0.9, 0, 0, 0, 0, 0, 0},
    {0, -0.9, 1.2, 0, 0, 0, 0, 0, -1.1, 0, 0, 0, 0.8, -0.9, 0, 0, 0, 0, 0, 0},
};
constexpr int kStyleCount = 5;

// Churned code sits much closer to the healthy core than island corners do,
// and its defect labels carry no metric signal at all: for every defective
// fog row there is a clean one at the same spot.
constexpr double kFogOffset = 1.3;

}  // namespace

std::vector<SynthProjectSpec> corpus_specs() {
    std::vector<SynthProjectSpec> specs;
    auto add = [&specs](const char* name, int n, int defects) -> SynthProjectSpec& {
        SynthProjectSpec s;
        s.name = name;
        s.instances = n;
        s.defects = defects;
        specs.push_back(std::move(s));
        return specs.back();
    };
    // Islands are end-of-line releases in which one structurally distinctive
    // subsystem is pervasively defective: the defect class sits in its own
    // corner of metric space and its severity covers the whole stressed
    // band rather than clustering. Maintained projects embed the later,
    // repaired descendants of those same subsystems as twins: rows with the
    // island's shape but a healthy label. Cross-project similarity treats
    // look-alikes as equals; whether that helps or hurts depends on whose
    // labels travel with the shape.
    auto island = [](SynthProjectSpec& s, int style) {
        s.defect_offset = kIslandOffset;
        s.offset_style = style;
        s.span_lo = kIslandSpanLo;
        s.span_hi = kIslandSpanHi;
        s.hidden_share = 0.02;
        s.shell_share = 0.03;
    };

    {
        SynthProjectSpec& s = add("ant-1.7", 745, 166);
        s.twins = {{2, 55}};
        s.fog = {{3, 35}, {4, 35}};
    }
    {
        SynthProjectSpec& s = add("camel-1.6", 965, 188);
        s.twins = {{1, 45}};
        s.fog = {{3, 40}, {4, 40}};
    }
    {
        SynthProjectSpec& s = add("ivy-2.0", 352, 40);
        s.twins = {{0, 25}, {2, 20}};
        s.fog = {{3, 9}, {4, 9}};
    }
    {
        // jedit-4.3: a mature release whose few remaining defects are subtle
        // logic errors in otherwise sound classes, so they are metrically
        // invisible and every predictor collapses on it.
        SynthProjectSpec& s = add("jedit-4.3", 492, 11);
        s.hidden_share = 0.95;
        s.shell_share = 0.04;
    }
    island(add("log4j-1.2", 205, 189), 0);
    island(add("lucene-2.4", 340, 203), 2);
    specs.back().twins = {{0, 10}};
    island(add("poi-3.0", 442, 281), 2);
    {
        SynthProjectSpec& s = add("prop-6.0", 660, 66);
        s.twins = {{2, 40}};
        s.fog = {{3, 15}, {4, 15}};
    }
    island(add("synapse-1.2", 256, 86), 1);
    {
        SynthProjectSpec& s = add("tomcat-6.0", 885, 77);
        s.twins = {{1, 35}, {2, 20}};
        s.fog = {{3, 18}, {4, 17}};
    }
    island(add("velocity-1.6", 229, 78), 2);
    specs.back().twins = {{1, 5}};
    island(add("xalan-2.7", 885, 411), 2);
    specs.back().twins = {{0, 30}};
    island(add("xerces-1.4", 588, 437), 1);
    specs.back().twins = {{0, 15}};
    return specs;
}

Dataset synth_project(const SynthProjectSpec& spec, Rng& rng) {
    Dataset ds;
    ds.name = spec.name;
    int n = spec.instances;

    // Mild per-project recalibration of every metric, so projects overlap
    // without being identically distributed.
    double base_jitter[kMetricCount], load_jitter[kMetricCount];
    for (std::size_t f = 0; f < kMetricCount; ++f) {
        base_jitter[f] = rng.uniform(0.95, 1.05);
        load_jitter[f] = rng.uniform(0.92, 1.08);
    }

    std::vector<char> is_defect(static_cast<std::size_t>(n), 0);
    {
        std::vector<int> scratch;
        for (int i : rng.sample_without_replacement(n, spec.defects, scratch))
            is_defect[static_cast<std::size_t>(i)] = 1;
    }

    // Hand the requested number of clean rows to each twin block.
    std::vector<int> twin_style(static_cast<std::size_t>(n), -1);
    {
        std::vector<int> cleans;
        for (int i = 0; i < n; ++i)
            if (!is_defect[static_cast<std::size_t>(i)]) cleans.push_back(i);
        int total = 0;
        for (const auto& [style, count] : spec.twins) {
            if (style < 0 || style >= kStyleCount) throw Error("bad twin style in " + spec.name);
            total += count;
        }
        if (total > int(cleans.size()))
            throw Error("twin plan exceeds clean rows in " + spec.name);
        if (total > 0) {
            std::vector<int> scratch;
            std::vector<int> pick =
                rng.sample_without_replacement(int(cleans.size()), total, scratch);
            std::size_t at = 0;
            for (const auto& [style, count] : spec.twins)
                for (int j = 0; j < count; ++j)
                    twin_style[static_cast<std::size_t>(cleans[std::size_t(pick[at++])])] = style;
        }
    }

    // Churn fog converts matched clean/defective row pairs into co-located
    // rows near the core, so the label adds no information there.
    std::vector<int> fog_style(static_cast<std::size_t>(n), -1);
    if (!spec.fog.empty()) {
        std::vector<int> cleans, defects;
        for (int i = 0; i < n; ++i) {
            if (is_defect[std::size_t(i)])
                defects.push_back(i);
            else if (twin_style[std::size_t(i)] < 0)
                cleans.push_back(i);
        }
        int total = 0;
        for (const auto& [style, count] : spec.fog) {
            if (style < 0 || style >= kStyleCount) throw Error("bad fog style in " + spec.name);
            total += count;
        }
        if (total > int(cleans.size()) || total > int(defects.size()))
            throw Error("fog plan exceeds available rows in " + spec.name);
        std::vector<int> scratch;
        std::vector<int> pick_c =
            rng.sample_without_replacement(int(cleans.size()), total, scratch);
        std::vector<int> pick_d =
            rng.sample_without_replacement(int(defects.size()), total, scratch);
        std::size_t at = 0;
        for (const auto& [style, count] : spec.fog)
            for (int j = 0; j < count; ++j, ++at) {
                fog_style[std::size_t(cleans[std::size_t(pick_c[at])])] = style;
                fog_style[std::size_t(defects[std::size_t(pick_d[at])])] = style;
            }
    }

    ds.instances.resize(std::size_t(n));
    for (int i = 0; i < n; ++i) {
        bool defect = is_defect[std::size_t(i)] != 0;
        bool fogged = fog_style[std::size_t(i)] >= 0;
        double z = rng.normal(0.30, 0.22);
        double coup_factor = rng.normal(0.0, 1.0);
        double coh_factor = rng.normal(0.0, 1.0);
        double sev;
        if (fogged) {
            sev = std::fabs(rng.normal(0.0, kCleanSevSd));
        } else if (defect) {
            double u = rng.uniform();
            if (u < spec.hidden_share) {
                sev = std::fabs(rng.normal(0.0, kCleanSevSd));
            } else if (u < spec.hidden_share + spec.shell_share) {
                sev = rng.uniform(kShellLo, kShellHi);
            } else if (spec.span_hi > 0.0) {
                sev = rng.uniform(spec.span_lo, spec.span_hi);
            } else {
                sev = std::max(0.05, rng.normal(kDefectSevMean, kDefectSevSd));
            }
        } else {
            sev = std::fabs(rng.normal(0.0, kCleanSevSd));
        }

        int style = -1;
        double off = 0.0;
        if (fogged) {
            style = fog_style[std::size_t(i)];
            off = kFogOffset * rng.uniform(0.85, 1.15);
        } else if (defect && spec.defect_offset > 0.0) {
            style = spec.offset_style;
            off = spec.defect_offset * rng.uniform(0.7, 1.3);
        } else if (!defect && twin_style[std::size_t(i)] >= 0) {
            style = twin_style[std::size_t(i)];
            off = kIslandOffset * rng.uniform(0.7, 1.3);
        }

        Instance& inst = ds.instances[std::size_t(i)];
        inst.features.resize(kMetricCount);
        for (std::size_t f = 0; f < kMetricCount; ++f) {
            const MetricSpec& m = kMetrics[f];
            double dir = rng.normal(kDirBias, kDirSpread);
            double v = m.base * base_jitter[f] + z * m.load * load_jitter[f] +
                       (coup_factor * m.coup + coh_factor * m.coh) * m.noise +
                       sev * m.path * m.noise * dir +
                       rng.normal(0.0, m.noise * kResidShare);
            if (style >= 0) v += off * kOffsetStyles[style][f] * m.noise;
            inst.features[f] = shape(m, v);
        }
        inst.label = defect;
        inst.origin = {ds.name, i};
    }
    return ds;
}

void write_corpus(const std::string& dir, std::uint64_t seed) {
    std::vector<SynthProjectSpec> specs = corpus_specs();

    {
        std::ofstream schema(dir + "/schema.json");
        if (!schema) throw Error("cannot write schema manifest in " + dir);
        schema << "{\n"
                  "  \"id_columns\": [\"name\", \"version\", \"classname\"],\n"
                  "  \"bug_column\": \"bug\",\n"
                  "  \"metric_count\": 20\n"
                  "}\n";
    }

    for (const auto& spec : specs) {
        Rng rng(SeedMixer(seed).add("corpus").add(spec.name).value());
        Dataset ds = synth_project(spec, rng);

        std::string path = dir + "/" + spec.name + ".csv";
        std::ofstream out(path);
        if (!out) throw Error("cannot write: " + path);

        out << "name,version,classname";
        for (const auto& m : kMetrics) out << "," << m.name;
        out << ",bug\n";

        std::size_t dash = spec.name.find_last_of('-');
        std::string proj = spec.name.substr(0, dash);
        std::string version = spec.name.substr(dash + 1);

        char buf[64];
        for (int i = 0; i < spec.instances; ++i) {
            const Instance& inst = ds.instances[std::size_t(i)];
            out << proj << "," << version << ",";
            std::snprintf(buf, sizeof buf, "org.%s.C%04d", proj.c_str(), i);
            out << buf;
            for (std::size_t f = 0; f < kMetricCount; ++f) {
                double v = inst.features[f];
                if (kMetrics[f].kind == kCount || kMetrics[f].kind == kSmallInt)
                    std::snprintf(buf, sizeof buf, ",%d", int(v));
                else if (kMetrics[f].kind == kRatio)
                    std::snprintf(buf, sizeof buf, ",%.3f", v);
                else
                    std::snprintf(buf, sizeof buf, ",%.2f", v);
                out << buf;
            }
            int bug = 0;
            if (inst.label) {
                bug = 1;
                while (bug < 9 && rng.bernoulli(0.25)) ++bug;
            }
            out << "," << bug << "\n";
        }
    }
}

}  // namespace cpdp
