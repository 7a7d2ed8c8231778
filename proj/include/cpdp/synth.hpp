#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "cpdp/data_io.hpp"
#include "cpdp/rng.hpp"

namespace cpdp {

// Recipe for one generated project. Clean classes form one tight, healthy
// core in metric space; defective classes degrade away from that core along
// per-class pathology directions, some barely (a borderline shell around the
// core) and some severely. `hidden_share` of the defects are metrically
// indistinguishable from clean classes and `shell_share` sit in the
// borderline shell. The defect count per project is exact.
//
// Legacy-island projects additionally displace their defects wholesale into a
// project-specific corner of metric space: `offset_style` picks the corner
// direction, `defect_offset` its distance from the core, and the defect
// severity is spread uniformly over [span_lo, span_hi] instead of clustering
// around the corpus-wide mean. Other projects can carry the healthy
// descendants of an island's code base: each {style, count} entry in `twins`
// converts that many clean rows into island look-alikes — same corner of
// metric space, healthy severity.
// Churned subsystems are modeled as fog: pairs of clean and defective rows
// at the same mildly displaced spot in metric space, where the defect label
// is effectively a coin flip at the metrics' resolution.
struct SynthProjectSpec {
    std::string name;
    int instances = 0;
    int defects = 0;
    double hidden_share = 0.06;  // defects that look clean
    double shell_share = 0.12;   // defects barely outside the healthy core
    double defect_offset = 0.0;  // island corner distance (0 = not an island)
    int offset_style = 0;        // which metric mix forms the corner
    double span_lo = 0.0;        // island defect severity range
    double span_hi = 0.0;
    std::vector<std::pair<int, int>> twins;  // {corner style, clean-row count}
    std::vector<std::pair<int, int>> fog;    // {style, row count per label}
};

// The 13-project corpus layout with per-project instance and defect counts.
std::vector<SynthProjectSpec> corpus_specs();

Dataset synth_project(const SynthProjectSpec& spec, Rng& rng);

// Writes <name>.csv for every corpus project plus schema.json into dir.
void write_corpus(const std::string& dir, std::uint64_t seed);

}  // namespace cpdp
