#pragma once

#include <span>
#include <string>
#include <vector>

namespace cpdp {

struct TreatmentSample {
    std::string name;
    std::vector<double> values;
};

struct RankGroup {
    int rank = 1;  // 1 = best (highest means)
    std::vector<std::string> members;
    double mean_lo = 0.0, mean_hi = 0.0;  // range of member means
};

// Scott-Knott clustering of treatment means with an effect-size gate: a split
// must be significant under the chi-square approximation at `alpha` AND have
// |Cohen's d| >= negligible_d between the two sides' pooled values.
std::vector<RankGroup> scott_knott_esd(std::vector<TreatmentSample> treatments,
                                       double alpha = 0.05, double negligible_d = 0.2);

// (#pairs a>b - #pairs a<b) / (|a|*|b|).
double cliffs_delta(std::span<const double> a, std::span<const double> b);

enum class Magnitude { negligible, small, medium, large };

Magnitude magnitude(double d);
const char* magnitude_name(Magnitude m);

}  // namespace cpdp
