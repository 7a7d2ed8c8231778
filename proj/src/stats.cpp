#include "cpdp/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "cpdp/data_io.hpp"
#include "cpdp/mathutil.hpp"

namespace cpdp {

namespace {

double cohens_d(std::span<const double> a, std::span<const double> b) {
    double na = double(a.size()), nb = double(b.size());
    double ma = mean(a), mb = mean(b);
    double va = a.size() > 1 ? variance(a) : 0.0;
    double vb = b.size() > 1 ? variance(b) : 0.0;
    double pooled = std::sqrt(((na - 1.0) * va + (nb - 1.0) * vb) / (na + nb - 2.0));
    if (pooled <= 0.0)
        return ma == mb ? 0.0 : std::numeric_limits<double>::infinity();
    return std::abs(ma - mb) / pooled;
}

struct Splitter {
    const std::vector<TreatmentSample>& treatments;  // sorted by mean, descending
    const std::vector<double>& means;
    double alpha, negligible_d;
    // Residual degrees of freedom and the sampling variance of a treatment
    // mean (pooled within-treatment MSE / replications), fixed for the whole
    // recursion as in the original mean-clustering procedure.
    double nu, var_mean;
    std::vector<std::pair<std::size_t, std::size_t>> groups;

    void run(std::size_t lo, std::size_t hi) {
        std::size_t k = hi - lo;
        if (k >= 2 && try_split(lo, hi)) return;
        groups.emplace_back(lo, hi);
    }

    bool try_split(std::size_t lo, std::size_t hi) {
        double k = double(hi - lo);
        double m = 0.0;
        for (std::size_t i = lo; i < hi; ++i) m += means[i];
        m /= k;
        double scatter = 0.0;
        for (std::size_t i = lo; i < hi; ++i) scatter += (means[i] - m) * (means[i] - m);
        double sigma0sq = (scatter + nu * var_mean) / (k + nu);
        if (sigma0sq <= 0.0) return false;

        // Best binary split = the one maximizing the between-group sum of
        // squares of the treatment means.
        double best_b0 = -1.0;
        std::size_t best_s = lo;
        for (std::size_t s = lo + 1; s < hi; ++s) {
            double m1 = 0.0, m2 = 0.0;
            for (std::size_t i = lo; i < s; ++i) m1 += means[i];
            for (std::size_t i = s; i < hi; ++i) m2 += means[i];
            m1 /= double(s - lo);
            m2 /= double(hi - s);
            double b0 =
                double(s - lo) * (m1 - m) * (m1 - m) + double(hi - s) * (m2 - m) * (m2 - m);
            if (b0 > best_b0) {
                best_b0 = b0;
                best_s = s;
            }
        }

        double lambda = M_PI / (2.0 * (M_PI - 2.0)) * best_b0 / sigma0sq;
        double df = k / (M_PI - 2.0);
        if (lambda <= chi2_quantile(1.0 - alpha, df)) return false;

        if (std::isinf(negligible_d)) return false;
        std::vector<double> left, right;
        for (std::size_t i = lo; i < best_s; ++i)
            left.insert(left.end(), treatments[i].values.begin(), treatments[i].values.end());
        for (std::size_t i = best_s; i < hi; ++i)
            right.insert(right.end(), treatments[i].values.begin(), treatments[i].values.end());
        if (cohens_d(left, right) < negligible_d) return false;

        run(lo, best_s);
        run(best_s, hi);
        return true;
    }
};

}  // namespace

std::vector<RankGroup> scott_knott_esd(std::vector<TreatmentSample> treatments, double alpha,
                                       double negligible_d) {
    if (treatments.empty()) throw Error("scott_knott_esd: no treatments");
    for (const auto& t : treatments) {
        if (t.values.size() < 2)
            throw Error("scott_knott_esd: treatment '" + t.name + "' has fewer than 2 values");
        for (double v : t.values)
            if (!std::isfinite(v))
                throw Error("scott_knott_esd: treatment '" + t.name + "' has a non-finite value");
    }

    std::vector<double> means(treatments.size());
    for (std::size_t i = 0; i < treatments.size(); ++i) means[i] = mean(treatments[i].values);

    std::vector<std::size_t> order(treatments.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (means[a] != means[b]) return means[a] > means[b];
        return treatments[a].name < treatments[b].name;
    });
    std::vector<TreatmentSample> sorted;
    std::vector<double> sorted_means;
    for (std::size_t i : order) {
        sorted.push_back(std::move(treatments[i]));
        sorted_means.push_back(means[i]);
    }

    double nu = 0.0, sse = 0.0, rbar = 0.0;
    for (const TreatmentSample& t : sorted) {
        nu += double(t.values.size() - 1);
        sse += double(t.values.size() - 1) * variance(t.values);
        rbar += double(t.values.size());
    }
    rbar /= double(sorted.size());
    const double var_mean = nu > 0.0 ? sse / nu / rbar : 0.0;

    Splitter sp{sorted, sorted_means, alpha, negligible_d, nu, var_mean, {}};
    sp.run(0, sorted.size());
    std::sort(sp.groups.begin(), sp.groups.end());

    std::vector<RankGroup> out;
    for (std::size_t g = 0; g < sp.groups.size(); ++g) {
        auto [lo, hi] = sp.groups[g];
        RankGroup rg;
        rg.rank = int(g) + 1;
        rg.mean_lo = sorted_means[hi - 1];
        rg.mean_hi = sorted_means[lo];
        for (std::size_t i = lo; i < hi; ++i) rg.members.push_back(sorted[i].name);
        out.push_back(std::move(rg));
    }
    return out;
}

double cliffs_delta(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || b.empty()) throw Error("cliffs_delta: empty sample");
    std::vector<double> sb(b.begin(), b.end());
    std::sort(sb.begin(), sb.end());
    long long net = 0;
    for (double x : a) {
        auto less = std::lower_bound(sb.begin(), sb.end(), x) - sb.begin();
        auto greater = sb.end() - std::upper_bound(sb.begin(), sb.end(), x);
        net += less - greater;
    }
    return double(net) / (double(a.size()) * double(b.size()));
}

Magnitude magnitude(double d) {
    double a = std::abs(d);
    if (a > 1.0 + 1e-12) throw Error("magnitude: |delta| exceeds 1");
    if (a < 0.147) return Magnitude::negligible;
    if (a < 0.33) return Magnitude::small;
    if (a < 0.474) return Magnitude::medium;
    return Magnitude::large;
}

const char* magnitude_name(Magnitude m) {
    switch (m) {
        case Magnitude::negligible: return "negligible";
        case Magnitude::small: return "small";
        case Magnitude::medium: return "medium";
        case Magnitude::large: return "large";
    }
    return "?";
}

}  // namespace cpdp
