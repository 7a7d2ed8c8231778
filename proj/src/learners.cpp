#include "cpdp/learners.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "cpdp/mathutil.hpp"

namespace cpdp {

const char* kind_name(LearnerKind kind) {
    switch (kind) {
        case LearnerKind::naive_bayes: return "NB";
        case LearnerKind::logistic: return "LOG";
        case LearnerKind::tree: return "J48";
    }
    return "?";
}

double LearnerSpec::param(const std::string& key, double fallback) const {
    auto it = params.find(key);
    return it == params.end() ? fallback : it->second;
}

std::string LearnerSpec::describe() const {
    std::string s = kind_name(kind);
    if (params.empty()) return s;
    s += "(";
    bool first = true;
    for (const auto& [k, v] : params) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%s%s=%g", first ? "" : ",", k.c_str(), v);
        s += buf;
        first = false;
    }
    s += ")";
    return s;
}

LearnerSpec default_spec(LearnerKind kind) {
    LearnerSpec s;
    s.kind = kind;
    switch (kind) {
        case LearnerKind::naive_bayes: s.params = {{"discretize", 0}}; break;
        case LearnerKind::logistic: s.params = {{"ridge", 1e-8}}; break;
        case LearnerKind::tree: s.params = {{"conf", 0.25}, {"min_leaf", 2}}; break;
    }
    return s;
}

std::vector<LearnerSpec> grid(LearnerKind kind) {
    std::vector<LearnerSpec> out;
    out.push_back(default_spec(kind));
    switch (kind) {
        case LearnerKind::naive_bayes:
            out.push_back({kind, {{"discretize", 1}}});
            break;
        case LearnerKind::logistic:
            for (double r : {1e-4, 1e-2, 1.0, 10.0}) out.push_back({kind, {{"ridge", r}}});
            break;
        case LearnerKind::tree:
            for (double leaf : {2.0, 5.0, 10.0, 20.0})
                for (double conf : {0.1, 0.25, 0.5}) {
                    if (leaf == 2.0 && conf == 0.25) continue;
                    out.push_back({kind, {{"conf", conf}, {"min_leaf", leaf}}});
                }
            break;
    }
    return out;
}

Matrix to_matrix(std::span<const Instance> data) {
    Matrix m(data.size(), data.empty() ? 0 : data[0].features.size());
    for (std::size_t i = 0; i < data.size(); ++i)
        std::copy(data[i].features.begin(), data[i].features.end(), m.row(i));
    return m;
}

std::vector<std::uint8_t> to_labels(std::span<const Instance> data) {
    std::vector<std::uint8_t> y(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) y[i] = data[i].label ? 1 : 0;
    return y;
}

namespace {

constexpr double kVarFloor = 1e-9;

double entropy2(double n0, double n1) {
    double n = n0 + n1;
    if (n <= 0.0) return 0.0;
    double e = 0.0;
    if (n0 > 0.0) e -= (n0 / n) * std::log2(n0 / n);
    if (n1 > 0.0) e -= (n1 / n) * std::log2(n1 / n);
    return e;
}

// ---- naive Bayes -----------------------------------------------------------

// Recursive entropy splitting with the MDL acceptance test; a global cap on
// the number of bins keeps degenerate features from fragmenting.
void split_range(const std::vector<std::pair<double, std::uint8_t>>& a, std::size_t lo,
                 std::size_t hi, int& bins, int cap, std::vector<double>& cuts) {
    std::size_t n = hi - lo;
    if (n < 2 || bins >= cap) return;
    double c0 = 0, c1 = 0;
    for (std::size_t i = lo; i < hi; ++i) (a[i].second ? c1 : c0) += 1;
    if (c0 == 0 || c1 == 0) return;
    double ent = entropy2(c0, c1);

    double best_gain = 0.0, bl0 = 0, bl1 = 0;
    std::size_t best_i = 0;
    double l0 = 0, l1 = 0;
    for (std::size_t i = lo + 1; i < hi; ++i) {
        (a[i - 1].second ? l1 : l0) += 1;
        if (a[i - 1].first >= a[i].first) continue;
        double r0 = c0 - l0, r1 = c1 - l1;
        double nl = l0 + l1, nr = r0 + r1;
        double gain =
            ent - (nl / n) * entropy2(l0, l1) - (nr / n) * entropy2(r0, r1);
        if (gain > best_gain + 1e-12) {
            best_gain = gain;
            best_i = i;
            bl0 = l0;
            bl1 = l1;
        }
    }
    if (best_i == 0) return;

    double br0 = c0 - bl0, br1 = c1 - bl1;
    double ent_l = entropy2(bl0, bl1), ent_r = entropy2(br0, br1);
    int k = 2, k1 = (bl0 > 0) + (bl1 > 0), k2 = (br0 > 0) + (br1 > 0);
    double delta = std::log2(std::pow(3.0, k) - 2.0) - (k * ent - k1 * ent_l - k2 * ent_r);
    if (best_gain <= (std::log2(double(n) - 1.0) + delta) / double(n)) return;

    cuts.push_back((a[best_i - 1].first + a[best_i].first) / 2.0);
    ++bins;
    split_range(a, lo, best_i, bins, cap, cuts);
    split_range(a, best_i, hi, bins, cap, cuts);
}

std::vector<double> discretize_cuts(std::vector<std::pair<double, std::uint8_t>>& vals) {
    std::sort(vals.begin(), vals.end());
    std::vector<double> cuts;
    int bins = 1;
    split_range(vals, 0, vals.size(), bins, 10, cuts);
    std::sort(cuts.begin(), cuts.end());
    return cuts;
}

std::size_t bin_of(const std::vector<double>& cuts, double v) {
    return static_cast<std::size_t>(std::upper_bound(cuts.begin(), cuts.end(), v) -
                                    cuts.begin());
}

NbModel train_nb(const Matrix& x, std::span<const std::uint8_t> y, bool discretize) {
    NbModel m;
    m.discretized = discretize;
    std::size_t n = x.rows, d = x.cols;
    double cnt[2] = {0, 0};
    for (std::size_t i = 0; i < n; ++i) cnt[y[i]] += 1;
    for (int c = 0; c < 2; ++c) {
        m.class_seen[c] = cnt[c] > 0;
        m.log_prior[c] = std::log((cnt[c] + 1.0) / (double(n) + 2.0));
    }

    if (!discretize) {
        for (int c = 0; c < 2; ++c) {
            m.mean[c].assign(d, 0.0);
            m.var[c].assign(d, kVarFloor);
        }
        std::vector<double> sum[2], sumsq[2];
        for (int c = 0; c < 2; ++c) {
            sum[c].assign(d, 0.0);
            sumsq[c].assign(d, 0.0);
        }
        for (std::size_t i = 0; i < n; ++i) {
            const double* xi = x.row(i);
            int c = y[i];
            for (std::size_t f = 0; f < d; ++f) {
                sum[c][f] += xi[f];
                sumsq[c][f] += xi[f] * xi[f];
            }
        }
        for (int c = 0; c < 2; ++c) {
            if (cnt[c] < 1) continue;
            for (std::size_t f = 0; f < d; ++f) {
                double mu = sum[c][f] / cnt[c];
                m.mean[c][f] = mu;
                if (cnt[c] >= 2) {
                    double v = (sumsq[c][f] - cnt[c] * mu * mu) / (cnt[c] - 1.0);
                    m.var[c][f] = std::max(v, kVarFloor);
                }
            }
        }
        return m;
    }

    m.cuts.resize(d);
    for (int c = 0; c < 2; ++c) m.log_bin[c].resize(d);
    std::vector<std::pair<double, std::uint8_t>> vals(n);
    for (std::size_t f = 0; f < d; ++f) {
        for (std::size_t i = 0; i < n; ++i) vals[i] = {x.at(i, f), y[i]};
        m.cuts[f] = discretize_cuts(vals);
        std::size_t nb = m.cuts[f].size() + 1;
        double bc[2][11] = {};
        for (std::size_t i = 0; i < n; ++i) bc[y[i]][bin_of(m.cuts[f], x.at(i, f))] += 1;
        for (int c = 0; c < 2; ++c) {
            m.log_bin[c][f].resize(nb);
            for (std::size_t b = 0; b < nb; ++b)
                m.log_bin[c][f][b] = std::log((bc[c][b] + 1.0) / (cnt[c] + double(nb)));
        }
    }
    return m;
}

bool predict_nb(const NbModel& m, const double* x, std::size_t d) {
    if (!m.class_seen[1]) return false;
    if (!m.class_seen[0]) return true;
    double s[2] = {m.log_prior[0], m.log_prior[1]};
    if (!m.discretized) {
        for (std::size_t f = 0; f < d; ++f)
            for (int c = 0; c < 2; ++c) {
                double diff = x[f] - m.mean[c][f];
                s[c] -= 0.5 * std::log(2.0 * M_PI * m.var[c][f]) +
                        diff * diff / (2.0 * m.var[c][f]);
            }
    } else {
        for (std::size_t f = 0; f < d; ++f) {
            std::size_t b = bin_of(m.cuts[f], x[f]);
            for (int c = 0; c < 2; ++c) s[c] += m.log_bin[c][f][b];
        }
    }
    return s[1] > s[0];
}

// ---- logistic regression ----------------------------------------------------

LogModel train_logistic(const Matrix& x, std::span<const std::uint8_t> y, double ridge) {
    std::size_t n = x.rows, d = x.cols + 1;
    LogModel m;
    m.w.assign(d, 0.0);
    std::vector<double> g(d), h(d * d), delta(d), xa(d);
    double prev_ll = -std::numeric_limits<double>::infinity();

    for (int iter = 0; iter < 100; ++iter) {
        std::fill(g.begin(), g.end(), 0.0);
        std::fill(h.begin(), h.end(), 0.0);
        double ll = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double* xi = x.row(i);
            double eta = m.w[0];
            for (std::size_t f = 0; f < x.cols; ++f) eta += m.w[f + 1] * xi[f];
            eta = std::clamp(eta, -30.0, 30.0);
            double mu = 1.0 / (1.0 + std::exp(-eta));
            double p = std::clamp(mu, 1e-12, 1.0 - 1e-12);
            ll += y[i] ? std::log(p) : std::log(1.0 - p);

            double wi = std::max(mu * (1.0 - mu), 1e-10);
            double resid = double(y[i]) - mu;
            xa[0] = 1.0;
            std::copy(xi, xi + x.cols, xa.begin() + 1);
            for (std::size_t j = 0; j < d; ++j) {
                g[j] += xa[j] * resid;
                double wj = wi * xa[j];
                for (std::size_t k = j; k < d; ++k) h[j * d + k] += wj * xa[k];
            }
        }
        for (std::size_t j = 1; j < d; ++j) {
            ll -= 0.5 * ridge * m.w[j] * m.w[j];
            g[j] -= ridge * m.w[j];
            h[j * d + j] += ridge;
        }
        for (std::size_t j = 0; j < d; ++j)
            for (std::size_t k = 0; k < j; ++k) h[j * d + k] = h[k * d + j];

        if (!cholesky_solve(h, g, d, delta)) break;
        for (std::size_t j = 0; j < d; ++j) m.w[j] += delta[j];

        if (std::abs(ll - prev_ll) < 1e-8 * (std::abs(ll) + 1.0)) break;
        prev_ll = ll;
    }
    return m;
}

bool predict_logistic(const LogModel& m, const double* x, std::size_t d) {
    double eta = m.w[0];
    for (std::size_t f = 0; f < d; ++f) eta += m.w[f + 1] * x[f];
    return eta > 0.0;
}

// ---- decision tree -----------------------------------------------------------

// Pessimistic extra errors for a node covering n cases with e mistakes:
// upper bound of the binomial error rate at confidence cf, normal
// approximation, as in C4.5's error-based pruning.
double added_errors(double n, double e, double z) {
    if (n <= 0.0) return 0.0;
    double f = e / n;
    double z2 = z * z;
    double u = (f + z2 / (2.0 * n) +
                z * std::sqrt(f / n - f * f / n + z2 / (4.0 * n * n))) /
               (1.0 + z2 / n);
    return u * n - e;
}

struct TreeBuilder {
    const Matrix& x;
    std::span<const std::uint8_t> y;
    int min_leaf;
    std::vector<TreeNode> nodes;
    std::vector<std::uint8_t> side;  // scratch keyed by global row id

    TreeBuilder(const Matrix& xm, std::span<const std::uint8_t> ym, int ml)
        : x(xm), y(ym), min_leaf(ml), side(xm.rows, 0) {}

    // cols[f] holds this node's rows ordered by feature f (ties by row id,
    // established once at the root and preserved by stable partitions).
    int build(std::vector<std::vector<std::uint32_t>>& cols) {
        std::size_t n = cols[0].size();
        double c1 = 0;
        for (std::uint32_t r : cols[0]) c1 += y[r];
        double c0 = double(n) - c1;

        int idx = int(nodes.size());
        nodes.emplace_back();
        nodes[idx].label = c1 > c0;
        nodes[idx].n = double(n);
        nodes[idx].e = nodes[idx].label ? c0 : c1;

        if (c0 == 0 || c1 == 0 || n < std::size_t(2 * min_leaf)) return idx;

        double ent = entropy2(c0, c1);
        double best_gain = 1e-12;
        int best_f = -1;
        double best_thr = 0.0;
        for (std::size_t f = 0; f < x.cols; ++f) {
            const auto& ord = cols[f];
            double l0 = 0, l1 = 0;
            for (std::size_t i = 1; i < n; ++i) {
                (y[ord[i - 1]] ? l1 : l0) += 1;
                if (i < std::size_t(min_leaf) || n - i < std::size_t(min_leaf)) continue;
                double va = x.at(ord[i - 1], f), vb = x.at(ord[i], f);
                if (va >= vb) continue;
                double gain = ent - (double(i) / n) * entropy2(l0, l1) -
                              (double(n - i) / n) * entropy2(c0 - l0, c1 - l1);
                if (gain > best_gain) {
                    best_gain = gain;
                    best_f = int(f);
                    best_thr = (va + vb) / 2.0;
                }
            }
        }
        if (best_f < 0) return idx;

        for (std::uint32_t r : cols[best_f])
            side[r] = x.at(r, std::size_t(best_f)) <= best_thr ? 0 : 1;

        std::vector<std::vector<std::uint32_t>> left(x.cols), right(x.cols);
        for (std::size_t f = 0; f < x.cols; ++f) {
            for (std::uint32_t r : cols[f]) (side[r] ? right[f] : left[f]).push_back(r);
            cols[f].clear();
            cols[f].shrink_to_fit();
        }

        nodes[idx].feature = best_f;
        nodes[idx].threshold = best_thr;
        int l = build(left);
        int r = build(right);
        nodes[idx].left = l;
        nodes[idx].right = r;
        return idx;
    }

    // Returns the pessimistic error of the (possibly replaced) subtree.
    double prune(int idx, double z) {
        TreeNode& nd = nodes[idx];
        if (nd.feature < 0) return nd.e + added_errors(nd.n, nd.e, z);
        double subtree = prune(nd.left, z) + prune(nd.right, z);
        double as_leaf = nd.e + added_errors(nd.n, nd.e, z);
        if (as_leaf <= subtree + 0.1) {
            nd.feature = -1;
            nd.left = nd.right = -1;
            return as_leaf;
        }
        return subtree;
    }
};

TreeModel train_tree(const Matrix& x, std::span<const std::uint8_t> y, int min_leaf,
                     double conf) {
    TreeBuilder b(x, y, min_leaf);
    std::vector<std::vector<std::uint32_t>> cols(x.cols);
    for (std::size_t f = 0; f < x.cols; ++f) {
        auto& ord = cols[f];
        ord.resize(x.rows);
        for (std::uint32_t r = 0; r < x.rows; ++r) ord[r] = r;
        std::stable_sort(ord.begin(), ord.end(), [&](std::uint32_t a, std::uint32_t c) {
            return x.at(a, f) < x.at(c, f);
        });
    }
    b.build(cols);
    b.prune(0, probit(1.0 - conf));
    TreeModel m;
    m.nodes = std::move(b.nodes);
    return m;
}

bool predict_tree(const TreeModel& m, const double* x) {
    int idx = 0;
    while (m.nodes[idx].feature >= 0) {
        const TreeNode& nd = m.nodes[idx];
        idx = x[nd.feature] <= nd.threshold ? nd.left : nd.right;
    }
    return m.nodes[idx].label;
}

}  // namespace

TrainedModel train(const LearnerSpec& spec, const Matrix& x, std::span<const std::uint8_t> y) {
    if (x.rows == 0) throw Error("train: empty training data");
    if (x.rows != y.size()) throw Error("train: feature/label row count mismatch");

    TrainedModel tm;
    tm.kind_ = spec.kind;
    tm.norm_ = Normalizer::fit_rows(x.data.data(), x.rows, x.cols);

    Matrix xn(x.rows, x.cols);
    for (std::size_t i = 0; i < x.rows; ++i)
        tm.norm_.apply_features({x.row(i), x.cols}, {xn.row(i), x.cols});

    switch (spec.kind) {
        case LearnerKind::naive_bayes:
            tm.model_ = train_nb(xn, y, spec.param("discretize", 0) != 0);
            break;
        case LearnerKind::logistic:
            tm.model_ = train_logistic(xn, y, spec.param("ridge", 1e-8));
            break;
        case LearnerKind::tree:
            tm.model_ = train_tree(xn, y, int(spec.param("min_leaf", 2)),
                                   spec.param("conf", 0.25));
            break;
    }
    return tm;
}

TrainedModel train(const LearnerSpec& spec, std::span<const Instance> data) {
    Matrix x = to_matrix(data);
    std::vector<std::uint8_t> y = to_labels(data);
    return train(spec, x, y);
}

bool TrainedModel::predict_normalized(const double* x) const {
    switch (kind_) {
        case LearnerKind::naive_bayes:
            return predict_nb(std::get<NbModel>(model_), x, norm_.dim());
        case LearnerKind::logistic:
            return predict_logistic(std::get<LogModel>(model_), x, norm_.dim());
        case LearnerKind::tree:
            return predict_tree(std::get<TreeModel>(model_), x);
    }
    return false;
}

bool TrainedModel::predict_one(std::span<const double> raw_features) const {
    if (raw_features.size() != dim())
        throw Error("predict: expected " + std::to_string(dim()) + " features, got " +
                    std::to_string(raw_features.size()));
    std::vector<double> xn(dim());
    norm_.apply_features(raw_features, xn);
    return predict_normalized(xn.data());
}

std::vector<bool> TrainedModel::predict(std::span<const Instance> test) const {
    std::vector<bool> out(test.size());
    std::vector<double> xn(dim());
    for (std::size_t i = 0; i < test.size(); ++i) {
        if (test[i].features.size() != dim())
            throw Error("predict: expected " + std::to_string(dim()) + " features, got " +
                        std::to_string(test[i].features.size()));
        norm_.apply_features(test[i].features, xn);
        out[i] = predict_normalized(xn.data());
    }
    return out;
}

void TrainedModel::predict_rows(const Matrix& x, std::vector<std::uint8_t>& out) const {
    if (x.cols != dim()) throw Error("predict: feature arity mismatch");
    out.resize(x.rows);
    std::vector<double> xn(dim());
    for (std::size_t i = 0; i < x.rows; ++i) {
        norm_.apply_features({x.row(i), x.cols}, xn);
        out[i] = predict_normalized(xn.data()) ? 1 : 0;
    }
}

Measures evaluate(const TrainedModel& model, const Matrix& x, std::span<const std::uint8_t> y) {
    std::vector<std::uint8_t> pred;
    model.predict_rows(x, pred);
    return measures(confusion(y, pred));
}

}  // namespace cpdp
