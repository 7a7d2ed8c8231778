#include "cpdp/kernels.hpp"

#include <algorithm>
#include <stdexcept>
#include <utility>

namespace cpdp {

namespace {

double sq_dist(const double* a, const double* b, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

// Keeps the k smallest (dist, index) pairs seen so far, sorted ascending.
// k is small (<= 10 in every caller), so insertion into a flat array beats
// a heap here.
void knn_one(const double* q, const Matrix& refs, std::size_t k, std::uint32_t* out) {
    std::vector<std::pair<double, std::uint32_t>> best;
    best.reserve(k + 1);
    for (std::uint32_t r = 0; r < refs.rows; ++r) {
        double d = sq_dist(q, refs.row(r), refs.cols);
        if (best.size() == k && d >= best.back().first) continue;
        auto pos = std::upper_bound(best.begin(), best.end(), std::make_pair(d, r));
        best.insert(pos, {d, r});
        if (best.size() > k) best.pop_back();
    }
    for (std::size_t i = 0; i < k; ++i) out[i] = best[i].second;
}

}  // namespace

void knn_indices(const Matrix& queries, const Matrix& refs, std::size_t k,
                 std::vector<std::uint32_t>& out) {
    if (k == 0 || k > refs.rows) throw std::invalid_argument("knn_indices: bad k");
    out.resize(queries.rows * k);
#pragma omp parallel for schedule(static)
    for (std::size_t q = 0; q < queries.rows; ++q)
        knn_one(queries.row(q), refs, k, out.data() + q * k);
}

void sign_bits(const Matrix& x, const Matrix& planes, std::vector<std::uint8_t>& out) {
    out.resize(x.rows * planes.rows);
#pragma omp parallel for schedule(static)
    for (std::size_t i = 0; i < x.rows; ++i) {
        const double* xi = x.row(i);
        std::uint8_t* bits = out.data() + i * planes.rows;
        for (std::size_t p = 0; p < planes.rows; ++p) {
            const double* pl = planes.row(p);
            double dot = 0.0;
            for (std::size_t j = 0; j < x.cols; ++j) dot += xi[j] * pl[j];
            bits[p] = dot >= 0.0 ? 1 : 0;
        }
    }
}

namespace serial {

void knn_indices(const Matrix& queries, const Matrix& refs, std::size_t k,
                 std::vector<std::uint32_t>& out) {
    if (k == 0 || k > refs.rows) throw std::invalid_argument("knn_indices: bad k");
    out.resize(queries.rows * k);
    std::vector<std::pair<double, std::uint32_t>> all(refs.rows);
    for (std::size_t q = 0; q < queries.rows; ++q) {
        for (std::uint32_t r = 0; r < refs.rows; ++r)
            all[r] = {sq_dist(queries.row(q), refs.row(r), refs.cols), r};
        std::sort(all.begin(), all.end());
        for (std::size_t i = 0; i < k; ++i) out[q * k + i] = all[i].second;
    }
}

void sign_bits(const Matrix& x, const Matrix& planes, std::vector<std::uint8_t>& out) {
    out.resize(x.rows * planes.rows);
    for (std::size_t i = 0; i < x.rows; ++i)
        for (std::size_t p = 0; p < planes.rows; ++p) {
            double dot = 0.0;
            for (std::size_t j = 0; j < x.cols; ++j) dot += x.at(i, j) * planes.at(p, j);
            out[i * planes.rows + p] = dot >= 0.0 ? 1 : 0;
        }
}

}  // namespace serial

}  // namespace cpdp
