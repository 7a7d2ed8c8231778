#pragma once

#include <cstdint>
#include <vector>

namespace cpdp {

// Dense row-major matrix used by the compute kernels and the learners.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

    double* row(std::size_t i) { return data.data() + i * cols; }
    const double* row(std::size_t i) const { return data.data() + i * cols; }
    double& at(std::size_t i, std::size_t j) { return data[i * cols + j]; }
    double at(std::size_t i, std::size_t j) const { return data[i * cols + j]; }
};

// For each query row, the k nearest reference rows by squared Euclidean
// distance, ascending, ties broken toward the lower reference index.
// out is resized to queries.rows * k.  Requires k <= refs.rows.
void knn_indices(const Matrix& queries, const Matrix& refs, std::size_t k,
                 std::vector<std::uint32_t>& out);

// Sign bits of the projections x · planes[p]:
// out[i * planes.rows + p] = 1 iff the dot product is >= 0.
// out is resized to x.rows * planes.rows.
void sign_bits(const Matrix& x, const Matrix& planes, std::vector<std::uint8_t>& out);

// Straight-line single-threaded implementations of the kernels above.  The
// parallel versions must agree with these bit for bit; the tests check that
// and the bench target measures the gap.
namespace serial {

void knn_indices(const Matrix& queries, const Matrix& refs, std::size_t k,
                 std::vector<std::uint32_t>& out);
void sign_bits(const Matrix& x, const Matrix& planes, std::vector<std::uint8_t>& out);

}  // namespace serial

}  // namespace cpdp
