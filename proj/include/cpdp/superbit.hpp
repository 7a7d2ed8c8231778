#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "cpdp/kernels.hpp"
#include "cpdp/rng.hpp"

namespace cpdp {

// One 0/1 byte per projection sign.
using Signature = std::vector<std::uint8_t>;

double cosine(std::span<const double> a, std::span<const double> b);

// K = L x N random projection vectors, orthonormalized in L batches of N.
// Hamming agreement between two signatures estimates the angle between the
// hashed vectors.
class SuperBitHasher {
  public:
    // Requires 1 <= depth <= dim; draws depth*batches Gaussian vectors from rng.
    SuperBitHasher(std::size_t dim, std::size_t depth, std::size_t batches, Rng& rng);

    std::size_t dim() const { return dim_; }
    std::size_t depth() const { return depth_; }
    std::size_t batches() const { return batches_; }
    std::size_t bits() const { return planes_.rows; }  // K
    const Matrix& planes() const { return planes_; }

    Signature signature(std::span<const double> x) const;
    // One signature per row of x, K bytes each, concatenated into out.
    void signatures(const Matrix& x, std::vector<std::uint8_t>& out) const;

  private:
    std::size_t dim_, depth_, batches_;
    Matrix planes_;  // K x dim, rows are unit vectors
};

// pi * hamming / K: unbiased angle estimate under random projections.
double estimate_angle(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b);

struct Bucket {
    std::uint64_t id = 0;  // hash(signature) mod bucket count
    std::vector<std::uint32_t> members;  // row indices, ascending
};

// Partition of the rows by hashed signature. Buckets come back sorted by id;
// empty cells are omitted.
std::vector<Bucket> bucketize(const std::vector<std::uint8_t>& signature_bits,
                              std::size_t rows, std::size_t bits_per_row,
                              std::uint64_t bucket_count);

}  // namespace cpdp
