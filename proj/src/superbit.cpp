#include "cpdp/superbit.hpp"

#include <cmath>
#include <map>
#include <stdexcept>

namespace cpdp {

double cosine(std::span<const double> a, std::span<const double> b) {
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    if (na <= 0.0 || nb <= 0.0) return 0.0;
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

SuperBitHasher::SuperBitHasher(std::size_t dim, std::size_t depth, std::size_t batches,
                               Rng& rng)
    : dim_(dim), depth_(depth), batches_(batches), planes_(depth * batches, dim) {
    if (depth == 0 || depth > dim) throw std::invalid_argument("super-bit depth must be in [1, dim]");
    if (batches == 0) throw std::invalid_argument("super-bit batch count must be positive");

    std::vector<double> v(dim);
    for (std::size_t l = 0; l < batches; ++l) {
        for (std::size_t i = 0; i < depth; ++i) {
            double* row = planes_.row(l * depth + i);
            // Redraw on (vanishingly rare) degenerate residuals so every
            // plane is a genuine unit vector.
            while (true) {
                for (std::size_t j = 0; j < dim; ++j) v[j] = rng.normal();
                // Gram-Schmidt against the previous vectors of this batch.
                for (std::size_t p = l * depth; p < l * depth + i; ++p) {
                    const double* prev = planes_.row(p);
                    double dot = 0.0;
                    for (std::size_t j = 0; j < dim; ++j) dot += v[j] * prev[j];
                    for (std::size_t j = 0; j < dim; ++j) v[j] -= dot * prev[j];
                }
                double norm = 0.0;
                for (std::size_t j = 0; j < dim; ++j) norm += v[j] * v[j];
                norm = std::sqrt(norm);
                if (norm > 1e-9) {
                    for (std::size_t j = 0; j < dim; ++j) row[j] = v[j] / norm;
                    break;
                }
            }
        }
    }
}

Signature SuperBitHasher::signature(std::span<const double> x) const {
    Signature out(bits());
    for (std::size_t p = 0; p < bits(); ++p) {
        const double* pl = planes_.row(p);
        double dot = 0.0;
        for (std::size_t j = 0; j < dim_; ++j) dot += x[j] * pl[j];
        out[p] = dot >= 0.0 ? 1 : 0;
    }
    return out;
}

void SuperBitHasher::signatures(const Matrix& x, std::vector<std::uint8_t>& out) const {
    sign_bits(x, planes_, out);
}

double estimate_angle(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b) {
    std::size_t hamming = 0;
    for (std::size_t i = 0; i < a.size(); ++i) hamming += a[i] != b[i];
    return M_PI * double(hamming) / double(a.size());
}

std::vector<Bucket> bucketize(const std::vector<std::uint8_t>& signature_bits,
                              std::size_t rows, std::size_t bits_per_row,
                              std::uint64_t bucket_count) {
    if (bucket_count == 0) throw std::invalid_argument("bucketize: bucket count must be positive");
    std::map<std::uint64_t, Bucket> cells;
    for (std::size_t r = 0; r < rows; ++r) {
        std::uint64_t id =
            fnv1a64(signature_bits.data() + r * bits_per_row, bits_per_row) % bucket_count;
        auto& cell = cells[id];
        cell.id = id;
        cell.members.push_back(static_cast<std::uint32_t>(r));
    }
    std::vector<Bucket> out;
    out.reserve(cells.size());
    for (auto& [id, cell] : cells) out.push_back(std::move(cell));
    return out;
}

}  // namespace cpdp
