#pragma once

#include <cmath>
#include <cstdint>
#include <cstring>
#include <random>
#include <string_view>
#include <vector>

namespace cpdp {

// FNV-1a. Used for bucket ids and for deriving per-run child seeds, so it
// must stay stable across platforms and releases.
inline std::uint64_t fnv1a64(const void* data, std::size_t len,
                             std::uint64_t h = 0xcbf29ce484222325ULL) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::uint64_t fnv1a64(std::string_view s, std::uint64_t h = 0xcbf29ce484222325ULL) {
    return fnv1a64(s.data(), s.size(), h);
}

// Child seed for one experiment cell. Mixes the base seed with an arbitrary
// list of string/integer parts, separated so that ("ab","c") != ("a","bc").
class SeedMixer {
public:
    explicit SeedMixer(std::uint64_t base) : h_(0xcbf29ce484222325ULL) { add(base); }

    SeedMixer& add(std::uint64_t v) {
        unsigned char b[8];
        std::memcpy(b, &v, 8);
        h_ = fnv1a64(b, 8, h_);
        return *this;
    }
    SeedMixer& add(std::string_view s) {
        h_ = fnv1a64(s, h_);
        unsigned char sep = 0x1f;
        h_ = fnv1a64(&sep, 1, h_);
        return *this;
    }
    std::uint64_t value() const { return h_; }

private:
    std::uint64_t h_;
};

// Deterministic random generator with hand-rolled distributions. The std::
// distributions are implementation defined, so seeded runs would not be
// reproducible across standard libraries; these are.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed ? seed : 0x9e3779b97f4a7c15ULL) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform integer in [0, bound). bound must be > 0.
    std::uint64_t below(std::uint64_t bound) {
        // Rejection sampling on the top of the range keeps the draw unbiased.
        std::uint64_t limit = std::uint64_t(-1) - std::uint64_t(-1) % bound;
        std::uint64_t v = engine_();
        while (v >= limit) v = engine_();
        return v % bound;
    }

    int index(std::size_t size) { return static_cast<int>(below(size)); }

    // Uniform integer in [lo, hi], inclusive.
    long uniform_int(long lo, long hi) {
        return lo + static_cast<long>(below(static_cast<std::uint64_t>(hi - lo + 1)));
    }

    // Uniform real in [0, 1).
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    bool bernoulli(double p) { return uniform() < p; }

    // Standard normal via the Marsaglia polar method.
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform() - 1.0;
            v = 2.0 * uniform() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        double m = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * m;
        have_spare_ = true;
        return u * m;
    }

    double normal(double mean, double sd) { return mean + sd * normal(); }

    // Fisher-Yates prefix: k distinct values from [0, n).
    std::vector<int> sample_without_replacement(int n, int k, std::vector<int>& scratch) {
        scratch.resize(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) scratch[static_cast<std::size_t>(i)] = i;
        std::vector<int> out(static_cast<std::size_t>(k));
        for (int i = 0; i < k; ++i) {
            int j = i + static_cast<int>(below(static_cast<std::uint64_t>(n - i)));
            std::swap(scratch[static_cast<std::size_t>(i)], scratch[static_cast<std::size_t>(j)]);
            out[static_cast<std::size_t>(i)] = scratch[static_cast<std::size_t>(i)];
        }
        return out;
    }

private:
    std::mt19937_64 engine_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace cpdp
