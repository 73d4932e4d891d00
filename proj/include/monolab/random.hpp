#pragma once

// Seeded sampling with a bit-reproducible recipe: std::mt19937_64 (whose
// output sequence is fixed by the standard) and a 53-bit mantissa mapping to
// [0, 1). std::uniform_real_distribution is avoided because its algorithm is
// implementation-defined.

#include "monolab/core.hpp"

#include <cstdint>
#include <random>

namespace monolab {

inline constexpr const char* kRngAlgorithm = "mt19937_64/53bit-uniform";

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    Vector uniform_vector(const Box& box) {
        Vector v(box.dimension());
        for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = uniform(box.lo[i], box.hi[i]);
        return v;
    }

    Vector uniform_vector(Eigen::Index n, double lo, double hi) {
        Vector v(n);
        for (Eigen::Index i = 0; i < n; ++i) v[i] = uniform(lo, hi);
        return v;
    }

    /// Nonzero element of C1(theta) with sup norm 1.
    Vector c1_vector(Eigen::Index n, double theta) {
        Vector v(n);
        for (Eigen::Index i = 0; i < n; ++i) v[i] = uniform(theta, 1.0);
        v /= v.maxCoeff();
        for (Eigen::Index i = 0; i < n; ++i) v[i] = std::max(v[i], theta);
        return v;
    }

    std::uint64_t next_u64() { return engine_(); }

private:
    std::mt19937_64 engine_;
};

}  // namespace monolab
