#pragma once

// Independent oracles shared by the test suites.

#include "monolab/monolab.hpp"

#include <gtest/gtest.h>

#include <complex>
#include <random>

namespace oracle {

using monolab::Matrix;
using monolab::System;
using monolab::Vector;

/// Central-difference Jacobian of the map alone (no jacobian callback used).
inline Matrix central_difference(const System& sys, double eps, const Vector& x, double h = 1e-6) {
    Matrix j(sys.n, sys.n);
    for (Eigen::Index k = 0; k < sys.n; ++k) {
        Vector xp = x;
        Vector xm = x;
        xp[k] += h;
        xm[k] -= h;
        j.col(k) = (sys.map(eps, xp) - sys.map(eps, xm)) / (2.0 * h);
    }
    return j;
}

inline double relative_error(const Matrix& a, const Matrix& b) {
    return (a - b).norm() / std::max(b.norm(), 1e-300);
}

/// Eigenvalue moduli sorted in decreasing order (dense eigensolve).
inline std::vector<double> eigen_moduli(const Matrix& a) {
    Eigen::EigenSolver<Matrix> es(a, false);
    std::vector<double> out;
    for (Eigen::Index i = 0; i < a.rows(); ++i) out.push_back(std::abs(es.eigenvalues()[i]));
    std::sort(out.rbegin(), out.rend());
    return out;
}

/// Matrix with iid U(lo, hi) entries, independent of the library RNG.
inline Matrix uniform_matrix(Eigen::Index n, std::mt19937_64& gen, double lo = 0.0, double hi = 1.0) {
    std::uniform_real_distribution<double> dist(lo, hi);
    Matrix a(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) a(i, j) = dist(gen);
    }
    return a;
}

inline Vector uniform_vector(Eigen::Index n, std::mt19937_64& gen, double lo, double hi) {
    std::uniform_real_distribution<double> dist(lo, hi);
    Vector v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = dist(gen);
    return v;
}

/// Smallest r >= 1 with the sign pattern invariant under rotation by r * shift.
inline int rotation_period(const std::vector<int>& signs, int shift) {
    const int d = static_cast<int>(signs.size());
    for (int r = 1; r <= d; ++r) {
        bool same = true;
        for (int i = 0; i < d && same; ++i) same = signs[static_cast<std::size_t>(i)] ==
                                                   signs[static_cast<std::size_t>(((i - r * shift) % d + d) % d)];
        if (same) return r;
    }
    return d;
}

}  // namespace oracle
