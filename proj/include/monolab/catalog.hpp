#pragma once

// Named explicit test systems with known structure, and the frozen orbit
// suite used to cross-check the two classifiers against each other.

#include "monolab/random.hpp"
#include "monolab/systems.hpp"

#include <memory>
#include <string>
#include <vector>

namespace monolab::catalog {

/// x -> x / 2 + c
inline System contraction(const Vector& c) {
    const Eigen::Index n = c.size();
    return make_affine("contraction", 0.5 * Matrix::Identity(n, n), c);
}

inline System linear_diag(const Vector& d, double half_width = 1e3) {
    return make_linear("diag", d.asDiagonal(), default_box(d.size(), half_width));
}

/// F_i(x) = 0.2 + sum_j A_ij x_j + 0.2 x_i^2 + eps x_i x_{i+1}, with A > 0 and
/// row sums 0.4; maps [0, 1]^n into itself for small eps.
inline System quadratic_cooperative(Eigen::Index n) {
    Matrix a(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) a(i, j) = 1.0 + 0.5 * std::sin(1.3 * (i + 1) + 0.7 * (j + 1));
        a.row(i) *= 0.4 / a.row(i).sum();
    }
    auto map = [a, n](double eps, const Vector& x) {
        Vector y = Vector::Constant(n, 0.2) + a * x + 0.2 * x.cwiseProduct(x);
        for (Eigen::Index i = 0; i < n; ++i) y[i] += eps * x[i] * x[(i + 1) % n];
        return y;
    };
    auto jac = [a, n](double eps, const Vector& x) {
        Matrix j = a;
        for (Eigen::Index i = 0; i < n; ++i) {
            j(i, i) += 0.4 * x[i];
            j(i, i) += eps * x[(i + 1) % n];
            j(i, (i + 1) % n) += eps * x[i];
        }
        return j;
    };
    return make_explicit("quadratic_cooperative", n, map, jac, 0.1, Box::uniform(static_cast<std::size_t>(n), -0.5, 1.5));
}

/// F_i(x) = r_i x_i (1 - x_i) + kappa sum_{j != i} (x_j - x_i)
inline System logistic_cooperative(const Vector& r, double kappa) {
    const Eigen::Index n = r.size();
    auto map = [r, kappa, n](double, const Vector& x) {
        Vector y(n);
        const double total = x.sum();
        for (Eigen::Index i = 0; i < n; ++i) {
            y[i] = r[i] * x[i] * (1.0 - x[i]) + kappa * (total - static_cast<double>(n) * x[i]);
        }
        return y;
    };
    auto jac = [r, kappa, n](double, const Vector& x) {
        Matrix j = Matrix::Constant(n, n, kappa);
        for (Eigen::Index i = 0; i < n; ++i) {
            j(i, i) = r[i] * (1.0 - 2.0 * x[i]) - kappa * static_cast<double>(n - 1);
        }
        return j;
    };
    return make_explicit("logistic_cooperative", n, map, jac, 0.0, Box::uniform(static_cast<std::size_t>(n), -0.5, 1.5));
}

/// F(x) = S^shift tanh(beta x) with S the cyclic coordinate shift
/// (F(x)_i = tanh(beta x_{i - shift})). Each coordinate is pushed towards
/// +-u* (u* = tanh(beta u*)), so stable cycles are sign patterns and their
/// minimal periods are the rotation periods of those patterns.
inline System permutation_contraction(Eigen::Index d, double beta = 3.0, Eigen::Index shift = 1) {
    auto src = [d, shift](Eigen::Index i) { return ((i - shift) % d + d) % d; };
    auto map = [d, beta, src](double, const Vector& x) {
        Vector y(d);
        for (Eigen::Index i = 0; i < d; ++i) y[i] = std::tanh(beta * x[src(i)]);
        return y;
    };
    auto jac = [d, beta, src](double, const Vector& x) {
        Matrix j = Matrix::Zero(d, d);
        for (Eigen::Index i = 0; i < d; ++i) {
            const double t = std::tanh(beta * x[src(i)]);
            j(i, src(i)) = beta * (1.0 - t * t);
        }
        return j;
    };
    return make_explicit("permutation_contraction_" + std::to_string(d), d, map, jac, 0.0,
                         Box::uniform(static_cast<std::size_t>(d), -2.0, 2.0));
}

/// Positive root of u = tanh(beta u), beta > 1.
inline double tanh_fixed_point(double beta) {
    double u = 1.0;
    for (int k = 0; k < 200; ++k) {
        const double t = std::tanh(beta * u);
        const double g = u - t;
        const double dg = 1.0 - beta * (1.0 - t * t);
        u -= g / dg;
    }
    return u;
}

/// One-dimensional x -> -tanh(beta x): the 2-cycle {u*, -u*}.
inline System flip_map(double beta = 3.0) {
    auto map = [beta](double, const Vector& x) { return Vector::Constant(1, -std::tanh(beta * x[0])); };
    auto jac = [beta](double, const Vector& x) {
        const double t = std::tanh(beta * x[0]);
        return Matrix::Constant(1, 1, -beta * (1.0 - t * t));
    };
    return make_explicit("flip_map", 1, map, jac, 0.0, Box::uniform(1, -2.0, 2.0));
}

/// Componentwise x -> tanh(beta x): 0 is an unstable fixed point (DF(0) = beta I).
inline System bistable(Eigen::Index n, double beta = 3.0) {
    auto map = [beta](double, const Vector& x) { return Vector(x.array().unaryExpr([beta](double v) { return std::tanh(beta * v); })); };
    auto jac = [beta, n](double, const Vector& x) {
        Vector d(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            const double t = std::tanh(beta * x[i]);
            d[i] = beta * (1.0 - t * t);
        }
        return Matrix(d.asDiagonal());
    };
    return make_explicit("bistable", n, map, jac, 0.0, Box::uniform(static_cast<std::size_t>(n), -2.0, 2.0));
}

/// Planar rotation by `angle` (quasiperiodic for angle / 2pi irrational).
inline System rotation(double angle) {
    Matrix r(2, 2);
    r << std::cos(angle), -std::sin(angle), std::sin(angle), std::cos(angle);
    return make_linear("rotation", r, default_box(2, 10.0));
}

inline System order_reversing(Eigen::Index n) {
    return make_linear("order_reversing", -Matrix::Identity(n, n), default_box(n, 10.0));
}

/// Saddle with unstable direction (1, 1) (multiplier 2) and stable direction (1, -1) (multiplier 0.5).
inline System saddle() {
    Matrix a(2, 2);
    a << 1.25, 0.75, 0.75, 1.25;
    return make_linear("saddle", a, default_box(2, 1e3));
}

/// x -> -x (0.5 + |x|^2): stable at 0, expanding and order-reversing far out.
inline System spiral_out() {
    auto map = [](double, const Vector& x) { return Vector(-x * (0.5 + x.squaredNorm())); };
    auto jac = [](double, const Vector& x) {
        return Matrix(-(0.5 + x.squaredNorm()) * Matrix::Identity(2, 2) - 2.0 * x * x.transpose());
    };
    return make_explicit("spiral_out", 2, map, jac, 0.0, default_box(2, 1e6));
}

/// Random entrywise positive n x n matrix with spectral radius `rho`.
inline Matrix random_positive_matrix(Eigen::Index n, double rho, std::uint64_t seed) {
    Rng rng(seed);
    Matrix a(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) a(i, j) = rng.uniform(0.05, 1.0);
    }
    return a * (rho / spectral_radius(a));
}

/// Linear family A + eps B with A, B entrywise positive.
inline System positive_linear_family(const Matrix& a, const Matrix& b, double eps0, double half_width = 1e3) {
    return make_affine("positive_linear", a, {}, b, eps0, default_box(a.rows(), half_width));
}

// ---------------------------------------------------------------------------
// Frozen orbit suite
// ---------------------------------------------------------------------------

struct SuiteOrbit {
    std::string label;
    std::shared_ptr<const System> system;
    Vector x0;
    double eps = 0.0;
};

/// Fixed collection of >= 100 orbits spanning stable fixed points, stable
/// cycles of period 2..4, unstable fixed points and integrated maps.
inline std::vector<SuiteOrbit> frozen_suite() {
    std::vector<SuiteOrbit> suite;
    Rng rng(20240611);
    auto add = [&](const std::string& label, const std::shared_ptr<const System>& sys, const Vector& x0) {
        suite.push_back({label + "#" + std::to_string(suite.size()), sys, x0, 0.0});
    };

    auto contr = std::make_shared<const System>(contraction((Vector(2) << 1.0, -0.5).finished()));
    for (int k = 0; k < 10; ++k) add("contraction", contr, rng.uniform_vector(2, -5.0, 5.0));

    auto quad = std::make_shared<const System>(quadratic_cooperative(3));
    for (int k = 0; k < 10; ++k) add("quadratic_cooperative", quad, rng.uniform_vector(3, 0.0, 1.0));

    auto logi = std::make_shared<const System>(logistic_cooperative((Vector(3) << 1.6, 1.8, 2.0).finished(), 0.05));
    for (int k = 0; k < 10; ++k) add("logistic_cooperative", logi, rng.uniform_vector(3, 0.05, 0.95));

    for (Eigen::Index d : {2, 3, 4}) {
        auto perm = std::make_shared<const System>(permutation_contraction(d));
        for (int k = 0; k < 10; ++k) add("permutation", perm, rng.uniform_vector(d, -1.0, 1.0));
    }

    auto flip = std::make_shared<const System>(flip_map());
    for (int k = 0; k < 8; ++k) add("flip", flip, rng.uniform_vector(1, -1.0, 1.0));

    auto ode = std::make_shared<const System>(
        make_cooperative_logistic_ode((Vector(3) << 1.0, 1.2, 0.8).finished(), 0.2, 0.3, 1.0, 40));
    for (int k = 0; k < 8; ++k) add("cooperative_ode", ode, rng.uniform_vector(3, 0.1, 2.0));

    // Unstable fixed points, orbits started on them.
    for (int k = 0; k < 8; ++k) {
        const double rho = 1.2 + 0.2 * k;
        auto lin = std::make_shared<const System>(
            make_linear("positive_expanding", random_positive_matrix(3, rho, 1000 + k), default_box(3, 1e3)));
        add("positive_expanding", lin, Vector::Zero(3));
    }
    auto two = std::make_shared<const System>(linear_diag((Vector(2) << 2.0, 0.5).finished()));
    add("diag_2_0.5", two, Vector::Zero(2));
    auto dbl = std::make_shared<const System>(linear_diag((Vector(2) << 2.0, 2.0).finished()));
    add("doubling", dbl, Vector::Zero(2));
    for (Eigen::Index d : {1, 2, 3}) {
        auto bi = std::make_shared<const System>(bistable(d));
        add("bistable_origin", bi, Vector::Zero(d));
    }
    auto sad = std::make_shared<const System>(saddle());
    add("saddle_origin", sad, Vector::Zero(2));

    // Stable positive linear maps converge to 0.
    for (int k = 0; k < 8; ++k) {
        const double rho = 0.3 + 0.08 * k;
        auto lin = std::make_shared<const System>(
            make_linear("positive_contracting", random_positive_matrix(3, rho, 2000 + k), default_box(3, 1e3)));
        add("positive_contracting", lin, rng.uniform_vector(3, -1.0, 1.0));
    }

    auto spiral = std::make_shared<const System>(spiral_out());
    for (int k = 0; k < 2; ++k) add("spiral_out", spiral, rng.uniform_vector(2, -0.3, 0.3));
    // Quasiperiodic: no cycle, so both classifiers should stay undecided.
    auto rot = std::make_shared<const System>(rotation(2.0));
    for (int k = 0; k < 2; ++k) add("rotation", rot, rng.uniform_vector(2, -1.0, 1.0));
    return suite;
}

}  // namespace monolab::catalog
