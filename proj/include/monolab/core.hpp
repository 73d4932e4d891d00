#pragma once

// Shared vocabulary for monolab: dense vectors/matrices, error types and a
// handful of small numeric helpers used by every module.

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace monolab {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Absolute floor used wherever a relative quantity divides by a norm.
inline constexpr double kMachineFloor = 1e-300;

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

/// Precondition violated by the caller (dimension mismatch, bad parameter).
class InvalidInput : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A system configuration that cannot be run (e.g. CFL violation).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An orbit produced a non-finite state or left the admissible box.
class DivergenceError : public std::runtime_error {
public:
    DivergenceError(const std::string& what, Vector last_finite, long step = -1)
        : std::runtime_error(what), last_finite_(std::move(last_finite)), step_(step) {}

    const Vector& last_finite() const noexcept { return last_finite_; }
    long step() const noexcept { return step_; }

private:
    Vector last_finite_;
    long step_;
};

/// A tangent vector shrank below the machine floor.
class AnnihilationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Power iteration failed to converge within its cap (spectral gap too small).
class GapFailure : public std::runtime_error {
public:
    GapFailure(const std::string& what, std::vector<double> history)
        : std::runtime_error(what), rayleigh_history_(std::move(history)) {}

    const std::vector<double>& rayleigh_history() const noexcept { return rayleigh_history_; }

private:
    std::vector<double> rayleigh_history_;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Helpers
// ---------------------------------------------------------------------------

inline double sup_norm(const Vector& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }

/// Operator norm induced by the sup norm (max absolute row sum).
inline double sup_operator_norm(const Matrix& a) {
    return a.size() == 0 ? 0.0 : a.cwiseAbs().rowwise().sum().maxCoeff();
}

inline bool all_finite(const Vector& v) { return v.allFinite(); }

inline void require_same_size(const Vector& a, const Vector& b, const char* where) {
    if (a.size() != b.size()) {
        throw InvalidInput(std::string(where) + ": dimension mismatch (" +
                           std::to_string(a.size()) + " vs " + std::to_string(b.size()) + ")");
    }
}

/// Spectral radius by dense eigensolve. Used where complex dominant pairs are
/// possible (monodromies) and by test oracles.
inline double spectral_radius(const Matrix& a) {
    if (a.rows() == 0) return 0.0;
    Eigen::EigenSolver<Matrix> es(a, /*computeEigenvectors=*/false);
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

/// Axis-aligned box [lo, hi] in R^n.
struct Box {
    Vector lo;
    Vector hi;

    static Box uniform(std::size_t n, double lo, double hi) {
        return Box{Vector::Constant(static_cast<Eigen::Index>(n), lo),
                   Vector::Constant(static_cast<Eigen::Index>(n), hi)};
    }

    Eigen::Index dimension() const { return lo.size(); }

    bool contains(const Vector& x) const {
        if (x.size() != lo.size()) return false;
        return (x.array() >= lo.array()).all() && (x.array() <= hi.array()).all();
    }
};

}  // namespace monolab
