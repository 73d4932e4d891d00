#pragma once

// Parametrized C^1 map families (eps, x) -> F_eps(x) with exact Jacobians.
//
// A System is an immutable value holding the map, its Jacobian and an
// optional Jacobian-vector product. Integrated kinds (time-tau maps of ODEs,
// the parabolic period map) differentiate the discrete stepper itself, so the
// Jacobian is the exact derivative of the map that evaluate() computes.

#include "monolab/core.hpp"

#include <functional>
#include <memory>
#include <string>
#include <utility>

namespace monolab {

enum class SystemKind { Explicit, OdeTimeTau, ParabolicPeriod };

inline const char* to_string(SystemKind k) {
    switch (k) {
        case SystemKind::Explicit: return "explicit";
        case SystemKind::OdeTimeTau: return "ode_time_tau";
        case SystemKind::ParabolicPeriod: return "parabolic_period";
    }
    return "unknown";
}

enum class OperatorKind { Jacobian, Averaged, Product };

inline const char* to_string(OperatorKind k) {
    switch (k) {
        case OperatorKind::Jacobian: return "jacobian";
        case OperatorKind::Averaged: return "averaged";
        case OperatorKind::Product: return "product";
    }
    return "unknown";
}

/// A dense n x n operator with a record of how it was produced.
struct DenseOperator {
    Matrix matrix;
    OperatorKind provenance = OperatorKind::Jacobian;

    Eigen::Index dimension() const { return matrix.rows(); }
    Vector apply(const Vector& v) const { return matrix * v; }
};

using MapFn = std::function<Vector(double eps, const Vector& x)>;
using JacobianFn = std::function<Matrix(double eps, const Vector& x)>;
/// Returns (F(x), DF(x) v) in one pass.
using TangentFn = std::function<std::pair<Vector, Vector>(double eps, const Vector& x, const Vector& v)>;

struct System {
    std::string name;
    SystemKind kind = SystemKind::Explicit;
    Eigen::Index n = 0;
    double eps0 = 0.0;  // parameter interval J = [-eps0, eps0]
    Box box;            // admissible region; orbits leaving it count as divergent
    MapFn map;
    JacobianFn jac;
    TangentFn tangent;  // optional

    Eigen::Index dimension() const { return n; }
};

namespace detail {

inline void check_call(const System& sys, double eps, const Vector& x, const char* where) {
    if (x.size() != sys.n) {
        throw InvalidInput(std::string(where) + ": state dimension " + std::to_string(x.size()) +
                           " does not match system dimension " + std::to_string(sys.n));
    }
    if (std::abs(eps) > sys.eps0 * (1.0 + 1e-12) + 1e-300) {
        throw InvalidInput(std::string(where) + ": eps outside parameter interval of " + sys.name);
    }
}

}  // namespace detail

/// F_eps(x). Throws DivergenceError if the result is not finite.
inline Vector evaluate(const System& sys, double eps, const Vector& x) {
    detail::check_call(sys, eps, x, "evaluate");
    Vector y = sys.map(eps, x);
    if (!all_finite(y)) throw DivergenceError("evaluate: non-finite state from " + sys.name, x);
    return y;
}

/// DF_eps(x) as a dense matrix.
inline DenseOperator jacobian(const System& sys, double eps, const Vector& x) {
    detail::check_call(sys, eps, x, "jacobian");
    Matrix j = sys.jac(eps, x);
    if (!j.allFinite()) throw DivergenceError("jacobian: non-finite entries from " + sys.name, x);
    return {std::move(j), OperatorKind::Jacobian};
}

/// (F_eps(x), DF_eps(x) v). Uses the system's tangent propagator when it has
/// one, otherwise a full Jacobian.
inline std::pair<Vector, Vector> tangent(const System& sys, double eps, const Vector& x, const Vector& v) {
    detail::check_call(sys, eps, x, "tangent");
    require_same_size(x, v, "tangent");
    std::pair<Vector, Vector> out;
    if (sys.tangent) {
        out = sys.tangent(eps, x, v);
    } else {
        out = {sys.map(eps, x), sys.jac(eps, x) * v};
    }
    if (!all_finite(out.first) || !all_finite(out.second)) {
        throw DivergenceError("tangent: non-finite state from " + sys.name, x);
    }
    return out;
}

/// DF_eps^n(x) = DF(F^{n-1} x) ... DF(x) by the chain rule. n = 0 gives I.
inline DenseOperator jacobian_power(const System& sys, double eps, const Vector& x, int n) {
    if (n < 0) throw InvalidInput("jacobian_power: n must be >= 0");
    Matrix acc = Matrix::Identity(sys.n, sys.n);
    Vector state = x;
    for (int k = 0; k < n; ++k) {
        acc = jacobian(sys, eps, state).matrix * acc;
        if (k + 1 < n) state = evaluate(sys, eps, state);
    }
    return {std::move(acc), n == 1 ? OperatorKind::Jacobian : OperatorKind::Product};
}

/// F_eps^n(x) with divergence and box checks at every step.
inline Vector evaluate_power(const System& sys, double eps, const Vector& x, int n) {
    Vector state = x;
    for (int k = 0; k < n; ++k) {
        state = evaluate(sys, eps, state);
        if (!sys.box.contains(state)) throw DivergenceError("orbit left the admissible box", state, k + 1);
    }
    return state;
}

// ---------------------------------------------------------------------------
// Orbits
// ---------------------------------------------------------------------------

struct OrbitRecord {
    Vector initial;
    double eps = 0.0;
    std::vector<Vector> states;  // states[k] = F^k(initial)
    double tail_gap = 0.0;       // max ||x_{k+1} - x_k|| over the tail window

    const Vector& last() const { return states.back(); }
};

/// Orbit of length n_steps + 1. A step producing a non-finite state or leaving
/// the admissible box raises DivergenceError carrying the failing step index.
inline OrbitRecord iterate(const System& sys, double eps, const Vector& x, int n_steps, int gap_window = 10) {
    if (n_steps < 0) throw InvalidInput("iterate: n_steps must be >= 0");
    detail::check_call(sys, eps, x, "iterate");
    OrbitRecord rec;
    rec.initial = x;
    rec.eps = eps;
    rec.states.reserve(static_cast<std::size_t>(n_steps) + 1);
    rec.states.push_back(x);
    for (int k = 0; k < n_steps; ++k) {
        Vector next;
        try {
            next = evaluate(sys, eps, rec.states.back());
        } catch (const DivergenceError& e) {
            throw DivergenceError(std::string(e.what()) + " at step " + std::to_string(k + 1), rec.states.back(), k + 1);
        }
        if (!sys.box.contains(next)) {
            throw DivergenceError("iterate: orbit left the admissible box at step " + std::to_string(k + 1),
                                  rec.states.back(), k + 1);
        }
        rec.states.push_back(std::move(next));
    }
    const int begin = std::max(0, n_steps - gap_window);
    for (int k = begin; k < n_steps; ++k) {
        rec.tail_gap = std::max(rec.tail_gap, sup_norm(rec.states[k + 1] - rec.states[k]));
    }
    return rec;
}

// ---------------------------------------------------------------------------
// Explicit maps
// ---------------------------------------------------------------------------

inline Box default_box(Eigen::Index n, double half_width = 1e8) {
    return Box::uniform(static_cast<std::size_t>(n), -half_width, half_width);
}

/// Explicit system from a map and its Jacobian.
inline System make_explicit(std::string name, Eigen::Index n, MapFn map, JacobianFn jac, double eps0 = 0.0,
                            Box box = {}) {
    System s;
    s.name = std::move(name);
    s.kind = SystemKind::Explicit;
    s.n = n;
    s.eps0 = eps0;
    s.box = box.lo.size() ? std::move(box) : default_box(n);
    s.map = std::move(map);
    s.jac = std::move(jac);
    return s;
}

/// F_eps(x) = (A + eps B) x + c.
inline System make_affine(std::string name, Matrix a, Vector c = {}, Matrix b = {}, double eps0 = 0.0, Box box = {}) {
    const Eigen::Index n = a.rows();
    if (a.cols() != n) throw InvalidInput("make_affine: matrix must be square");
    if (c.size() == 0) c = Vector::Zero(n);
    if (b.size() == 0) b = Matrix::Zero(n, n);
    if (c.size() != n || b.rows() != n || b.cols() != n) throw InvalidInput("make_affine: dimension mismatch");
    auto map = [a, b, c](double eps, const Vector& x) -> Vector { return (a + eps * b) * x + c; };
    auto jac = [a, b](double eps, const Vector&) -> Matrix { return a + eps * b; };
    System s = make_explicit(std::move(name), n, map, jac, eps0, std::move(box));
    s.tangent = [a, b, c](double eps, const Vector& x, const Vector& v) {
        const Matrix m = a + eps * b;
        return std::make_pair(Vector(m * x + c), Vector(m * v));
    };
    return s;
}

inline System make_linear(std::string name, Matrix a, Box box = {}) {
    return make_affine(std::move(name), std::move(a), {}, {}, 0.0, std::move(box));
}

/// G = F^q as a system in its own right.
inline System compose_power(const System& base, int q) {
    if (q < 1) throw InvalidInput("compose_power: q must be >= 1");
    if (q == 1) return base;
    System s = base;
    s.name = base.name + "^" + std::to_string(q);
    auto shared = std::make_shared<const System>(base);
    s.map = [shared, q](double eps, const Vector& x) {
        Vector y = x;
        for (int k = 0; k < q; ++k) y = shared->map(eps, y);
        return y;
    };
    s.jac = [shared, q](double eps, const Vector& x) {
        Matrix acc = Matrix::Identity(shared->n, shared->n);
        Vector y = x;
        for (int k = 0; k < q; ++k) {
            acc = shared->jac(eps, y) * acc;
            y = shared->map(eps, y);
        }
        return acc;
    };
    s.tangent = [shared, q](double eps, const Vector& x, const Vector& v) {
        std::pair<Vector, Vector> cur{x, v};
        for (int k = 0; k < q; ++k) {
            cur = shared->tangent ? shared->tangent(eps, cur.first, cur.second)
                                  : std::make_pair(shared->map(eps, cur.first),
                                                   Vector(shared->jac(eps, cur.first) * cur.second));
        }
        return cur;
    };
    return s;
}

// ---------------------------------------------------------------------------
// Time-tau maps of ODEs (fixed-step RK4 with its exact discrete variation)
// ---------------------------------------------------------------------------

/// Non-autonomous vector field x' = f(t, x; eps) with Jacobian df/dx.
struct OdeField {
    std::function<Vector(double t, const Vector& x, double eps)> f;
    std::function<Matrix(double t, const Vector& x, double eps)> dfdx;
};

namespace detail {

/// One RK4 step; when `tan` is non-null the tangent block (vector or matrix)
/// is advanced with the derivative of the same step.
template <class Tangent>
void rk4_step(const OdeField& field, double t, double h, double eps, Vector& x, Tangent* tan) {
    const Vector k1 = field.f(t, x, eps);
    const Vector x2 = x + 0.5 * h * k1;
    const Vector k2 = field.f(t + 0.5 * h, x2, eps);
    const Vector x3 = x + 0.5 * h * k2;
    const Vector k3 = field.f(t + 0.5 * h, x3, eps);
    const Vector x4 = x + h * k3;
    const Vector k4 = field.f(t + h, x4, eps);
    if (tan != nullptr) {
        const Tangent d1 = field.dfdx(t, x, eps) * (*tan);
        const Tangent d2 = field.dfdx(t + 0.5 * h, x2, eps) * (*tan + 0.5 * h * d1);
        const Tangent d3 = field.dfdx(t + 0.5 * h, x3, eps) * (*tan + 0.5 * h * d2);
        const Tangent d4 = field.dfdx(t + h, x4, eps) * (*tan + h * d3);
        *tan += (h / 6.0) * (d1 + 2.0 * d2 + 2.0 * d3 + d4);
    }
    x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

template <class Tangent>
Vector rk4_period(const OdeField& field, double tau, int steps, double eps, const Vector& x0, Tangent* tan) {
    const double h = tau / steps;
    Vector x = x0;
    for (int k = 0; k < steps; ++k) {
        rk4_step(field, k * h, h, eps, x, tan);
        if (!all_finite(x)) throw DivergenceError("rk4: non-finite state", x0, k);
    }
    return x;
}

}  // namespace detail

/// Time-tau map of x' = f(t, x; eps) integrated with `steps` RK4 steps.
inline System make_ode_time_tau(std::string name, Eigen::Index n, OdeField field, double tau, int steps,
                                double eps0 = 0.0, Box box = {}) {
    if (!(tau > 0.0) || steps < 1) throw ConfigError("make_ode_time_tau: tau must be positive and steps >= 1");
    auto fld = std::make_shared<const OdeField>(std::move(field));
    System s;
    s.name = std::move(name);
    s.kind = SystemKind::OdeTimeTau;
    s.n = n;
    s.eps0 = eps0;
    s.box = box.lo.size() ? std::move(box) : default_box(n);
    s.map = [fld, tau, steps](double eps, const Vector& x) {
        return detail::rk4_period<Matrix>(*fld, tau, steps, eps, x, nullptr);
    };
    s.jac = [fld, tau, steps, n](double eps, const Vector& x) {
        Matrix j = Matrix::Identity(n, n);
        detail::rk4_period(*fld, tau, steps, eps, x, &j);
        return j;
    };
    s.tangent = [fld, tau, steps](double eps, const Vector& x, const Vector& v) {
        Vector dv = v;
        Vector y = detail::rk4_period(*fld, tau, steps, eps, x, &dv);
        return std::make_pair(std::move(y), std::move(dv));
    };
    return s;
}

/// Cooperative logistic chain x_i' = x_i (a_i(t) - x_i) + kappa (x_{i-1} - 2 x_i + x_{i+1})
/// with reflecting ends and a_i(t) = a_i (1 + amp cos(2 pi t / tau)); eps adds
/// eps * mean(x) to every component.
inline System make_cooperative_logistic_ode(const Vector& a, double kappa, double amp, double tau, int steps,
                                            double eps0 = 0.0) {
    const Eigen::Index n = a.size();
    if (n < 1) throw InvalidInput("make_cooperative_logistic_ode: empty growth vector");
    constexpr double two_pi = 6.283185307179586;
    OdeField field;
    field.f = [a, kappa, amp, tau, n](double t, const Vector& x, double eps) {
        const double mod = 1.0 + amp * std::cos(two_pi * t / tau);
        Vector dx(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            const double left = x[i > 0 ? i - 1 : (n > 1 ? 1 : 0)];
            const double right = x[i + 1 < n ? i + 1 : (n > 1 ? n - 2 : 0)];
            dx[i] = x[i] * (a[i] * mod - x[i]) + kappa * (left - 2.0 * x[i] + right) + eps * x.mean();
        }
        return dx;
    };
    field.dfdx = [a, kappa, amp, tau, n](double t, const Vector& x, double eps) {
        const double mod = 1.0 + amp * std::cos(two_pi * t / tau);
        Matrix j = Matrix::Constant(n, n, eps / static_cast<double>(n));
        for (Eigen::Index i = 0; i < n; ++i) {
            j(i, i) += a[i] * mod - 2.0 * x[i] - 2.0 * kappa;
            const Eigen::Index l = i > 0 ? i - 1 : (n > 1 ? 1 : 0);
            const Eigen::Index r = i + 1 < n ? i + 1 : (n > 1 ? n - 2 : 0);
            j(i, l) += kappa;
            j(i, r) += kappa;
        }
        return j;
    };
    return make_ode_time_tau("cooperative_logistic_ode", n, std::move(field), tau, steps, eps0,
                             Box::uniform(static_cast<std::size_t>(n), -1.0, 1e3));
}

}  // namespace monolab
