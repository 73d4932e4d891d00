#pragma once

// Finite-dimensional strongly ordered space: the nonnegative orthant C, the
// interior aperture cone C1(theta), the induced order relations and the
// order norm ||.||_e.

#include "monolab/core.hpp"

#include <algorithm>
#include <string>

namespace monolab {

enum class ConeKind { C, C1 };

/// Orthant cone C together with the interior sub-cone
///   C1(theta) = {v : min_i v_i >= theta * max_i v_i, v != 0} U {0}.
/// Every nonzero element of C1 is strictly positive, so C1 \ {0} sits inside Int C.
struct ConeSpec {
    Eigen::Index n = 0;
    double theta = 0.5;
    double interior_tol = 1e-9;
    Vector e;  // order unit, e >> 0

    ConeSpec() = default;
    ConeSpec(Eigen::Index dim, double theta_, double tol = 1e-9, Vector unit = {})
        : n(dim), theta(theta_), interior_tol(tol), e(unit.size() ? std::move(unit) : Vector::Ones(dim)) {
        validate();
    }

    static ConeSpec standard(Eigen::Index dim, double theta_ = 0.5) { return ConeSpec(dim, theta_); }

    void validate() const {
        if (n <= 0) throw InvalidInput("ConeSpec: dimension must be positive");
        if (!(theta > 0.0 && theta < 1.0)) throw InvalidInput("ConeSpec: theta must lie in (0,1)");
        if (!(interior_tol > 0.0)) throw InvalidInput("ConeSpec: interior_tol must be positive");
        if (e.size() != n) throw InvalidInput("ConeSpec: order unit has wrong dimension");
        if (!(e.array() > 0.0).all()) throw InvalidInput("ConeSpec: order unit must be strictly positive");
    }
};

namespace detail {

inline void check_dim(const Vector& v, const ConeSpec& cone, const char* where) {
    if (v.size() != cone.n) {
        throw InvalidInput(std::string(where) + ": vector dimension " + std::to_string(v.size()) +
                           " does not match cone dimension " + std::to_string(cone.n));
    }
}

}  // namespace detail

/// Membership of v in C or C1 (closed cones).
inline bool in_cone(const Vector& v, const ConeSpec& cone, ConeKind which) {
    detail::check_dim(v, cone, "in_cone");
    if (which == ConeKind::C) return (v.array() >= 0.0).all();
    const double lo = v.minCoeff();
    const double hi = v.maxCoeff();
    if (lo == 0.0 && hi == 0.0) return true;
    return lo >= 0.0 && lo >= cone.theta * hi && hi > 0.0;
}

/// Membership of v in the interior of C or C1, with margin interior_tol on
/// the smallest component.
inline bool in_cone_interior(const Vector& v, const ConeSpec& cone, ConeKind which) {
    detail::check_dim(v, cone, "in_cone_interior");
    const double lo = v.minCoeff();
    if (lo < cone.interior_tol) return false;
    if (which == ConeKind::C) return true;
    return lo >= cone.theta * v.maxCoeff();
}

/// x <= y  iff  y - x lies in the named cone.
inline bool leq(const Vector& x, const Vector& y, const ConeSpec& cone, ConeKind which = ConeKind::C) {
    require_same_size(x, y, "leq");
    return in_cone(y - x, cone, which);
}

/// x < y  iff  x <= y and x != y.
inline bool lt(const Vector& x, const Vector& y, const ConeSpec& cone, ConeKind which = ConeKind::C) {
    return leq(x, y, cone, which) && x != y;
}

/// x << y  iff  y - x lies in the interior of the named cone (with margin).
inline bool ll(const Vector& x, const Vector& y, const ConeSpec& cone, ConeKind which = ConeKind::C) {
    require_same_size(x, y, "ll");
    return in_cone_interior(y - x, cone, which);
}

/// ||x||_e = inf{rho > 0 : -rho e <= x <= rho e} = max_i |x_i| / e_i.
inline double order_norm(const Vector& x, const Vector& e) {
    require_same_size(x, e, "order_norm");
    if (!(e.array() > 0.0).all()) throw InvalidInput("order_norm: order unit must be strictly positive");
    if (x.size() == 0) return 0.0;
    return (x.array().abs() / e.array()).maxCoeff();
}

/// The constant r with ||x||_e <= r ||x||_inf.
inline double order_norm_constant(const Vector& e) {
    if (!(e.array() > 0.0).all()) throw InvalidInput("order_norm_constant: order unit must be strictly positive");
    return 1.0 / e.minCoeff();
}

/// Largest xi >= 0 with d - xi * w in C1, i.e. sup{xi : x + xi w <=_1 y} for
/// d = y - x. The feasible set is an interval because
/// xi -> min_i(d - xi w) - theta max_i(d - xi w) is concave.
/// Returns a negative value when d itself is not in C1.
inline double c1_order_gap(const Vector& d, const Vector& w, const ConeSpec& cone, double rel_tol = 1e-14) {
    detail::check_dim(d, cone, "c1_order_gap");
    detail::check_dim(w, cone, "c1_order_gap");
    if (!in_cone(w, cone, ConeKind::C1) || w.isZero()) throw InvalidInput("c1_order_gap: w must be a nonzero element of C1");
    if (!in_cone(d, cone, ConeKind::C1)) return -1.0;

    // d - xi w must stay in C, so xi <= min_i d_i / w_i.
    double upper = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < d.size(); ++i) upper = std::min(upper, d[i] / w[i]);
    const Vector at_upper = d - upper * w;
    if (in_cone(at_upper, cone, ConeKind::C1) || sup_norm(at_upper) <= 1e-15 * sup_norm(d)) return upper;

    double lo = 0.0;
    double hi = upper;
    while (hi - lo > rel_tol * std::max(hi, kMachineFloor)) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (in_cone(d - mid * w, cone, ConeKind::C1)) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return lo;
}

}  // namespace monolab
