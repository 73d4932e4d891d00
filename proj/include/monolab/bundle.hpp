#pragma once

// Segment-averaged derivatives
//
//   R_{eps,(x,y)} = integral_0^1 DF_eps(s x + (1 - s) y) ds
//
// and their ordered products along paired orbits,
//
//   R^{(n)}_{eps,(x,y)} = R_{(F^{n-1}x, F^{n-1}y)} ... R_{(Fx, Fy)} R_{(x,y)},
//
// which satisfy F^n x - F^n y = R^{(n)}(x - y) and R^{(n)}_{(x,x)} = DF^n(x).
// The bundle operator over a pair (x, y) used in stability arguments is
// iterate_bundle with n = q.

#include "monolab/order_space.hpp"
#include "monolab/quadrature.hpp"
#include "monolab/random.hpp"
#include "monolab/systems.hpp"

#include <optional>

namespace monolab {

inline constexpr int kDefaultQuadNodes = 16;

inline DenseOperator averaged_jacobian(const System& sys, double eps, const Vector& x, const Vector& y,
                                       int quad_nodes = kDefaultQuadNodes) {
    if (quad_nodes < 2) throw InvalidInput("averaged_jacobian: quad_nodes must be >= 2");
    require_same_size(x, y, "averaged_jacobian");
    const QuadratureRule rule = gauss_legendre01(quad_nodes);
    Matrix acc = Matrix::Zero(sys.n, sys.n);
    for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
        const double s = rule.nodes[k];
        try {
            acc += rule.weights[k] * jacobian(sys, eps, s * x + (1.0 - s) * y).matrix;
        } catch (const DivergenceError& e) {
            throw DivergenceError(std::string(e.what()) + " (segment parameter s=" + std::to_string(s) + ")",
                                  e.last_finite(), e.step());
        }
    }
    return {std::move(acc), OperatorKind::Averaged};
}

inline DenseOperator iterate_bundle(const System& sys, double eps, const Vector& x, const Vector& y, int n,
                                    int quad_nodes = kDefaultQuadNodes) {
    if (n < 1) throw InvalidInput("iterate_bundle: n must be >= 1");
    Matrix acc = Matrix::Identity(sys.n, sys.n);
    Vector xk = x;
    Vector yk = y;
    for (int k = 0; k < n; ++k) {
        acc = averaged_jacobian(sys, eps, xk, yk, quad_nodes).matrix * acc;
        if (k + 1 < n) {
            xk = evaluate(sys, eps, xk);
            yk = evaluate(sys, eps, yk);
        }
    }
    return {std::move(acc), n == 1 ? OperatorKind::Averaged : OperatorKind::Product};
}

/// ||(F^n x - F^n y) - R^{(n)}(x - y)||_inf / max(||x - y||_inf, floor).
inline double mean_value_residual(const System& sys, double eps, const Vector& x, const Vector& y, int n,
                                  int quad_nodes = kDefaultQuadNodes) {
    if (n < 1) throw InvalidInput("mean_value_residual: n must be >= 1");
    const Vector fx = evaluate_power(sys, eps, x, n);
    const Vector fy = evaluate_power(sys, eps, y, n);
    const Matrix r = iterate_bundle(sys, eps, x, y, n, quad_nodes).matrix;
    const Vector d = x - y;
    return sup_norm((fx - fy) - r * d) / std::max(sup_norm(d), kMachineFloor);
}

struct PositivityResult {
    bool pass = true;
    std::optional<Vector> witness;  // element of C1 \ {0} whose image is not >>_1 0
};

/// Tests op v >>_1 0 on the 2n "one coordinate off" extreme rays of C1 and on
/// `samples` random elements of C1 \ {0}.
inline PositivityResult strong_positivity_check(const Matrix& op, const ConeSpec& cone, int samples,
                                                std::uint64_t seed = 0x5eedULL) {
    if (op.rows() != cone.n || op.cols() != cone.n) {
        throw InvalidInput("strong_positivity_check: operator dimension does not match cone");
    }
    const Vector zero = Vector::Zero(cone.n);
    auto test = [&](const Vector& v) -> std::optional<Vector> {
        if (!ll(zero, op * v, cone, ConeKind::C1)) return v;
        return std::nullopt;
    };
    for (Eigen::Index i = 0; i < cone.n; ++i) {
        Vector low = Vector::Ones(cone.n);
        low[i] = cone.theta;
        Vector high = Vector::Constant(cone.n, cone.theta);
        high[i] = 1.0;
        for (const Vector& v : {low, high}) {
            if (auto w = test(v)) return {false, std::move(w)};
        }
    }
    Rng rng(seed);
    for (int k = 0; k < samples; ++k) {
        if (auto w = test(rng.c1_vector(cone.n, cone.theta))) return {false, std::move(w)};
    }
    return {true, std::nullopt};
}

inline PositivityResult strong_positivity_check(const DenseOperator& op, const ConeSpec& cone, int samples,
                                                std::uint64_t seed = 0x5eedULL) {
    return strong_positivity_check(op.matrix, cone, samples, seed);
}

}  // namespace monolab
