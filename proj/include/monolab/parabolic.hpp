#pragma once

// Period map of the nonlocally perturbed, time-periodic parabolic problem
//
//   u_t = D u_xx + f(t, x, u, u_x) + eps^2 C(t, x) * integral_0^1 p(x) u(t, x) dx,
//   u_x(t, 0) = u_x(t, 1) = 0,
//
// discretized by the method of lines on n vertices x_i = i / (n - 1):
// second-order central differences with Neumann ghost nodes and trapezoid
// quadrature for the nonlocal integral. The period map advances one period tau.

#include "monolab/systems.hpp"

#include <memory>
#include <string>

namespace monolab {

enum class Stepper { ImexEuler, Rk4 };

inline const char* to_string(Stepper s) { return s == Stepper::ImexEuler ? "imex_euler" : "rk4"; }

struct ParabolicConfig {
    int grid = 32;
    int max_grid = 128;  // dense Jacobians: desk-scale only
    double tau = 1.0;
    double diffusion = 1.0;
    int steps_per_period = 100;
    Stepper stepper = Stepper::ImexEuler;

    /// Named reaction: "zero", "logistic" (u (a - u)), "logistic_advect" (adds b u_x, upwinded).
    std::string reaction = "logistic";
    /// a(t, x) = a0 + a_time cos(2 pi t / tau) + a_space cos(pi x)
    double a0 = 1.0;
    double a_time = 0.0;
    double a_space = 0.0;
    double advect = 0.0;  // b in the gradient term

    /// C(t, x) = c0 + c_time cos(2 pi t / tau);  p(x) = p0 + p_space cos(pi x)
    double c0 = 1.0;
    double c_time = 0.0;
    double p0 = 1.0;
    double p_space = 0.0;

    double eps0 = 0.05;
    double box_lo = -1.0;
    double box_hi = 10.0;
};

namespace detail {

struct ParabolicModel {
    ParabolicConfig cfg;
    Eigen::Index n = 0;
    double h = 0.0;
    double dt = 0.0;
    Vector nodes;
    Vector quad_p;  // trapezoid weight * p(x_i)
    Matrix laplacian;
    Matrix upwind;       // b * first-order upwind derivative
    Matrix implicit_inv; // (I - dt D L)^{-1}
    bool has_reaction = false;

    double a(double t, double x) const {
        constexpr double two_pi = 6.283185307179586;
        constexpr double pi = 3.141592653589793;
        return cfg.a0 + cfg.a_time * std::cos(two_pi * t / cfg.tau) + cfg.a_space * std::cos(pi * x);
    }
    double c(double t) const {
        constexpr double two_pi = 6.283185307179586;
        return cfg.c0 + cfg.c_time * std::cos(two_pi * t / cfg.tau);
    }

    /// Explicit part: reaction + advection + nonlocal term.
    Vector explicit_rhs(double t, const Vector& u, double eps) const {
        Vector g = Vector::Zero(n);
        if (has_reaction) {
            for (Eigen::Index i = 0; i < n; ++i) g[i] = u[i] * (a(t, nodes[i]) - u[i]);
        }
        if (cfg.advect != 0.0) g += upwind * u;
        if (eps != 0.0) g.array() += eps * eps * c(t) * quad_p.dot(u);
        return g;
    }

    /// Derivative of explicit_rhs applied to a tangent block.
    template <class Tangent>
    Tangent explicit_rhs_tangent(double t, const Vector& u, double eps, const Tangent& v) const {
        Tangent out = Tangent::Zero(v.rows(), v.cols());
        if (has_reaction) {
            Vector fu(n);
            for (Eigen::Index i = 0; i < n; ++i) fu[i] = a(t, nodes[i]) - 2.0 * u[i];
            out = fu.asDiagonal() * v;
        }
        if (cfg.advect != 0.0) out += upwind * v;
        if (eps != 0.0) {
            const double coeff = eps * eps * c(t);
            // every row receives coeff * (quad_p^T v)
            out.rowwise() += coeff * (quad_p.transpose() * v);
        }
        return out;
    }

    template <class Tangent>
    Vector imex_period(double eps, const Vector& u0, Tangent* tan) const {
        Vector u = u0;
        for (int k = 0; k < cfg.steps_per_period; ++k) {
            const double t = k * dt;
            if (tan != nullptr) {
                Tangent g = *tan + dt * explicit_rhs_tangent(t, u, eps, *tan);
                *tan = implicit_inv * g;
            }
            u = implicit_inv * (u + dt * explicit_rhs(t, u, eps));
            if (!all_finite(u)) throw DivergenceError("parabolic period map: non-finite state", u0, k);
        }
        return u;
    }
};

}  // namespace detail

/// Builds the period map F_eps : u0 -> u(tau; eps, u0).
inline System build_parabolic_period_map(const ParabolicConfig& cfg) {
    if (cfg.grid < 8) throw ConfigError("parabolic: grid size must be >= 8");
    if (cfg.grid > cfg.max_grid) {
        throw ConfigError("parabolic: grid size " + std::to_string(cfg.grid) + " exceeds max_grid " +
                          std::to_string(cfg.max_grid));
    }
    if (!(cfg.tau > 0.0) || !(cfg.diffusion > 0.0)) throw ConfigError("parabolic: tau and diffusion must be positive");
    if (cfg.steps_per_period < 1) throw ConfigError("parabolic: steps_per_period must be >= 1");
    if (cfg.reaction != "zero" && cfg.reaction != "logistic" && cfg.reaction != "logistic_advect") {
        throw ConfigError("parabolic: unknown reaction form '" + cfg.reaction + "'");
    }
    if (cfg.advect != 0.0 && cfg.reaction != "logistic_advect") {
        throw ConfigError("parabolic: advect requires reaction 'logistic_advect'");
    }

    auto m = std::make_shared<detail::ParabolicModel>();
    m->cfg = cfg;
    const Eigen::Index n = cfg.grid;
    m->n = n;
    m->h = 1.0 / static_cast<double>(n - 1);
    m->dt = cfg.tau / cfg.steps_per_period;
    m->has_reaction = cfg.reaction != "zero";

    constexpr double pi = 3.141592653589793;
    m->nodes = Vector::LinSpaced(n, 0.0, 1.0);
    m->quad_p = Vector::Constant(n, m->h);
    m->quad_p[0] *= 0.5;
    m->quad_p[n - 1] *= 0.5;
    for (Eigen::Index i = 0; i < n; ++i) m->quad_p[i] *= cfg.p0 + cfg.p_space * std::cos(pi * m->nodes[i]);

    // Ghost nodes u_{-1} = u_1 and u_n = u_{n-2} give the Neumann condition.
    const double inv_h2 = 1.0 / (m->h * m->h);
    m->laplacian = Matrix::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const Eigen::Index l = i == 0 ? 1 : i - 1;
        const Eigen::Index r = i == n - 1 ? n - 2 : i + 1;
        m->laplacian(i, l) += inv_h2;
        m->laplacian(i, r) += inv_h2;
        m->laplacian(i, i) -= 2.0 * inv_h2;
    }
    m->upwind = Matrix::Zero(n, n);
    if (cfg.advect != 0.0) {
        // b u_x with the difference taken on the upwind side of the transport.
        const double b = cfg.advect;
        for (Eigen::Index i = 0; i < n; ++i) {
            if (b > 0.0) {
                const Eigen::Index r = i == n - 1 ? n - 2 : i + 1;
                m->upwind(i, r) += b / m->h;
                m->upwind(i, i) -= b / m->h;
            } else {
                const Eigen::Index l = i == 0 ? 1 : i - 1;
                m->upwind(i, i) += b / m->h;
                m->upwind(i, l) -= b / m->h;
            }
        }
    }

    System s;
    s.name = "parabolic_" + cfg.reaction;
    s.kind = SystemKind::ParabolicPeriod;
    s.n = n;
    s.eps0 = cfg.eps0;
    s.box = Box::uniform(static_cast<std::size_t>(n), cfg.box_lo, cfg.box_hi);

    if (cfg.stepper == Stepper::ImexEuler) {
        const Matrix lhs = Matrix::Identity(n, n) - m->dt * cfg.diffusion * m->laplacian;
        m->implicit_inv = lhs.partialPivLu().inverse();
        std::shared_ptr<const detail::ParabolicModel> model = m;
        s.map = [model](double eps, const Vector& u) { return model->imex_period<Matrix>(eps, u, nullptr); };
        s.jac = [model](double eps, const Vector& u) {
            Matrix j = Matrix::Identity(model->n, model->n);
            model->imex_period(eps, u, &j);
            return j;
        };
        s.tangent = [model](double eps, const Vector& u, const Vector& v) {
            Vector dv = v;
            Vector y = model->imex_period(eps, u, &dv);
            return std::make_pair(std::move(y), std::move(dv));
        };
        return s;
    }

    // Explicit RK4 on the full semi-discrete system; stable only below the
    // real-axis RK4 bound |dt * lambda_max| <= 2.785.
    const double lambda_max = 4.0 * cfg.diffusion * inv_h2;
    if (m->dt * lambda_max > 2.785) {
        throw ConfigError("parabolic: RK4 step " + std::to_string(m->dt) + " violates the stability bound " +
                          std::to_string(2.785 / lambda_max) + "; increase steps_per_period");
    }
    std::shared_ptr<const detail::ParabolicModel> model = m;
    OdeField field;
    field.f = [model](double t, const Vector& u, double eps) {
        return Vector(model->cfg.diffusion * (model->laplacian * u) + model->explicit_rhs(t, u, eps));
    };
    field.dfdx = [model](double t, const Vector& u, double eps) {
        const Matrix eye = Matrix::Identity(model->n, model->n);
        return Matrix(model->cfg.diffusion * model->laplacian + model->explicit_rhs_tangent(t, u, eps, eye));
    };
    System r = make_ode_time_tau(s.name, n, std::move(field), cfg.tau, cfg.steps_per_period, cfg.eps0, s.box);
    r.kind = SystemKind::ParabolicPeriod;
    return r;
}

}  // namespace monolab
