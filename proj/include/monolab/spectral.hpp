#pragma once

// Lyapunov exponents along orbits, Krein-Rutman splittings of positive
// matrices, and exponential-separation estimates for the bundle products.
//
// The limsup in the exponent definitions is replaced by finite horizons:
// directional exponents use the full horizon, the principal exponent averages
// the renormalized log growth over a tail fraction to suppress transients.

#include "monolab/bundle.hpp"
#include "monolab/random.hpp"
#include "monolab/systems.hpp"

#include <Eigen/Eigenvalues>

#include <numeric>
#include <optional>
#include <vector>

namespace monolab {

struct LyapunovEstimate {
    double value = 0.0;
    int horizon = 0;
    std::optional<Vector> direction;  // empty: principal exponent
    double tail_fraction = 1.0;
    std::vector<double> log_growth;   // per-step log of renormalization factors
};

namespace detail {

/// Pushes `v` through the tangent map along the orbit of x, renormalizing
/// every step. Returns per-step log growth factors.
inline std::vector<double> renormalized_growth(const System& sys, double eps, const Vector& x, Vector v, int steps) {
    std::vector<double> logs;
    logs.reserve(static_cast<std::size_t>(steps));
    Vector state = x;
    for (int k = 0; k < steps; ++k) {
        auto [next, w] = tangent(sys, eps, state, v);
        if (!sys.box.contains(next)) {
            throw DivergenceError("lyapunov: orbit left the admissible box at step " + std::to_string(k + 1), state,
                                  k + 1);
        }
        const double g = w.norm();
        if (!(g > kMachineFloor)) {
            throw AnnihilationError("lyapunov: tangent vector annihilated at step " + std::to_string(k + 1));
        }
        logs.push_back(std::log(g));
        v = w / g;
        state = std::move(next);
    }
    return logs;
}

}  // namespace detail

/// (1/N) log(||DF^N(x) v|| / ||v||) with per-step renormalization.
inline LyapunovEstimate finite_time_lyapunov(const System& sys, double eps, const Vector& x, const Vector& v, int N) {
    if (N < 1) throw InvalidInput("finite_time_lyapunov: N must be >= 1");
    require_same_size(x, v, "finite_time_lyapunov");
    const double v_norm = v.norm();
    if (!(v_norm > 0.0)) throw InvalidInput("finite_time_lyapunov: direction must be nonzero");
    LyapunovEstimate est;
    est.horizon = N;
    est.direction = v;
    est.log_growth = detail::renormalized_growth(sys, eps, x, v / v_norm, N);
    const double total = std::accumulate(est.log_growth.begin(), est.log_growth.end(), 0.0);
    est.value = total / N;
    return est;
}

/// Principal exponent lambda_1(x): power iteration of a random positive start
/// vector along the orbit, averaging log growth over the last tail_fraction * N steps.
inline LyapunovEstimate principal_lyapunov(const System& sys, double eps, const Vector& x, int N,
                                           double tail_fraction = 0.5, std::uint64_t seed = 0x1a9u) {
    if (N < 1) throw InvalidInput("principal_lyapunov: N must be >= 1");
    if (!(tail_fraction > 0.0 && tail_fraction <= 1.0)) throw InvalidInput("principal_lyapunov: bad tail fraction");
    Rng rng(seed);
    Vector v = rng.uniform_vector(sys.n, 0.5, 1.0);
    v.normalize();
    LyapunovEstimate est;
    est.horizon = N;
    est.tail_fraction = tail_fraction;
    est.log_growth = detail::renormalized_growth(sys, eps, x, v, N);
    const int tail = std::max(1, static_cast<int>(std::lround(tail_fraction * N)));
    const auto first = est.log_growth.end() - tail;
    est.value = std::accumulate(first, est.log_growth.end(), 0.0) / tail;
    return est;
}

// ---------------------------------------------------------------------------
// Krein-Rutman splitting
// ---------------------------------------------------------------------------

struct KreinRutmanSplit {
    double rho = 0.0;
    Vector right;  // unit, entrywise > 0
    Vector left;   // unit, entrywise > 0
    Matrix projection;   // P = v l^T / (l^T v)
    Matrix complement;   // Q = I - P
    double beta_hat = 0.0;
    double m_hat = 0.0;
    int window = 0;
    std::vector<double> window_norms;  // ||(QAQ)^n||_2 for n = 1..window
    std::vector<double> rayleigh_history;
};

struct KreinRutmanOptions {
    double tol = 1e-12;
    int max_iter = 20000;
    int window = 50;
    double negativity_tol = 1e-12;
};

namespace detail {

struct PerronPair {
    double value = 0.0;
    Vector vector;
};

inline PerronPair perron_power_iteration(const Matrix& a, const KreinRutmanOptions& opt,
                                         std::vector<double>& history) {
    const Eigen::Index n = a.rows();
    Vector v = Vector::Ones(n).normalized();
    for (int it = 0; it < opt.max_iter; ++it) {
        Vector av = a * v;
        const double rq = v.dot(av);
        history.push_back(rq);
        const double nrm = av.norm();
        if (!(nrm > kMachineFloor)) throw GapFailure("krein_rutman_split: iterate annihilated", history);
        if ((av - rq * v).norm() <= opt.tol * std::abs(rq)) {
            v = av / nrm;
            return {rq, v};
        }
        v = av / nrm;
    }
    throw GapFailure("krein_rutman_split: power iteration did not converge within " +
                         std::to_string(opt.max_iter) + " iterations",
                     history);
}

inline double spectral_norm(const Matrix& m) {
    Eigen::JacobiSVD<Matrix> svd(m);
    return svd.singularValues().size() ? svd.singularValues()[0] : 0.0;
}

}  // namespace detail

/// Dominant eigenpair of an entrywise nonnegative matrix by power iteration on
/// A and A^T, the rank-one Perron projection, and the decay of the
/// complementary block QAQ over a window of powers.
inline KreinRutmanSplit krein_rutman_split(const Matrix& a, const KreinRutmanOptions& opt = {}) {
    if (a.rows() != a.cols() || a.rows() == 0) throw InvalidInput("krein_rutman_split: matrix must be square");
    if (!(opt.tol > 0.0)) throw InvalidInput("krein_rutman_split: tol must be positive");
    if (a.minCoeff() < -opt.negativity_tol) throw InvalidInput("krein_rutman_split: matrix has negative entries");
    KreinRutmanSplit out;
    auto right = detail::perron_power_iteration(a, opt, out.rayleigh_history);
    auto left = detail::perron_power_iteration(a.transpose(), opt, out.rayleigh_history);
    out.rho = right.value;
    if (!(out.rho > 0.0)) throw GapFailure("krein_rutman_split: dominant value is not positive", out.rayleigh_history);
    out.right = right.vector;
    out.left = left.vector;
    const Eigen::Index n = a.rows();
    out.projection = out.right * out.left.transpose() / out.left.dot(out.right);
    out.complement = Matrix::Identity(n, n) - out.projection;

    out.window = opt.window;
    const Matrix b = out.complement * a * out.complement;
    Matrix power = Matrix::Identity(n, n);
    out.window_norms.reserve(static_cast<std::size_t>(opt.window));
    for (int k = 1; k <= opt.window; ++k) {
        power = b * power;
        out.window_norms.push_back(detail::spectral_norm(power));
    }
    if (opt.window > 0) {
        out.beta_hat = std::pow(out.window_norms.back(), 1.0 / opt.window);
        out.m_hat = 0.0;
        for (int k = 1; k <= opt.window; ++k) {
            const double scale = std::pow(out.beta_hat, k);
            const double ratio = scale > kMachineFloor ? out.window_norms[static_cast<std::size_t>(k - 1)] / scale : 0.0;
            out.m_hat = std::max(out.m_hat, ratio);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Exponential separation along paired orbits
// ---------------------------------------------------------------------------

struct SeparationEstimate {
    double gamma_hat = 0.0;
    double m_hat = 0.0;
    bool separated = false;  // gamma_hat < 1
    int horizon = 0;
    std::vector<double> ratios;  // per-step growth of w relative to v
};

/// Pushes the Perron direction v of R_{(x,y)} and a complementary unit vector
/// w (l^T w = 0) through the averaged Jacobians along the paired orbit. w is
/// kept orthogonal to v after every step, so its growth is the growth of the
/// complementary bundle; gamma_hat is the geometric mean of the per-step ratio
/// over the tail.
inline SeparationEstimate separation_gap(const System& sys, double eps, const Vector& x, const Vector& y, int N,
                                         int quad_nodes = kDefaultQuadNodes, double tail_fraction = 0.5,
                                         std::uint64_t seed = 0x9a9u) {
    if (N < 1) throw InvalidInput("separation_gap: N must be >= 1");
    require_same_size(x, y, "separation_gap");
    SeparationEstimate est;
    est.horizon = N;
    const Eigen::Index n = sys.n;
    if (n == 1) {
        est.separated = true;
        return est;
    }

    const Matrix r0 = averaged_jacobian(sys, eps, x, y, quad_nodes).matrix;
    Vector v;
    Vector l;
    try {
        const auto kr = krein_rutman_split(r0, KreinRutmanOptions{1e-12, 20000, 0});
        v = kr.right;
        l = kr.left;
    } catch (const std::exception&) {
        // Not a positive operator: fall back to a symmetric start.
        v = Vector::Ones(n).normalized();
        l = v;
    }
    Rng rng(seed);
    Vector w;
    for (int attempt = 0; attempt < 8; ++attempt) {
        const Vector u = rng.uniform_vector(n, -1.0, 1.0);
        w = u - (l.dot(u) / l.squaredNorm()) * l;
        if (w.norm() > 1e-8) break;
    }
    w.normalize();

    Vector xk = x;
    Vector yk = y;
    for (int k = 0; k < N; ++k) {
        const Matrix r = k == 0 ? r0 : averaged_jacobian(sys, eps, xk, yk, quad_nodes).matrix;
        Vector tv = r * v;
        Vector tw = r * w;
        const double gv = tv.norm();
        if (!(gv > kMachineFloor)) throw AnnihilationError("separation_gap: Perron direction annihilated");
        v = tv / gv;
        tw -= v.dot(tw) * v;
        const double gw = tw.norm();
        if (!(gw > kMachineFloor * gv)) {
            est.ratios.push_back(0.0);
            break;
        }
        w = tw / gw;
        est.ratios.push_back(gw / gv);
        if (k + 1 < N) {
            xk = evaluate(sys, eps, xk);
            yk = evaluate(sys, eps, yk);
        }
    }

    if (!est.ratios.empty() && est.ratios.back() == 0.0) {
        est.gamma_hat = 0.0;
        est.m_hat = 1.0;
        est.separated = true;
        return est;
    }
    const int count = static_cast<int>(est.ratios.size());
    const int tail = std::max(1, static_cast<int>(std::lround(tail_fraction * count)));
    double log_sum = 0.0;
    for (int k = count - tail; k < count; ++k) log_sum += std::log(est.ratios[static_cast<std::size_t>(k)]);
    est.gamma_hat = std::exp(log_sum / tail);
    double log_prod = 0.0;
    est.m_hat = 0.0;
    for (int k = 0; k < count; ++k) {
        log_prod += std::log(est.ratios[static_cast<std::size_t>(k)]) - std::log(est.gamma_hat);
        est.m_hat = std::max(est.m_hat, std::exp(log_prod));
    }
    est.separated = est.gamma_hat < 1.0;
    return est;
}

}  // namespace monolab
