#pragma once

// The dynamics-alternative classifier for an orbit of F_eps:
//
//   norm test:      some z in omega(x) keeps ||DF^n(z)|| < M* for all n <= H
//                   (stable branch) or every z exceeds M* at some n(z) <= H;
//   Lyapunov test:  some z in omega(x) has lambda_1(z) <= 0, or all are > 0.
//
// The stable branch is confirmed by the cycle pipeline; the unstable branch
// needs a witness: a C1 expansion vector w with DF^{nu(z)}(z) w >>_1 3w, or a
// separation estimate delta_hat from paired orbits. Without confirmation the
// verdict is `undecided`.
//
// Also here: the order-gap monitor xi_n, the search for the integer q after
// which iterates are strongly monotone with respect to C1, the local
// trichotomy near stable fixed points, and Lyapunov robustness scans.

#include "monolab/bundle.hpp"
#include "monolab/cycles.hpp"
#include "monolab/order_space.hpp"
#include "monolab/random.hpp"
#include "monolab/spectral.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace monolab {

enum class Verdict { StableCycle, Unstable, Undecided };

inline const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::StableCycle: return "stable_cycle";
        case Verdict::Unstable: return "unstable";
        case Verdict::Undecided: return "undecided";
    }
    return "unknown";
}

struct PipelineOptions {
    CycleOptions cycle;
    double m_star = 1e6;
    int horizon = 500;          // H for the norm test
    int lyapunov_horizon = 500; // N for the Lyapunov test
    double lyapunov_tail = 0.5;
    double lambda_tol = 1e-6;
    int nu_cap = 50;
    int probe_horizon = 200;
    std::vector<double> probe_ladder{1e-2, 1e-3, 1e-4};
    double probe_floor = 1e-8;
    double probe_ratio_min = 0.1;
    int q = 1;  // step of the paired-orbit probe (F^q)
    double theta = 0.5;
    double interior_tol = 1e-9;

    ConeSpec cone(Eigen::Index n) const { return ConeSpec(n, theta, interior_tol); }
};

struct ExpansionWitness {
    Vector w;
    std::vector<int> nu;  // nu(z) per omega representative
};

struct NormGrowth {
    std::size_t representative = 0;
    int exceed_step = -1;  // n(z), or -1 if ||DF^n(z)|| < M* for all n <= H
    double max_norm = 0.0;
};

struct ClassificationReport {
    Verdict verdict = Verdict::Undecided;
    std::string method;  // "norm_test" or "lyapunov"
    std::optional<CycleRecord> cycle;
    std::vector<Vector> omega_representatives;
    std::vector<NormGrowth> norm_growth;
    std::vector<std::pair<Vector, LyapunovEstimate>> lambda1_samples;
    double m_star = 0.0;
    int horizon = 0;
    std::optional<double> delta_hat;
    bool separation_by_escape = false;
    std::optional<ExpansionWitness> expansion_witness;
    bool diverged = false;
    std::vector<std::string> diagnostics;
};

// ---------------------------------------------------------------------------
// Witness searches
// ---------------------------------------------------------------------------

namespace detail {

/// Smallest nu in [1, nu_cap] with DF^nu(z) w >>_1 3w, or -1.
inline int expansion_exponent(const System& sys, double eps, const Vector& z, const Vector& w, const ConeSpec& cone,
                              int nu_cap) {
    Vector state = z;
    Vector v = w;
    const Vector target = 3.0 * w;
    for (int nu = 1; nu <= nu_cap; ++nu) {
        auto [next, dv] = tangent(sys, eps, state, v);
        if (ll(target, dv, cone, ConeKind::C1)) return nu;
        state = std::move(next);
        v = std::move(dv);
    }
    return -1;
}

/// Dominant eigenvector by plain power iteration, sign-fixed to be positive;
/// empty if the result is not in C1.
inline std::optional<Vector> perron_candidate(const Matrix& a, const ConeSpec& cone) {
    Vector v = Vector::Ones(a.rows()).normalized();
    for (int it = 0; it < 500; ++it) {
        Vector av = a * v;
        const double nrm = av.norm();
        if (!(nrm > kMachineFloor)) return std::nullopt;
        av /= nrm;
        if (av.sum() < 0.0) av = -av;
        const bool done = (av - v).norm() < 1e-13;
        v = std::move(av);
        if (done) break;
    }
    if (!in_cone(v, cone, ConeKind::C1)) return std::nullopt;
    return v;
}

}  // namespace detail

/// Searches for a unit w in C1 with DF^{nu(z)}(z) w >>_1 3w for every z in
/// omega_reps, nu(z) <= nu_cap. Candidates are the normalized order unit and
/// Perron vectors of DF^k(z) for small k.
inline std::optional<ExpansionWitness> expansion_witness(const System& sys, double eps,
                                                         const std::vector<Vector>& omega_reps, const ConeSpec& cone,
                                                         int nu_cap = 50) {
    if (omega_reps.empty()) throw InvalidInput("expansion_witness: no omega representatives");
    std::vector<Vector> candidates;
    candidates.push_back(cone.e.normalized());
    for (const Vector& z : omega_reps) {
        for (int k : {1, 2, 4}) {
            if (auto v = detail::perron_candidate(jacobian_power(sys, eps, z, k).matrix, cone)) {
                candidates.push_back(v->normalized());
            }
        }
        if (candidates.size() > 16) break;
    }
    for (const Vector& w : candidates) {
        ExpansionWitness wit;
        wit.w = w;
        bool ok = true;
        for (const Vector& z : omega_reps) {
            const int nu = detail::expansion_exponent(sys, eps, z, w, cone, nu_cap);
            if (nu < 0) {
                ok = false;
                break;
            }
            wit.nu.push_back(nu);
        }
        if (ok) return wit;
    }
    return std::nullopt;
}

struct ProbeResult {
    std::optional<double> delta_hat;
    bool escaped = false;
    std::vector<double> proxies;  // per (direction, sign, offset), ladder-major within each direction
};

/// Paired-orbit separation probe. For each direction d, sign and offset h in
/// the ladder, runs y = x +- h d alongside x under F^{n_q} and takes the max of
/// ||F^{k n_q} x - F^{k n_q} y|| over the final third of the horizon. An orbit
/// leaving the admissible box counts as separation by escape. delta_hat is
/// accepted only if the separation does not shrink with h across the ladder.
inline ProbeResult instability_probe(const System& sys, double eps, const Vector& x,
                                     const std::vector<Vector>& directions, int n_q, int horizon,
                                     const PipelineOptions& opt = {}) {
    if (directions.empty()) throw InvalidInput("instability_probe: no directions");
    if (n_q < 1 || horizon < 3) throw InvalidInput("instability_probe: need n_q >= 1 and horizon >= 3");
    ProbeResult out;
    double delta = std::numeric_limits<double>::infinity();
    bool consistent = true;
    for (const Vector& d_raw : directions) {
        require_same_size(x, d_raw, "instability_probe");
        const double dn = sup_norm(d_raw);
        if (!(dn > 0.0)) throw InvalidInput("instability_probe: zero direction");
        const Vector d = d_raw / dn;
        for (double sign : {1.0, -1.0}) {
            std::vector<double> ladder_proxy;
            for (double h : opt.probe_ladder) {
                Vector xs = x;
                Vector ys = x + sign * h * d;
                double proxy = 0.0;
                double running_max = 0.0;
                bool escaped = false;
                const int third_start = horizon - horizon / 3;
                for (int k = 1; k <= horizon; ++k) {
                    try {
                        xs = evaluate_power(sys, eps, xs, n_q);
                        ys = evaluate_power(sys, eps, ys, n_q);
                    } catch (const DivergenceError&) {
                        escaped = true;
                        break;
                    }
                    const double sep = sup_norm(xs - ys);
                    running_max = std::max(running_max, sep);
                    if (k >= third_start) proxy = std::max(proxy, sep);
                }
                if (escaped) {
                    proxy = running_max;
                    out.escaped = true;
                }
                ladder_proxy.push_back(proxy);
                out.proxies.push_back(proxy);
                delta = std::min(delta, proxy);
            }
            const double lo = *std::min_element(ladder_proxy.begin(), ladder_proxy.end());
            const double hi = *std::max_element(ladder_proxy.begin(), ladder_proxy.end());
            if (!(hi > 0.0) || lo / hi < opt.probe_ratio_min) consistent = false;
        }
    }
    if (consistent && delta > opt.probe_floor) out.delta_hat = delta;
    return out;
}

// ---------------------------------------------------------------------------
// Classifiers
// ---------------------------------------------------------------------------

namespace detail {

struct CycleOutcome {
    std::optional<CycleRecord> cycle;
    std::string diagnostics;
};

inline CycleOutcome run_cycle_pipeline(const System& sys, double eps, const Vector& z, const PipelineOptions& opt) {
    auto det = detect_cycle_with_diagnostics(sys, eps, z, opt.cycle);
    if (!det.cycle) return {std::nullopt, det.diagnostics};
    return {classify_stability(sys, eps, std::move(*det.cycle), opt.cycle.stab_tol), {}};
}

/// max_{n <= H} ||DF^n(z)||_inf with early exit at M*. When z lies on a
/// detected cycle the Jacobians along the (periodic) orbit are reused.
inline NormGrowth norm_growth(const System& sys, double eps, const Vector& z, const std::optional<CycleRecord>& cycle,
                              const PipelineOptions& opt) {
    NormGrowth g;
    Matrix acc = Matrix::Identity(sys.n, sys.n);
    std::vector<Matrix> cyc;
    if (cycle) {
        for (const Vector& s : cycle->states) cyc.push_back(jacobian(sys, eps, s).matrix);
    }
    Vector state = cycle ? cycle->base() : z;
    for (int n = 1; n <= opt.horizon; ++n) {
        if (!cyc.empty()) {
            acc = cyc[static_cast<std::size_t>((n - 1) % static_cast<int>(cyc.size()))] * acc;
        } else {
            acc = jacobian(sys, eps, state).matrix * acc;
            state = evaluate(sys, eps, state);
        }
        const double nrm = sup_operator_norm(acc);
        g.max_norm = std::max(g.max_norm, nrm);
        if (nrm >= opt.m_star) {
            g.exceed_step = n;
            return g;
        }
    }
    return g;
}

inline std::vector<Vector> probe_directions(const System& sys, double eps, const std::vector<Vector>& reps,
                                            const ConeSpec& cone) {
    std::vector<Vector> dirs{cone.e};
    try {
        if (auto v = perron_candidate(jacobian(sys, eps, reps.front()).matrix, cone)) dirs.push_back(*v);
    } catch (const std::exception&) {
    }
    return dirs;
}

/// Fills delta_hat / expansion_witness for the unstable branch. Returns true if
/// at least one witness was found.
inline bool attach_instability_witness(const System& sys, double eps, const PipelineOptions& opt,
                                       ClassificationReport& rep) {
    const ConeSpec cone = opt.cone(sys.n);
    try {
        rep.expansion_witness = expansion_witness(sys, eps, rep.omega_representatives, cone, opt.nu_cap);
    } catch (const DivergenceError& e) {
        rep.diagnostics.emplace_back(std::string("expansion witness search diverged: ") + e.what());
    }
    if (rep.expansion_witness) return true;
    const auto& z = rep.omega_representatives.front();
    const ProbeResult probe =
        instability_probe(sys, eps, z, probe_directions(sys, eps, rep.omega_representatives, cone), opt.q,
                          opt.probe_horizon, opt);
    rep.delta_hat = probe.delta_hat;
    rep.separation_by_escape = probe.escaped;
    return rep.delta_hat.has_value();
}

/// Shared front end: omega-limit approximation with divergence/settling checks.
inline bool prepare_omega(const System& sys, double eps, const Vector& x, const PipelineOptions& opt,
                          ClassificationReport& rep) {
    try {
        const OmegaLimit om = omega_limit(sys, eps, x, opt.cycle.transient, opt.cycle.tail, opt.cycle.cluster_tol,
                                          opt.cycle.settle_tol, opt.cycle.max_clusters);
        rep.omega_representatives = om.representatives;
        if (!om.settled) {
            rep.diagnostics.push_back(om.cluster_overflow ? "omega-limit cluster cap exceeded"
                                                          : "omega-limit not settled, tail gap " +
                                                                std::to_string(om.tail_gap));
            return false;
        }
    } catch (const DivergenceError& e) {
        rep.diverged = true;
        rep.diagnostics.emplace_back(std::string("divergence: ") + e.what());
        return false;
    }
    return true;
}

}  // namespace detail

/// Norm-growth form of the alternative.
inline ClassificationReport classify_norm_test(const System& sys, double eps, const Vector& x,
                                               const PipelineOptions& opt = {}) {
    if (!(opt.m_star > 1.0) || opt.horizon < 1) throw InvalidInput("classify_norm_test: need M* > 1 and H >= 1");
    ClassificationReport rep;
    rep.method = "norm_test";
    rep.m_star = opt.m_star;
    rep.horizon = opt.horizon;
    if (!detail::prepare_omega(sys, eps, x, opt, rep)) return rep;

    try {
        std::optional<std::size_t> bounded;
        std::vector<std::optional<CycleRecord>> cycles(rep.omega_representatives.size());
        for (std::size_t i = 0; i < rep.omega_representatives.size(); ++i) {
            const Vector& z = rep.omega_representatives[i];
            auto outcome = detail::run_cycle_pipeline(sys, eps, z, opt);
            if (!outcome.cycle) rep.diagnostics.push_back("representative " + std::to_string(i) + ": " + outcome.diagnostics);
            NormGrowth g = detail::norm_growth(sys, eps, z, outcome.cycle, opt);
            g.representative = i;
            rep.norm_growth.push_back(g);
            cycles[i] = std::move(outcome.cycle);
            if (g.exceed_step < 0 && !bounded) bounded = i;
        }
        if (bounded) {
            const auto& c = cycles[*bounded];
            if (c && c->stable) {
                rep.verdict = Verdict::StableCycle;
                rep.cycle = c;
            } else {
                rep.cycle = c;
                rep.diagnostics.emplace_back(c ? "bounded derivative growth but the cycle is not linearly stable"
                                               : "bounded derivative growth but no cycle detected");
            }
            return rep;
        }
        if (detail::attach_instability_witness(sys, eps, opt, rep)) {
            rep.verdict = Verdict::Unstable;
        } else {
            rep.diagnostics.emplace_back("derivative growth exceeded M* but no instability witness was found");
        }
    } catch (const DivergenceError& e) {
        rep.diverged = true;
        rep.diagnostics.emplace_back(std::string("divergence: ") + e.what());
    }
    return rep;
}

/// Lyapunov-exponent form of the alternative.
inline ClassificationReport classify_lyapunov(const System& sys, double eps, const Vector& x,
                                              const PipelineOptions& opt = {}) {
    if (opt.lyapunov_horizon < 1) throw InvalidInput("classify_lyapunov: N must be >= 1");
    ClassificationReport rep;
    rep.method = "lyapunov";
    rep.horizon = opt.lyapunov_horizon;
    rep.m_star = opt.m_star;
    if (!detail::prepare_omega(sys, eps, x, opt, rep)) return rep;

    try {
        std::optional<std::size_t> nonpositive;
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < rep.omega_representatives.size(); ++i) {
            const Vector& z = rep.omega_representatives[i];
            double value;
            try {
                LyapunovEstimate est = principal_lyapunov(sys, eps, z, opt.lyapunov_horizon, opt.lyapunov_tail);
                value = est.value;
                rep.lambda1_samples.emplace_back(z, std::move(est));
            } catch (const AnnihilationError&) {
                // Tangent collapsed to zero: growth rate is -infinity.
                value = -std::numeric_limits<double>::infinity();
                LyapunovEstimate est;
                est.value = -std::numeric_limits<double>::max();
                est.horizon = opt.lyapunov_horizon;
                rep.lambda1_samples.emplace_back(z, std::move(est));
                rep.diagnostics.emplace_back("tangent annihilated at representative " + std::to_string(i));
            }
            if (value <= opt.lambda_tol && value < best) {
                best = value;
                nonpositive = i;
            }
        }
        if (nonpositive) {
            auto outcome = detail::run_cycle_pipeline(sys, eps, rep.omega_representatives[*nonpositive], opt);
            rep.cycle = outcome.cycle;
            if (outcome.cycle && outcome.cycle->stable) {
                rep.verdict = Verdict::StableCycle;
            } else {
                rep.diagnostics.emplace_back(outcome.cycle ? "lambda_1 <= 0 but the cycle is not linearly stable"
                                                           : "lambda_1 <= 0 but no cycle detected: " + outcome.diagnostics);
            }
            return rep;
        }
        if (detail::attach_instability_witness(sys, eps, opt, rep)) {
            rep.verdict = Verdict::Unstable;
        } else {
            rep.diagnostics.emplace_back("lambda_1 > 0 everywhere but no instability witness was found");
        }
    } catch (const DivergenceError& e) {
        rep.diverged = true;
        rep.diagnostics.emplace_back(std::string("divergence: ") + e.what());
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Order-gap monitor
// ---------------------------------------------------------------------------

struct XiTrace {
    std::vector<double> xi;
    std::optional<int> stopped_at;  // index where y_n - x_n left C1
};

/// xi_n = sup{xi > 0 : x_n + xi w <=_1 y_n} along the paired orbits.
inline XiTrace xi_monitor(const System& sys, double eps, const Vector& x, const Vector& y, const Vector& w,
                          const ConeSpec& cone, int n_steps) {
    if (!lt(x, y, cone, ConeKind::C1)) throw InvalidInput("xi_monitor: need x <_1 y");
    if (!in_cone(w, cone, ConeKind::C1) || w.isZero()) throw InvalidInput("xi_monitor: w must lie in C1 \\ {0}");
    XiTrace out;
    Vector xs = x;
    Vector ys = y;
    for (int k = 0; k <= n_steps; ++k) {
        const double xi = c1_order_gap(ys - xs, w, cone);
        if (xi < 0.0) {
            out.stopped_at = k;
            return out;
        }
        out.xi.push_back(xi);
        if (k < n_steps) {
            xs = evaluate(sys, eps, xs);
            ys = evaluate(sys, eps, ys);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Eventual strong monotonicity with respect to C1
// ---------------------------------------------------------------------------

struct MonotonicityViolation {
    int q = 0;
    double eps = 0.0;
    Vector x;
    Vector y;
    int n = 0;
    std::string reason;
};

struct MonotonicityResult {
    std::optional<int> q;
    std::optional<MonotonicityViolation> failure;
};

/// Ordered pairs x <_1 y inside `box`, drawn reproducibly.
inline std::vector<std::pair<Vector, Vector>> sample_ordered_pairs(const Box& box, const ConeSpec& cone, int count,
                                                                   std::uint64_t seed) {
    Rng rng(seed);
    std::vector<std::pair<Vector, Vector>> pairs;
    const double width = (box.hi - box.lo).minCoeff();
    while (static_cast<int>(pairs.size()) < count) {
        const Vector x = rng.uniform_vector(box);
        const Vector v = rng.c1_vector(cone.n, cone.theta);
        double step = rng.uniform(0.01, 0.2) * width;
        Vector y = x + step * v;
        for (int shrink = 0; shrink < 40 && !box.contains(y); ++shrink) {
            step *= 0.5;
            y = x + step * v;
        }
        if (box.contains(y) && step > 0.0) pairs.emplace_back(x, y);
    }
    return pairs;
}

/// Smallest q <= q_cap such that, for every eps in the grid and every sampled
/// pair x <_1 y in the box, F^n x and F^n y stay in the box and
/// F^n x <<_1 F^n y for n in {q, q+1, 2q}.
inline MonotonicityResult find_monotonicity_q(const System& sys, const Box& box, const ConeSpec& cone,
                                              const std::vector<double>& eps_grid, int q_cap, int pair_samples,
                                              std::uint64_t seed = 0x0a11ULL) {
    if (q_cap < 1) throw InvalidInput("find_monotonicity_q: q_cap must be >= 1");
    if (eps_grid.empty()) throw InvalidInput("find_monotonicity_q: empty eps grid");
    const auto pairs = sample_ordered_pairs(box, cone, pair_samples, seed);
    const int depth = 2 * q_cap;

    // Orbits up to 2 q_cap for every (eps, pair); an orbit that diverges is
    // truncated and the step at which it stopped recorded.
    struct PairOrbit {
        double eps;
        std::size_t pair;
        std::vector<Vector> xs, ys;
    };
    std::vector<PairOrbit> orbits;
    for (double eps : eps_grid) {
        for (std::size_t p = 0; p < pairs.size(); ++p) {
            PairOrbit o{eps, p, {pairs[p].first}, {pairs[p].second}};
            try {
                for (int k = 0; k < depth; ++k) {
                    o.xs.push_back(evaluate(sys, eps, o.xs.back()));
                    o.ys.push_back(evaluate(sys, eps, o.ys.back()));
                }
            } catch (const DivergenceError&) {
            }
            orbits.push_back(std::move(o));
        }
    }

    MonotonicityResult res;
    for (int q = 1; q <= q_cap; ++q) {
        std::optional<MonotonicityViolation> violation;
        for (const PairOrbit& o : orbits) {
            for (int n : {q, q + 1, 2 * q}) {
                MonotonicityViolation v{q, o.eps, pairs[o.pair].first, pairs[o.pair].second, n, {}};
                if (static_cast<int>(o.xs.size()) <= n || static_cast<int>(o.ys.size()) <= n) {
                    v.reason = "orbit diverged";
                } else if (!box.contains(o.xs[static_cast<std::size_t>(n)]) ||
                           !box.contains(o.ys[static_cast<std::size_t>(n)])) {
                    v.reason = "iterate left the region";
                } else if (!ll(o.xs[static_cast<std::size_t>(n)], o.ys[static_cast<std::size_t>(n)], cone,
                               ConeKind::C1)) {
                    v.reason = "F^n x <<_1 F^n y fails";
                } else {
                    continue;
                }
                violation = std::move(v);
                break;
            }
            if (violation) break;
        }
        if (!violation) {
            res.q = q;
            return res;
        }
        res.failure = std::move(violation);
    }
    return res;
}

// ---------------------------------------------------------------------------
// Local trichotomy near a stable fixed point
// ---------------------------------------------------------------------------

enum class TrichotomyOutcome { StaysInV, BecomesOrdered, Violation };

inline const char* to_string(TrichotomyOutcome t) {
    switch (t) {
        case TrichotomyOutcome::StaysInV: return "stays_in_V";
        case TrichotomyOutcome::BecomesOrdered: return "becomes_ordered";
        case TrichotomyOutcome::Violation: return "violation";
    }
    return "unknown";
}

struct TrichotomyReport {
    std::vector<TrichotomyOutcome> outcomes;
    int stays_in_v = 0;
    int becomes_ordered = 0;
    int violations = 0;
    std::optional<std::vector<Vector>> violation_trace;
};

/// Samples y in the sup-ball of radius rho_ball around z_star and iterates.
/// Each sample either stays in V for n_steps, or some pair of its iterates
/// becomes C1-ordered (G^{r+k} y >>_1 G^r y or <<_1) no later than the step at
/// which it leaves V; anything else is a violation.
inline TrichotomyReport local_trichotomy_check(const System& sys, double eps, const Vector& z_star, double rho_ball,
                                               const Box& v_box, int n_steps, const ConeSpec& cone, int samples = 64,
                                               std::uint64_t seed = 0x7c3ULL) {
    if (!(rho_ball > 0.0)) throw InvalidInput("local_trichotomy_check: rho must be positive");
    Rng rng(seed);
    TrichotomyReport rep;
    for (int s = 0; s < samples; ++s) {
        std::vector<Vector> orbit{z_star + rho_ball * rng.uniform_vector(sys.n, -1.0, 1.0)};
        bool ordered = false;
        bool left = !v_box.contains(orbit.front());
        for (int k = 1; k <= n_steps && !left; ++k) {
            Vector next;
            try {
                next = evaluate(sys, eps, orbit.back());
            } catch (const DivergenceError&) {
                left = true;
                break;
            }
            for (const Vector& earlier : orbit) {
                if (ordered) break;
                if (ll(earlier, next, cone, ConeKind::C1) || ll(next, earlier, cone, ConeKind::C1)) {
                    ordered = true;
                    break;
                }
            }
            left = !v_box.contains(next);
            orbit.push_back(std::move(next));
        }
        TrichotomyOutcome o;
        if (!left) {
            o = TrichotomyOutcome::StaysInV;
            ++rep.stays_in_v;
        } else if (ordered) {
            o = TrichotomyOutcome::BecomesOrdered;
            ++rep.becomes_ordered;
        } else {
            o = TrichotomyOutcome::Violation;
            ++rep.violations;
            if (!rep.violation_trace) rep.violation_trace = orbit;
        }
        rep.outcomes.push_back(o);
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Robustness of positive Lyapunov exponents under perturbation
// ---------------------------------------------------------------------------

struct RobustnessEntry {
    double eps = 0.0;
    Vector start;
    double lambda1 = 0.0;
};

struct RobustnessReport {
    std::vector<RobustnessEntry> entries;
    double min_lambda1 = std::numeric_limits<double>::infinity();
    int sign_flips = 0;
    int skipped = 0;
};

/// Checks that lambda_1 stays positive for eps in the grid and for starts near
/// Gamma whose orbits remain within `radius` of Gamma over N steps.
inline RobustnessReport lyapunov_robustness_scan(const System& sys, const std::vector<Vector>& gamma,
                                                 const std::vector<double>& eps_grid, double radius, int N,
                                                 int neighbors = 4, std::uint64_t seed = 0x40b5ULL) {
    if (gamma.empty()) throw InvalidInput("lyapunov_robustness_scan: empty Gamma");
    for (const Vector& z : gamma) {
        if (!(principal_lyapunov(sys, 0.0, z, N).value > 0.0)) {
            throw InvalidInput("lyapunov_robustness_scan: lambda_1 <= 0 on Gamma at eps = 0");
        }
    }
    auto near_gamma = [&](const Vector& s) {
        for (const Vector& z : gamma) {
            if (sup_norm(s - z) <= radius) return true;
        }
        return false;
    };
    Rng rng(seed);
    RobustnessReport rep;
    for (double eps : eps_grid) {
        for (const Vector& z : gamma) {
            std::vector<Vector> starts{z};
            for (int k = 0; k < neighbors; ++k) starts.push_back(z + radius * rng.uniform_vector(sys.n, -1.0, 1.0));
            for (const Vector& s : starts) {
                bool stays = true;
                try {
                    const OrbitRecord orb = iterate(sys, eps, s, N);
                    for (const Vector& st : orb.states) {
                        if (!near_gamma(st)) {
                            stays = false;
                            break;
                        }
                    }
                } catch (const DivergenceError&) {
                    stays = false;
                }
                if (!stays) {
                    ++rep.skipped;
                    continue;
                }
                const double lam = principal_lyapunov(sys, eps, s, N).value;
                rep.entries.push_back({eps, s, lam});
                rep.min_lambda1 = std::min(rep.min_lambda1, lam);
                if (!(lam > 0.0)) ++rep.sign_flips;
            }
        }
    }
    return rep;
}

}  // namespace monolab
