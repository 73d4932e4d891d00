// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include "monolab/monolab.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <random>
#include <string>
#include <vector>

using namespace monolab;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, double a) {
    char buf[128];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Oracles independent of the library: std::mt19937_64 with the standard
// distributions, and dense eigensolves.
Matrix oracle_matrix(Eigen::Index n, std::mt19937_64& gen, double lo, double hi) {
    std::uniform_real_distribution<double> dist(lo, hi);
    Matrix a(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) a(i, j) = dist(gen);
    }
    return a;
}

std::vector<double> eigen_moduli(const Matrix& a) {
    Eigen::EigenSolver<Matrix> es(a, false);
    std::vector<double> out;
    for (Eigen::Index i = 0; i < a.rows(); ++i) out.push_back(std::abs(es.eigenvalues()[i]));
    std::sort(out.rbegin(), out.rend());
    return out;
}

int rotation_period(const std::vector<int>& signs) {
    const int d = static_cast<int>(signs.size());
    for (int r = 1; r <= d; ++r) {
        bool same = true;
        for (int i = 0; i < d && same; ++i) {
            same = signs[static_cast<std::size_t>(i)] == signs[static_cast<std::size_t>((i - r + d) % d)];
        }
        if (same) return r;
    }
    return d;
}

std::vector<std::vector<int>> sign_patterns(int d) {
    std::vector<std::vector<int>> out;
    for (int mask = 0; mask < (1 << d); ++mask) {
        std::vector<int> s(static_cast<std::size_t>(d));
        for (int i = 0; i < d; ++i) s[static_cast<std::size_t>(i)] = (mask >> i) & 1 ? 1 : -1;
        out.push_back(std::move(s));
    }
    return out;
}

Vector pattern_point(const std::vector<int>& signs, double u) {
    Vector x(static_cast<Eigen::Index>(signs.size()));
    for (std::size_t i = 0; i < signs.size(); ++i) x[static_cast<Eigen::Index>(i)] = signs[i] * u;
    return x;
}

// Flagship parabolic problem shared by criteria 9 to 11.
ParabolicConfig flagship() {
    ParabolicConfig c;
    c.grid = 32;
    c.tau = 1.0;
    c.steps_per_period = 100;
    c.reaction = "logistic";
    c.a_time = 0.3;
    c.a_space = 0.2;
    c.p0 = 0.0;
    c.p_space = 1.0;  // sign-changing weight: F_eps is not monotone for eps != 0
    c.eps0 = 0.05;
    return c;
}

const Sampling kFlagshipSampling{Box::uniform(32, 0.05, 2.0), 500, 20240611};
const Box kFlagshipRegion = Box::uniform(32, 0.02, 2.5);
const std::vector<double> kSweepGrid{0.0, 1e-3, -1e-3, 1e-2, -1e-2};

struct Shared {
    json survey9;
    json sweep10;
    bool have9 = false;
    bool have10 = false;
} shared;

Outcome criterion1() {
    const auto t0 = std::chrono::steady_clock::now();
    const System s = catalog::quadratic_cooperative(3);
    const ConeSpec cone = ConeSpec::standard(3, 0.5);
    double worst = 0.0;
    for (const auto& [x, y] : sample_ordered_pairs(Box::uniform(3, 0.0, 1.0), cone, 50, 101)) {
        for (int n = 1; n <= 10; ++n) worst = std::max(worst, mean_value_residual(s, 0.05, x, y, n, 16));
    }
    const double t = seconds_since(t0);
    return {worst <= 1e-8 && t < 5.0, fmt("max relative residual %.3e", worst) + fmt(", %.2f s", t)};
}

Outcome criterion2() {
    const auto t0 = std::chrono::steady_clock::now();
    const System s = catalog::quadratic_cooperative(3);
    std::mt19937_64 gen(202);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_int_distribution<int> steps(1, 6);
    double worst = 0.0;
    for (int k = 0; k < 100; ++k) {
        Vector x(3), y(3);
        for (int i = 0; i < 3; ++i) {
            x[i] = unit(gen);
            y[i] = unit(gen);
        }
        const int n = steps(gen);
        const int m = steps(gen);
        const Matrix whole = iterate_bundle(s, 0.05, x, y, n + m).matrix;
        const Matrix split =
            iterate_bundle(s, 0.05, evaluate_power(s, 0.05, x, n), evaluate_power(s, 0.05, y, n), m).matrix *
            iterate_bundle(s, 0.05, x, y, n).matrix;
        worst = std::max(worst, (whole - split).norm() / whole.norm());
    }
    const double t = seconds_since(t0);
    return {worst <= 1e-10 && t < 5.0, fmt("max cocycle defect %.3e", worst) + fmt(", %.2f s", t)};
}

Outcome criterion3() {
    const System d = catalog::linear_diag((Vector(2) << 2.0, 0.5).finished(), 1e300);
    const double err = std::abs(principal_lyapunov(d, 0.0, Vector::Zero(2), 200).value - std::log(2.0));
    const System id = make_linear("identity", Matrix::Identity(2, 2));
    const double ident = std::abs(principal_lyapunov(id, 0.0, (Vector(2) << 0.3, -0.2).finished(), 200).value);
    return {err <= 1e-6 && ident <= 1e-9, fmt("|lambda - ln 2| = %.3e", err) + fmt(", identity |lambda| = %.3e", ident)};
}

Outcome criterion4() {
    std::mt19937_64 gen(404);
    double worst = 0.0;
    int misses = 0, complex_misses = 0;
    for (int k = 0; k < 20; ++k) {
        const Eigen::Index n = 3 + k % 4;
        Matrix a = oracle_matrix(n, gen, -1.0, 1.0);
        const double target = k < 10 ? 0.3 + 0.06 * k : 1.1 + 0.1 * (k - 10);
        a *= target / eigen_moduli(a)[0];
        const System s = make_linear("random", a, default_box(n, 1e300));
        const double lam = principal_lyapunov(s, 0.0, Vector::Zero(n), 500).value;
        const double err = std::abs(lam - std::log(eigen_moduli(a)[0]));
        worst = std::max(worst, err);
        if (err > 1e-5) {
            ++misses;
            const auto moduli = eigen_moduli(a);
            complex_misses += moduli[1] >= moduli[0] * (1.0 - 1e-12);  // conjugate dominant pair
        }
    }
    return {worst <= 1e-5, fmt("max |lambda - log rho| = %.3e over 20 matrices", worst) + ", " +
                               std::to_string(misses) + " above 1e-5 (" + std::to_string(complex_misses) +
                               " with a complex dominant pair)"};
}

Outcome criterion5() {
    std::mt19937_64 gen(505);
    int perron_ok = 0, rho_ok = 0, beta_ok = 0;
    double worst_beta = 0.0;
    for (int k = 0; k < 50; ++k) {
        const Matrix a = oracle_matrix(20, gen, 0.0, 1.0);
        const auto moduli = eigen_moduli(a);
        const KreinRutmanSplit kr = krein_rutman_split(a);
        perron_ok += kr.right.minCoeff() > 0.0;
        rho_ok += std::abs(kr.rho - moduli[0]) <= 1e-8 * moduli[0];
        const double rel = std::abs(kr.beta_hat - moduli[1]) / moduli[1];
        worst_beta = std::max(worst_beta, rel);
        beta_ok += rel <= 0.02;
    }
    const bool pass = perron_ok == 50 && rho_ok == 50 && beta_ok == 50;
    return {pass, "perron>0 " + std::to_string(perron_ok) + "/50, rho " + std::to_string(rho_ok) +
                      "/50, beta within 2% " + std::to_string(beta_ok) + "/50" +
                      fmt(" (worst relative deviation %.3f)", worst_beta)};
}

Outcome criterion6() {
    const auto suite = catalog::frozen_suite();
    PipelineOptions base;
    PipelineOptions doubled = base;
    doubled.horizon *= 2;
    doubled.lyapunov_horizon *= 2;
    doubled.cycle.transient *= 2;
    doubled.cycle.tail *= 2;
    doubled.probe_horizon *= 2;
    int disagreements = 0, decided = 0;
    int und_norm = 0, und_lyap = 0, und_norm2 = 0, und_lyap2 = 0;
    for (const auto& o : suite) {
        const Verdict a = classify_norm_test(*o.system, o.eps, o.x0, base).verdict;
        const Verdict b = classify_lyapunov(*o.system, o.eps, o.x0, base).verdict;
        const Verdict a2 = classify_norm_test(*o.system, o.eps, o.x0, doubled).verdict;
        const Verdict b2 = classify_lyapunov(*o.system, o.eps, o.x0, doubled).verdict;
        if (a != Verdict::Undecided && b != Verdict::Undecided) {
            ++decided;
            disagreements += a != b;
        }
        if (a2 != Verdict::Undecided && b2 != Verdict::Undecided) disagreements += a2 != b2;
        und_norm += a == Verdict::Undecided;
        und_lyap += b == Verdict::Undecided;
        und_norm2 += a2 == Verdict::Undecided;
        und_lyap2 += b2 == Verdict::Undecided;
    }
    const bool pass = suite.size() >= 100 && disagreements == 0 && und_norm2 <= und_norm && und_lyap2 <= und_lyap;
    return {pass, std::to_string(suite.size()) + " orbits, " + std::to_string(decided) + " decided by both, " +
                      std::to_string(disagreements) + " disagreements, undecided norm " + std::to_string(und_norm) +
                      "->" + std::to_string(und_norm2) + ", lyapunov " + std::to_string(und_lyap) + "->" +
                      std::to_string(und_lyap2)};
}

Outcome criterion7() {
    const double u = catalog::tanh_fixed_point(3.0);
    int checked = 0, failures = 0;
    for (int k : {1, 2, 3}) {
        for (int q : {2, 3}) {
            const int d = k * q;
            const System f = catalog::permutation_contraction(d);
            const System g = compose_power(f, q);
            for (const auto& signs : sign_patterns(d)) {
                const int r = rotation_period(signs);
                if (r / std::gcd(r, q) != k) continue;
                const Vector x = pattern_point(signs, u);
                const auto gc = detect_cycle(g, 0.0, x, d, 1e-7);
                const auto fc = detect_cycle(f, 0.0, x, k * q, 1e-7);
                ++checked;
                bool ok = gc && fc && gc->minimal_period == k;
                if (ok) {
                    const CycleRecord gs = classify_stability(g, 0.0, *gc);
                    const CycleRecord fs = classify_stability(f, 0.0, *fc);
                    ok = gs.stable && fs.stable && (k * q) % fs.minimal_period == 0 && fs.minimal_period == r;
                }
                failures += !ok;
            }
        }
    }
    return {checked > 0 && failures == 0,
            std::to_string(checked) + " stable F^q cycles lifted, " + std::to_string(failures) + " mismatches"};
}

// All stable minimal periods of the map over the sign-pattern states.
std::vector<int> stable_periods(const System& s, int d, double u) {
    std::vector<int> out;
    for (const auto& signs : sign_patterns(d)) {
        const auto c = detect_cycle(s, 0.0, pattern_point(signs, u), d, 1e-7);
        if (!c) continue;
        const CycleRecord rec = classify_stability(s, 0.0, *c);
        if (rec.stable) out.push_back(rec.minimal_period);
    }
    return out;
}

Outcome criterion8() {
    const double u = catalog::tanh_fixed_point(3.0);
    const std::vector<std::pair<int, int>> coprime{{1, 2}, {2, 3}, {3, 4}, {2, 5}};
    int premise = 0, counterexamples = 0, cases = 0;
    for (int d : {2, 3, 4, 6}) {
        const System f = catalog::permutation_contraction(d);
        const auto f_periods = stable_periods(f, d, u);
        for (int m : {1, 2, 3, 4, 6}) {
            for (const auto& [a, b] : coprime) {
                ++cases;
                auto only_fixed = [&](int q) {
                    const auto p = stable_periods(compose_power(f, q), d, u);
                    return !p.empty() && std::all_of(p.begin(), p.end(), [](int v) { return v == 1; });
                };
                if (!only_fixed(m * a) || !only_fixed(m * b)) continue;
                ++premise;
                for (int p : f_periods) counterexamples += m % p != 0;
            }
        }
    }
    return {premise > 0 && counterexamples == 0, std::to_string(cases) + " cases, premise holds in " +
                                                     std::to_string(premise) + ", " + std::to_string(counterexamples) +
                                                     " counterexamples"};
}

Outcome criterion9() {
    const auto t0 = std::chrono::steady_clock::now();
    // (a) Neumann heat oracle on the flagship grid and stepper.
    ParabolicConfig heat = flagship();
    heat.reaction = "zero";
    const System h = build_parabolic_period_map(heat);
    const Vector nodes = Vector::LinSpaced(32, 0.0, 1.0);
    const Vector c = Vector::Constant(32, 0.7);
    const double const_err = sup_norm(evaluate(h, 0.0, c) - c);
    Vector mode(32);
    for (Eigen::Index i = 0; i < 32; ++i) mode[i] = std::cos(M_PI * nodes[i]);
    const double pi2 = M_PI * M_PI;
    const double decay_err = sup_norm(evaluate(h, 0.0, mode) - std::exp(-pi2) * mode);
    const bool a_ok = const_err <= 1e-4 && decay_err <= 1e-4;

    // (b) eventual strong monotonicity at eps = 0.
    const System f = build_parabolic_period_map(flagship());
    const ConeSpec cone = ConeSpec::standard(32, 0.5);
    const MonotonicityResult mono = find_monotonicity_q(f, kFlagshipRegion, cone, {0.0}, 5, 20);
    const bool b_ok = mono.q.has_value() && *mono.q <= 5;

    // (c) survey.
    PipelineOptions opt;
    opt.q = mono.q.value_or(1);
    const SurveyResult s = convergence_survey(f, 0.0, kFlagshipSampling, opt, 1);
    shared.survey9 = strip_wall_clock(to_json(s));
    shared.have9 = true;
    const bool c_ok = s.diverged == 0 && s.fraction_stable >= 0.95;
    const double t = seconds_since(t0);
    std::string detail = fmt("(a) constant err %.2e", const_err) + fmt(", heat decay err %.2e", decay_err) +
                         "; (b) q = " + (mono.q ? std::to_string(*mono.q) : std::string("none")) +
                         "; (c) diverged " + std::to_string(s.diverged) + fmt(", fraction stable %.3f", s.fraction_stable) +
                         ", m_hat " + std::to_string(s.m_hat) + fmt(", %.1f s", t);
    return {a_ok && b_ok && c_ok && t < 300.0, detail};
}

Outcome criterion10() {
    const auto t0 = std::chrono::steady_clock::now();
    const System f = build_parabolic_period_map(flagship());
    SweepOptions so;
    so.region = kFlagshipRegion;
    so.positivity_pairs = 50;
    const SweepResult r = perturbation_sweep(f, kSweepGrid, kFlagshipSampling, {}, so, 1);
    shared.sweep10 = strip_wall_clock(to_json(r));
    shared.have10 = true;
    bool ok = r.baseline().in_regime;
    int in_regime = 0;
    std::string per_eps;
    for (const SweepPoint& p : r.points) {
        per_eps += fmt(" eps=%g:", p.eps) + (p.in_regime ? "in" : "out") + ",m=" + std::to_string(p.survey.m_hat) +
                   ",pos=" + std::to_string(p.positivity_passed) + "/" + std::to_string(p.positivity_tested);
        if (!p.in_regime) continue;
        ++in_regime;
        ok = ok && p.matches_baseline && p.positivity_tested == 50 && p.positivity_passed == 50;
    }
    const double t = seconds_since(t0);
    return {ok && t < 900.0, std::to_string(in_regime) + "/" + std::to_string(r.points.size()) + " in regime," +
                                 per_eps + fmt(", threshold %g", r.threshold) + fmt(", %.1f s", t)};
}

Outcome criterion11() {
    if (!shared.have9 || !shared.have10) return {false, "criteria 9 and 10 did not produce results"};
    const System f = build_parabolic_period_map(flagship());
    const ConeSpec cone = ConeSpec::standard(32, 0.5);
    const MonotonicityResult mono = find_monotonicity_q(f, kFlagshipRegion, cone, {0.0}, 5, 20);
    PipelineOptions opt;
    opt.q = mono.q.value_or(1);
    const json survey = strip_wall_clock(to_json(convergence_survey(f, 0.0, kFlagshipSampling, opt, 2)));
    SweepOptions so;
    so.region = kFlagshipRegion;
    so.positivity_pairs = 50;
    const SweepResult rerun = perturbation_sweep(f, kSweepGrid, kFlagshipSampling, {}, so, 2);
    const json sweep = strip_wall_clock(to_json(rerun));
    const bool same9 = survey.dump() == shared.survey9.dump();
    const bool same10 = sweep.dump() == shared.sweep10.dump();
    // The sweep baseline is a plain survey with the same seed, so the two files agree
    // whenever the baseline ran with the same q.
    const bool baseline_consistent = rerun.baseline().survey.q != opt.q ||
                                     strip_wall_clock(to_json(rerun.baseline().survey)).dump() == survey.dump();
    return {same9 && same10 && baseline_consistent,
            std::string("survey ") + (same9 ? "identical" : "differs") + ", sweep " + (same10 ? "identical" : "differs") +
                " across 1 vs 2 workers, baseline " + (baseline_consistent ? "consistent" : "inconsistent")};
}

}  // namespace

int main() {
    const std::vector<std::function<Outcome()>> criteria{criterion1, criterion2, criterion3, criterion4,
                                                         criterion5, criterion6, criterion7, criterion8,
                                                         criterion9, criterion10, criterion11};
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i]();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failed += !o.pass;
        std::printf("criterion %zu: %s  %s\n", i + 1, o.pass ? "PASS" : "FAIL", o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria failed\n", failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
