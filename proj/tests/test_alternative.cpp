#include "support.hpp"

using namespace monolab;

namespace {

Vector v2(double a, double b) { return (Vector(2) << a, b).finished(); }

PipelineOptions short_options() {
    PipelineOptions opt;
    opt.horizon = 200;
    opt.lyapunov_horizon = 200;
    return opt;
}

}  // namespace

TEST(ClassifyNormTest, ContractionIsStableFixedPoint) {
    const System s = catalog::contraction(v2(1.0, -0.5));
    const ClassificationReport r = classify_norm_test(s, 0.0, v2(4.0, 4.0), short_options());
    EXPECT_EQ(r.verdict, Verdict::StableCycle);
    ASSERT_TRUE(r.cycle.has_value());
    EXPECT_EQ(r.cycle->minimal_period, 1);
    EXPECT_TRUE(r.cycle->stable);
    EXPECT_EQ(r.m_star, 1e6);
    EXPECT_EQ(r.horizon, 200);
}

TEST(ClassifyNormTest, DoublingAtOriginIsUnstable) {
    const System s = catalog::linear_diag(v2(2.0, 2.0));
    const ClassificationReport r = classify_norm_test(s, 0.0, Vector::Zero(2), short_options());
    EXPECT_EQ(r.verdict, Verdict::Unstable);
    ASSERT_FALSE(r.norm_growth.empty());
    EXPECT_EQ(r.norm_growth[0].exceed_step, 20);  // 2^20 > 1e6
    EXPECT_TRUE(r.delta_hat.has_value() || r.expansion_witness.has_value());
}

TEST(ClassifyNormTest, ParabolicGenericStateConverges) {
    ParabolicConfig c;
    c.a_time = 0.3;
    c.a_space = 0.2;
    const System s = build_parabolic_period_map(c);
    std::mt19937_64 gen(61);
    const Vector x = oracle::uniform_vector(32, gen, 0.05, 2.0);
    const ClassificationReport r = classify_norm_test(s, 0.0, x);
    ASSERT_EQ(r.verdict, Verdict::StableCycle);
    // Long-run convergence cross-check.
    const Vector far = evaluate_power(s, 0.0, x, 1000);
    EXPECT_LE(sup_norm(far - r.cycle->base()), 1e-6);
}

TEST(ClassifyNormTest, DivergenceIsReported) {
    const System s = catalog::linear_diag(v2(2.0, 2.0), 100.0);
    const ClassificationReport r = classify_norm_test(s, 0.0, Vector::Ones(2));
    EXPECT_EQ(r.verdict, Verdict::Undecided);
    EXPECT_TRUE(r.diverged);
}

TEST(ClassifyNormTest, RejectsBadParameters) {
    PipelineOptions opt;
    opt.m_star = 1.0;
    EXPECT_THROW(classify_norm_test(catalog::contraction(v2(0, 0)), 0.0, v2(1, 1), opt), InvalidInput);
}

TEST(ClassifyLyapunov, Examples) {
    const ClassificationReport stable =
        classify_lyapunov(catalog::linear_diag(v2(0.5, 0.5)), 0.0, v2(3.0, -1.0), short_options());
    EXPECT_EQ(stable.verdict, Verdict::StableCycle);
    ASSERT_FALSE(stable.lambda1_samples.empty());
    EXPECT_NEAR(stable.lambda1_samples[0].second.value, -std::log(2.0), 1e-9);

    const ClassificationReport saddle =
        classify_lyapunov(catalog::linear_diag(v2(2.0, 0.5)), 0.0, Vector::Zero(2), short_options());
    EXPECT_EQ(saddle.verdict, Verdict::Unstable);
    EXPECT_NEAR(saddle.lambda1_samples[0].second.value, std::log(2.0), 1e-9);
    EXPECT_TRUE(saddle.delta_hat.has_value() || saddle.expansion_witness.has_value());
}

TEST(ClassifyLyapunov, AnnihilatedTangentCountsAsStable) {
    const System s = make_linear("zero", Matrix::Zero(2, 2));
    EXPECT_EQ(classify_lyapunov(s, 0.0, v2(1, 1), short_options()).verdict, Verdict::StableCycle);
}

TEST(ReportInvariants, VerdictsCarryTheirEvidence) {
    for (const catalog::SuiteOrbit& o : catalog::frozen_suite()) {
        for (const ClassificationReport& r :
             {classify_norm_test(*o.system, o.eps, o.x0), classify_lyapunov(*o.system, o.eps, o.x0)}) {
            if (r.verdict == Verdict::StableCycle) {
                ASSERT_TRUE(r.cycle.has_value()) << o.label;
                EXPECT_TRUE(r.cycle->stable) << o.label;
                EXPECT_LE(r.cycle->monodromy_rho, 1.0 + 1e-6) << o.label;
            }
            if (r.verdict == Verdict::Unstable) {
                EXPECT_TRUE(r.delta_hat.has_value() || r.expansion_witness.has_value()) << o.label;
            }
        }
    }
}

TEST(ExpansionWitness, Examples) {
    const ConeSpec cone = ConeSpec::standard(2, 0.5);
    const auto four = expansion_witness(catalog::linear_diag(v2(4, 4)), 0.0, {Vector::Zero(2)}, cone);
    ASSERT_TRUE(four.has_value());
    EXPECT_EQ(four->nu, std::vector<int>{1});
    EXPECT_TRUE(in_cone(four->w, cone, ConeKind::C1));
    const auto two = expansion_witness(catalog::linear_diag(v2(2, 2)), 0.0, {Vector::Zero(2)}, cone);
    ASSERT_TRUE(two.has_value());
    EXPECT_EQ(two->nu, std::vector<int>{2});
    EXPECT_FALSE(expansion_witness(catalog::linear_diag(v2(0.5, 0.5)), 0.0, {Vector::Zero(2)}, cone).has_value());
    EXPECT_THROW(expansion_witness(catalog::linear_diag(v2(2, 2)), 0.0, {}, cone), InvalidInput);
}

TEST(InstabilityProbe, Examples) {
    const auto esc = instability_probe(catalog::linear_diag(v2(2, 2), 1e3), 0.0, Vector::Zero(2), {Vector::Unit(2, 0)},
                                       1, 60);
    ASSERT_TRUE(esc.delta_hat.has_value());
    EXPECT_TRUE(esc.escaped);
    EXPECT_GT(*esc.delta_hat, 100.0);

    const auto calm = instability_probe(catalog::contraction(v2(0, 0)), 0.0, Vector::Zero(2), {Vector::Ones(2)}, 1, 60);
    EXPECT_FALSE(calm.delta_hat.has_value());

    const auto sad = instability_probe(catalog::linear_diag(v2(2, 0.5), 1e3), 0.0, Vector::Zero(2), {Vector::Unit(2, 0)},
                                       1, 60);
    ASSERT_TRUE(sad.delta_hat.has_value());
    EXPECT_GT(*sad.delta_hat, 0.0);
    EXPECT_THROW(instability_probe(catalog::contraction(v2(0, 0)), 0.0, Vector::Zero(2), {}, 1, 60), InvalidInput);
}

TEST(XiMonitor, LinearDoublingScalesExactly) {
    const ConeSpec cone = ConeSpec::standard(2, 0.5);
    const System s = catalog::linear_diag(v2(2, 2), 1e12);
    const Vector w = Vector::Ones(2) / std::sqrt(2.0);
    const XiTrace t = xi_monitor(s, 0.0, Vector::Zero(2), Vector::Ones(2), w, cone, 20);
    ASSERT_EQ(t.xi.size(), 21u);
    EXPECT_NEAR(t.xi[0], std::sqrt(2.0), 1e-14);
    for (std::size_t k = 0; k < t.xi.size(); ++k) EXPECT_NEAR(t.xi[k], std::ldexp(t.xi[0], static_cast<int>(k)), 1e-10 * t.xi[k]);
}

TEST(XiMonitor, ContractionDecays) {
    const ConeSpec cone = ConeSpec::standard(2, 0.5);
    const XiTrace t = xi_monitor(catalog::contraction(v2(0, 0)), 0.0, Vector::Zero(2), v2(1.0, 0.8), Vector::Ones(2),
                                 cone, 40);
    EXPECT_LT(t.xi.back(), 1e-10);
    EXPECT_THROW(xi_monitor(catalog::contraction(v2(0, 0)), 0.0, Vector::Ones(2), Vector::Zero(2), Vector::Ones(2), cone, 4),
                 InvalidInput);
}

TEST(XiMonitor, ExpansionWitnessDoublesGapAtPredictedSteps) {
    const ConeSpec cone = ConeSpec::standard(2, 0.5);
    Matrix a(2, 2);
    a << 1.25, 0.75, 0.75, 1.25;
    const System s = make_linear("saddle", a, default_box(2, 1e12));
    const auto wit = expansion_witness(s, 0.0, {Vector::Zero(2)}, cone);
    ASSERT_TRUE(wit.has_value());
    const int nu = wit->nu[0];
    const XiTrace t = xi_monitor(s, 0.0, Vector::Zero(2), v2(1.0, 0.9), wit->w, cone, 6 * nu);
    ASSERT_EQ(t.xi.size(), static_cast<std::size_t>(6 * nu + 1));
    for (int l = 0; l + nu < static_cast<int>(t.xi.size()); l += nu) {
        EXPECT_GT(t.xi[static_cast<std::size_t>(l + nu)], 2.0 * t.xi[static_cast<std::size_t>(l)]);
    }
}

TEST(FindMonotonicityQ, Examples) {
    const ConeSpec cone = ConeSpec::standard(3, 0.5);
    Matrix pos(3, 3);
    pos << 0.3, 0.2, 0.25, 0.2, 0.3, 0.2, 0.25, 0.2, 0.3;
    const auto lin = find_monotonicity_q(make_linear("pos", pos), Box::uniform(3, -1, 1), cone, {0.0}, 5, 20);
    ASSERT_TRUE(lin.q.has_value());
    EXPECT_EQ(*lin.q, 1);

    const auto rev = find_monotonicity_q(catalog::order_reversing(3), Box::uniform(3, -1, 1), cone, {0.0}, 5, 20);
    EXPECT_FALSE(rev.q.has_value());
    ASSERT_TRUE(rev.failure.has_value());
    EXPECT_TRUE(lt(rev.failure->x, rev.failure->y, cone, ConeKind::C1));

    EXPECT_THROW(find_monotonicity_q(make_linear("pos", pos), Box::uniform(3, -1, 1), cone, {}, 5, 20), InvalidInput);
}

TEST(FindMonotonicityQ, ParabolicAndFreshDrawAtTwiceQ) {
    ParabolicConfig c;
    c.a_time = 0.3;
    c.a_space = 0.2;
    c.p0 = 0.0;
    c.p_space = 1.0;
    const System s = build_parabolic_period_map(c);
    const ConeSpec cone = ConeSpec::standard(32, 0.5);
    const Box region = Box::uniform(32, 0.02, 2.5);
    const auto res = find_monotonicity_q(s, region, cone, {0.0, 1e-3, -1e-3}, 5, 15);
    ASSERT_TRUE(res.q.has_value());
    EXPECT_LE(*res.q, 5);
    for (const auto& [x, y] : sample_ordered_pairs(region, cone, 15, 0xf00d)) {
        EXPECT_TRUE(ll(evaluate_power(s, 0.0, x, 2 * *res.q), evaluate_power(s, 0.0, y, 2 * *res.q), cone, ConeKind::C1));
    }
}

TEST(LocalTrichotomy, Examples) {
    const ConeSpec cone = ConeSpec::standard(2, 0.5);
    const TrichotomyReport calm = local_trichotomy_check(catalog::contraction(v2(0, 0)), 0.0, Vector::Zero(2), 0.1,
                                                         Box::uniform(2, -1, 1), 50, cone);
    EXPECT_EQ(calm.stays_in_v, 64);

    Matrix a(2, 2);
    a << 1.25, 0.75, 0.75, 1.25;  // unstable axis (1,1) inside C1
    const TrichotomyReport sad =
        local_trichotomy_check(make_linear("saddle", a), 0.0, Vector::Zero(2), 0.1, Box::uniform(2, -1, 1), 60, cone);
    EXPECT_EQ(sad.violations, 0);
    EXPECT_GT(sad.becomes_ordered, 0);

    // A rotation leaves V without ever ordering its iterates.
    const TrichotomyReport bad = local_trichotomy_check(make_linear("spin", 1.5 * catalog::rotation(2.0).jac(0.0, Vector::Zero(2))),
                                                        0.0, Vector::Zero(2), 0.5, Box::uniform(2, -1, 1), 60, cone);
    EXPECT_GT(bad.violations, 0);
    EXPECT_TRUE(bad.violation_trace.has_value());
    EXPECT_THROW(local_trichotomy_check(make_linear("saddle", a), 0.0, Vector::Zero(2), 0.0, Box::uniform(2, -1, 1), 5, cone),
                 InvalidInput);
}

TEST(LyapunovRobustness, Examples) {
    Matrix a(2, 2);
    a << 2.0, 0.0, 0.0, 0.5;
    const System fam = catalog::positive_linear_family(a, Matrix::Ones(2, 2), 0.05, 1e300);
    const RobustnessReport rep = lyapunov_robustness_scan(fam, {Vector::Zero(2)}, {0.0, 0.01, -0.01, 0.05}, 1e300, 200);
    EXPECT_EQ(rep.sign_flips, 0);
    EXPECT_NEAR(rep.min_lambda1, std::log(spectral_radius(a - 0.01 * Matrix::Ones(2, 2))), 1e-6);
    EXPECT_GT(rep.min_lambda1, 0.0);

    EXPECT_THROW(lyapunov_robustness_scan(catalog::contraction(v2(0, 0)), {Vector::Zero(2)}, {0.0}, 1.0, 100),
                 InvalidInput);
}

TEST(LyapunovRobustness, ParabolicUnstableEquilibrium) {
    ParabolicConfig c;
    c.grid = 16;
    c.a_time = 0.3;
    c.p0 = 0.0;
    c.p_space = 1.0;
    const System s = build_parabolic_period_map(c);
    const RobustnessReport rep =
        lyapunov_robustness_scan(s, {Vector::Zero(16)}, {0.0, 1e-2, -1e-2}, 1e-12, 100, 0);
    EXPECT_EQ(rep.sign_flips, 0);
    EXPECT_NEAR(rep.min_lambda1, 1.0, 1e-2);  // growth rate a0 of the zero state
}
