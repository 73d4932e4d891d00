#include "monolab/monolab.hpp"

#include "CLI11.hpp"

#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <random>

using namespace monolab;
namespace fs = std::filesystem;

namespace {

struct Flags {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out = "out";
    int workers = 1;
    std::optional<int> horizon;
};

RunConfig load(const Flags& f) {
    if (f.config.empty()) throw ConfigError("--config is required for this subcommand");
    RunConfig cfg = load_config(f.config);
    if (f.seed) cfg.sampling.seed = *f.seed;
    if (f.horizon) {
        cfg.steps = *f.horizon;
        cfg.pipeline.horizon = *f.horizon;
        cfg.pipeline.lyapunov_horizon = *f.horizon;
    }
    if (f.workers < 1) throw ConfigError("--workers must be >= 1");
    return cfg;
}

Vector start_state(const RunConfig& cfg) {
    if (cfg.initial_state) return *cfg.initial_state;
    return 0.5 * (cfg.system->box.lo + cfg.system->box.hi);
}

void write_json(const fs::path& path, const json& j) {
    auto out = open_output(path);
    out << j.dump(2) << '\n';
}

void prepare(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory '" + dir.string() + "': " + ec.message());
}

int run_simulate(const Flags& f) {
    const RunConfig cfg = load(f);
    prepare(f.out);
    const OrbitRecord orbit = iterate(*cfg.system, cfg.eps, start_state(cfg), cfg.steps);
    auto csv = open_output(fs::path(f.out) / "orbit.csv");
    write_orbit_csv(csv, orbit);
    std::cout << "wrote " << orbit.states.size() << " states to " << (fs::path(f.out) / "orbit.csv").string() << '\n';
    return 0;
}

int run_lyapunov(const Flags& f) {
    const RunConfig cfg = load(f);
    prepare(f.out);
    const LyapunovEstimate est = principal_lyapunov(*cfg.system, cfg.eps, start_state(cfg),
                                                    cfg.pipeline.lyapunov_horizon, cfg.pipeline.lyapunov_tail);
    json j = to_json(est);
    j["system"] = cfg.system_json;
    j["eps"] = cfg.eps;
    write_json(fs::path(f.out) / "lyapunov.json", j);
    std::printf("lambda1 = %.12g (N = %d)\n", est.value, est.horizon);
    return 0;
}

int run_classify(const Flags& f) {
    const RunConfig cfg = load(f);
    prepare(f.out);
    const Vector x = start_state(cfg);
    const ClassificationReport norm = classify_norm_test(*cfg.system, cfg.eps, x, cfg.pipeline);
    const ClassificationReport lyap = classify_lyapunov(*cfg.system, cfg.eps, x, cfg.pipeline);
    write_json(fs::path(f.out) / "classify.json", json{{"norm_test", to_json(norm)}, {"lyapunov", to_json(lyap)}});
    std::cout << "norm_test: " << to_string(norm.verdict) << "\nlyapunov: " << to_string(lyap.verdict) << '\n';
    return 0;
}

int run_survey(const Flags& f) {
    const RunConfig cfg = load(f);
    const SurveyResult r = convergence_survey(*cfg.system, cfg.eps, cfg.sampling, cfg.pipeline, f.workers);
    emit_reports(r, f.out);
    std::printf("samples %zu, stable %zu, unstable %zu, undecided %zu, diverged %zu, m_hat %d\n", r.sample_count,
                r.converged, r.unstable, r.undecided, r.diverged, r.m_hat);
    return 0;
}

int run_sweep(const Flags& f) {
    RunConfig cfg = load(f);
    if (cfg.sweep.region.dimension() == 0) cfg.sweep.region = cfg.sampling.box;
    const SweepResult r =
        perturbation_sweep(*cfg.system, cfg.eps_grid, cfg.sampling, cfg.pipeline, cfg.sweep, f.workers);
    emit_reports(r, f.out);
    for (const SweepPoint& p : r.points) {
        std::printf("eps %-10g %s m_hat %d fraction %.3f\n", p.eps, p.in_regime ? "in-regime " : "out-regime",
                    p.survey.m_hat, p.survey.fraction_stable);
    }
    std::printf("threshold %g, robust %s\n", r.threshold, r.robust ? "yes" : "no");
    return 0;
}

// Quick invariant self-tests on the built-in catalog; no config needed.
int run_check(const Flags& f) {
    struct Check {
        const char* name;
        std::function<bool()> body;
    };
    std::mt19937_64 gen(f.seed.value_or(7));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    auto draw = [&](Eigen::Index n) {
        Vector v(n);
        for (Eigen::Index i = 0; i < n; ++i) v[i] = unit(gen);
        return v;
    };
    const System quad = catalog::quadratic_cooperative(3);
    const ConeSpec cone = ConeSpec::standard(3, 0.5);

    const std::vector<Check> checks{
        {"partial order on C", [&] {
             for (int k = 0; k < 200; ++k) {
                 const Vector x = draw(3), y = draw(3), z = draw(3);
                 if (!leq(x, x, cone)) return false;
                 if (leq(x, y, cone) && leq(y, z, cone) && !leq(x, z, cone)) return false;
             }
             return true;
         }},
        {"jacobian chain rule", [&] {
             for (int k = 0; k < 20; ++k) {
                 const Vector x = draw(3);
                 const Matrix two = jacobian(compose_power(quad, 2), 0.05, x).matrix;
                 const Matrix chain = jacobian(quad, 0.05, evaluate(quad, 0.05, x)).matrix * jacobian(quad, 0.05, x).matrix;
                 if ((two - chain).norm() > 1e-12 * chain.norm()) return false;
             }
             return true;
         }},
        {"mean value identity", [&] {
             for (const auto& [x, y] : sample_ordered_pairs(Box::uniform(3, 0.0, 1.0), cone, 20, gen())) {
                 if (mean_value_residual(quad, 0.05, x, y, 4) > 1e-8) return false;
             }
             return true;
         }},
        {"bundle cocycle", [&] {
             for (int k = 0; k < 20; ++k) {
                 const Vector x = draw(3), y = draw(3);
                 const Matrix whole = iterate_bundle(quad, 0.0, x, y, 5).matrix;
                 const Matrix split = iterate_bundle(quad, 0.0, evaluate_power(quad, 0.0, x, 2),
                                                     evaluate_power(quad, 0.0, y, 2), 3).matrix *
                                      iterate_bundle(quad, 0.0, x, y, 2).matrix;
                 if ((whole - split).norm() > 1e-10 * whole.norm()) return false;
             }
             return true;
         }},
        {"krein-rutman projection", [&] {
             Matrix a(6, 6);
             for (Eigen::Index i = 0; i < 6; ++i) a.row(i) = draw(6).transpose();
             const KreinRutmanSplit kr = krein_rutman_split(a);
             return kr.right.minCoeff() > 0.0 && (kr.projection * kr.projection - kr.projection).norm() < 1e-10 &&
                    kr.beta_hat < kr.rho;
         }},
        {"lyapunov of diag(2, 0.5)", [&] {
             const System d = catalog::linear_diag((Vector(2) << 2.0, 0.5).finished(), 1e300);
             return std::abs(principal_lyapunov(d, 0.0, Vector::Zero(2), 200).value - std::log(2.0)) < 1e-6;
         }},
        {"survey independent of workers", [&] {
             const System perm = catalog::permutation_contraction(3);
             const Sampling s{Box::uniform(3, -1, 1), 24, gen()};
             PipelineOptions opt;
             opt.horizon = 100;
             const json a = strip_wall_clock(to_json(convergence_survey(perm, 0.0, s, opt, 1)));
             const json b = strip_wall_clock(to_json(convergence_survey(perm, 0.0, s, opt, std::max(2, f.workers))));
             return a.dump() == b.dump() && a.at("m_hat") == 3;
         }},
    };
    int failed = 0;
    for (const Check& c : checks) {
        bool ok = false;
        try {
            ok = c.body();
        } catch (const std::exception& e) {
            std::cerr << c.name << ": " << e.what() << '\n';
        }
        failed += !ok;
        std::cout << (ok ? "ok    " : "FAIL  ") << c.name << '\n';
    }
    return failed == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Numerical tools for eventually strongly monotone maps and their stable cycles"};
    app.require_subcommand(1);
    Flags flags;
    std::uint64_t seed = 0;
    int horizon = 0;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", flags.config, "JSON run configuration");
        sub->add_option("--seed", seed, "sampling seed (overrides the config)");
        sub->add_option("--out", flags.out, "output directory")->capture_default_str();
        sub->add_option("--workers", flags.workers, "worker threads")->capture_default_str();
        sub->add_option("--horizon", horizon, "iteration horizon (overrides the config)");
    };
    const std::vector<std::pair<const char*, std::function<int(const Flags&)>>> commands{
        {"simulate", run_simulate}, {"lyapunov", run_lyapunov}, {"classify", run_classify},
        {"survey", run_survey},     {"sweep", run_sweep},       {"check", run_check},
    };
    const std::map<std::string, const char*> help{
        {"simulate", "dump an orbit as CSV"},
        {"lyapunov", "estimate the principal Lyapunov exponent"},
        {"classify", "classify a single initial state"},
        {"survey", "convergence survey over sampled states"},
        {"sweep", "perturbation sweep over an eps grid"},
        {"check", "run invariant self-tests"},
    };
    std::vector<CLI::App*> subs;
    for (const auto& [name, fn] : commands) {
        CLI::App* sub = app.add_subcommand(name, help.at(name));
        add_common(sub);
        subs.push_back(sub);
    }
    CLI11_PARSE(app, argc, argv);

    for (std::size_t i = 0; i < subs.size(); ++i) {
        if (!subs[i]->parsed()) continue;
        if (subs[i]->count("--seed")) flags.seed = seed;
        if (subs[i]->count("--horizon")) flags.horizon = horizon;
        try {
            return commands[i].second(flags);
        } catch (const ConfigError& e) {
            std::cerr << "config error: " << e.what() << '\n';
            return 2;
        } catch (const IoError& e) {
            std::cerr << "io error: " << e.what() << '\n';
            return 3;
        } catch (const std::exception& e) {
            std::cerr << "error: " << e.what() << '\n';
            return 4;
        }
    }
    return 0;
}
