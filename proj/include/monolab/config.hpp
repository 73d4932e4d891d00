#pragma once

// Run configuration read from JSON. Layout (schema_version 1):
//
// {
//   "schema_version": 1,
//   "system":   {"kind": "parabolic_period" | "ode_time_tau" | "explicit", ...},
//   "eps": 0.0,
//   "eps_grid": [0.0, 1e-3, -1e-3],
//   "initial_state": [..] | {"constant": c},
//   "cone":     {"theta": 0.5, "interior_tol": 1e-9, "e": [..]},
//   "sampling": {"lo": l, "hi": h, "count": 500, "seed": 1},
//   "pipeline": {"m_star": 1e6, "horizon": 500, ...},
//   "sweep":    {"q_cap": 5, "pair_samples": 20, "positivity_pairs": 50, "region": {"lo": l, "hi": h}},
//   "steps": 100
// }
//
// "lo"/"hi" accept a scalar (uniform box) or a per-coordinate array.

#include "monolab/alternative.hpp"
#include "monolab/catalog.hpp"
#include "monolab/experiments.hpp"
#include "monolab/io.hpp"
#include "monolab/parabolic.hpp"

#include <fstream>
#include <memory>
#include <optional>
#include <string>

namespace monolab {

inline constexpr int kConfigSchemaVersion = 1;

struct RunConfig {
    std::shared_ptr<const System> system;
    json system_json;
    double eps = 0.0;
    std::vector<double> eps_grid{0.0};
    std::optional<Vector> initial_state;
    ConeSpec cone;
    Sampling sampling;
    PipelineOptions pipeline;
    SweepOptions sweep;
    int steps = 100;
};

namespace detail {

inline Box box_from_json(const json& j, Eigen::Index n) {
    auto side = [n](const json& v) -> Vector {
        if (v.is_number()) return Vector::Constant(n, v.get<double>());
        Vector out = vector_from_json(v);
        if (out.size() != n) throw ConfigError("box bound has dimension " + std::to_string(out.size()) + ", expected " +
                                               std::to_string(n));
        return out;
    };
    if (!j.contains("lo") || !j.contains("hi")) throw ConfigError("box needs 'lo' and 'hi'");
    Box b{side(j.at("lo")), side(j.at("hi"))};
    if ((b.hi.array() <= b.lo.array()).any()) throw ConfigError("box has hi <= lo");
    return b;
}

template <class T>
void read_opt(const json& j, const char* key, T& target) {
    if (j.contains(key)) target = j.at(key).get<T>();
}

inline System system_from_json(const json& j) {
    const std::string kind = j.value("kind", "");
    if (kind == "parabolic_period") {
        ParabolicConfig c;
        read_opt(j, "grid", c.grid);
        read_opt(j, "max_grid", c.max_grid);
        read_opt(j, "tau", c.tau);
        read_opt(j, "diffusion", c.diffusion);
        read_opt(j, "steps_per_period", c.steps_per_period);
        read_opt(j, "reaction", c.reaction);
        read_opt(j, "a0", c.a0);
        read_opt(j, "a_time", c.a_time);
        read_opt(j, "a_space", c.a_space);
        read_opt(j, "advect", c.advect);
        read_opt(j, "c0", c.c0);
        read_opt(j, "c_time", c.c_time);
        read_opt(j, "p0", c.p0);
        read_opt(j, "p_space", c.p_space);
        read_opt(j, "eps0", c.eps0);
        read_opt(j, "box_lo", c.box_lo);
        read_opt(j, "box_hi", c.box_hi);
        const std::string stepper = j.value("stepper", "imex_euler");
        if (stepper == "imex_euler") {
            c.stepper = Stepper::ImexEuler;
        } else if (stepper == "rk4") {
            c.stepper = Stepper::Rk4;
        } else {
            throw ConfigError("unknown stepper '" + stepper + "'");
        }
        return build_parabolic_period_map(c);
    }
    if (kind == "ode_time_tau") {
        const std::string name = j.value("name", "cooperative_logistic");
        if (name != "cooperative_logistic") throw ConfigError("unknown ode_time_tau system '" + name + "'");
        return make_cooperative_logistic_ode(vector_from_json(j.at("a")), j.value("kappa", 0.2), j.value("amp", 0.0),
                                             j.value("tau", 1.0), j.value("steps", 40), j.value("eps0", 0.0));
    }
    if (kind == "explicit") {
        const std::string name = j.value("name", "");
        const auto n = j.value("n", Eigen::Index{2});
        if (name == "affine" || name == "linear") {
            const Matrix a = matrix_from_json(j.at("matrix"));
            const Vector c = j.contains("offset") ? vector_from_json(j.at("offset")) : Vector::Zero(a.rows());
            const Matrix b = j.contains("perturbation") ? matrix_from_json(j.at("perturbation")) : Matrix();
            const double hw = j.value("half_width", 1e3);
            return make_affine(name, a, c, b, j.value("eps0", 0.0), default_box(a.rows(), hw));
        }
        if (name == "contraction") return catalog::contraction(vector_from_json(j.at("offset")));
        if (name == "quadratic_cooperative") return catalog::quadratic_cooperative(n);
        if (name == "logistic_cooperative") return catalog::logistic_cooperative(vector_from_json(j.at("r")), j.value("kappa", 0.05));
        if (name == "permutation_contraction") {
            return catalog::permutation_contraction(n, j.value("beta", 3.0), j.value("shift", Eigen::Index{1}));
        }
        if (name == "flip_map") return catalog::flip_map(j.value("beta", 3.0));
        if (name == "bistable") return catalog::bistable(n, j.value("beta", 3.0));
        if (name == "rotation") return catalog::rotation(j.value("angle", 2.0));
        if (name == "saddle") return catalog::saddle();
        if (name == "spiral_out") return catalog::spiral_out();
        if (name == "order_reversing") return catalog::order_reversing(n);
        throw ConfigError("unknown explicit system '" + name + "'");
    }
    throw ConfigError("unknown system kind '" + kind + "'");
}

inline void pipeline_from_json(const json& j, PipelineOptions& p) {
    read_opt(j, "m_star", p.m_star);
    read_opt(j, "horizon", p.horizon);
    read_opt(j, "lyapunov_horizon", p.lyapunov_horizon);
    read_opt(j, "lyapunov_tail", p.lyapunov_tail);
    read_opt(j, "lambda_tol", p.lambda_tol);
    read_opt(j, "nu_cap", p.nu_cap);
    read_opt(j, "probe_horizon", p.probe_horizon);
    read_opt(j, "probe_ladder", p.probe_ladder);
    read_opt(j, "probe_floor", p.probe_floor);
    read_opt(j, "probe_ratio_min", p.probe_ratio_min);
    read_opt(j, "q", p.q);
    read_opt(j, "theta", p.theta);
    read_opt(j, "interior_tol", p.interior_tol);
    read_opt(j, "transient", p.cycle.transient);
    read_opt(j, "tail", p.cycle.tail);
    read_opt(j, "cluster_tol", p.cycle.cluster_tol);
    read_opt(j, "settle_tol", p.cycle.settle_tol);
    read_opt(j, "recurrence_tol", p.cycle.recurrence_tol);
    read_opt(j, "stab_tol", p.cycle.stab_tol);
    read_opt(j, "damping", p.cycle.damping);
    read_opt(j, "max_refine", p.cycle.max_refine);
    read_opt(j, "p_max", p.cycle.p_max);
    read_opt(j, "max_clusters", p.cycle.max_clusters);
}

}  // namespace detail

inline RunConfig parse_config(const json& j) {
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    if (!j.contains("schema_version")) throw ConfigError("config is missing 'schema_version'");
    if (j.at("schema_version").get<int>() != kConfigSchemaVersion) {
        throw ConfigError("unsupported schema_version " + j.at("schema_version").dump() + " (expected " +
                          std::to_string(kConfigSchemaVersion) + ")");
    }
    if (!j.contains("system")) throw ConfigError("config is missing 'system'");
    RunConfig cfg;
    try {
        cfg.system_json = j.at("system");
        cfg.system = std::make_shared<const System>(detail::system_from_json(cfg.system_json));
        const Eigen::Index n = cfg.system->n;
        detail::read_opt(j, "eps", cfg.eps);
        detail::read_opt(j, "eps_grid", cfg.eps_grid);
        detail::read_opt(j, "steps", cfg.steps);
        if (j.contains("initial_state")) {
            const json& s = j.at("initial_state");
            cfg.initial_state = s.is_object() ? Vector::Constant(n, s.at("constant").get<double>()) : vector_from_json(s);
            if (cfg.initial_state->size() != n) throw ConfigError("initial_state has the wrong dimension");
        }
        if (j.contains("pipeline")) detail::pipeline_from_json(j.at("pipeline"), cfg.pipeline);
        cfg.cone = j.contains("cone") ? cone_from_json(j.at("cone"), n) : cfg.pipeline.cone(n);
        cfg.pipeline.theta = cfg.cone.theta;
        cfg.pipeline.interior_tol = cfg.cone.interior_tol;
        if (j.contains("sampling")) {
            const json& s = j.at("sampling");
            cfg.sampling.box = detail::box_from_json(s, n);
            detail::read_opt(s, "count", cfg.sampling.count);
            detail::read_opt(s, "seed", cfg.sampling.seed);
        } else {
            cfg.sampling.box = cfg.system->box;
        }
        if (j.contains("sweep")) {
            const json& s = j.at("sweep");
            detail::read_opt(s, "q_cap", cfg.sweep.q_cap);
            detail::read_opt(s, "pair_samples", cfg.sweep.pair_samples);
            detail::read_opt(s, "positivity_pairs", cfg.sweep.positivity_pairs);
            detail::read_opt(s, "positivity_samples", cfg.sweep.positivity_samples);
            detail::read_opt(s, "quad_nodes", cfg.sweep.quad_nodes);
            if (s.contains("region")) cfg.sweep.region = detail::box_from_json(s.at("region"), n);
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed config: ") + e.what());
    } catch (const InvalidInput& e) {
        throw ConfigError(std::string("invalid config: ") + e.what());
    }
    return cfg;
}

inline RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read config '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw ConfigError("config '" + path + "' is not valid JSON: " + e.what());
    }
    return parse_config(j);
}

}  // namespace monolab
