#pragma once

// JSON records and CSV/plot-data writers for monolab values.

#include "monolab/alternative.hpp"
#include "monolab/cycles.hpp"
#include "monolab/order_space.hpp"
#include "monolab/spectral.hpp"
#include "monolab/systems.hpp"

#include "json.hpp"

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>

namespace monolab {

using json = nlohmann::json;

inline json to_json(const Vector& v) {
    json arr = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
    return arr;
}

inline Vector vector_from_json(const json& j) {
    if (!j.is_array()) throw InvalidInput("expected a JSON array of numbers");
    Vector v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
    return v;
}

inline json to_json(const Matrix& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

inline Matrix matrix_from_json(const json& j) {
    if (!j.is_array() || j.empty()) throw InvalidInput("expected a non-empty JSON array of rows");
    const auto rows = static_cast<Eigen::Index>(j.size());
    const auto cols = static_cast<Eigen::Index>(j[0].size());
    Matrix m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        const json& row = j[static_cast<std::size_t>(i)];
        if (static_cast<Eigen::Index>(row.size()) != cols) throw InvalidInput("ragged matrix in JSON");
        for (Eigen::Index k = 0; k < cols; ++k) m(i, k) = row[static_cast<std::size_t>(k)].get<double>();
    }
    return m;
}

// ConeSpec <-> {n, theta, interior_tol, e}
inline json to_json(const ConeSpec& c) {
    return json{{"n", c.n}, {"theta", c.theta}, {"interior_tol", c.interior_tol}, {"e", to_json(c.e)}};
}

inline ConeSpec cone_from_json(const json& j, Eigen::Index default_n = 0) {
    const Eigen::Index n = j.value("n", default_n);
    Vector e = j.contains("e") ? vector_from_json(j.at("e")) : Vector::Ones(n);
    return ConeSpec(n, j.value("theta", 0.5), j.value("interior_tol", 1e-9), std::move(e));
}

inline json to_json(const LyapunovEstimate& est) {
    json diag{{"tail_fraction", est.tail_fraction}, {"steps", est.log_growth.size()}};
    if (est.direction) diag["direction"] = to_json(*est.direction);
    diag["kind"] = est.direction ? "directional" : "principal";
    return json{{"value", est.value}, {"N", est.horizon}, {"diagnostics", std::move(diag)}};
}

inline json to_json(const CycleRecord& c, bool with_states = true) {
    json j{{"minimal_period", c.minimal_period},
           {"monodromy_rho", c.monodromy_rho},
           {"stable", c.stable},
           {"marginal", c.marginal},
           {"classified", c.classified},
           {"residual", c.residual}};
    if (with_states) {
        json states = json::array();
        for (const Vector& s : c.states) states.push_back(to_json(s));
        j["states"] = std::move(states);
    }
    return j;
}

inline json to_json(const KreinRutmanSplit& kr) {
    return json{{"rho", kr.rho},         {"right", to_json(kr.right)}, {"left", to_json(kr.left)},
                {"beta_hat", kr.beta_hat}, {"M_hat", kr.m_hat},        {"window", kr.window},
                {"iterations", kr.rayleigh_history.size()}};
}

inline json to_json(const ClassificationReport& r) {
    json j{{"verdict", to_string(r.verdict)},
           {"method", r.method},
           {"M_star", r.m_star},
           {"horizon", r.horizon},
           {"diverged", r.diverged},
           {"separation_by_escape", r.separation_by_escape}};
    j["cycle"] = r.cycle ? to_json(*r.cycle) : json(nullptr);
    json reps = json::array();
    for (const Vector& z : r.omega_representatives) reps.push_back(to_json(z));
    j["omega_representatives"] = std::move(reps);
    json growth = json::array();
    for (const NormGrowth& g : r.norm_growth) {
        growth.push_back({{"representative", g.representative}, {"n_z", g.exceed_step}, {"max_norm", g.max_norm}});
    }
    j["norm_growth"] = std::move(growth);
    json lam = json::array();
    for (const auto& [z, est] : r.lambda1_samples) lam.push_back({{"state", to_json(z)}, {"estimate", to_json(est)}});
    j["lambda1_samples"] = std::move(lam);
    j["delta_hat"] = r.delta_hat ? json(*r.delta_hat) : json(nullptr);
    if (r.expansion_witness) {
        j["expansion_witness"] = {{"w", to_json(r.expansion_witness->w)}, {"nu", r.expansion_witness->nu}};
    } else {
        j["expansion_witness"] = nullptr;
    }
    j["diagnostics"] = r.diagnostics;
    return j;
}

/// One-line CSV verdict summary: label,verdict,period,rho,delta_hat
inline std::string verdict_csv_line(const std::string& label, const ClassificationReport& r) {
    std::ostringstream os;
    os << std::setprecision(17) << label << ',' << to_string(r.verdict) << ','
       << (r.cycle ? r.cycle->minimal_period : 0) << ',' << (r.cycle ? r.cycle->monodromy_rho : 0.0) << ','
       << (r.delta_hat ? *r.delta_hat : 0.0);
    return os.str();
}

// ---------------------------------------------------------------------------
// CSV writers
// ---------------------------------------------------------------------------

/// One row per iterate: k,x_0,...,x_{n-1}
inline void write_orbit_csv(std::ostream& os, const OrbitRecord& orbit) {
    const Eigen::Index n = orbit.states.empty() ? 0 : orbit.states.front().size();
    os << "k";
    for (Eigen::Index i = 0; i < n; ++i) os << ",x" << i;
    os << '\n' << std::setprecision(17);
    for (std::size_t k = 0; k < orbit.states.size(); ++k) {
        os << k;
        for (Eigen::Index i = 0; i < n; ++i) os << ',' << orbit.states[k][i];
        os << '\n';
    }
}

inline void write_matrix_csv(std::ostream& os, const Matrix& m) {
    os << std::setprecision(17);
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) os << (j ? "," : "") << m(i, j);
        os << '\n';
    }
}

/// sample,period,rho,stable
inline void write_inventory_csv(std::ostream& os, const Inventory& inv) {
    os << "sample,period,rho,stable\n" << std::setprecision(17);
    for (const InventoryEntry& e : inv.entries) {
        os << e.sample << ',';
        if (e.cycle_index >= 0) {
            const CycleRecord& c = inv.cycles[static_cast<std::size_t>(e.cycle_index)];
            os << c.minimal_period << ',' << c.monodromy_rho << ',' << (c.stable ? 1 : 0) << '\n';
        } else {
            os << "0,nan,0\n";
        }
    }
}

inline std::ofstream open_output(const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    return out;
}

}  // namespace monolab
