#pragma once

// Convergence surveys and perturbation sweeps over sampled initial states,
// and their on-disk report layout:
//
//   survey:  survey.json  survey.csv  hist.dat
//   sweep:   sweep.json  sweep.csv  fraction.dat  eps_<k>/{survey.json,survey.csv,hist.dat}
//
// A survey measures the sampled fraction of states whose orbits converge to
// linearly stable cycles. That is a density proxy, not a genericity proof,
// and the reports say so.

#include "monolab/alternative.hpp"
#include "monolab/bundle.hpp"
#include "monolab/io.hpp"
#include "monolab/parallel.hpp"
#include "monolab/random.hpp"

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

namespace monolab {

inline constexpr const char* kDensityProxyNote =
    "fraction of uniformly sampled states; an empirical density estimate, not a certificate of open-dense convergence";

struct Sampling {
    Box box;
    int count = 100;
    std::uint64_t seed = 1;
};

struct SampleOutcome {
    std::size_t index = 0;
    Verdict verdict = Verdict::Undecided;
    bool diverged = false;
    int period = 0;      // minimal period of the limit cycle, 0 if none
    double rho = 0.0;    // monodromy spectral radius, 0 if no cycle
    std::optional<double> delta_hat;
};

struct SurveyResult {
    double eps = 0.0;
    std::size_t sample_count = 0;
    std::size_t converged = 0;  // verdict stable_cycle
    std::size_t unstable = 0;
    std::size_t undecided = 0;
    std::size_t diverged = 0;
    double fraction_stable = 0.0;
    std::map<int, std::size_t> histogram;  // minimal period -> converged samples
    int m_hat = 0;        // max stable minimal period under F
    int q = 1;
    int m_hat_q = 0;      // same under F^q: max p / gcd(p, q)
    std::uint64_t seed = 0;
    double wall_clock_seconds = 0.0;
    std::vector<SampleOutcome> samples;
};

/// Draws `count` states uniformly in the sampling box, classifies each with
/// the norm-test pipeline and aggregates. Per-sample failures are tallied.
inline SurveyResult convergence_survey(const System& sys, double eps, const Sampling& sampling,
                                       const PipelineOptions& opt = {}, int workers = 1) {
    if (sampling.count < 1) throw InvalidInput("convergence_survey: count must be >= 1");
    if (sampling.box.dimension() != sys.n) throw InvalidInput("convergence_survey: sampling box dimension mismatch");
    for (Eigen::Index i = 0; i < sys.n; ++i) {
        if (sampling.box.lo[i] < sys.box.lo[i] || sampling.box.hi[i] > sys.box.hi[i]) {
            throw InvalidInput("convergence_survey: sampling box leaves the admissible region");
        }
    }
    if (opt.q < 1) throw InvalidInput("convergence_survey: q must be >= 1");
    const auto started = std::chrono::steady_clock::now();

    Rng rng(sampling.seed);
    std::vector<Vector> starts;
    starts.reserve(static_cast<std::size_t>(sampling.count));
    for (int k = 0; k < sampling.count; ++k) starts.push_back(rng.uniform_vector(sampling.box));

    SurveyResult res;
    res.eps = eps;
    res.sample_count = starts.size();
    res.seed = sampling.seed;
    res.q = opt.q;
    res.samples.resize(starts.size());
    parallel_for(starts.size(), workers, [&](std::size_t i) {
        SampleOutcome& out = res.samples[i];
        out.index = i;
        const ClassificationReport rep = classify_norm_test(sys, eps, starts[i], opt);
        out.verdict = rep.verdict;
        out.diverged = rep.diverged;
        if (rep.cycle) {
            out.period = rep.cycle->minimal_period;
            out.rho = rep.cycle->monodromy_rho;
        }
        out.delta_hat = rep.delta_hat;
    });

    for (const SampleOutcome& s : res.samples) {
        if (s.diverged) {
            ++res.diverged;
        } else if (s.verdict == Verdict::StableCycle) {
            ++res.converged;
            ++res.histogram[s.period];
            res.m_hat = std::max(res.m_hat, s.period);
            res.m_hat_q = std::max(res.m_hat_q, s.period / std::gcd(s.period, res.q));
        } else if (s.verdict == Verdict::Unstable) {
            ++res.unstable;
        } else {
            ++res.undecided;
        }
    }
    res.fraction_stable = static_cast<double>(res.converged) / static_cast<double>(res.sample_count);
    res.wall_clock_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    return res;
}

struct SweepOptions {
    Box region;                // where eventual strong monotonicity is tested
    int q_cap = 5;
    int pair_samples = 20;
    std::uint64_t pair_seed = 0x0a11ULL;
    int positivity_pairs = 50;
    int positivity_samples = 64;
    std::uint64_t positivity_seed = 0x9051ULL;
    int quad_nodes = kDefaultQuadNodes;
};

struct SweepPoint {
    double eps = 0.0;
    bool in_regime = false;  // find_monotonicity_q succeeded at this eps
    std::optional<int> q;
    std::string regime_diagnostics;
    int positivity_passed = 0;
    int positivity_tested = 0;
    bool matches_baseline = false;  // m_hat(eps) == m_hat(0)
    SurveyResult survey;
};

struct SweepResult {
    std::vector<double> eps_grid;
    std::vector<SweepPoint> points;  // same order as eps_grid
    int baseline_m_hat = 0;
    int max_m_hat = 0;          // over in-regime points
    double threshold = 0.0;     // largest |eps| below which every point is in regime with m_hat <= m_hat(0)
    std::vector<double> robust_subgrid;
    bool robust = false;        // m_hat(eps) <= m_hat(0) on the whole robust sub-grid
    int q_used = 0;             // max q over in-regime points

    const SweepPoint& baseline() const {
        for (const SweepPoint& p : points) {
            if (p.eps == 0.0) return p;
        }
        throw InvalidInput("sweep has no eps = 0 baseline");
    }
};

/// Runs find_monotonicity_q, a positivity check of R^(q) on sampled ordered
/// pairs and a convergence survey at every eps of the grid.
inline SweepResult perturbation_sweep(const System& sys, const std::vector<double>& eps_grid, const Sampling& sampling,
                                      const PipelineOptions& opt = {}, const SweepOptions& sweep = {},
                                      int workers = 1) {
    if (eps_grid.empty() || std::find(eps_grid.begin(), eps_grid.end(), 0.0) == eps_grid.end()) {
        throw InvalidInput("perturbation_sweep: the eps grid must contain 0");
    }
    const Box region = sweep.region.dimension() == sys.n ? sweep.region : sampling.box;
    const ConeSpec cone = opt.cone(sys.n);
    SweepResult res;
    res.eps_grid = eps_grid;
    res.points.resize(eps_grid.size());

    for (std::size_t k = 0; k < eps_grid.size(); ++k) {
        SweepPoint& pt = res.points[k];
        pt.eps = eps_grid[k];
        const MonotonicityResult mono =
            find_monotonicity_q(sys, region, cone, {pt.eps}, sweep.q_cap, sweep.pair_samples, sweep.pair_seed);
        pt.in_regime = mono.q.has_value();
        pt.q = mono.q;
        if (!pt.in_regime && mono.failure) {
            pt.regime_diagnostics = "q=" + std::to_string(mono.failure->q) + " n=" + std::to_string(mono.failure->n) +
                                    ": " + mono.failure->reason;
        }
        PipelineOptions local = opt;
        local.q = pt.q.value_or(1);
        if (pt.in_regime) {
            const auto pairs = sample_ordered_pairs(region, cone, sweep.positivity_pairs, sweep.positivity_seed);
            std::vector<char> passed(pairs.size(), 0);
            parallel_for(pairs.size(), workers, [&](std::size_t i) {
                try {
                    const Matrix r = iterate_bundle(sys, pt.eps, pairs[i].first, pairs[i].second, local.q,
                                                    sweep.quad_nodes).matrix;
                    passed[i] = strong_positivity_check(r, cone, sweep.positivity_samples, sweep.positivity_seed + i).pass;
                } catch (const DivergenceError&) {
                    passed[i] = 0;
                }
            });
            pt.positivity_tested = static_cast<int>(pairs.size());
            pt.positivity_passed = static_cast<int>(std::count(passed.begin(), passed.end(), 1));
        }
        pt.survey = convergence_survey(sys, pt.eps, sampling, local, workers);
    }

    res.baseline_m_hat = res.baseline().survey.m_hat;
    for (SweepPoint& pt : res.points) {
        pt.matches_baseline = pt.survey.m_hat == res.baseline_m_hat;
        if (pt.in_regime) {
            res.max_m_hat = std::max(res.max_m_hat, pt.survey.m_hat);
            res.q_used = std::max(res.q_used, *pt.q);
        }
    }

    // Grow the threshold over increasing |eps| until the first failing magnitude.
    std::vector<double> mags;
    for (double e : eps_grid) mags.push_back(std::abs(e));
    std::sort(mags.begin(), mags.end());
    mags.erase(std::unique(mags.begin(), mags.end()), mags.end());
    for (double m : mags) {
        bool ok = true;
        for (const SweepPoint& pt : res.points) {
            if (std::abs(pt.eps) == m && !(pt.in_regime && pt.survey.m_hat <= res.baseline_m_hat)) ok = false;
        }
        if (!ok) break;
        res.threshold = m;
    }
    for (const SweepPoint& pt : res.points) {
        if (std::abs(pt.eps) <= res.threshold) res.robust_subgrid.push_back(pt.eps);
    }
    res.robust = res.baseline().in_regime && res.threshold > 0.0;
    return res;
}

// ---------------------------------------------------------------------------
// Serialization and report files
// ---------------------------------------------------------------------------

inline json to_json(const SurveyResult& s) {
    json hist = json::object();
    for (const auto& [p, c] : s.histogram) hist[std::to_string(p)] = c;
    json samples = json::array();
    for (const SampleOutcome& o : s.samples) {
        samples.push_back({{"index", o.index},
                           {"verdict", to_string(o.verdict)},
                           {"diverged", o.diverged},
                           {"period", o.period},
                           {"rho", o.rho},
                           {"delta_hat", o.delta_hat ? json(*o.delta_hat) : json(nullptr)}});
    }
    return json{{"eps", s.eps},
                {"sample_count", s.sample_count},
                {"converged", s.converged},
                {"unstable", s.unstable},
                {"undecided", s.undecided},
                {"diverged", s.diverged},
                {"fraction_stable_cycle", s.fraction_stable},
                {"period_histogram", std::move(hist)},
                {"m_hat", s.m_hat},
                {"q", s.q},
                {"m_hat_q", s.m_hat_q},
                {"m_hat_le_m_hat_q_times_q", s.m_hat <= s.m_hat_q * s.q},
                {"seed", s.seed},
                {"rng", kRngAlgorithm},
                {"proxy", kDensityProxyNote},
                {"wall_clock_seconds", s.wall_clock_seconds},
                {"samples", std::move(samples)}};
}

inline json to_json(const SweepResult& r) {
    json points = json::array();
    for (const SweepPoint& p : r.points) {
        points.push_back({{"eps", p.eps},
                          {"in_regime", p.in_regime},
                          {"q", p.q ? json(*p.q) : json(nullptr)},
                          {"regime_diagnostics", p.regime_diagnostics},
                          {"positivity_passed", p.positivity_passed},
                          {"positivity_tested", p.positivity_tested},
                          {"matches_baseline", p.matches_baseline},
                          {"survey", to_json(p.survey)}});
    }
    return json{{"eps_grid", r.eps_grid},     {"baseline_m_hat", r.baseline_m_hat}, {"max_m_hat", r.max_m_hat},
                {"threshold", r.threshold},   {"robust_subgrid", r.robust_subgrid}, {"robust", r.robust},
                {"q_used", r.q_used},         {"points", std::move(points)}};
}

/// Drops every "wall_clock_seconds" key, recursively.
inline json strip_wall_clock(json j) {
    if (j.is_object()) {
        j.erase("wall_clock_seconds");
        for (auto& [key, value] : j.items()) value = strip_wall_clock(value);
    } else if (j.is_array()) {
        for (auto& value : j) value = strip_wall_clock(value);
    }
    return j;
}

namespace detail {

inline void ensure_directory(const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec || !std::filesystem::is_directory(dir)) {
        throw IoError("cannot create output directory '" + dir.string() + "'");
    }
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out = open_output(path);
    out << text;
    if (!out) throw IoError("write failed for '" + path.string() + "'");
}

}  // namespace detail

inline std::vector<std::filesystem::path> emit_reports(const SurveyResult& s, const std::filesystem::path& out_dir) {
    if (s.sample_count == 0) throw InvalidInput("emit_reports: empty survey");
    detail::ensure_directory(out_dir);
    const auto json_path = out_dir / "survey.json";
    const auto csv_path = out_dir / "survey.csv";
    const auto hist_path = out_dir / "hist.dat";
    detail::write_text(json_path, to_json(s).dump(2) + "\n");

    std::ostringstream csv;
    csv << std::setprecision(17) << "sample,verdict,period,rho,delta_hat\n";
    for (const SampleOutcome& o : s.samples) {
        csv << o.index << ',' << (o.diverged ? "diverged" : to_string(o.verdict)) << ',' << o.period << ',' << o.rho
            << ',' << (o.delta_hat ? *o.delta_hat : 0.0) << '\n';
    }
    detail::write_text(csv_path, csv.str());

    std::ostringstream hist;
    hist << "# period count\n";
    for (const auto& [p, c] : s.histogram) hist << p << ' ' << c << '\n';
    detail::write_text(hist_path, hist.str());
    return {json_path, csv_path, hist_path};
}

inline std::vector<std::filesystem::path> emit_reports(const SweepResult& r, const std::filesystem::path& out_dir) {
    if (r.points.empty()) throw InvalidInput("emit_reports: empty sweep");
    detail::ensure_directory(out_dir);
    std::vector<std::filesystem::path> files;
    std::ostringstream csv;
    std::ostringstream frac;
    csv << std::setprecision(17) << "eps,in_regime,q,fraction_stable_cycle,m_hat,undecided,diverged,positivity_passed,positivity_tested\n";
    frac << std::setprecision(17) << "# eps fraction_stable_cycle m_hat\n";
    for (std::size_t k = 0; k < r.points.size(); ++k) {
        const SweepPoint& p = r.points[k];
        const auto sub = out_dir / ("eps_" + std::to_string(k));
        auto written = emit_reports(p.survey, sub);
        files.insert(files.end(), written.begin(), written.end());
        csv << p.eps << ',' << (p.in_regime ? 1 : 0) << ',' << p.q.value_or(0) << ',' << p.survey.fraction_stable << ','
            << p.survey.m_hat << ',' << p.survey.undecided << ',' << p.survey.diverged << ',' << p.positivity_passed
            << ',' << p.positivity_tested << '\n';
        frac << p.eps << ' ' << p.survey.fraction_stable << ' ' << p.survey.m_hat << '\n';
    }
    const auto json_path = out_dir / "sweep.json";
    const auto csv_path = out_dir / "sweep.csv";
    const auto frac_path = out_dir / "fraction.dat";
    detail::write_text(json_path, to_json(r).dump(2) + "\n");
    detail::write_text(csv_path, csv.str());
    detail::write_text(frac_path, frac.str());
    files.push_back(json_path);
    files.push_back(csv_path);
    files.push_back(frac_path);
    return files;
}

}  // namespace monolab
