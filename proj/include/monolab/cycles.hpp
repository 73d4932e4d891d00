#pragma once

// omega-limit approximation, cycle detection with minimal period, monodromy
// and linear-stability classification, and stable-period inventories.

#include "monolab/parallel.hpp"
#include "monolab/systems.hpp"

#include <numeric>
#include <optional>
#include <string>
#include <vector>

namespace monolab {

struct CycleOptions {
    int transient = 200;
    int tail = 128;
    double cluster_tol = 1e-6;
    double settle_tol = 1e-5;
    double recurrence_tol = 1e-7;
    double stab_tol = 1e-6;
    double damping = 0.5;
    int max_refine = 200;
    int p_max = 16;
    int max_clusters = 64;
};

struct CycleRecord {
    std::vector<Vector> states;  // one full cycle, states[k+1] = F(states[k])
    int minimal_period = 0;
    double monodromy_rho = 0.0;
    bool stable = false;
    bool marginal = false;  // |rho - 1| <= stab_tol
    bool classified = false;
    double residual = 0.0;  // ||F^p x - x||_inf

    const Vector& base() const { return states.front(); }
};

struct OmegaLimit {
    std::vector<Vector> representatives;
    double tail_gap = 0.0;  // recurrence gap of the second half of the tail
    bool settled = false;
    bool cluster_overflow = false;
};

/// Iterates `transient` steps, collects `tail` further iterates and clusters
/// them at radius `tol`. The tail gap is the largest distance from an iterate
/// in the second half of the tail to the nearest iterate in the first half;
/// the limit counts as settled when that gap is below `settle_tol`.
inline OmegaLimit omega_limit(const System& sys, double eps, const Vector& x, int transient, int tail, double tol,
                              double settle_tol = 1e-5, int max_clusters = 64) {
    if (transient < 1 || tail < 1) throw InvalidInput("omega_limit: transient and tail must be >= 1");
    OmegaLimit out;
    const OrbitRecord orbit = iterate(sys, eps, x, transient + tail - 1);
    const auto first = orbit.states.begin() + transient;
    std::vector<Vector> tail_states(first, orbit.states.end());

    for (const Vector& s : tail_states) {
        bool placed = false;
        for (Vector& rep : out.representatives) {
            if (sup_norm(rep - s) <= tol) {
                rep = s;  // keep the latest member as representative
                placed = true;
                break;
            }
        }
        if (!placed) {
            if (static_cast<int>(out.representatives.size()) >= max_clusters) {
                out.cluster_overflow = true;
                continue;
            }
            out.representatives.push_back(s);
        }
    }

    const std::size_t half = tail_states.size() / 2;
    if (half == 0) {
        out.tail_gap = 0.0;
    } else {
        for (std::size_t j = half; j < tail_states.size(); ++j) {
            double nearest = std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < half; ++i) nearest = std::min(nearest, sup_norm(tail_states[j] - tail_states[i]));
            out.tail_gap = std::max(out.tail_gap, nearest);
        }
    }
    out.settled = out.tail_gap <= settle_tol && !out.cluster_overflow;
    return out;
}

struct CycleDetection {
    std::optional<CycleRecord> cycle;
    std::string diagnostics;
};

namespace detail {

inline std::vector<int> divisors(int p) {
    std::vector<int> out;
    for (int d = 1; d <= p; ++d) {
        if (p % d == 0) out.push_back(d);
    }
    return out;
}

}  // namespace detail

/// Scans p = 1..p_max for a near-recurrence of x_near, refines with damped
/// Picard iteration on F^p, and extracts the minimal period as the smallest
/// divisor d of p with ||F^d x - x|| < recurrence_tol.
inline CycleDetection detect_cycle_with_diagnostics(const System& sys, double eps, const Vector& x_near,
                                                    const CycleOptions& opt) {
    if (opt.p_max < 1) throw InvalidInput("detect_cycle: p_max must be >= 1");
    CycleDetection out;
    const double scale = std::max(1.0, sup_norm(x_near));
    for (int p = 1; p <= opt.p_max; ++p) {
        Vector z = x_near;
        Vector image;
        try {
            image = evaluate_power(sys, eps, z, p);
        } catch (const DivergenceError& e) {
            out.diagnostics += "p=" + std::to_string(p) + ": divergence (" + e.what() + "); ";
            return out;
        }
        if (sup_norm(image - z) > opt.settle_tol * scale) continue;

        double residual = sup_norm(image - z);
        int it = 0;
        try {
            while (residual >= opt.recurrence_tol && it < opt.max_refine) {
                z += opt.damping * (image - z);
                image = evaluate_power(sys, eps, z, p);
                residual = sup_norm(image - z);
                ++it;
            }
        } catch (const DivergenceError&) {
            out.diagnostics += "p=" + std::to_string(p) + ": refinement diverged; ";
            continue;
        }
        if (residual >= opt.recurrence_tol) {
            out.diagnostics += "p=" + std::to_string(p) + ": refinement stalled at residual " + std::to_string(residual) + "; ";
            continue;
        }
        if (sup_norm(z - x_near) > 100.0 * opt.settle_tol * scale) {
            out.diagnostics += "p=" + std::to_string(p) + ": refinement drifted away from the start; ";
            continue;
        }

        for (int d : detail::divisors(p)) {
            const Vector back = evaluate_power(sys, eps, z, d);
            const double r = sup_norm(back - z);
            if (r < opt.recurrence_tol) {
                CycleRecord rec;
                rec.minimal_period = d;
                rec.residual = r;
                rec.states.reserve(static_cast<std::size_t>(d));
                rec.states.push_back(z);
                for (int k = 1; k < d; ++k) rec.states.push_back(evaluate(sys, eps, rec.states.back()));
                out.cycle = std::move(rec);
                return out;
            }
        }
    }
    if (out.diagnostics.empty()) out.diagnostics = "no recurrence within p_max=" + std::to_string(opt.p_max);
    return out;
}

inline std::optional<CycleRecord> detect_cycle(const System& sys, double eps, const Vector& x_near, int p_max,
                                               double tol) {
    CycleOptions opt;
    opt.p_max = p_max;
    opt.recurrence_tol = tol;
    return detect_cycle_with_diagnostics(sys, eps, x_near, opt).cycle;
}

/// Ordered product DF(states[p-1]) ... DF(states[0]).
inline DenseOperator monodromy(const System& sys, double eps, const CycleRecord& cycle, double residual_tol = 1e-6) {
    if (cycle.states.empty()) throw InvalidInput("monodromy: empty cycle");
    if (cycle.residual > residual_tol) throw InvalidInput("monodromy: cycle residual above tolerance");
    Matrix acc = Matrix::Identity(sys.n, sys.n);
    for (const Vector& s : cycle.states) acc = jacobian(sys, eps, s).matrix * acc;
    return {std::move(acc), OperatorKind::Product};
}

/// Monodromy started at states[start] instead of states[0].
inline DenseOperator monodromy_from(const System& sys, double eps, const CycleRecord& cycle, std::size_t start) {
    const std::size_t p = cycle.states.size();
    Matrix acc = Matrix::Identity(sys.n, sys.n);
    for (std::size_t k = 0; k < p; ++k) acc = jacobian(sys, eps, cycle.states[(start + k) % p]).matrix * acc;
    return {std::move(acc), OperatorKind::Product};
}

/// rho = spectral radius of the monodromy (dense eigensolve);
/// stable iff rho <= 1 + stab_tol, marginal iff |rho - 1| <= stab_tol.
inline CycleRecord classify_stability(const System& sys, double eps, CycleRecord cycle, double stab_tol = 1e-6) {
    cycle.monodromy_rho = spectral_radius(monodromy(sys, eps, cycle).matrix);
    cycle.stable = cycle.monodromy_rho <= 1.0 + stab_tol;
    cycle.marginal = std::abs(cycle.monodromy_rho - 1.0) <= stab_tol;
    cycle.classified = true;
    return cycle;
}

/// Symmetric Hausdorff distance between two cycles' state sets (sup norm).
inline double cycle_distance(const CycleRecord& a, const CycleRecord& b) {
    auto directed = [](const CycleRecord& u, const CycleRecord& v) {
        double worst = 0.0;
        for (const Vector& s : u.states) {
            double best = std::numeric_limits<double>::infinity();
            for (const Vector& t : v.states) best = std::min(best, sup_norm(s - t));
            worst = std::max(worst, best);
        }
        return worst;
    };
    return std::max(directed(a, b), directed(b, a));
}

// ---------------------------------------------------------------------------
// Inventories
// ---------------------------------------------------------------------------

enum class SampleStatus { Cycle, NoCycle, Unsettled, Diverged };

inline const char* to_string(SampleStatus s) {
    switch (s) {
        case SampleStatus::Cycle: return "cycle";
        case SampleStatus::NoCycle: return "no_cycle";
        case SampleStatus::Unsettled: return "unsettled";
        case SampleStatus::Diverged: return "diverged";
    }
    return "unknown";
}

struct InventoryEntry {
    std::size_t sample = 0;
    SampleStatus status = SampleStatus::NoCycle;
    int cycle_index = -1;  // into Inventory::cycles
    std::string diagnostics;
};

struct Inventory {
    int m_hat = 0;  // max minimal period over linearly stable cycles found (0 if none)
    std::vector<CycleRecord> cycles;
    std::vector<InventoryEntry> entries;
};

/// Runs omega_limit -> detect_cycle -> classify_stability per sample and
/// deduplicates cycles. Per-sample failures are recorded, never fatal.
inline Inventory stable_period_inventory(const System& sys, double eps, const std::vector<Vector>& samples,
                                         const CycleOptions& opt = {}, int workers = 1, double dedup_tol = 1e-5) {
    if (samples.empty()) throw InvalidInput("stable_period_inventory: no samples");
    std::vector<InventoryEntry> entries(samples.size());
    std::vector<std::optional<CycleRecord>> found(samples.size());
    parallel_for(samples.size(), workers, [&](std::size_t i) {
        InventoryEntry& e = entries[i];
        e.sample = i;
        try {
            const OmegaLimit om = omega_limit(sys, eps, samples[i], opt.transient, opt.tail, opt.cluster_tol,
                                              opt.settle_tol, opt.max_clusters);
            if (!om.settled) {
                e.status = SampleStatus::Unsettled;
                e.diagnostics = "tail gap " + std::to_string(om.tail_gap);
                return;
            }
            auto det = detect_cycle_with_diagnostics(sys, eps, om.representatives.front(), opt);
            if (!det.cycle) {
                e.status = SampleStatus::NoCycle;
                e.diagnostics = det.diagnostics;
                return;
            }
            found[i] = classify_stability(sys, eps, std::move(*det.cycle), opt.stab_tol);
            e.status = SampleStatus::Cycle;
        } catch (const DivergenceError& err) {
            e.status = SampleStatus::Diverged;
            e.diagnostics = err.what();
        }
    });

    Inventory inv;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (!found[i]) continue;
        int index = -1;
        for (std::size_t c = 0; c < inv.cycles.size(); ++c) {
            if (inv.cycles[c].minimal_period == found[i]->minimal_period &&
                cycle_distance(inv.cycles[c], *found[i]) < dedup_tol) {
                index = static_cast<int>(c);
                break;
            }
        }
        if (index < 0) {
            inv.cycles.push_back(*found[i]);
            index = static_cast<int>(inv.cycles.size()) - 1;
        }
        entries[i].cycle_index = index;
    }
    for (const CycleRecord& c : inv.cycles) {
        if (c.stable) inv.m_hat = std::max(inv.m_hat, c.minimal_period);
    }
    inv.entries = std::move(entries);
    return inv;
}

}  // namespace monolab
