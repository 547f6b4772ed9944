#pragma once

/**
 * @file schedule.hpp
 * @brief Search for the pinching margin m, start index N and gluing radii
 * ε_k, and the structural checks on the resulting schedule.
 *
 * Pinching for stage k means every principal curvature of g_k lies in
 * [1/(k+m), 1/(k−m)], shrunk by `margin` times its width on both sides.
 */

#include "squeeze_forge/curvature.hpp"
#include "squeeze_forge/domain.hpp"
#include "squeeze_forge/graphs.hpp"
#include "squeeze_forge/squeeze.hpp"

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace sqf {

struct PinchConfig {
    Cutoff cutoff{};
    double r_max = 1.0;
    double chart_radius = 1.0;
    Eigen::Index dim = 3;  // n − 1
    SweepConfig sweep{};
    double margin = 0.01;
    double start = 0.5;
    int max_halvings = 60;
    int max_m = 8;
};

struct PinchInterval {
    double lo = 0.0;
    double hi = 0.0;
    bool contains(const CurvatureRange& r) const { return r.within(lo, hi); }
};

/// [1/(k+m), 1/(k−m)] shrunk by margin·width on each side.
inline PinchInterval pinch_interval(int k, int m, double margin) {
    const double lo = 1.0 / (k + m);
    const double hi = m < k ? 1.0 / (k - m) : std::numeric_limits<double>::infinity();
    const double w = hi - lo;
    return {lo + margin * w, hi - margin * w};
}

/// Curvature sweep of g_k (ψ_k glued to ψ_{k+1} at radius ε) over |x'| ≤ ε.
inline CurvatureRange stage_sweep(int k, double epsilon, const PinchConfig& cfg) {
    const GlueStage st = GlueStage::standard(k, epsilon);
    return region_bounds([&](const Vec& x) { return glue_jet(st, cfg.cutoff, x, cfg.r_max); },
                         0.0, std::min(epsilon, cfg.r_max), cfg.dim, cfg.sweep);
}

/// True when ε gives a pinched stage lying strictly inside the chart.
inline bool stage_pinched(int k, int m, double epsilon, const PinchConfig& cfg) {
    if (!(epsilon < cfg.chart_radius)) return false;
    return pinch_interval(k, m, cfg.margin).contains(stage_sweep(k, epsilon, cfg));
}

/**
 * Largest ε = start·2^(−i), 0 ≤ i ≤ max_halvings, whose stage sweep is
 * pinched and whose gluing annulus lies strictly inside the chart.
 */
inline double select_epsilon(int k, int m, double start, const PinchConfig& cfg) {
    if (!(k > m && m >= 0)) throw InvariantViolation("select_epsilon: need k > m ≥ 0");
    if (k - 1 < cfg.r_max) throw DomainError("select_epsilon: sphere " + std::to_string(k) + " too small for chart");
    double eps = start;
    for (int i = 0; i <= cfg.max_halvings; ++i, eps *= 0.5) {
        if (stage_pinched(k, m, eps, cfg)) return eps;
    }
    throw SearchExhausted(k, m, "no admissible gluing radius for k=" + std::to_string(k) +
                                    ", m=" + std::to_string(m) + " after " +
                                    std::to_string(cfg.max_halvings) + " halvings");
}

/// Memoized select_epsilon for a fixed start; failures are cached too.
class EpsilonCache {
public:
    explicit EpsilonCache(const PinchConfig& cfg) : cfg_(cfg) {}

    std::optional<double> get(int k, int m) {
        const auto key = std::make_pair(k, m);
        if (auto it = cache_.find(key); it != cache_.end()) return it->second;
        std::optional<double> v;
        try {
            v = select_epsilon(k, m, cfg_.start, cfg_);
        } catch (const SearchExhausted&) {
        }
        cache_.emplace(key, v);
        return v;
    }

    /// First k in [lo, hi] without an admissible ε, if any.
    std::optional<int> first_failure(int lo, int hi, int m) {
        for (int k = lo; k <= hi; ++k) {
            if (!get(k, m)) return k;
        }
        return std::nullopt;
    }

private:
    PinchConfig cfg_;
    std::map<std::pair<int, int>, std::optional<double>> cache_;
};

struct MarginChoice {
    int m = 0;
    int N = 0;
};

/**
 * Smallest m ≤ max_m, then smallest N ∈ [m+1, k_lo], such that every
 * k ∈ [N, k_hi] admits a pinched gluing radius.
 */
inline MarginChoice find_m(int k_lo, int k_hi, const PinchConfig& cfg, EpsilonCache* cache = nullptr) {
    if (k_lo < 2 || k_hi < k_lo) throw InvariantViolation("find_m: need 2 ≤ k_lo ≤ k_hi");
    EpsilonCache local(cfg);
    EpsilonCache& c = cache ? *cache : local;
    for (int m = 1; m <= cfg.max_m; ++m) {
        for (int N = m + 1; N <= k_lo;) {
            const auto bad = c.first_failure(N, k_hi, m);
            if (!bad) return {m, N};
            N = *bad + 1;
        }
    }
    throw NotFound("find_m: no (m, N) with m <= " + std::to_string(cfg.max_m) + " covers k in [" +
                   std::to_string(k_lo) + ", " + std::to_string(k_hi) + "]");
}

// ---------------------------------------------------------------------------
// Schedule
// ---------------------------------------------------------------------------

struct ScheduleEntry {
    int k = 0;
    double epsilon = 0.0;
    double delta = 0.0;
    double t = 0.0;
};

struct Schedule {
    int k0 = 10;
    int m = 1;
    int N = 2;
    Cutoff cutoff{};
    double r_max = 1.0;
    double chart_radius = 1.0;
    std::vector<ScheduleEntry> entries;

    int depth() const { return static_cast<int>(entries.size()); }

    GraphStack stack() const {
        GraphStack s;
        s.base_k = k0;
        s.cutoff = cutoff;
        s.r_max = r_max;
        for (const auto& e : entries) s.stages.push_back(GlueStage::standard(e.k, e.epsilon));
        return s;
    }

    /// Ω with the first `level` stages applied (level = depth for the final domain).
    DomainModel domain(int level, Eigen::Index n) const {
        return domain_at_level(stack(), level, chart_radius, n);
    }
};

/// δ_k from ε_k: the gluing plateau radius.
inline double shell_delta(const Cutoff& c, double epsilon) { return c.plateau * epsilon; }

/**
 * Inner shell radius boundaries for entry i: [δ_i, δ_{i−1}] with δ_{−1} the
 * chart radius.
 */
inline std::pair<double, double> shell_radii(const Schedule& s, int i) {
    const double outer = i == 0 ? s.chart_radius : s.entries[static_cast<std::size_t>(i - 1)].delta;
    return {s.entries[static_cast<std::size_t>(i)].delta, outer};
}

/// Structural problems of a schedule; empty when it is well-formed.
inline std::vector<std::string> schedule_issues(const Schedule& s) {
    std::vector<std::string> out;
    auto fail = [&](std::string msg) { out.push_back(std::move(msg)); };
    if (!(s.m >= 1)) fail("m must be at least 1");
    if (!(s.N > s.m)) fail("N must exceed m");
    if (!(s.k0 >= s.N)) fail("k0 must be at least N");
    if (s.entries.empty()) fail("schedule has no entries");
    try {
        s.cutoff.validate();
    } catch (const std::exception& e) {
        fail(e.what());
    }
    if (!(s.chart_radius > 0.0 && s.chart_radius <= s.r_max)) fail("chart radius outside (0, r_max]");
    for (std::size_t i = 0; i < s.entries.size(); ++i) {
        const auto& e = s.entries[i];
        const std::string at = "entry k=" + std::to_string(e.k) + ": ";
        if (e.k != s.k0 + static_cast<int>(i)) fail(at + "indices must run k0, k0+1, ...");
        if (!(e.epsilon > 0.0)) fail(at + "epsilon must be positive");
        if (e.delta != shell_delta(s.cutoff, e.epsilon)) fail(at + "delta must equal plateau * epsilon");
        if (!(e.delta <= e.epsilon)) fail(at + "delta exceeds epsilon");
        if (i == 0) {
            if (!(e.epsilon < s.chart_radius)) fail(at + "gluing radius not inside the chart");
        } else {
            const auto& p = s.entries[i - 1];
            if (!(e.epsilon < p.epsilon)) fail(at + "epsilon not strictly decreasing");
            if (!(e.delta < p.delta)) fail(at + "delta not strictly decreasing");
            if (!(e.t < p.t)) fail(at + "t not strictly decreasing");
            if (!(e.epsilon <= p.delta / 2.0)) fail(at + "epsilon exceeds half the previous delta");
            if (!(e.epsilon <= p.epsilon / 2.0)) fail(at + "epsilon exceeds half the previous epsilon");
        }
        if (e.k > s.m && e.delta > 0.0) {
            try {
                const double t = shell_bound(e.k, s.m, e.delta).t;
                if (std::abs(t - e.t) > 1e-12 * t) fail(at + "t does not match the shell bound");
            } catch (const std::exception& ex) {
                fail(at + ex.what());
            }
        }
    }
    return out;
}

/**
 * Sequential schedule for k = k0, …, k0+depth−1. Entry k takes the largest
 * pinched ε below min(δ_{k−1}/2, ε_{k−1}/2) (or cfg.start for k0), then
 * δ_k = a·ε_k and t_k from shell_bound. N is the smallest start index in
 * [m+1, k0] from which every k below k0 is also pinched.
 */
inline Schedule build_schedule(int k0, int depth, int m, const PinchConfig& cfg,
                               EpsilonCache* cache = nullptr) {
    if (depth < 1) throw InvariantViolation("build_schedule: depth must be at least 1");
    if (!(k0 > m && m >= 1)) {
        throw SearchExhausted(k0, m, "k0=" + std::to_string(k0) + " must exceed m=" + std::to_string(m));
    }
    EpsilonCache local(cfg);
    EpsilonCache& c = cache ? *cache : local;

    Schedule s;
    s.k0 = k0;
    s.m = m;
    s.cutoff = cfg.cutoff;
    s.r_max = cfg.r_max;
    s.chart_radius = cfg.chart_radius;
    s.N = k0;
    for (int N = m + 1; N < k0;) {
        const auto bad = c.first_failure(N, k0 - 1, m);
        if (!bad) {
            s.N = N;
            break;
        }
        N = *bad + 1;
    }

    for (int i = 0; i < depth; ++i) {
        const int k = k0 + i;
        double start = cfg.start;
        if (i > 0) {
            const auto& p = s.entries.back();
            start = std::min(p.delta / 2.0, p.epsilon / 2.0);
        }
        ScheduleEntry e;
        e.k = k;
        e.epsilon = select_epsilon(k, m, start, cfg);
        e.delta = shell_delta(cfg.cutoff, e.epsilon);
        e.t = shell_bound(k, m, e.delta).t;
        s.entries.push_back(e);
    }
    return s;
}

// ---------------------------------------------------------------------------
// Pinch verification on the assembled stack
// ---------------------------------------------------------------------------

struct PinchRow {
    int k = 0;
    PinchInterval interval;
    CurvatureRange stage;  // g_k over |x'| ≤ ε_k
    CurvatureRange shell;  // final stack over δ_k ≤ |x'| ≤ δ_{k−1}
    bool inside_chart = true;
    bool ok() const { return inside_chart && interval.contains(stage) && interval.contains(shell); }
};

/// Re-verifies every entry on its stage and on the full stack's shell.
inline std::vector<PinchRow> pinch_rows(const Schedule& s, const PinchConfig& cfg) {
    std::vector<PinchRow> rows;
    const GraphStack stack = s.stack();
    const int top = stack.depth();
    for (int i = 0; i < s.depth(); ++i) {
        const auto& e = s.entries[static_cast<std::size_t>(i)];
        PinchRow row;
        row.k = e.k;
        row.interval = pinch_interval(e.k, s.m, cfg.margin);
        row.inside_chart = i > 0 || e.epsilon < s.chart_radius;
        row.stage = stage_sweep(e.k, e.epsilon, cfg);
        const auto [lo, hi] = shell_radii(s, i);
        row.shell = region_bounds([&](const Vec& x) { return stack_jet_at_level(stack, top, x); },
                                  lo, std::min(hi, s.r_max), cfg.dim, cfg.sweep);
        rows.push_back(std::move(row));
    }
    return rows;
}

// ---------------------------------------------------------------------------
// Exhaustion
// ---------------------------------------------------------------------------

struct ExhaustionReport {
    std::uint64_t comparisons = 0;
    std::uint64_t monotone_failures = 0;  // f_{j+1} > f_j
    std::uint64_t identity_failures = 0;  // f_{j+1} ≠ f_j outside ε_j
    bool ok() const { return monotone_failures == 0 && identity_failures == 0; }
};

/**
 * Compare consecutive levels of the stack on a deterministic radial grid:
 * half the radii uniform on [0, r_max], half geometric down to a tenth of
 * the innermost ε. Tolerance is relative 1e-12.
 */
inline ExhaustionReport exhaustion_report(const GraphStack& stack, std::uint64_t samples) {
    stack.validate();
    ExhaustionReport rep;
    if (stack.depth() == 0 || samples == 0) return rep;
    const double tiny = stack.stages.back().epsilon * 0.1;
    const std::uint64_t half = std::max<std::uint64_t>(samples / 2, 1);
    std::vector<double> radii;
    radii.reserve(2 * half);
    for (std::uint64_t i = 0; i < half; ++i) {
        radii.push_back(stack.r_max * (static_cast<double>(i) + 0.5) / static_cast<double>(half));
        const double u = static_cast<double>(i) / static_cast<double>(half);
        radii.push_back(tiny * std::pow(stack.r_max / tiny, u));
    }
    for (int level = 0; level < stack.depth(); ++level) {
        const double eps = stack.stages[static_cast<std::size_t>(level)].epsilon;
        for (const double r : radii) {
            const double f = stack_value_at_level(stack, level, r);
            const double g = stack_value_at_level(stack, level + 1, r);
            const double tol = 1e-12 * std::abs(f);
            ++rep.comparisons;
            if (g - f > tol) ++rep.monotone_failures;
            if (r >= eps && std::abs(g - f) > tol) ++rep.identity_failures;
        }
    }
    return rep;
}

inline bool exhaustion_check(const GraphStack& stack, std::uint64_t samples) {
    return exhaustion_report(stack, samples).ok();
}

struct ContainmentReport {
    std::uint64_t samples = 0;
    std::uint64_t violations = 0;
    std::uint64_t unsampled = 0;
    void merge(const ContainmentReport& o) {
        samples += o.samples;
        violations += o.violations;
        unsampled += o.unsampled;
    }
    bool ok() const { return violations == 0; }
};

/// Samples points of `inner` and checks they lie in `outer` (Ω_j ⊂ Ω_{j+1}).
inline ContainmentReport containment_check(const DomainModel& inner, const DomainModel& outer,
                                           std::uint64_t samples, std::uint64_t seed) {
    const std::vector<Box> boxes = inner.sampling_boxes();
    return chunked_reduce<ContainmentReport>(
        samples, 1u << 14, [&](std::uint64_t chunk, std::uint64_t b, std::uint64_t e) {
            Rng rng(seed, 0xE7u, chunk);
            ContainmentReport rep;
            for (std::uint64_t i = b; i < e; ++i) {
                ++rep.samples;
                const auto x = sample_in(inner, boxes[rng.below(boxes.size())], rng);
                if (!x) {
                    ++rep.unsampled;
                    continue;
                }
                if (!outer.contains(*x)) ++rep.violations;
            }
            return rep;
        });
}

}  // namespace sqf
