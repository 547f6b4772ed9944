#pragma once

/**
 * @file squeeze.hpp
 * @brief Squeezing-function lower bound from a pair of tangent balls.
 *
 * Normalized picture in C^n (real coordinates R^{2n}): the outer ball is the
 * unit ball, the boundary point is (1, 0'), the inner ball is
 * B_s = B((s, 0'), 1 − s) and the usable inner cap is B_s ∩ {Re z₁ > 1 − d},
 * d being the cap depth in units of the outer radius. If the cap lies in Ω
 * and Ω lies in the unit ball, then for a probe (r, 0')
 *
 *     S_Ω(r, 0') ≥ √((1 − s)(1 − 4(1 − r)/d)),
 *
 * which exceeds 1 − s once 1 − r < s·d/4.
 *
 * 1 − r is carried explicitly as `gap`: probe depths of deep shells are far
 * below the spacing of doubles near 1.
 */

#include "squeeze_forge/errors.hpp"
#include "squeeze_forge/parallel.hpp"

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <utility>

namespace sqf {

struct NormalizedConfig {
    double s = 0.0;    // 1 − R_in/R_out
    double d = 0.0;    // cap depth / R_out
    double gap = 0.0;  // 1 − r, probe depth / R_out

    double mu() const { return 1.0 - s; }
    double eta() const { return d / 2.0; }
    double r() const { return 1.0 - gap; }
    /// Largest admissible gap: the bound needs 1 − r < s·d/4.
    double gap_threshold() const { return s * d / 4.0; }
    double r_threshold() const { return 1.0 - gap_threshold(); }

    /// Standing hypotheses 0 < s < 1/2 and 0 < d < r < 1.
    void validate() const {
        if (!(s > 0.0 && s < 0.5)) {
            throw InvariantViolation("s = " + std::to_string(s) + " outside (0, 1/2)");
        }
        if (!(d > 0.0 && d < 1.0)) {
            throw InvariantViolation("d = " + std::to_string(d) + " outside (0, 1)");
        }
        if (!(gap > 0.0 && d + gap < 1.0)) {
            throw InvariantViolation("probe r = 1 - " + std::to_string(gap) +
                                     " must satisfy d < r < 1");
        }
    }
};

/// √((1 − s)(1 − 4·gap/d)); throws when the radicand is not positive.
inline double lemma_lb_gap(double s, double d, double gap) {
    if (!(s > 0.0 && s < 1.0) || !(d > 0.0)) {
        throw HypothesisViolated("lemma_lb: need 0 < s < 1 and d > 0");
    }
    const double second = 1.0 - 4.0 * gap / d;
    if (!(second > 0.0)) {
        throw HypothesisViolated("lemma_lb: radicand (1-s)(1-4(1-r)/d) = " +
                                 std::to_string((1.0 - s) * second) + " is not positive");
    }
    return std::sqrt((1.0 - s) * second);
}

inline double lemma_lb(double s, double d, double r) { return lemma_lb_gap(s, d, 1.0 - r); }

inline double lemma_lb(const NormalizedConfig& cfg) { return lemma_lb_gap(cfg.s, cfg.d, cfg.gap); }

// ---------------------------------------------------------------------------
// Inclusion oracle B^μ_η ⊂ B_s ∩ {Re z₁ > 1 − d}
// ---------------------------------------------------------------------------

struct InclusionReport {
    std::uint64_t samples = 0;
    std::uint64_t violations = 0;
    double min_ball_slack = std::numeric_limits<double>::infinity();  // (1−s) − |z − s·e₁|
    double min_cap_slack = std::numeric_limits<double>::infinity();   // Re z₁ − (1 − d)

    void merge(const InclusionReport& o) {
        samples += o.samples;
        violations += o.violations;
        min_ball_slack = std::min(min_ball_slack, o.min_ball_slack);
        min_cap_slack = std::min(min_cap_slack, o.min_cap_slack);
    }
    bool ok() const { return violations == 0; }
    double min_slack() const { return std::min(min_ball_slack, min_cap_slack); }
};

/// Slack of a real point z ∈ R^{2n} (z[0] = Re z₁) in B_s and in the cap.
inline std::pair<double, double> inclusion_slack(double s, double d, const Eigen::VectorXd& z) {
    Eigen::VectorXd c = Eigen::VectorXd::Zero(z.size());
    c[0] = s;
    return {(1.0 - s) - (z - c).norm(), z[0] - (1.0 - d)};
}

/**
 * Monte Carlo check that the ellipsoid
 *   B^μ_η = { |z₁ − (1 − η)|² + (η/μ)|z'|² < η² },  μ = 1 − s, η = d/2,
 * lies in B_s ∩ {Re z₁ > 1 − d}. Points are uniform in the ellipsoid.
 */
inline InclusionReport inclusion_check(double s, double d, std::uint64_t samples,
                                       std::uint64_t seed, int complex_dim = 2) {
    if (!(s > 0.0 && s < 0.5)) throw InvariantViolation("inclusion_check: s outside (0, 1/2)");
    if (!(d > 0.0 && d < 1.0)) throw InvariantViolation("inclusion_check: d outside (0, 1)");
    const double mu = 1.0 - s;
    const double eta = d / 2.0;
    const Eigen::Index dim = 2 * complex_dim;
    const double lateral = std::sqrt(eta * mu);
    return chunked_reduce<InclusionReport>(
        samples, 1u << 15, [&](std::uint64_t chunk, std::uint64_t b, std::uint64_t e) {
            Rng rng(seed, 0x1Cu, chunk);
            InclusionReport rep;
            for (std::uint64_t i = b; i < e; ++i) {
                const Eigen::VectorXd u = rng.in_ball(dim);
                Eigen::VectorXd z(dim);
                z[0] = (1.0 - eta) + eta * u[0];
                z[1] = eta * u[1];
                z.tail(dim - 2) = lateral * u.tail(dim - 2);
                const auto [ball, cap] = inclusion_slack(s, d, z);
                ++rep.samples;
                if (!(ball > 0.0 && cap > 0.0)) ++rep.violations;
                rep.min_ball_slack = std::min(rep.min_ball_slack, ball);
                rep.min_cap_slack = std::min(rep.min_cap_slack, cap);
            }
            return rep;
        });
}

// ---------------------------------------------------------------------------
// Osculating balls → normalized configuration
// ---------------------------------------------------------------------------

struct OsculationData {
    double R_out = 0.0;        // outer tangent ball radius
    double R_in = 0.0;         // inner tangent ball radius
    double cap_lateral = 0.0;  // lateral radius of the usable inner cap
    double dist = 0.0;         // probe distance from the boundary point along the normal

    void validate() const {
        if (!(R_in > 0.0 && R_in < R_out)) throw InvariantViolation("need 0 < R_in < R_out");
        if (!(cap_lateral > 0.0 && cap_lateral < R_in)) {
            throw InvariantViolation("need 0 < cap_lateral < R_in");
        }
        if (!(dist > 0.0 && dist < R_out)) throw InvariantViolation("need 0 < dist < R_out");
    }

    /// Depth of the inner cap with lateral radius cap_lateral.
    double cap_depth() const {
        const double l2 = cap_lateral * cap_lateral;
        return l2 / (R_in + std::sqrt(R_in * R_in - l2));
    }
};

/// Rescale by 1/R_out with the tangency point at (1, 0').
inline NormalizedConfig normalize(const OsculationData& osc) {
    osc.validate();
    NormalizedConfig cfg;
    cfg.s = (osc.R_out - osc.R_in) / osc.R_out;
    cfg.d = osc.cap_depth() / osc.R_out;
    cfg.gap = osc.dist / osc.R_out;
    if (!(cfg.s > 0.0 && cfg.s < 0.5)) {
        throw InvariantViolation("normalized s = " + std::to_string(cfg.s) + " outside (0, 1/2)");
    }
    if (!(cfg.d > 0.0 && cfg.d < 1.0)) {
        throw InvariantViolation("normalized d = " + std::to_string(cfg.d) + " outside (0, 1)");
    }
    return cfg;
}

struct ShellBound {
    double t = 0.0;      // admissible height x_n ≤ t
    double bound = 0.0;  // squeezing lower bound on that shell
    OsculationData osc;
    NormalizedConfig cfg;
};

/**
 * Squeezing bound for shell k with balls of radius k ± m touching along a
 * cap of lateral radius delta_k. The probe height is half the bound's
 * threshold, t = R_out·s·d/8, so 4(1 − r)/d = s/2.
 */
inline ShellBound shell_bound(int k, int m, double delta_k) {
    if (!(k > m && m >= 1)) throw InvariantViolation("shell_bound: need k > m ≥ 1");
    if (!(delta_k > 0.0)) throw InvariantViolation("shell_bound: delta must be positive");
    ShellBound out;
    out.osc.R_out = static_cast<double>(k + m);
    out.osc.R_in = static_cast<double>(k - m);
    out.osc.cap_lateral = delta_k;
    const double s = (out.osc.R_out - out.osc.R_in) / out.osc.R_out;
    const double d = out.osc.cap_depth() / out.osc.R_out;
    out.t = out.osc.R_out * s * d / 8.0;
    out.osc.dist = out.t;
    out.cfg = normalize(out.osc);
    if (!(out.cfg.d + out.cfg.gap < 1.0)) {
        throw HypothesisViolated("shell " + std::to_string(k) + ": probe not deeper than cap (d ≥ r)");
    }
    if (!(out.cfg.gap < out.cfg.gap_threshold())) {
        throw HypothesisViolated("shell " + std::to_string(k) + ": r ≤ 1 - s·d/4");
    }
    out.bound = lemma_lb(out.cfg);
    return out;
}

}  // namespace sqf
