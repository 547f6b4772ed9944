#pragma once

/**
 * @file graphs.hpp
 * @brief Sphere graphs, the radial cutoff, glued stage functions and the
 * inductive stack of gluings, all with exact second-order jets.
 *
 * Every function here is radial in x' ∈ R^{n-1}. Value-only paths work on
 * the radius r = |x'| directly; jet paths assemble gradients and Hessians
 * with the product and chain rules.
 */

#include "squeeze_forge/errors.hpp"
#include "squeeze_forge/jet.hpp"

#include <cmath>
#include <string>
#include <string_view>
#include <vector>

namespace sqf {

// ---------------------------------------------------------------------------
// Sphere graphs
// ---------------------------------------------------------------------------

/// Lower cap of the sphere of radius k tangent to {x_n = 0} at the origin,
/// written as x_n = ψ_k(x') = k − √(k² − |x'|²).
struct SphereGraph {
    int k = 2;
    double r_max = 1.0;
};

/// Radial derivatives of a radial function: φ, φ'/r and φ''.
struct RadialDerivs {
    double value = 0.0;
    double d1_over_r = 0.0;
    double d2 = 0.0;
};

inline void check_chart(int k, double r, double r_max) {
    if (k < 1) throw DomainError("sphere graph index must be positive, got " + std::to_string(k));
    if (!(r_max < k)) {
        throw DomainError("chart radius " + std::to_string(r_max) +
                          " must be below sphere radius " + std::to_string(k));
    }
    if (!(r <= r_max)) {
        throw DomainError("|x'| = " + std::to_string(r) + " outside chart radius " +
                          std::to_string(r_max));
    }
}

/// ψ_k(r) in the cancellation-free form r²/(k + √(k² − r²)).
inline double psi_value(int k, double r) {
    const double kk = static_cast<double>(k);
    return r * r / (kk + std::sqrt(kk * kk - r * r));
}

inline RadialDerivs psi_radial(int k, double r) {
    const double kk = static_cast<double>(k);
    const double w = std::sqrt(kk * kk - r * r);
    return {r * r / (kk + w), 1.0 / w, kk * kk / (w * w * w)};
}

inline double psi_value(const SphereGraph& g, double r) {
    check_chart(g.k, r, g.r_max);
    return psi_value(g.k, r);
}

/// Exact jet of ψ_k: gradient x'/w and Hessian I/w + x'x'ᵀ/w³ with w = √(k² − |x'|²).
inline Jet2 psi_jet(const SphereGraph& g, const Vec& x) {
    const double r = x.norm();
    check_chart(g.k, r, g.r_max);
    const double kk = static_cast<double>(g.k);
    const double w = std::sqrt(kk * kk - r * r);
    Jet2 jet;
    jet.value = psi_value(g.k, r);
    jet.gradient = x / w;
    jet.hessian = Mat::Identity(x.size(), x.size()) / w;
    jet.hessian.noalias() += (x * x.transpose()) / (w * w * w);
    return jet;
}

// ---------------------------------------------------------------------------
// Cutoff
// ---------------------------------------------------------------------------

/// How the smooth step is fed between the plateau and the support edge.
///   - linear:     u = (t − a)/(1 − a)
///   - log_radial: u = ln(t/a)/ln(1/a)
/// The log variable spreads the transition evenly in scale, which keeps the
/// curvature remainder (τ²χ)''/2 inside [-2.64, 1.88] for a = 1/4 instead of
/// [-2.84, 4.89] for the linear feed.
enum class CutoffProfile { linear, log_radial };

inline std::string_view to_string(CutoffProfile p) {
    return p == CutoffProfile::linear ? "linear" : "log_radial";
}

inline CutoffProfile cutoff_profile_from_string(std::string_view s) {
    if (s == "linear") return CutoffProfile::linear;
    if (s == "log_radial") return CutoffProfile::log_radial;
    throw InvariantViolation("unknown cutoff profile '" + std::string(s) + "'");
}

/// Radial cutoff χ: 1 on |t| ≤ plateau, 0 on |t| ≥ 1, C^∞ and nonincreasing in between.
struct Cutoff {
    static constexpr double support = 1.0;
    double plateau = 0.25;
    CutoffProfile profile = CutoffProfile::log_radial;

    void validate() const {
        if (!(plateau > 0.0 && plateau < support)) {
            throw InvariantViolation("cutoff plateau must lie in (0, 1), got " +
                                     std::to_string(plateau));
        }
    }
};

/// 1-D value and first two derivatives.
struct CutoffJet {
    double value = 0.0;
    double d1 = 0.0;
    double d2 = 0.0;
};

namespace detail {

// σ(u) = exp(−1/u) and its first two derivatives, zero for u ≤ 0.
inline CutoffJet sigma(double u) {
    if (u <= 0.0) return {};
    const double e = std::exp(-1.0 / u);
    if (e == 0.0) return {};
    const double u2 = u * u;
    return {e, e / u2, e * (1.0 - 2.0 * u) / (u2 * u2)};
}

}  // namespace detail

/// Smooth step S(u) = σ(u)/(σ(u) + σ(1−u)) with S', S''.
inline CutoffJet smooth_step(double u) {
    if (u <= 0.0) return {0.0, 0.0, 0.0};
    if (u >= 1.0) return {1.0, 0.0, 0.0};
    const CutoffJet p = detail::sigma(u);
    const CutoffJet q0 = detail::sigma(1.0 - u);
    // derivatives of q(u) = σ(1 − u)
    const double q = q0.value, q1 = -q0.d1, q2 = q0.d2;
    const double den = p.value + q;
    const double num = p.d1 * q - p.value * q1;
    const double den1 = p.d1 + q1;
    const double num1 = p.d2 * q - p.value * q2;
    const double den2 = den * den;
    return {p.value / den, num / den2, num1 / den2 - 2.0 * num * den1 / (den2 * den)};
}

/// χ(t) with χ'(t), χ''(t); even in t.
inline CutoffJet cutoff_jet(const Cutoff& c, double t) {
    const double at = std::abs(t);
    if (at <= c.plateau) return {1.0, 0.0, 0.0};
    if (at >= Cutoff::support) return {0.0, 0.0, 0.0};

    double u = 0.0, du = 0.0, ddu = 0.0;
    if (c.profile == CutoffProfile::linear) {
        du = 1.0 / (Cutoff::support - c.plateau);
        u = (at - c.plateau) * du;
    } else {
        const double span = std::log(Cutoff::support / c.plateau);
        u = std::log(at / c.plateau) / span;
        du = 1.0 / (at * span);
        ddu = -du / at;
    }
    const CutoffJet s = smooth_step(u);
    CutoffJet out{1.0 - s.value, -s.d1 * du, -(s.d2 * du * du + s.d1 * ddu)};
    if (t < 0.0) out.d1 = -out.d1;
    return out;
}

// ---------------------------------------------------------------------------
// Glued stage functions
// ---------------------------------------------------------------------------

/// g_k = ψ_k + χ(x'/ε)(ψ_target − ψ_k); target is k+1 for the construction.
struct GlueStage {
    int k = 2;
    double epsilon = 0.5;
    int target = 3;

    static GlueStage standard(int k, double epsilon) { return {k, epsilon, k + 1}; }
};

inline double glue_value(const GlueStage& st, const Cutoff& c, double r, double r_max) {
    check_chart(st.k, r, r_max);
    check_chart(st.target, r, r_max);
    const double t = r / st.epsilon;
    if (t >= Cutoff::support) return psi_value(st.k, r);
    if (t <= c.plateau) return psi_value(st.target, r);
    const double base = psi_value(st.k, r);
    return base + cutoff_jet(c, t).value * (psi_value(st.target, r) - base);
}

/// Exact jet of g_k, assembled by the product rule from the two sphere jets
/// and the radial cutoff jet. Off the transition annulus it returns the
/// corresponding sphere jet unchanged.
inline Jet2 glue_jet(const GlueStage& st, const Cutoff& c, const Vec& x, double r_max) {
    const double r = x.norm();
    check_chart(st.k, r, r_max);
    check_chart(st.target, r, r_max);
    const double t = r / st.epsilon;
    if (t >= Cutoff::support) return psi_jet({st.k, r_max}, x);
    if (t <= c.plateau) return psi_jet({st.target, r_max}, x);

    const Jet2 pk = psi_jet({st.k, r_max}, x);
    const Jet2 pt = psi_jet({st.target, r_max}, x);
    const double dv = psi_value(st.target, r) - psi_value(st.k, r);
    const Vec dg = pt.gradient - pk.gradient;
    const Mat dh = pt.hessian - pk.hessian;

    const CutoffJet cj = cutoff_jet(c, t);
    const double eps = st.epsilon;
    const Jet2 cx = radial_jet(x, cj.value, cj.d1 / (eps * r), cj.d2 / (eps * eps));

    Jet2 g;
    g.value = pk.value + cj.value * dv;
    g.gradient = pk.gradient + cj.value * dg + dv * cx.gradient;
    g.hessian = pk.hessian + cj.value * dh + dv * cx.hessian;
    g.hessian.noalias() += cx.gradient * dg.transpose();
    g.hessian.noalias() += dg * cx.gradient.transpose();
    return g;
}

// ---------------------------------------------------------------------------
// Inductive stack f_j
// ---------------------------------------------------------------------------

/**
 * Base sphere ψ_{base_k} plus ordered gluing stages. Level ℓ (0 ≤ ℓ ≤ depth)
 * applies the first ℓ stages: f at level ℓ equals g_i on |x'| < ε_i for the
 * innermost applied stage i containing x', and ψ_{base_k} outside ε_0.
 *
 * Stages nest: stage i+1 starts from stage i's target and fits inside its
 * plateau (ε_{i+1} ≤ a·ε_i), so the assembled function is C^∞ in x'.
 */
struct GraphStack {
    int base_k = 10;
    Cutoff cutoff{};
    double r_max = 1.0;
    std::vector<GlueStage> stages;

    int depth() const { return static_cast<int>(stages.size()); }

    void validate() const {
        cutoff.validate();
        if (base_k < 1) throw InvariantViolation("base_k must be positive");
        if (!(r_max > 0.0 && r_max < base_k)) {
            throw InvariantViolation("chart radius must lie in (0, base_k)");
        }
        int expected = base_k;
        for (std::size_t i = 0; i < stages.size(); ++i) {
            const GlueStage& st = stages[i];
            const std::string where = "stage " + std::to_string(i) + " (k=" + std::to_string(st.k) + ")";
            if (st.k != expected) {
                throw InvariantViolation(where + " does not continue from sphere " +
                                         std::to_string(expected));
            }
            if (!(st.epsilon > 0.0)) throw InvariantViolation(where + ": epsilon must be positive");
            if (!(r_max < st.target)) throw InvariantViolation(where + ": target sphere smaller than chart");
            if (i > 0) {
                const double prev = stages[i - 1].epsilon;
                if (!(st.epsilon < prev)) {
                    throw InvariantViolation(where + ": gluing radii must strictly decrease");
                }
                if (!(st.epsilon <= cutoff.plateau * prev)) {
                    throw InvariantViolation(where + ": epsilon exceeds the previous stage's plateau");
                }
            }
            expected = st.target;
        }
    }

    /// Copy holding only the first `level` stages.
    GraphStack truncated(int level) const {
        GraphStack out = *this;
        out.stages.resize(static_cast<std::size_t>(level));
        return out;
    }

    /// Index of the innermost stage among the first `level` that covers radius r, or -1.
    int active_stage(int level, double r) const {
        for (int i = level - 1; i >= 0; --i) {
            if (r < stages[static_cast<std::size_t>(i)].epsilon) return i;
        }
        return -1;
    }

    /// Sphere index of the innermost plateau at level `level` (f there is ψ_of_it).
    int innermost_sphere(int level) const {
        return level == 0 ? base_k : stages[static_cast<std::size_t>(level - 1)].target;
    }
};

inline void check_level(const GraphStack& s, int level) {
    if (level < 0 || level > s.depth()) {
        throw std::out_of_range("stack level " + std::to_string(level) + " outside [0, " +
                                std::to_string(s.depth()) + "]");
    }
}

/// Value of the stack at `level` applied stages, radius r.
inline double stack_value_at_level(const GraphStack& s, int level, double r) {
    check_level(s, level);
    const int i = s.active_stage(level, r);
    if (i < 0) return psi_value(SphereGraph{s.base_k, s.r_max}, r);
    return glue_value(s.stages[static_cast<std::size_t>(i)], s.cutoff, r, s.r_max);
}

inline Jet2 stack_jet_at_level(const GraphStack& s, int level, const Vec& x) {
    check_level(s, level);
    const int i = s.active_stage(level, x.norm());
    if (i < 0) return psi_jet({s.base_k, s.r_max}, x);
    return glue_jet(s.stages[static_cast<std::size_t>(i)], s.cutoff, x, s.r_max);
}

/// Jet of f_j, base_k ≤ j ≤ base_k + depth.
inline Jet2 stack_jet(const GraphStack& s, int j, const Vec& x) {
    return stack_jet_at_level(s, j - s.base_k, x);
}

inline double stack_value(const GraphStack& s, int j, double r) {
    return stack_value_at_level(s, j - s.base_k, r);
}

}  // namespace sqf
