#pragma once

/**
 * @file domain.hpp
 * @brief Domain models Ω_j = B_{k₀} ∪ lens(f_j, ψ_{k₀}) and Monte Carlo
 * convexity testing.
 *
 * All inclusion tests are written in forms that never add O(1) quantities
 * to the tiny coordinates near the origin: |x|² < 2k₀x_n for the base ball
 * and |y−p|² < 2R ν·(y−p) for tangent balls. Deep stages live at |x'| ~ 1e-11
 * with heights ~ 1e-23, which the naive |y − c| < R form cannot resolve.
 */

#include "squeeze_forge/graphs.hpp"
#include "squeeze_forge/parallel.hpp"

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

namespace sqf {

/// Axis-aligned sampling box in R^n.
struct Box {
    Vec lo;
    Vec hi;

    Vec sample(Rng& rng) const {
        Vec x(lo.size());
        for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = rng.uniform(lo[i], hi[i]);
        return x;
    }
};

/// Ball of radius R tangent at p with inward unit normal ν: |y−p|² < 2R ν·(y−p).
inline bool in_tangent_ball(const Vec& y, const Vec& p, const Vec& normal, double radius) {
    const Vec d = y - p;
    return d.squaredNorm() < 2.0 * radius * normal.dot(d);
}

class DomainModel {
public:
    /// `stack` is used with all its stages applied; pass a truncated copy for Ω_j.
    DomainModel(GraphStack stack, double chart_radius, Eigen::Index n)
        : stack_(std::move(stack)), chart_radius_(chart_radius), n_(n) {
        stack_.validate();
        if (n_ < 2) throw InvariantViolation("dimension n must be at least 2");
        if (!(chart_radius_ > 0.0 && chart_radius_ <= stack_.r_max)) {
            throw InvariantViolation("chart radius must lie in (0, r_max]");
        }
        if (!stack_.stages.empty() && !(stack_.stages.front().epsilon < chart_radius_)) {
            throw InvariantViolation("first gluing radius " +
                                     std::to_string(stack_.stages.front().epsilon) +
                                     " does not lie inside the chart radius " +
                                     std::to_string(chart_radius_));
        }
    }

    int base_k() const { return stack_.base_k; }
    const GraphStack& stack() const { return stack_; }
    double chart_radius() const { return chart_radius_; }
    Eigen::Index dim() const { return n_; }
    int level() const { return stack_.depth(); }

    /// Lower boundary graph f_j at radius r (r < chart radius).
    double graph(double r) const { return stack_value_at_level(stack_, level(), r); }

    Jet2 graph_jet(const Vec& xh) const { return stack_jet_at_level(stack_, level(), xh); }

    bool contains(const Vec& x) const {
        const double xn = x[n_ - 1];
        const double r2 = x.head(n_ - 1).squaredNorm();
        const double k0 = base_k();
        if (r2 + xn * xn < 2.0 * k0 * xn) return true;
        const double r = std::sqrt(r2);
        if (!(r < chart_radius_)) return false;
        return graph(r) < xn && xn <= psi_value(stack_.base_k, r);
    }

    /// Distance-like clearance to the boundary: vertical gap above f_j on the
    /// lower half of the chart, radial gap to the base sphere elsewhere.
    double clearance(const Vec& x) const {
        const double xn = x[n_ - 1];
        const double r = x.head(n_ - 1).norm();
        const double k0 = base_k();
        if (r < chart_radius_ && xn <= k0) return xn - graph(r);
        Vec c = Vec::Zero(n_);
        c[n_ - 1] = k0;
        return k0 - (x - c).norm();
    }

    /// Boundary point (x', f_j(x')) over a horizontal position.
    Vec boundary_point(const Vec& xh) const {
        Vec p(n_);
        p.head(n_ - 1) = xh;
        p[n_ - 1] = graph(xh.norm());
        return p;
    }

    /// Inward unit normal (−∇f, 1)/√(1 + |∇f|²) at (x', f_j(x')).
    Vec inward_normal(const Vec& xh) const {
        const Jet2 jet = graph_jet(xh);
        Vec nu(n_);
        nu.head(n_ - 1) = -jet.gradient;
        nu[n_ - 1] = 1.0;
        return nu.normalized();
    }

    /**
     * Sampling boxes around horizontal centre `c`: one box over the whole
     * base ball, then boxes of half-width w = 2·chart, chart/2, … down to
     * `min_scale`, each spanning heights [0, 2ρ²/k₀] with ρ the farthest
     * horizontal reach of the box. That height covers the lens and a slice
     * of the ball above it.
     */
    std::vector<Box> sampling_boxes(const Vec& c, double min_scale) const {
        std::vector<Box> boxes;
        const double k0 = base_k();
        const Eigen::Index m = n_ - 1;
        {
            Box b{Vec::Constant(n_, -k0), Vec::Constant(n_, k0)};
            b.lo[m] = 0.0;
            b.hi[m] = 2.0 * k0;
            boxes.push_back(std::move(b));
        }
        const double root = std::sqrt(static_cast<double>(m));
        for (double w = 2.0 * chart_radius_; w >= min_scale; w *= 0.25) {
            const double rho = c.norm() + w * root;
            Box b{Vec(n_), Vec(n_)};
            b.lo.head(m) = c.array() - w;
            b.hi.head(m) = c.array() + w;
            b.lo[m] = 0.0;
            b.hi[m] = std::min(2.0 * k0, 2.0 * rho * rho / k0);
            boxes.push_back(std::move(b));
            if (boxes.size() > 200) break;
        }
        return boxes;
    }

    /// Boxes for whole-domain tests: centred at the origin, down to a quarter
    /// of the innermost plateau.
    std::vector<Box> sampling_boxes() const {
        double smallest = chart_radius_ / 64.0;
        if (!stack_.stages.empty()) {
            smallest = stack_.stages.back().epsilon * stack_.cutoff.plateau * 0.25;
        }
        return sampling_boxes(Vec::Zero(n_ - 1), smallest);
    }

private:
    GraphStack stack_;
    double chart_radius_;
    Eigen::Index n_;
};

inline bool membership(const DomainModel& dom, const Vec& x) { return dom.contains(x); }

/// Domain model whose graph is `stack` truncated to `level` stages.
inline DomainModel domain_at_level(const GraphStack& stack, int level, double chart_radius,
                                   Eigen::Index n) {
    check_level(stack, level);
    return DomainModel(stack.truncated(level), chart_radius, n);
}

// ---------------------------------------------------------------------------
// Convexity
// ---------------------------------------------------------------------------

struct ConvexityReport {
    std::uint64_t pairs = 0;
    std::uint64_t violations = 0;
    std::uint64_t unsampled = 0;  // pairs whose rejection sampling gave up
    double min_clearance = std::numeric_limits<double>::infinity();
    std::optional<Vec> first_violation;

    void merge(const ConvexityReport& o) {
        pairs += o.pairs;
        violations += o.violations;
        unsampled += o.unsampled;
        min_clearance = std::min(min_clearance, o.min_clearance);
        if (!first_violation && o.first_violation) first_violation = o.first_violation;
    }
    bool ok() const { return violations == 0; }
};

template <typename D>
concept SampledDomain = requires(const D& d, const Vec& x) {
    { d.contains(x) } -> std::convertible_to<bool>;
    { d.clearance(x) } -> std::convertible_to<double>;
    { d.sampling_boxes() } -> std::convertible_to<std::vector<Box>>;
};

/// Rejection-sample a point of `dom` inside `box`, giving up after `tries`.
template <SampledDomain D>
std::optional<Vec> sample_in(const D& dom, const Box& box, Rng& rng, int tries = 4096) {
    for (int i = 0; i < tries; ++i) {
        Vec x = box.sample(rng);
        if (dom.contains(x)) return x;
    }
    return std::nullopt;
}

/**
 * Midpoint convexity test: `pairs` pairs of points of `dom`, each pair drawn
 * from one box of the domain's multiscale family, midpoint must lie in `dom`.
 */
template <SampledDomain D>
ConvexityReport convexity_check(const D& dom, std::uint64_t pairs, std::uint64_t seed) {
    const std::vector<Box> boxes = dom.sampling_boxes();
    return chunked_reduce<ConvexityReport>(
        pairs, 1u << 14, [&](std::uint64_t chunk, std::uint64_t b, std::uint64_t e) {
            Rng rng(seed, 0xC0u, chunk);
            ConvexityReport rep;
            for (std::uint64_t i = b; i < e; ++i) {
                const Box& box = boxes[rng.below(boxes.size())];
                const auto p = sample_in(dom, box, rng);
                const auto q = p ? sample_in(dom, box, rng) : std::nullopt;
                ++rep.pairs;
                if (!p || !q) {
                    ++rep.unsampled;
                    continue;
                }
                const Vec mid = 0.5 * (*p + *q);
                if (!dom.contains(mid)) {
                    ++rep.violations;
                    if (!rep.first_violation) rep.first_violation = mid;
                } else {
                    rep.min_clearance = std::min(rep.min_clearance, dom.clearance(mid));
                }
            }
            return rep;
        });
}

}  // namespace sqf
