#pragma once

/**
 * @file curvature.hpp
 * @brief Normal and principal curvatures of graph hypersurfaces x_n = g(x').
 *
 * With defining function ρ = g(x') − x_n, the curvature in direction v is
 *
 *     κ(v) = vᵀ H v / ( |∇ρ| · |v_p|² ),   v_p = (v, ∇g·v),  |∇ρ| = √(1 + |∇g|²).
 *
 * Sign convention: positive for graphs opening upward, so the sphere graph
 * ψ_k has κ ≡ 1/k.
 */

#include "squeeze_forge/errors.hpp"
#include "squeeze_forge/jet.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace sqf {

/// Tangential lift of a horizontal direction onto the graph.
struct TangentVector {
    Vec v;
    double lift = 0.0;

    static TangentVector of(const Jet2& jet, const Vec& v) { return {v, jet.gradient.dot(v)}; }
    double squared_norm() const { return v.squaredNorm() + lift * lift; }
};

inline double normal_curvature(const Jet2& jet, const Vec& v) {
    const double vv = v.squaredNorm();
    if (!(vv > 0.0)) throw DegenerateVector("normal_curvature: zero direction");
    const TangentVector vp = TangentVector::of(jet, v);
    const double grad_rho = std::sqrt(1.0 + jet.gradient.squaredNorm());
    return v.dot(jet.hessian * v) / (grad_rho * vp.squared_norm());
}

/// Extreme normal curvatures at one point with their horizontal directions.
struct PrincipalRange {
    double kappa_min = 0.0;
    double kappa_max = 0.0;
    Vec dir_min;
    Vec dir_max;
};

/// Principal curvatures as the generalized eigenvalues of (H, I + ∇g∇gᵀ),
/// scaled by 1/|∇ρ|. Exhaustive over directions, unlike sampling.
inline PrincipalRange principal_range(const Jet2& jet) {
    const auto n = jet.dim();
    const Mat metric = Mat::Identity(n, n) + jet.gradient * jet.gradient.transpose();
    const Mat sym = 0.5 * (jet.hessian + jet.hessian.transpose());
    Eigen::GeneralizedSelfAdjointEigenSolver<Mat> solver(sym, metric);
    const double scale = 1.0 / std::sqrt(1.0 + jet.gradient.squaredNorm());
    const auto& ev = solver.eigenvalues();  // ascending
    PrincipalRange out;
    out.kappa_min = ev[0] * scale;
    out.kappa_max = ev[n - 1] * scale;
    out.dir_min = solver.eigenvectors().col(0).normalized();
    out.dir_max = solver.eigenvectors().col(n - 1).normalized();
    return out;
}

/// One sampled radius of a sweep.
struct CurvatureSample {
    double radius = 0.0;
    double kappa_min = 0.0;
    double kappa_max = 0.0;
};

struct CurvatureRange {
    double kappa_min = std::numeric_limits<double>::infinity();
    double kappa_max = -std::numeric_limits<double>::infinity();
    Vec argmin_point;
    Vec argmin_dir;
    Vec argmax_point;
    Vec argmax_dir;
    std::vector<CurvatureSample> samples;  // filled when SweepConfig::record is set

    bool within(double lo, double hi) const { return kappa_min >= lo && kappa_max <= hi; }
};

struct SweepConfig {
    int grid = 512;
    int refine_points = 64;
    bool refine = true;
    bool record = false;
};

/**
 * Min/max principal curvature of a radial surface over r_lo ≤ |x'| ≤ r_hi.
 *
 * The surface is radial, so the sweep walks the ray r·e₁ and takes the full
 * eigenstructure at each point, which covers every direction and every
 * angular position. After a uniform pass of `grid` radii, one refinement
 * level resamples the two cells adjacent to each observed extreme.
 */
template <typename Surface>
CurvatureRange region_bounds(Surface&& surface, double r_lo, double r_hi, Eigen::Index dim,
                             const SweepConfig& cfg = {}) {
    CurvatureRange out;
    const int grid = std::max(cfg.grid, 2);
    Vec x = Vec::Zero(dim);
    auto visit = [&](double r) {
        x.setZero();
        x[0] = r;
        const PrincipalRange pr = principal_range(surface(x));
        if (pr.kappa_min < out.kappa_min) {
            out.kappa_min = pr.kappa_min;
            out.argmin_point = x;
            out.argmin_dir = pr.dir_min;
        }
        if (pr.kappa_max > out.kappa_max) {
            out.kappa_max = pr.kappa_max;
            out.argmax_point = x;
            out.argmax_dir = pr.dir_max;
        }
        if (cfg.record) out.samples.push_back({r, pr.kappa_min, pr.kappa_max});
        return pr;
    };

    const double step = (r_hi - r_lo) / (grid - 1);
    int imin = 0, imax = 0;
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < grid; ++i) {
        const double r = (i == grid - 1) ? r_hi : r_lo + step * i;
        const PrincipalRange pr = visit(r);
        if (pr.kappa_min < lo) { lo = pr.kappa_min; imin = i; }
        if (pr.kappa_max > hi) { hi = pr.kappa_max; imax = i; }
    }
    if (cfg.refine && step > 0.0) {
        for (const int c : {imin, imax}) {
            const double a = std::max(r_lo, r_lo + step * (c - 1));
            const double b = std::min(r_hi, r_lo + step * (c + 1));
            for (int i = 1; i < cfg.refine_points; ++i) {
                visit(a + (b - a) * i / cfg.refine_points);
            }
        }
    }
    return out;
}

template <typename Surface>
CurvatureRange region_bounds(Surface&& surface, double radius, Eigen::Index dim,
                             const SweepConfig& cfg = {}) {
    return region_bounds(std::forward<Surface>(surface), 0.0, radius, dim, cfg);
}

}  // namespace sqf
