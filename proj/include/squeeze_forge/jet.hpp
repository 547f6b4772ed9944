#pragma once

/**
 * @file jet.hpp
 * @brief Second-order jets of scalar fields on R^{n-1} and a central
 * finite-difference oracle for them.
 *
 * The oracle never touches the analytic derivative code; it only samples
 * the scalar field, so it can be used to check every closed-form jet in
 * the library.
 */

#include <Eigen/Dense>

#include <cmath>
#include <concepts>
#include <stdexcept>

namespace sqf {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Value, gradient and Hessian of a graphing function at a base point.
struct Jet2 {
    double value = 0.0;
    Vec gradient;
    Mat hessian;

    Eigen::Index dim() const { return gradient.size(); }

    static Jet2 zero(Eigen::Index dim) {
        return Jet2{0.0, Vec::Zero(dim), Mat::Zero(dim, dim)};
    }
};

/// Jet of a radial function x ↦ φ(|x|) from its radial derivatives.
///
/// `d1_over_r` is φ'(r)/r, passed separately so callers with a closed form
/// (e.g. 1/√(k²−r²) for sphere graphs) stay exact at r = 0.
inline Jet2 radial_jet(const Vec& x, double value, double d1_over_r, double d2) {
    const auto n = x.size();
    Jet2 jet;
    jet.value = value;
    jet.gradient = d1_over_r * x;
    jet.hessian = d1_over_r * Mat::Identity(n, n);
    const double r2 = x.squaredNorm();
    if (r2 > 0.0) {
        jet.hessian.noalias() += ((d2 - d1_over_r) / r2) * (x * x.transpose());
    }
    return jet;
}

/// Relative Frobenius-norm distance between two Hessians.
inline double hessian_rel_error(const Mat& a, const Mat& b) {
    const double scale = std::max(a.norm(), b.norm());
    if (scale == 0.0) return 0.0;
    return (a - b).norm() / scale;
}

template <typename F>
concept ScalarField = requires(F f, const Vec& x) {
    { f(x) } -> std::convertible_to<double>;
};

/**
 * Central finite-difference jet of `fn` at `x` with step `h`.
 *
 * Gradient uses the two-point stencil, diagonal Hessian entries the
 * three-point stencil and off-diagonals the four-point cross stencil; the
 * result is symmetrized.
 */
template <ScalarField F>
Jet2 fd_jet(F&& fn, const Vec& x, double h) {
    if (!(h > 0.0)) throw std::invalid_argument("fd_jet: step must be positive");
    const auto n = x.size();
    Jet2 jet = Jet2::zero(n);
    const double f0 = fn(x);
    jet.value = f0;

    Vec xp = x;
    for (Eigen::Index i = 0; i < n; ++i) {
        xp = x;
        xp[i] += h;
        const double fp = fn(xp);
        xp[i] = x[i] - h;
        const double fm = fn(xp);
        jet.gradient[i] = (fp - fm) / (2.0 * h);
        jet.hessian(i, i) = (fp - 2.0 * f0 + fm) / (h * h);
    }
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i + 1; j < n; ++j) {
            auto at = [&](double si, double sj) {
                xp = x;
                xp[i] += si * h;
                xp[j] += sj * h;
                return fn(xp);
            };
            const double hij =
                (at(1, 1) - at(1, -1) - at(-1, 1) + at(-1, -1)) / (4.0 * h * h);
            jet.hessian(i, j) = hij;
            jet.hessian(j, i) = hij;
        }
    }
    return jet;
}

}  // namespace sqf
