#pragma once

/**
 * @file certificate.hpp
 * @brief Tangent-ball hypotheses for each shell and the exhaustion-aggregated
 * squeezing certificate.
 *
 * Shell k is checked on the stage domain Ω^{(k)}, the stack truncated right
 * after stage k: there every boundary point with |x'| < δ_k carries an inner
 * cap of radius k−m inside the domain and an outer ball of radius k+m
 * containing it. A row's bound holds for heights x_n ≤ t_k on that stage;
 * by the increasing-union rule, the bound for a height band is the best
 * bound among rows whose checks cover it.
 */

#include "squeeze_forge/domain.hpp"
#include "squeeze_forge/schedule.hpp"
#include "squeeze_forge/squeeze.hpp"

#include <Eigen/QR>

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace sqf {

struct BallCheckReport {
    std::uint64_t samples = 0;
    std::uint64_t violations = 0;
    std::uint64_t unsampled = 0;
    int points = 0;
    double min_slack = std::numeric_limits<double>::infinity();
    std::optional<Vec> first_violation;

    void merge(const BallCheckReport& o) {
        samples += o.samples;
        violations += o.violations;
        unsampled += o.unsampled;
        points = std::max(points, o.points);
        min_slack = std::min(min_slack, o.min_slack);
        if (!first_violation && o.first_violation) first_violation = o.first_violation;
    }
    bool ok() const { return violations == 0 && samples > unsampled; }
};

/// Horizontal positions of the tested boundary points: the origin, then
/// uniform points of the disc |x'| < delta.
inline std::vector<Vec> tangency_points(Eigen::Index dim, double delta, int count, std::uint64_t seed) {
    std::vector<Vec> pts;
    pts.push_back(Vec::Zero(dim));
    Rng rng(seed, 0x7A9u, 0);
    for (int i = 1; i < count; ++i) pts.push_back(delta * rng.in_ball(dim));
    return pts;
}

/// Orthonormal basis of the hyperplane orthogonal to unit vector `nu` (columns).
inline Mat tangent_basis(const Vec& nu) {
    const Mat a = nu;
    Eigen::HouseholderQR<Mat> qr(a);
    const Mat q = qr.householderQ();
    return q.rightCols(nu.size() - 1);
}

/**
 * Inner cap hypothesis: at each tested boundary point p of `dom` with
 * |p'| < delta, the cap of the ball of radius `inner_radius` (default k − m)
 * tangent at p from inside, cut at lateral radius delta, lies in `dom`.
 * `samples` is the total over all points.
 */
inline BallCheckReport cap_inside_check(const DomainModel& dom, int k, int m, double delta,
                                        std::uint64_t samples, std::uint64_t seed,
                                        std::optional<double> inner_radius = std::nullopt,
                                        int points = 10) {
    const double R = inner_radius.value_or(static_cast<double>(k - m));
    const Eigen::Index n = dom.dim();
    const std::vector<Vec> feet = tangency_points(n - 1, delta, points, seed ^ 0xCA9ull);
    BallCheckReport total;
    const std::uint64_t per_point = std::max<std::uint64_t>(samples / feet.size(), 1);
    for (std::size_t pi = 0; pi < feet.size(); ++pi) {
        const Vec p = dom.boundary_point(feet[pi]);
        const Vec nu = dom.inward_normal(feet[pi]);
        const Mat basis = tangent_basis(nu);
        const double lateral = std::min(delta, R);
        const double depth = lateral * lateral / (R + std::sqrt(R * R - lateral * lateral));
        BallCheckReport rep = chunked_reduce<BallCheckReport>(
            per_point, 1u << 13, [&](std::uint64_t chunk, std::uint64_t b, std::uint64_t e) {
                Rng rng(seed, 0xCA90000ull + pi, chunk);
                BallCheckReport r;
                r.points = static_cast<int>(feet.size());
                for (std::uint64_t i = b; i < e; ++i) {
                    ++r.samples;
                    std::optional<Vec> y;
                    for (int tries = 0; tries < 256 && !y; ++tries) {
                        Vec cand = p + rng.uniform(0.0, depth) * nu;
                        for (Eigen::Index j = 0; j < basis.cols(); ++j) {
                            cand += rng.uniform(-lateral, lateral) * basis.col(j);
                        }
                        if (in_tangent_ball(cand, p, nu, R)) y = std::move(cand);
                    }
                    if (!y) {
                        ++r.unsampled;
                        continue;
                    }
                    if (!dom.contains(*y)) {
                        ++r.violations;
                        if (!r.first_violation) r.first_violation = *y;
                    } else {
                        r.min_slack = std::min(r.min_slack, dom.clearance(*y));
                    }
                }
                return r;
            });
        total.merge(rep);
    }
    total.points = static_cast<int>(feet.size());
    return total;
}

/**
 * Outer ball hypothesis: at each tested boundary point p with |p'| < delta,
 * the ball of radius `outer_radius` (default k + m) tangent at p contains
 * every sampled point of `dom`. Points are drawn from the domain's
 * multiscale boxes centred at p'. `samples` is the total over all points.
 */
inline BallCheckReport outer_contains_check(const DomainModel& dom, int k, int m, double delta,
                                            std::uint64_t samples, std::uint64_t seed,
                                            std::optional<double> outer_radius = std::nullopt,
                                            int points = 10) {
    const double R = outer_radius.value_or(static_cast<double>(k + m));
    const Eigen::Index n = dom.dim();
    const std::vector<Vec> feet = tangency_points(n - 1, delta, points, seed ^ 0x0E7ull);
    BallCheckReport total;
    const std::uint64_t per_point = std::max<std::uint64_t>(samples / feet.size(), 1);
    for (std::size_t pi = 0; pi < feet.size(); ++pi) {
        const Vec p = dom.boundary_point(feet[pi]);
        const Vec nu = dom.inward_normal(feet[pi]);
        const std::vector<Box> boxes = dom.sampling_boxes(feet[pi], delta / 16.0);
        BallCheckReport rep = chunked_reduce<BallCheckReport>(
            per_point, 1u << 13, [&](std::uint64_t chunk, std::uint64_t b, std::uint64_t e) {
                Rng rng(seed, 0x0E70000ull + pi, chunk);
                BallCheckReport r;
                r.points = static_cast<int>(feet.size());
                for (std::uint64_t i = b; i < e; ++i) {
                    ++r.samples;
                    const auto y = sample_in(dom, boxes[rng.below(boxes.size())], rng);
                    if (!y) {
                        ++r.unsampled;
                        continue;
                    }
                    const Vec dvec = *y - p;
                    const double slack = (2.0 * R * nu.dot(dvec) - dvec.squaredNorm()) / (2.0 * R);
                    if (!in_tangent_ball(*y, p, nu, R)) {
                        ++r.violations;
                        if (!r.first_violation) r.first_violation = *y;
                    }
                    r.min_slack = std::min(r.min_slack, slack);
                }
                return r;
            });
        total.merge(rep);
    }
    total.points = static_cast<int>(feet.size());
    return total;
}

// ---------------------------------------------------------------------------
// Certificate
// ---------------------------------------------------------------------------

struct CertificateConfig {
    PinchConfig pinch{};
    Eigen::Index n = 4;
    std::uint64_t samples = 1'000'000;  // per check, split over the tangency points
    std::uint64_t seed = 1;
    int points = 10;
};

struct ShellRow {
    int k = 0;
    double t_lo = 0.0;
    double t_hi = 0.0;
    ShellBound shell;
    PinchRow pinch;
    BallCheckReport cap;
    BallCheckReport outer;
};

/// Height band (t_lo, t_hi] with the best bound among contributing rows.
struct AggregateEntry {
    double t_lo = 0.0;
    double t_hi = 0.0;
    double bound = 0.0;
    std::vector<int> contributing_k;
};

struct SqueezeCertificate {
    Schedule schedule;
    std::vector<ShellRow> shells;
    std::vector<AggregateEntry> aggregate;
    bool strictly_increasing = false;
    bool envelope_ok = false;
    std::vector<std::string> notes;

    double final_bound() const { return shells.empty() ? 0.0 : shells.back().shell.bound; }
};

/// Band i is covered by rows 0..i; it takes their maximum.
inline std::vector<AggregateEntry> aggregate_rows(const std::vector<ShellRow>& rows) {
    std::vector<AggregateEntry> out;
    double best = -std::numeric_limits<double>::infinity();
    std::vector<int> ks;
    for (const auto& row : rows) {
        ks.push_back(row.k);
        best = std::max(best, row.shell.bound);
        out.push_back({row.t_lo, row.t_hi, best, ks});
    }
    return out;
}

/// 1 − bound_k ≤ 2m/(k+m) + 2(1 − √(1 − s_k)).
inline bool envelope_holds(const ShellRow& row, int m) {
    const double s = row.shell.cfg.s;
    return 1.0 - row.shell.bound <= 2.0 * m / (row.k + m) + 2.0 * (1.0 - std::sqrt(1.0 - s));
}

/**
 * Runs, per schedule entry, the pinch sweeps and the cap and outer-ball
 * Monte Carlo checks on the stage domain, then assembles shell rows and the
 * aggregate. Throws PrerequisiteFailed naming the first failing report.
 */
inline SqueezeCertificate build_certificate(const Schedule& sched, const CertificateConfig& cfg) {
    if (const auto issues = schedule_issues(sched); !issues.empty()) {
        throw PrerequisiteFailed("schedule", sched.entries.empty() ? 0 : sched.entries.front().k,
                                 "schedule: " + issues.front());
    }
    if (cfg.samples == 0) throw PrerequisiteFailed("config", 0, "samples must be positive");

    SqueezeCertificate cert;
    cert.schedule = sched;
    const auto pinch = pinch_rows(sched, cfg.pinch);
    for (int i = 0; i < sched.depth(); ++i) {
        const auto& e = sched.entries[static_cast<std::size_t>(i)];
        ShellRow row;
        row.k = e.k;
        row.pinch = pinch[static_cast<std::size_t>(i)];
        if (!row.pinch.ok()) {
            throw PrerequisiteFailed("pinch", e.k, "pinch: curvature of shell k=" + std::to_string(e.k) +
                                                       " leaves [1/(k+m), 1/(k-m)]");
        }
        const DomainModel stage = sched.domain(i + 1, cfg.n);
        const std::uint64_t seed = cfg.seed * 1000003ull + static_cast<std::uint64_t>(e.k);
        row.cap = cap_inside_check(stage, e.k, sched.m, e.delta, cfg.samples, seed, std::nullopt, cfg.points);
        if (!row.cap.ok()) {
            throw PrerequisiteFailed("cap", e.k, "cap: inner ball of radius k-m escapes the domain at k=" +
                                                     std::to_string(e.k));
        }
        row.outer = outer_contains_check(stage, e.k, sched.m, e.delta, cfg.samples, seed, std::nullopt,
                                         cfg.points);
        if (!row.outer.ok()) {
            throw PrerequisiteFailed("outer", e.k, "outer: ball of radius k+m misses domain points at k=" +
                                                       std::to_string(e.k));
        }
        row.shell = shell_bound(e.k, sched.m, e.delta);
        row.t_hi = e.t;
        row.t_lo = i + 1 < sched.depth() ? sched.entries[static_cast<std::size_t>(i + 1)].t : 0.0;
        cert.shells.push_back(std::move(row));
    }
    cert.aggregate = aggregate_rows(cert.shells);
    cert.strictly_increasing = true;
    cert.envelope_ok = true;
    for (std::size_t i = 0; i < cert.shells.size(); ++i) {
        if (i > 0 && !(cert.shells[i].shell.bound > cert.shells[i - 1].shell.bound)) {
            cert.strictly_increasing = false;
        }
        cert.envelope_ok = cert.envelope_ok && envelope_holds(cert.shells[i], sched.m);
    }
    cert.notes.push_back(
        "Each row's bound holds on its stage domain for heights x_n <= t_k; persistence on later "
        "stages rests on the linear estimate S >= 1 - C_k dist away from the origin, which is not "
        "computed here.");
    cert.notes.push_back("Aggregate bands take the maximum over rows whose checks cover the band.");
    return cert;
}

}  // namespace sqf
