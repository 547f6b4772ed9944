// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include "squeeze_forge/squeeze_forge.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

using namespace sqf;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

int failures = 0;

void report(int id, const char* title, bool ok, const std::string& detail) {
    std::printf("[%s] criterion %d: %s -- %s\n", ok ? "PASS" : "FAIL", id, title, detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
}

std::string fmt(const char* f, double a) {
    char buf[128];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

// Golden values of find_m on [5, 25], recorded from the first run.
constexpr int kGoldenM = 3;
constexpr int kGoldenN = 4;
constexpr double kGoldenEpsilon = 0.5;

void criterion1() {
    const auto t0 = Clock::now();
    double worst_exact = 0.0, worst_fd = 0.0;
    for (int k : {2, 5, 10, 25}) {
        const SphereGraph g{k, 1.0};
        auto f = [k](const Vec& y) { return psi_value(k, y.norm()); };
        for (int i = 0; i < 1000; ++i) {
            // 10 x 100 polar grid over |x'| <= 0.5 in the (x1, x2) plane of R^3
            const double r = 0.5 * (i / 100 + 1) / 10.0;
            const double th = 2.0 * std::numbers::pi * (i % 100) / 100.0;
            Vec x = Vec::Zero(3);
            x[0] = r * std::cos(th);
            x[1] = r * std::sin(th);
            const PrincipalRange a = principal_range(psi_jet(g, x));
            const PrincipalRange d = principal_range(fd_jet(f, x, 1e-4));
            worst_exact = std::max({worst_exact, std::abs(a.kappa_min - 1.0 / k), std::abs(a.kappa_max - 1.0 / k)});
            worst_fd = std::max({worst_fd, std::abs(d.kappa_min - 1.0 / k), std::abs(d.kappa_max - 1.0 / k)});
        }
    }
    const double dt = seconds_since(t0);
    report(1, "sphere-graph umbilicity", worst_exact <= 1e-8 && worst_fd <= 1e-4 && dt < 5.0,
           "max dev analytic " + fmt("%.3e", worst_exact) + ", finite-difference " + fmt("%.3e", worst_fd) +
               ", " + fmt("%.2f s", dt));
}

void criterion2(std::vector<double>& eps_out) {
    const auto t0 = Clock::now();
    PinchConfig cfg;
    cfg.sweep.grid = 512;
    cfg.margin = 0.01;
    bool ok = true;
    std::string detail;
    try {
        EpsilonCache cache(cfg);
        const MarginChoice mc = find_m(5, 25, cfg, &cache);
        ok = mc.m <= 8;
        for (int k = 5; k <= 25; ++k) {
            const auto eps = cache.get(k, mc.m);
            const bool pinched = eps && pinch_interval(k, mc.m, cfg.margin).contains(stage_sweep(k, *eps, cfg));
            ok = ok && pinched;
            eps_out.push_back(eps.value_or(0.0));
        }
        const MarginChoice again = find_m(5, 25, cfg);
        bool golden = mc.m == kGoldenM && mc.N == kGoldenN && again.m == mc.m && again.N == mc.N;
        for (double e : eps_out) golden = golden && e == kGoldenEpsilon;
        ok = ok && golden;
        detail = "m=" + std::to_string(mc.m) + " N=" + std::to_string(mc.N) + ", all eps_k " +
                 (golden ? "match" : "differ from") + " golden";
    } catch (const std::exception& e) {
        ok = false;
        detail = e.what();
    }
    const double dt = seconds_since(t0);
    report(2, "pinching realization on k in [5,25]", ok && dt < 120.0, detail + ", " + fmt("%.2f s", dt));
}

void criterion3(const std::vector<double>& eps) {
    PinchConfig cfg;
    std::vector<double> lx, ly;
    for (int k = 5; k <= 25; ++k) {
        const double e = eps.size() == 21 && eps[k - 5] > 0.0 ? eps[k - 5] : kGoldenEpsilon;
        const CurvatureRange r = stage_sweep(k, e, cfg);
        lx.push_back(std::log(static_cast<double>(k)));
        ly.push_back(std::log(std::max(std::abs(r.kappa_min - 1.0 / k), std::abs(r.kappa_max - 1.0 / k))));
    }
    const double n = static_cast<double>(lx.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sx += lx[i];
        sy += ly[i];
        sxx += lx[i] * lx[i];
        sxy += lx[i] * ly[i];
    }
    const double p = -(n * sxy - sx * sy) / (n * sxx - sx * sx);
    report(3, "remainder scaling exponent", p >= 1.8, "p = " + fmt("%.4f", p));
}

void criterion4(const Schedule& sched) {
    const auto t0 = Clock::now();
    const ConvexityReport rep = convexity_check(sched.domain(sched.depth(), 4), 1'000'000, 42);
    const double dt = seconds_since(t0);

    // negative control: first gluing radius doubled
    PinchConfig cfg;
    Schedule neg = sched;
    neg.entries[0].epsilon *= 2.0;
    std::string neg_detail;
    bool neg_caught = false;
    const bool pinched = stage_pinched(neg.entries[0].k, neg.m, neg.entries[0].epsilon, cfg);
    if (!pinched) {
        neg_caught = true;
        neg_detail = "pinching failure (glued region leaves the chart)";
    }
    try {
        const ConvexityReport nr = convexity_check(neg.domain(neg.depth(), 4), 1'000'000, 42);
        neg_detail += ", convexity violations " + std::to_string(nr.violations);
        neg_caught = neg_caught || nr.violations > 0;
    } catch (const InvariantViolation& e) {
        neg_detail += ", domain rejected: " + std::string(e.what());
    }
    report(4, "convexity of the depth-6 domain", rep.violations == 0 && rep.pairs == 1'000'000 && neg_caught && dt < 60.0,
           std::to_string(rep.violations) + " violations in " + std::to_string(rep.pairs) + " pairs (" +
               std::to_string(rep.unsampled) + " unsampled), " + fmt("%.2f s", dt) + "; negative control: " +
               neg_detail);
}

void criterion5() {
    const auto t0 = Clock::now();
    const double v = lemma_lb(0.1, 0.5, 0.99375);
    const bool exact = std::abs(v - std::sqrt(0.855)) <= 1e-12;
    int grid_ok = 0;
    for (int i = 0; i < 50; ++i) {
        const double s = 0.5 * (i + 0.5) / 50.0;
        for (int j = 0; j < 50; ++j) {
            const double d = (j + 0.5) / 50.0;
            if (lemma_lb_gap(s, d, s * d / 8.0) > 1.0 - s) ++grid_ok;
        }
    }
    std::uint64_t violations = 0;
    const std::pair<double, double> pairs[] = {{0.1, 0.5}, {0.2, 0.3}, {0.3, 0.45}, {0.4, 0.1}, {0.45, 0.25}};
    std::uint64_t seed = 1;
    for (auto [s, d] : pairs) violations += inclusion_check(s, d, 1'000'000, seed++).violations;
    const double dt = seconds_since(t0);
    report(5, "two-ball squeezing bound numerics", exact && grid_ok == 2500 && violations == 0 && dt < 30.0,
           "lemma_lb(0.1,0.5,0.99375) - sqrt(0.855) = " + fmt("%.1e", v - std::sqrt(0.855)) + ", threshold " +
               std::to_string(grid_ok) + "/2500, inclusion violations " + std::to_string(violations) + ", " +
               fmt("%.2f s", dt));
}

void criterion6() {
    const auto t0 = Clock::now();
    CertificateConfig cc;
    cc.seed = 6;
    bool ok = false;
    std::string detail;
    try {
        const Schedule s6 = build_schedule(10, 6, kGoldenM, cc.pinch);
        const Schedule s12 = build_schedule(10, 12, kGoldenM, cc.pinch);
        const SqueezeCertificate c6 = build_certificate(s6, cc);
        const SqueezeCertificate c12 = build_certificate(s12, cc);
        const double floor = 1.0 - 2.0 * s6.m / (s6.k0 + 5 + s6.m);
        ok = c6.strictly_increasing && c6.final_bound() >= floor && c12.final_bound() > c6.final_bound();
        detail = std::string("increasing ") + (c6.strictly_increasing ? "yes" : "no") + ", final " +
                 fmt("%.6f", c6.final_bound()) + " vs floor " + fmt("%.6f", floor) + ", depth 12 final " +
                 fmt("%.6f", c12.final_bound());
    } catch (const std::exception& e) {
        detail = e.what();
    }
    report(6, "certificate improves with depth", ok, detail + ", " + fmt("%.2f s", seconds_since(t0)));
}

void criterion7(const Schedule& sched) {
    const auto t0 = Clock::now();
    std::mt19937_64 rng(7);
    std::normal_distribution<double> g;
    std::uniform_real_distribution<double> u;
    const Cutoff c = sched.cutoff;
    double worst = 0.0;
    std::uint64_t dominated = 0, total = 0;
    for (const auto& e : sched.entries) {
        const GlueStage st = GlueStage::standard(e.k, e.epsilon);
        auto f = [&](const Vec& y) { return glue_value(st, c, y.norm(), 1.0); };
        for (int i = 0; i < 1000; ++i) {
            Vec x(3);
            for (int a = 0; a < 3; ++a) x[a] = g(rng);
            // radii across plateau, transition and outer region of the stage
            x *= e.epsilon * (0.05 + 1.2 * u(rng)) / x.norm();
            const Jet2 a = glue_jet(st, c, x, 1.0);
            const Jet2 d = fd_jet(f, x, 1e-5 * e.epsilon);
            worst = std::max(worst, hessian_rel_error(d.hessian, a.hessian));
            const PrincipalRange pr = principal_range(a);
            bool ok = true;
            for (int j = 0; j < 10000; ++j) {
                Vec v(3);
                for (int b = 0; b < 3; ++b) v[b] = g(rng);
                const double kv = normal_curvature(a, v);
                ok = ok && kv >= pr.kappa_min - 1e-12 && kv <= pr.kappa_max + 1e-12;
            }
            dominated += ok ? 1 : 0;
            ++total;
        }
    }
    report(7, "oracle agreement", worst <= 1e-5 && dominated == total,
           "max relative Hessian error " + fmt("%.3e", worst) + ", extremes dominate at " + std::to_string(dominated) +
               "/" + std::to_string(total) + " points, " + fmt("%.2f s", seconds_since(t0)));
}

}  // namespace

int main() {
    criterion1();
    std::vector<double> eps;
    criterion2(eps);
    criterion3(eps);
    const Schedule sched = build_schedule(10, 6, kGoldenM, PinchConfig{});
    criterion4(sched);
    criterion5();
    criterion6();
    criterion7(sched);
    std::printf("%d criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
