#include "oracles.hpp"
#include "squeeze_forge/graphs.hpp"
#include "squeeze_forge/io.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace sqf;

namespace {

GraphStack sample_stack(int base_k = 10, int depth = 6) {
    GraphStack s;
    s.base_k = base_k;
    double eps = 0.5;
    for (int i = 0; i < depth; ++i, eps /= 8.0) s.stages.push_back(GlueStage::standard(base_k + i, eps));
    return s;
}

Vec e1(Eigen::Index n, double r) {
    Vec x = Vec::Zero(n);
    x[0] = r;
    return x;
}

}  // namespace

TEST(SphereGraph, JetAtOriginIsHalfIdentity) {
    const Jet2 j = psi_jet({2, 1.0}, Vec::Zero(3));
    EXPECT_EQ(j.value, 0.0);
    EXPECT_EQ(j.gradient.norm(), 0.0);
    EXPECT_LT((j.hessian - 0.5 * Mat::Identity(3, 3)).norm(), 1e-15);
}

TEST(SphereGraph, UnitRadiusValue) {
    EXPECT_NEAR(psi_value(SphereGraph{2, 1.0}, 1.0), 2.0 - std::sqrt(3.0), 1e-15);
    EXPECT_NEAR(psi_jet({2, 1.0}, e1(1, 1.0)).value, 0.2679491924311227, 1e-15);
}

TEST(SphereGraph, QuadraticLeadingTerm) {
    const double r = 0.1;
    const double v = psi_jet({5, 1.0}, e1(2, r)).value;
    EXPECT_NEAR(v, 0.001, 1e-6);
    EXPECT_LE(std::abs(v - r * r / 10.0), std::pow(r, 4) / 125.0);
}

TEST(SphereGraph, MatchesLongDoubleOracle) {
    for (int k = 2; k <= 25; ++k) {
        for (int i = 0; i <= 100; ++i) {
            const double r = i / 100.0;
            const double ref = oracle::sphere_height(k, r);
            EXPECT_NEAR(psi_value(k, r), ref, 1e-16 + 1e-14 * ref) << "k=" << k << " r=" << r;
        }
    }
}

TEST(SphereGraph, JetMatchesRichardsonDifferences) {
    std::mt19937_64 rng(5);
    for (int k : {2, 5, 10}) {
        for (int i = 0; i < 20; ++i) {
            const Vec x = oracle::random_point(3, 0.9, rng);
            const SphereGraph g{k, 1.0};
            const Jet2 a = psi_jet(g, x);
            const Jet2 f = oracle::richardson_jet([&](const Vec& y) { return psi_value(k, y.norm()); }, x, 1e-3);
            EXPECT_LT((a.gradient - f.gradient).norm(), 1e-9);
            EXPECT_LT(hessian_rel_error(f.hessian, a.hessian), 1e-6);
        }
    }
}

TEST(SphereGraph, OutsideChartThrows) {
    EXPECT_THROW(psi_jet({5, 1.0}, e1(2, 1.5)), DomainError);
    EXPECT_THROW(psi_jet({1, 1.0}, e1(2, 0.5)), DomainError);
}

TEST(Cutoff, PlateauAndSupportAreExact) {
    for (auto profile : {CutoffProfile::linear, CutoffProfile::log_radial}) {
        const Cutoff c{0.25, profile};
        const CutoffJet at0 = cutoff_jet(c, 0.0);
        EXPECT_EQ(at0.value, 1.0);
        EXPECT_EQ(at0.d1, 0.0);
        EXPECT_EQ(at0.d2, 0.0);
        const CutoffJet at2 = cutoff_jet(c, 2.0);
        EXPECT_EQ(at2.value, 0.0);
        EXPECT_EQ(at2.d1, 0.0);
        EXPECT_EQ(at2.d2, 0.0);
        EXPECT_EQ(cutoff_jet(c, 0.25).value, 1.0);
        EXPECT_EQ(cutoff_jet(c, 1.0).value, 0.0);
    }
}

TEST(Cutoff, MidpointMatchesFiniteDifferences) {
    for (auto profile : {CutoffProfile::linear, CutoffProfile::log_radial}) {
        const Cutoff c{0.25, profile};
        const double t = (c.plateau + 1.0) / 2.0;
        const double h = 1e-4;
        const CutoffJet j = cutoff_jet(c, t);
        const double fp = cutoff_jet(c, t + h).value;
        const double fm = cutoff_jet(c, t - h).value;
        EXPECT_GT(j.value, 0.0);
        EXPECT_LT(j.value, 1.0);
        EXPECT_NEAR(j.d1, (fp - fm) / (2 * h), 1e-6);
        EXPECT_NEAR(j.d2, (fp - 2 * j.value + fm) / (h * h), 1e-6);
    }
}

TEST(Cutoff, DerivativesMatchAcrossTransition) {
    for (auto profile : {CutoffProfile::linear, CutoffProfile::log_radial}) {
        const Cutoff c{0.25, profile};
        for (int i = 1; i < 50; ++i) {
            const double t = 0.25 + 0.75 * i / 50.0;
            const double h = 2e-6;
            const CutoffJet j = cutoff_jet(c, t);
            const CutoffJet p = cutoff_jet(c, t + h);
            const CutoffJet m = cutoff_jet(c, t - h);
            EXPECT_NEAR(j.d1, (p.value - m.value) / (2 * h), 1e-7);
            EXPECT_NEAR(j.d2, (p.d1 - m.d1) / (2 * h), 1e-6);
        }
    }
}

TEST(Cutoff, NonincreasingAndEven) {
    const Cutoff c;
    double prev = 1.0;
    for (int i = 0; i <= 1000; ++i) {
        const double t = 1.2 * i / 1000.0;
        const CutoffJet j = cutoff_jet(c, t);
        EXPECT_LE(j.value, prev);
        EXPECT_GE(j.value, 0.0);
        EXPECT_LE(j.d1, 0.0);
        EXPECT_EQ(j.value, cutoff_jet(c, -t).value);
        EXPECT_EQ(j.d1, -cutoff_jet(c, -t).d1);
        prev = j.value;
    }
}

TEST(Cutoff, SmoothStepSymmetry) {
    for (int i = 0; i <= 100; ++i) {
        const double u = i / 100.0;
        EXPECT_NEAR(smooth_step(u).value + smooth_step(1.0 - u).value, 1.0, 1e-15);
    }
}

TEST(Cutoff, ProfileNamesRoundTrip) {
    EXPECT_EQ(cutoff_profile_from_string(to_string(CutoffProfile::linear)), CutoffProfile::linear);
    EXPECT_EQ(cutoff_profile_from_string(to_string(CutoffProfile::log_radial)), CutoffProfile::log_radial);
    EXPECT_THROW(cutoff_profile_from_string("cubic"), InvariantViolation);
    EXPECT_THROW((Cutoff{1.5, CutoffProfile::linear}.validate()), InvariantViolation);
}

TEST(GlueStage, OutsideEpsilonIsBaseSphereExactly) {
    const Cutoff c;
    const GlueStage st = GlueStage::standard(10, 0.5);
    for (double r : {0.5, 0.7, 1.0}) {
        const Jet2 g = glue_jet(st, c, e1(3, r), 1.0);
        const Jet2 p = psi_jet({10, 1.0}, e1(3, r));
        EXPECT_EQ(g.value, p.value);
        EXPECT_EQ(g.gradient, p.gradient);
        EXPECT_EQ(g.hessian, p.hessian);
    }
}

TEST(GlueStage, PlateauIsTargetSphereExactly) {
    const Cutoff c;
    const GlueStage st = GlueStage::standard(10, 0.5);
    for (double r : {0.0, 0.05, 0.125}) {
        const Jet2 g = glue_jet(st, c, e1(3, r), 1.0);
        const Jet2 p = psi_jet({11, 1.0}, e1(3, r));
        EXPECT_EQ(g.value, p.value);
        EXPECT_EQ(g.gradient, p.gradient);
        EXPECT_EQ(g.hessian, p.hessian);
    }
}

TEST(GlueStage, TransitionMatchesFiniteDifferenceJet) {
    std::mt19937_64 rng(11);
    for (auto profile : {CutoffProfile::linear, CutoffProfile::log_radial}) {
        const Cutoff c{0.25, profile};
        for (int k : {3, 10, 25}) {
            for (double eps : {0.5, 0.01, 1e-5}) {
                const GlueStage st = GlueStage::standard(k, eps);
                const double r = eps * (c.plateau + 1.0) / 2.0;
                const Vec x = oracle::random_point(3, 1.0, rng).normalized() * r;
                const Jet2 a = glue_jet(st, c, x, 1.0);
                const Jet2 f = fd_jet([&](const Vec& y) { return glue_value(st, c, y.norm(), 1.0); }, x, 1e-5 * eps);
                EXPECT_LT(hessian_rel_error(f.hessian, a.hessian), 1e-5) << "k=" << k << " eps=" << eps;
                EXPECT_LT((f.gradient - a.gradient).norm(), 1e-6 * a.gradient.norm());
                EXPECT_EQ(a.value, glue_value(st, c, x.norm(), 1.0));
            }
        }
    }
}

TEST(GlueStage, LiesBetweenTheTwoSpheres) {
    const Cutoff c;
    const GlueStage st = GlueStage::standard(7, 0.4);
    for (int i = 0; i <= 200; ++i) {
        const double r = i / 200.0;
        const double g = glue_value(st, c, r, 1.0);
        EXPECT_LE(g, psi_value(7, r));
        EXPECT_GE(g, psi_value(8, r));
    }
}

TEST(FdJet, AffineMapIsExact) {
    Vec a(3);
    a << 0.3, -1.2, 2.5;
    // exact for any step; a wide one keeps cancellation out of the Hessian
    const Jet2 j = fd_jet([&](const Vec& y) { return 4.0 + a.dot(y); }, e1(3, 0.2), 1e-2);
    EXPECT_LT((j.gradient - a).norm(), 1e-10);
    EXPECT_LT(j.hessian.norm(), 1e-8 * 4.0);
}

TEST(FdJet, QuadraticFormHessian) {
    Mat A(3, 3);
    A << 1, 2, 0, -1, 3, 0.5, 0, 0.25, -2;
    const Jet2 j = fd_jet([&](const Vec& y) { return y.dot(A * y); }, e1(3, 0.3), 1e-3);
    EXPECT_LT((j.hessian - (A + A.transpose())).norm(), 1e-8);
}

TEST(FdJet, SphereGraphAgreement) {
    const Vec x = e1(2, 0.3);
    const Jet2 f = fd_jet([](const Vec& y) { return psi_value(2, y.norm()); }, x, 1e-4);
    const Jet2 a = psi_jet({2, 1.0}, x);
    EXPECT_LT(hessian_rel_error(f.hessian, a.hessian), 1e-6);
    EXPECT_LT((f.gradient - a.gradient).norm() / a.gradient.norm(), 1e-6);
}

TEST(FdJet, RejectsNonPositiveStep) {
    EXPECT_THROW(fd_jet([](const Vec& y) { return y.sum(); }, e1(2, 0.1), 0.0), std::invalid_argument);
}

TEST(GraphStack, BaseLevelIsBaseSphere) {
    const GraphStack s = sample_stack();
    std::mt19937_64 rng(3);
    for (int i = 0; i < 100; ++i) {
        const Vec x = oracle::random_point(3, 1.0, rng);
        const Jet2 f = stack_jet(s, s.base_k, x);
        const Jet2 p = psi_jet({s.base_k, 1.0}, x);
        EXPECT_EQ(f.value, p.value);
        EXPECT_EQ(f.hessian, p.hessian);
    }
}

TEST(GraphStack, OutsideFirstRadiusEveryLevelAgrees) {
    const GraphStack s = sample_stack();
    for (double r : {0.5, 0.6, 0.99}) {
        const Jet2 p = psi_jet({s.base_k, 1.0}, e1(3, r));
        for (int j = s.base_k; j <= s.base_k + s.depth(); ++j) {
            const Jet2 f = stack_jet(s, j, e1(3, r));
            EXPECT_EQ(f.value, p.value);
            EXPECT_EQ(f.gradient, p.gradient);
            EXPECT_EQ(f.hessian, p.hessian);
        }
    }
}

TEST(GraphStack, LevelsDecreasePointwise) {
    const GraphStack s = sample_stack();
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 1000; ++i) {
        // log-uniform radii reach every stage
        const double r = std::pow(10.0, -7.0 * u(rng));
        for (int j = s.base_k; j < s.base_k + s.depth(); ++j) {
            EXPECT_LE(stack_value(s, j + 1, r), stack_value(s, j, r)) << "r=" << r << " j=" << j;
        }
    }
}

TEST(GraphStack, RadialSymmetryUnderRotations) {
    const GraphStack s = sample_stack();
    std::mt19937_64 rng(23);
    for (int i = 0; i < 200; ++i) {
        const Mat R = oracle::random_rotation(3, rng);
        const Vec x = oracle::random_point(3, std::pow(8.0, -(i % 6)) * 0.5, rng);
        const int j = s.base_k + s.depth();
        const Jet2 a = stack_jet(s, j, x);
        const Jet2 b = stack_jet(s, j, R * x);
        EXPECT_NEAR(a.value, b.value, 1e-12);
        EXPECT_LT((R * a.gradient - b.gradient).norm(), 1e-12);
        EXPECT_LT((R * a.hessian * R.transpose() - b.hessian).norm(), 1e-10);
    }
}

TEST(GraphStack, JetContinuousAcrossStageBoundaries) {
    const GraphStack s = sample_stack();
    const int top = s.depth();
    for (const auto& st : s.stages) {
        for (double edge : {st.epsilon, st.epsilon * s.cutoff.plateau}) {
            const Jet2 in = stack_jet_at_level(s, top, e1(3, edge * (1 - 1e-9)));
            const Jet2 out = stack_jet_at_level(s, top, e1(3, edge * (1 + 1e-9)));
            EXPECT_LT(std::abs(in.value - out.value), 1e-8 * std::abs(out.value));
            EXPECT_LT(hessian_rel_error(in.hessian, out.hessian), 1e-6);
        }
    }
}

TEST(GraphStack, ValidateRejectsBrokenChains) {
    GraphStack s = sample_stack(10, 3);
    EXPECT_NO_THROW(s.validate());
    GraphStack skip = s;
    skip.stages[1].k = 12;
    EXPECT_THROW(skip.validate(), InvariantViolation);
    GraphStack wide = s;
    wide.stages[1].epsilon = 0.3;
    EXPECT_THROW(wide.validate(), InvariantViolation);
    EXPECT_THROW(stack_jet(s, 9, e1(3, 0.1)), std::out_of_range);
    EXPECT_THROW(stack_jet(s, 14, e1(3, 0.1)), std::out_of_range);
}

TEST(GraphStack, JsonRoundTripIsExact) {
    GraphStack s = sample_stack(10, 4);
    s.stages[3].target = 12;
    const std::string text = dump17(to_json(s));
    const GraphStack back = graph_stack_from_json(parse_json(text, "stack"));
    ASSERT_EQ(back.depth(), s.depth());
    for (int i = 0; i < s.depth(); ++i) {
        EXPECT_EQ(back.stages[i].k, s.stages[i].k);
        EXPECT_EQ(back.stages[i].epsilon, s.stages[i].epsilon);
        EXPECT_EQ(back.stages[i].target, s.stages[i].target);
    }
    EXPECT_EQ(dump17(to_json(back)), text);
}
