#include "plap/bifurcate.hpp"
#include "plap/error.hpp"
#include "plap/pcore.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

namespace plap {
namespace {

constexpr double kPi2 = std::numbers::pi * std::numbers::pi;

NodalField constant(const Mesh& mesh, double c) {
    return sample_field(mesh, [c](const Point&) { return c; });
}

TEST(GPart, Examples) {
    const Nonlinearity f = Nonlinearity::saturating(2.0, 1.0, 3.0);
    EXPECT_EQ(g_part(f, 0.0), 0.0);
    EXPECT_DOUBLE_EQ(g_part(f, 1.0) / phi_p(1.0, 2.0), 1.5);
    const Nonlinearity pure = Nonlinearity::saturating(2.5, 1.0, 0.0);
    for (double s : {-3.0, -0.1, 0.0, 0.4, 7.0}) EXPECT_EQ(g_part(pure, s), 0.0);
}

TEST(GPart, Limits) {
    for (double p : {1.5, 2.0, 3.0}) {
        const Nonlinearity f = Nonlinearity::saturating(p, 8.0, 4.0);
        for (double sgn : {1.0, -1.0}) {
            EXPECT_NEAR(f.g(sgn * 1e-6) / phi_p(sgn * 1e-6, p), 0.0, 1e-3);
            EXPECT_NEAR(f.g(sgn * 1e6) / phi_p(sgn * 1e6, p), f.finf() - f.f0(), 1e-3);
        }
    }
}

TEST(NonlinearityHypotheses, BoundAndF2) {
    const Nonlinearity f = Nonlinearity::saturating(2.0, 8.0, 4.0);
    EXPECT_NEAR(f.bound(), 12.0, 1e-6);
    EXPECT_TRUE(eigenvalue_separates_limits(f, kPi2));
    EXPECT_FALSE(eigenvalue_separates_limits(f, 13.0));
    EXPECT_FALSE(eigenvalue_separates_limits(Nonlinearity::saturating(2.0, 1.0, 0.0), kPi2));
    EXPECT_TRUE(eigenvalue_separates_limits(Nonlinearity::saturating(2.0, 12.0, -4.0), kPi2));
    EXPECT_THROW(Nonlinearity([](double s) { return std::abs(s); }, [](double) { return 0.0; }, 2.0, 0.0, 0.0),
                 HypothesisError);
}

TEST(NonlinearityHypotheses, Scaling) {
    const Nonlinearity f = Nonlinearity::saturating(3.0, 1.0, 3.0).scaled(2.0);
    EXPECT_EQ(f.f0(), 2.0);
    EXPECT_EQ(f.finf(), 8.0);
    EXPECT_DOUBLE_EQ(f(1.0), 2.0 * (1.0 + 1.5));
}

class TestBranch : public ::testing::Test {
protected:
    Mesh mesh = build_interval_mesh(0.0, 1.0, 128);
    NodalField m = constant(mesh, 1.0);
};

TEST_F(TestBranch, PureEigenproblemIsVertical) {
    const Nonlinearity f = Nonlinearity::saturating(2.0, 1.0, 0.0);
    ContinuationConfig cfg;
    cfg.max_norm = 50.0;
    const Branch b = continue_branch(mesh, m, 2.0, f, Sigma::Plus, cfg);
    ASSERT_GT(b.points.size(), 3u);
    EXPECT_EQ(b.terminated_reason, Termination::MaxNorm);
    for (const BranchPoint& pt : b.points) EXPECT_NEAR(pt.lambda, b.bifurcation_lambda, 1e-8);
    const auto at_lambda1 = branch_crossings(mesh, m, f, b, b.bifurcation_lambda, {});
    ASSERT_EQ(at_lambda1.size(), 1u);
    EXPECT_NEAR(std::pow(p_dirichlet_energy(mesh, at_lambda1.front().u, 2.0), 0.5), b.points.back().norm, 1e-9);
    EXPECT_TRUE(branch_crossings(mesh, m, f, b, 3.0, {}).empty());
    const LambdaBound lb = branch_lambda_bound(b, f, b.bifurcation_lambda);
    EXPECT_EQ(lb.lambda_star, 0.0);
    EXPECT_DOUBLE_EQ(lb.bound_C, 2.0 * b.bifurcation_lambda);
    EXPECT_TRUE(lb.satisfied);
}

TEST_F(TestBranch, SaturatingBranchApproachesAsymptote) {
    const Nonlinearity f = Nonlinearity::saturating(2.0, 1.0, 3.0);
    const Branch b = continue_branch(mesh, m, 2.0, f, Sigma::Plus, {});
    ASSERT_EQ(b.terminated_reason, Termination::MaxNorm);
    EXPECT_NEAR(extrapolated_origin(b), b.bifurcation_lambda, 1e-2 * b.bifurcation_lambda);
    const double asymptote = b.bifurcation_lambda + f.f0() - f.finf();
    EXPECT_NEAR(b.points.back().lambda, asymptote, 0.15 * 3.0);
    for (std::size_t i = 1; i < b.points.size(); ++i) {
        EXPECT_GT(b.points[i].arclength, b.points[i - 1].arclength);
        EXPECT_EQ(b.points[i].verdict, Verdict::Positive);
    }
    const LambdaBound lb = branch_lambda_bound(b, f, b.bifurcation_lambda);
    EXPECT_EQ(lb.lambda_star, 0.0);
    EXPECT_TRUE(lb.satisfied);
    double max_abs = 0.0;
    for (const BranchPoint& pt : b.points) max_abs = std::max(max_abs, std::abs(pt.lambda));
    EXPECT_LE(max_abs, 2.0 * b.bifurcation_lambda);
    // λ₁ + f₀ − f∞ ≈ 6.87 > f₀ = 1: no crossing of {f₀}
    EXPECT_TRUE(branch_crossings(mesh, m, f, b, f.f0(), {}).empty());
}

TEST_F(TestBranch, OddNonlinearityGivesMirroredBranches) {
    const Nonlinearity f = Nonlinearity::saturating(2.0, 8.0, 4.0);
    ContinuationConfig cfg;
    cfg.max_norm = 100.0;
    const Branch plus = continue_branch(mesh, m, 2.0, f, Sigma::Plus, cfg);
    const Branch minus = continue_branch(mesh, m, 2.0, f, Sigma::Minus, cfg);
    ASSERT_EQ(plus.points.size(), minus.points.size());
    for (std::size_t k = 0; k < plus.points.size(); ++k) {
        EXPECT_NEAR(plus.points[k].lambda, minus.points[k].lambda, 1e-9);
        EXPECT_EQ(minus.points[k].verdict, Verdict::Negative);
        for (std::size_t i = 0; i < mesh.node_count(); i += 8) {
            EXPECT_NEAR(plus.points[k].u[i], -minus.points[k].u[i], 1e-9 * (1.0 + plus.points[k].norm));
        }
    }
}

TEST_F(TestBranch, CrossingAtF0) {
    const Nonlinearity f = Nonlinearity::saturating(2.0, 8.0, 4.0);
    const Branch b = continue_branch(mesh, m, 2.0, f, Sigma::Plus, {});
    const auto crossings = branch_crossings(mesh, m, f, b, 8.0, {});
    ASSERT_EQ(crossings.size(), 1u);
    EXPECT_LE(crossings.front().residual_norm, 1e-8);
    EXPECT_GT(crossings.front().u.min_interior(mesh), 0.0);
    EXPECT_TRUE(branch_crossings(mesh, m, f, b, 100.0, {}).empty());
}

TEST_F(TestBranch, NonlinearExponent) {
    const double p = 3.0;
    const Nonlinearity f = Nonlinearity::saturating(p, 20.0, 15.0);
    ContinuationConfig cfg;
    cfg.max_norm = 200.0;
    const Branch b = continue_branch(mesh, m, p, f, Sigma::Plus, cfg);
    ASSERT_EQ(b.terminated_reason, Termination::MaxNorm);
    EXPECT_NEAR(extrapolated_origin(b), b.bifurcation_lambda, 1e-2 * b.bifurcation_lambda);
    for (std::size_t i = 1; i < b.points.size(); ++i) EXPECT_EQ(b.points[i].verdict, Verdict::Positive);
    EXPECT_TRUE(branch_lambda_bound(b, f, b.bifurcation_lambda).satisfied);
}

TEST_F(TestBranch, RejectsSignChangingWeightByDefault) {
    const NodalField sc = sample_field(mesh, [](const Point& pt) { return pt.x - 0.3; });
    const Nonlinearity f = Nonlinearity::saturating(2.0, 8.0, 4.0);
    EXPECT_THROW(continue_branch(mesh, sc, 2.0, f, Sigma::Plus, {}), PreconditionError);
}

TEST(AutonomousProblem, InsideEigenvalueIntervalGivesBothSigns) {
    const Mesh mesh = build_interval_mesh(0.0, 1.0, 128);
    const NodalField m = constant(mesh, 1.0);
    const Nonlinearity f = Nonlinearity::saturating(2.0, 1.0, 3.0);
    // λ₁/f∞ ≈ 2.47 < λ < λ₁/f₀ ≈ 9.87
    for (double lambda : {4.0, 8.0}) {
        const SolveReport pos = solve_autonomous_problem(mesh, m, 2.0, f, lambda, SolutionSign::Positive, {});
        const SolveReport neg = solve_autonomous_problem(mesh, m, 2.0, f, lambda, SolutionSign::Negative, {});
        EXPECT_EQ(pos.verdict, Verdict::Positive);
        EXPECT_EQ(neg.verdict, Verdict::Negative);
        std::vector<double> rhs(mesh.node_count());
        for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] = lambda * m[i] * f(pos.u[i]);
        EXPECT_LE(p_laplacian_residual(mesh, pos.u, 2.0, NodalField(mesh, rhs)).norm(), 1e-8);
    }
}

TEST(AutonomousProblem, NoSolutionOutsideInterval) {
    const Mesh mesh = build_interval_mesh(0.0, 1.0, 64);
    const NodalField m = constant(mesh, 1.0);
    const Nonlinearity f = Nonlinearity::saturating(2.0, 1.0, 3.0);
    EXPECT_THROW(solve_autonomous_problem(mesh, m, 2.0, f, 1.0, SolutionSign::Positive, {}), NoSolutionFoundError);
    const Nonlinearity pure = Nonlinearity::saturating(2.0, 1.0, 0.0);
    EXPECT_THROW(solve_autonomous_problem(mesh, m, 2.0, pure, 5.0, SolutionSign::Positive, {}), NoSolutionFoundError);
}

}  // namespace
}  // namespace plap
