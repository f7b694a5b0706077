#include "plap/error.hpp"
#include "plap/mesh.hpp"
#include "plap/pcore.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

namespace plap {
namespace {

constexpr double kPi = std::numbers::pi;

NodalField random_smooth(const Mesh& mesh, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> coef(-1.0, 1.0);
    double a[4][3];
    for (auto& row : a) for (double& c : row) c = coef(rng);
    return sample_field(mesh, [&](const Point& pt) {
        double v = 0.0;
        for (int k = 0; k < 4; ++k) {
            const double sy = mesh.dimension() == 2 ? std::sin((k % 2 + 1) * kPi * pt.y) : 1.0;
            v += a[k][0] * std::sin((k + 1) * kPi * pt.x) * sy;
        }
        return v;
    }, true);
}

TEST(PhiP, Examples) {
    EXPECT_EQ(phi_p(0.0, 1.5), 0.0);
    for (double s : {-3.0, -0.2, 0.0, 0.7, 11.0}) EXPECT_EQ(phi_p(s, 2.0), s);
    EXPECT_DOUBLE_EQ(phi_p(-2.0, 3.0), -4.0);
}

TEST(PhiP, OddAndPairsToPower) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> s_dist(-5.0, 5.0), p_dist(1.05, 6.0);
    for (int i = 0; i < 500; ++i) {
        const double s = s_dist(rng), p = p_dist(rng);
        EXPECT_DOUBLE_EQ(phi_p(-s, p), -phi_p(s, p));
        EXPECT_NEAR(phi_p(s, p) * s, std::pow(std::abs(s), p), 1e-12 * std::pow(std::abs(s), p));
    }
}

TEST(Energy, Examples) {
    const Mesh mesh = build_interval_mesh(0.0, 1.0, 2);
    EXPECT_EQ(p_dirichlet_energy(mesh, NodalField::zeros(mesh), 2.0), 0.0);
    // x(1-x) interpolated: slopes ±0.5 on two cells of width 0.5
    const NodalField bump(mesh, {0.0, 0.25, 0.0}, true);
    EXPECT_DOUBLE_EQ(p_dirichlet_energy(mesh, bump, 2.0), 0.25);
    const NodalField hat(mesh, {0.0, 1.0, 0.0}, true);
    EXPECT_DOUBLE_EQ(p_dirichlet_energy(mesh, hat, 3.0), 8.0);
}

TEST(Energy, RejectsBadExponent) {
    const Mesh mesh = build_interval_mesh(0.0, 1.0, 4);
    EXPECT_THROW(p_dirichlet_energy(mesh, NodalField::zeros(mesh), 1.0), PreconditionError);
}

TEST(Moment, Examples) {
    const Mesh mesh = build_interval_mesh(0.0, 1.0, 10);
    const NodalField one = sample_field(mesh, [](const Point&) { return 1.0; });
    const NodalField minus = sample_field(mesh, [](const Point&) { return -1.0; });
    EXPECT_EQ(weighted_p_moment(mesh, one, NodalField::zeros(mesh), 2.5), 0.0);
    for (double p : {1.5, 2.0, 3.7}) {
        EXPECT_NEAR(weighted_p_moment(mesh, one, one, p), 1.0, 1e-14);
        EXPECT_NEAR(weighted_p_moment(mesh, minus, one, p), -1.0, 1e-14);
    }
}

TEST(Homogeneity, EnergyAndMoment) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> c_dist(-4.0, 4.0);
    const Mesh line = build_interval_mesh(0.0, 1.0, 64);
    const Mesh rect = build_rectangle_mesh(1.0, 2.0, 8, 12);
    for (const Mesh* mesh : {&line, &rect}) {
        const NodalField m = sample_field(*mesh, [](const Point& pt) { return std::cos(5.0 * pt.x) + pt.y; });
        for (double p : {1.5, 2.0, 3.0, 4.0}) {
            const NodalField u = random_smooth(*mesh, rng);
            const double c = c_dist(rng);
            const double e = p_dirichlet_energy(*mesh, u, p);
            const double mo = weighted_p_moment(*mesh, m, u, p);
            const double factor = std::pow(std::abs(c), p);
            EXPECT_NEAR(p_dirichlet_energy(*mesh, u.scaled(c), p), factor * e, 1e-12 * factor * e);
            EXPECT_NEAR(weighted_p_moment(*mesh, m, u.scaled(c), p), factor * mo, 1e-12 * factor * std::abs(mo) + 1e-300);
        }
    }
}

TEST(Residual, ZeroField) {
    const Mesh mesh = build_interval_mesh(0.0, 1.0, 16);
    const Vector r = p_laplacian_residual(mesh, NodalField::zeros(mesh), 3.0, NodalField::zeros(mesh));
    EXPECT_EQ(r.size(), 15);
    EXPECT_EQ(r.norm(), 0.0);
}

TEST(Residual, QuadraticSolvesConstantLoad) {
    for (int n : {8, 32, 128}) {
        const Mesh mesh = build_interval_mesh(0.0, 1.0, n);
        const NodalField u = sample_field(mesh, [](const Point& pt) { return pt.x * (1.0 - pt.x) / 2.0; }, true);
        const NodalField one = sample_field(mesh, [](const Point&) { return 1.0; });
        EXPECT_LE(p_laplacian_residual(mesh, u, 2.0, one).norm(), 1e-10);
    }
}

TEST(Residual, Homogeneity) {
    std::mt19937_64 rng(3);
    const Mesh mesh = build_interval_mesh(0.0, 1.0, 40);
    const NodalField zero = NodalField::zeros(mesh, false);
    for (double p : {1.5, 2.0, 3.0}) {
        const NodalField u = random_smooth(mesh, rng);
        const double c = 2.7;
        const Vector r1 = p_laplacian_residual(mesh, u.scaled(c), p, zero);
        const Vector r0 = p_laplacian_residual(mesh, u, p, zero);
        EXPECT_LE((r1 - std::pow(c, p - 1.0) * r0).norm(), 1e-12 * r1.norm());
    }
}

TEST(Residual, LinearForPEqualsTwo) {
    std::mt19937_64 rng(5);
    const Mesh mesh = build_rectangle_mesh(1.0, 1.0, 7, 9);
    const NodalField h = sample_field(mesh, [](const Point& pt) { return 1.0 + pt.x * pt.y; });
    const NodalField u = random_smooth(mesh, rng), v = random_smooth(mesh, rng);
    std::vector<double> sum(mesh.node_count());
    for (std::size_t i = 0; i < sum.size(); ++i) sum[i] = u[i] + v[i];
    const Vector lhs = p_laplacian_residual(mesh, NodalField(mesh, sum, true), 2.0, h);
    const Vector rhs = p_laplacian_residual(mesh, u, 2.0, h) + p_laplacian_residual(mesh, v, 2.0, h) +
                       load_vector(mesh, h);
    EXPECT_LE((lhs - rhs).norm(), 1e-12 * (1.0 + rhs.norm()));
}

TEST(Residual, RequiresDirichletFlag) {
    const Mesh mesh = build_interval_mesh(0.0, 1.0, 4);
    const NodalField free = NodalField::zeros(mesh, false);
    EXPECT_THROW(p_laplacian_residual(mesh, free, 2.0, free), PreconditionError);
}

TEST(Jacobian, LinearCaseIsStiffness) {
    std::mt19937_64 rng(9);
    const Mesh mesh = build_interval_mesh(0.0, 1.0, 6);
    const NodalField u = random_smooth(mesh, rng);
    const SparseMatrix J = regularized_jacobian(mesh, u, 2.0, {0.3});
    const double h = 1.0 / 6.0;
    Eigen::MatrixXd dense(J);
    for (int i = 0; i < 5; ++i) {
        EXPECT_NEAR(dense(i, i), 2.0 / h, 1e-12);
        if (i + 1 < 5) EXPECT_NEAR(dense(i, i + 1), -1.0 / h, 1e-12);
    }
    const SparseMatrix J2 = regularized_jacobian(mesh, u, 2.0, {0.0});
    EXPECT_EQ((Eigen::MatrixXd(J) - Eigen::MatrixXd(J2)).norm(), 0.0);
}

TEST(Jacobian, Symmetric) {
    std::mt19937_64 rng(13);
    const Mesh mesh = build_rectangle_mesh(1.0, 1.0, 6, 6);
    for (double p : {1.5, 3.0}) {
        const Eigen::MatrixXd J(regularized_jacobian(mesh, random_smooth(mesh, rng), p, {1e-8}));
        EXPECT_LE((J - J.transpose()).norm(), 1e-14 * J.norm());
    }
}

TEST(Jacobian, SingularWithoutRegularization) {
    const Mesh mesh = build_interval_mesh(0.0, 1.0, 4);
    EXPECT_THROW(regularized_jacobian(mesh, NodalField::zeros(mesh), 1.5, {0.0}), SingularityError);
    EXPECT_NO_THROW(regularized_jacobian(mesh, NodalField::zeros(mesh), 1.5, {1e-8}));
}

NodalField shifted_field(const Mesh& mesh, const NodalField& u, const NodalField& w, double t) {
    std::vector<double> s(mesh.node_count());
    for (std::size_t i = 0; i < s.size(); ++i) s[i] = u[i] + t * w[i];
    return NodalField(mesh, s, true);
}

Vector jacobian_times(const Mesh& mesh, const NodalField& u, const NodalField& w, double p) {
    const auto wi = w.interior_values(mesh);
    return regularized_jacobian(mesh, u, p, {1e-8}) *
           Eigen::Map<const Vector>(wi.data(), static_cast<Eigen::Index>(wi.size()));
}

TEST(Jacobian, ForwardDifferenceAtPEqualsThree) {
    std::mt19937_64 rng(17);
    const Mesh mesh = build_interval_mesh(0.0, 1.0, 50);
    const NodalField zero = NodalField::zeros(mesh, false);
    for (int trial = 0; trial < 5; ++trial) {
        const NodalField u = random_smooth(mesh, rng);
        const NodalField w = random_smooth(mesh, rng);
        const double t = 1e-6;
        const Vector fd = (p_laplacian_residual(mesh, shifted_field(mesh, u, w, t), 3.0, zero) -
                           p_laplacian_residual(mesh, u, 3.0, zero)) / t;
        const Vector jw = jacobian_times(mesh, u, w, 3.0);
        EXPECT_LE((fd - jw).norm(), 1e-4 * jw.norm());
    }
}

// Central differences: for p < 2 the second derivative of the flux grows like
// |grad u|^(p-3) on elements where the gradient nearly vanishes, so one-sided
// differences at t = 1e-6 carry O(t) truncation error there.
TEST(Jacobian, MatchesFiniteDifferences) {
    std::mt19937_64 rng(17);
    const Mesh line = build_interval_mesh(0.0, 1.0, 50);
    const Mesh rect = build_rectangle_mesh(1.0, 1.0, 10, 10);
    for (const Mesh* mesh : {&line, &rect}) {
        const NodalField zero = NodalField::zeros(*mesh, false);
        for (double p : {1.5, 2.0, 3.0, 4.0}) {
            for (int trial = 0; trial < 3; ++trial) {
                const NodalField u = random_smooth(*mesh, rng);
                const NodalField w = random_smooth(*mesh, rng);
                const double t = 1e-6;
                const Vector fd = (p_laplacian_residual(*mesh, shifted_field(*mesh, u, w, t), p, zero) -
                                   p_laplacian_residual(*mesh, shifted_field(*mesh, u, w, -t), p, zero)) / (2 * t);
                const Vector jw = jacobian_times(*mesh, u, w, p);
                EXPECT_LE((fd - jw).norm(), 1e-4 * jw.norm()) << "p = " << p << " dim " << mesh->dimension();
            }
        }
    }
}

}  // namespace
}  // namespace plap
