#include "plap/eigensolver.hpp"
#include <cstdio>
#include <cstdlib>

#include "plap/pcore.hpp"

#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

namespace plap {

namespace {

constexpr double kSignThreshold = 1e-14;

NodalField field_from(const Mesh& mesh, const Vector& x) {
    return NodalField::from_interior(mesh, std::span<const double>(x.data(), static_cast<std::size_t>(x.size())));
}

/// Σ_i w_i max(±m_i, 0) |u_i|^p.
double signed_part_moment(const Mesh& mesh, const NodalField& m, const NodalField& u, double p, double sign) {
    const auto& w = mesh.lumped_weights();
    double s = 0.0;
    for (std::size_t i = 0; i < mesh.node_count(); ++i) {
        const double part = std::max(sign * m[i], 0.0);
        if (part > 0.0 && u[i] != 0.0) s += w[i] * part * std::pow(std::abs(u[i]), p);
    }
    return s;
}

/// First Dirichlet eigenvector of the P1 Laplacian with lumped mass, by
/// linear inverse iteration.
Vector laplacian_ground_state(const Mesh& mesh) {
    const SparseMatrix K = regularized_jacobian(mesh, NodalField::zeros(mesh), 2.0, {0.0});
    Eigen::SimplicialLDLT<SparseMatrix> ldlt(K);
    const auto& in = mesh.interior_nodes();
    Vector w(static_cast<Eigen::Index>(in.size()));
    for (std::size_t k = 0; k < in.size(); ++k) {
        w[static_cast<Eigen::Index>(k)] = mesh.lumped_weights()[static_cast<std::size_t>(in[k])];
    }
    Vector v = Vector::Ones(w.size());
    double previous = 0.0;
    for (int it = 0; it < 1000; ++it) {
        v = ldlt.solve(w.cwiseProduct(v));
        v /= std::sqrt(v.dot(w.cwiseProduct(v)));
        const double rq = v.dot(K * v);
        if (std::abs(rq - previous) <= 1e-15 * rq) break;
        previous = rq;
    }
    return v;
}

/// Newton refinement of the bordered system
///   A(u) − λ W m φ_p(u) = 0,  Σ w_i m_i |u_i|^p = 1.
void polish_eigenpair(const Mesh& mesh, const NodalField& m, double p, Regularization reg,
                      NodalField& u, double& lambda) {
    const auto& in = mesh.interior_nodes();
    const auto& w = mesh.lumped_weights();
    const auto n = static_cast<Eigen::Index>(in.size());

    auto evaluate = [&](const NodalField& uf, double lam, Vector& F, double& G, Vector& wmphi) {
        wmphi.resize(n);
        G = -1.0;
        for (Eigen::Index k = 0; k < n; ++k) {
            const auto i = static_cast<std::size_t>(in[static_cast<std::size_t>(k)]);
            wmphi[k] = w[i] * m[i] * phi_p(uf[i], p);
            G += wmphi[k] * uf[i];
        }
        F = p_laplacian_operator(mesh, uf, p) - lam * wmphi;
        return F.norm() + std::abs(G) * std::max(1.0, std::abs(lam));
    };

    Vector F, wmphi;
    double G = 0.0;
    double merit = evaluate(u, lambda, F, G, wmphi);
    for (int it = 0; it < 20; ++it) {
        if (merit <= 1e-14 * (1.0 + std::abs(lambda) * wmphi.norm())) break;
        SparseMatrix J = regularized_jacobian(mesh, u, p, reg);
        std::vector<Eigen::Triplet<double>> trip;
        trip.reserve(static_cast<std::size_t>(J.nonZeros() + 3 * n));
        for (int col = 0; col < J.outerSize(); ++col) {
            for (SparseMatrix::InnerIterator itj(J, col); itj; ++itj) {
                trip.emplace_back(static_cast<int>(itj.row()), static_cast<int>(itj.col()), itj.value());
            }
        }
        for (Eigen::Index k = 0; k < n; ++k) {
            const auto i = static_cast<std::size_t>(in[static_cast<std::size_t>(k)]);
            const int kk = static_cast<int>(k);
            trip.emplace_back(kk, kk, -lambda * w[i] * m[i] * phi_p_derivative(u[i], p, reg.epsilon));
            trip.emplace_back(kk, static_cast<int>(n), -wmphi[k]);
            trip.emplace_back(static_cast<int>(n), kk, p * wmphi[k]);
        }
        SparseMatrix B(n + 1, n + 1);
        B.setFromTriplets(trip.begin(), trip.end());
        Vector rhs(n + 1);
        rhs.head(n) = -F;
        rhs[n] = -G;
        Eigen::SparseLU<SparseMatrix> lu;
        lu.compute(B);
        if (lu.info() != Eigen::Success) return;
        const Vector d = lu.solve(rhs);
        if (!d.allFinite()) return;

        const std::vector<double> x0 = u.interior_values(mesh);
        bool improved = false;
        for (double t = 1.0; t >= 1.0 / 1024; t *= 0.5) {
            std::vector<double> x1 = x0;
            for (Eigen::Index k = 0; k < n; ++k) x1[static_cast<std::size_t>(k)] += t * d[k];
            NodalField trial = NodalField::from_interior(mesh, x1);
            const double lam_trial = lambda + t * d[n];
            Vector Ft, wt;
            double Gt = 0.0;
            const double mt = evaluate(trial, lam_trial, Ft, Gt, wt);
            if (std::isfinite(mt) && mt < merit) {
                u = std::move(trial);
                lambda = lam_trial;
                F = std::move(Ft);
                G = Gt;
                wmphi = std::move(wt);
                merit = mt;
                improved = true;
                break;
            }
        }
        if (!improved) return;
    }
}

}  // namespace

WeightRegime classify_weight(const Mesh& mesh, const NodalField& m) {
    const auto v = m.interior_values(mesh);
    const bool pos = std::any_of(v.begin(), v.end(), [](double x) { return x > kSignThreshold; });
    const bool neg = std::any_of(v.begin(), v.end(), [](double x) { return x < -kSignThreshold; });
    if (pos && neg) return WeightRegime::SignChanging;
    if (pos) return WeightRegime::NonNegative;
    if (neg) return WeightRegime::NonPositive;
    return WeightRegime::Zero;
}

double rayleigh_quotient(const Mesh& mesh, const NodalField& m, const NodalField& u, double p) {
    const double moment = weighted_p_moment(mesh, m, u, p);
    if (moment == 0.0) throw UndefinedQuotientError("Rayleigh quotient undefined: weighted p-moment is zero");
    return p_dirichlet_energy(mesh, u, p) / moment;
}

double eigen_residual(const Mesh& mesh, const NodalField& m, double p, double lambda, const NodalField& u) {
    std::vector<double> rhs(mesh.node_count());
    for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] = lambda * m[i] * phi_p(u[i], p);
    return p_laplacian_residual(mesh, u, p, NodalField(mesh, std::move(rhs))).norm();
}

EigenPair principal_eigenpair_positive(const Mesh& mesh, const NodalField& m, double p,
                                       const EigenConfig& cfg) {
    require_exponent(p);
    require_same_mesh(mesh, m, "principal_eigenpair_positive");
    if (!(cfg.tolerance > 0.0)) throw PreconditionError("eigen tolerance must be positive");
    const WeightRegime regime = classify_weight(mesh, m);
    if (regime != WeightRegime::SignChanging && regime != WeightRegime::NonNegative) {
        throw InfeasibleConstraintError(
            "no interior node with positive weight: the constraint ∫ m|u|^p = 1 is empty");
    }

    SolverConfig inner = cfg.newton;
    if (cfg.inner_solver) inner.regularization = cfg.inner_solver;
    const Regularization reg = inner.regularization_for(mesh);

    // Initial guess: perturbed Laplacian ground state, or for p != 2 the linear
    // eigenfunction of the same weight, which already has the right decay where
    // the weight is negative.
    Vector x;
    if (p == 2.0 || regime != WeightRegime::SignChanging) {
        x = laplacian_ground_state(mesh);
    } else {
        const auto v = principal_eigenpair_positive(mesh, m, 2.0, cfg).u.interior_values(mesh);
        x = Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
    }
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> noise(-1.0, 1.0);
    for (Eigen::Index k = 0; k < x.size(); ++k) x[k] *= 1.0 + 1e-3 * noise(rng);
    NodalField u = field_from(mesh, x);
    u = u.scaled(1.0 / std::pow(signed_part_moment(mesh, m, u, p, 1.0), 1.0 / p));
    double lambda = p_dirichlet_energy(mesh, u, p);

    // Normalized inverse iteration. The negative part of the weight stays on the
    // left so each inner problem is coercive and has a positive solution:
    //   −Δ_p w + λ_k m⁻ φ_p(w) = λ_k m⁺ φ_p(u_k).
    SemilinearProblem problem;
    problem.p = p;
    problem.coefficient.assign(mesh.node_count(), 0.0);
    problem.load.assign(mesh.node_count(), 0.0);
    problem.reaction = [p](double s) { return phi_p(s, p); };
    problem.reaction_derivative = [p, eps = reg.epsilon](double s) { return phi_p_derivative(s, p, eps); };

    double damping = 1.0;
    double best_change = std::numeric_limits<double>::infinity();
    int stalled = 0;
    int iterations = 0;
    bool converged = false;
    for (int it = 1; it <= cfg.max_iterations; ++it) {
        iterations = it;
        for (std::size_t i = 0; i < mesh.node_count(); ++i) {
            problem.coefficient[i] = -lambda * std::max(-m[i], 0.0);
            problem.load[i] = lambda * std::max(m[i], 0.0) * phi_p(u[i], p);
        }
        SolveReport rep = newton_solve(mesh, problem, u, inner);
        if (!rep.converged) {
            throw EigenConvergenceError("inner Newton solve failed at outer iteration " + std::to_string(it),
                                        EigenPair{lambda, u, Normalization::Weighted,
                                                  SignClass::PositiveWeightSide, it, 0.0});
        }
        NodalField w = rep.u;
        w = w.scaled(1.0 / std::pow(signed_part_moment(mesh, m, w, p, 1.0), 1.0 / p));
        double next = p_dirichlet_energy(mesh, w, p) + lambda * signed_part_moment(mesh, m, w, p, -1.0);

        if (damping < 1.0) {
            const auto ui = u.interior_values(mesh);
            auto wi = w.interior_values(mesh);
            for (std::size_t k = 0; k < wi.size(); ++k) wi[k] = ui[k] + damping * (wi[k] - ui[k]);
            w = NodalField::from_interior(mesh, wi);
            w = w.scaled(1.0 / std::pow(signed_part_moment(mesh, m, w, p, 1.0), 1.0 / p));
            next = lambda + damping * (next - lambda);
        }

        const double change = std::abs(next - lambda);
        u = std::move(w);
        lambda = next;
        if (change <= cfg.tolerance * std::abs(lambda)) {
            converged = true;
            break;
        }
        if (change < best_change) {
            best_change = change;
            stalled = 0;
        } else if (++stalled >= 10) {
            damping *= 0.5;
            stalled = 0;
            best_change = change;
        }
    }

    const double moment = weighted_p_moment(mesh, m, u, p);
    if (!converged || !(moment > 0.0)) {
        throw EigenConvergenceError("inverse iteration did not converge within " +
                                        std::to_string(cfg.max_iterations) + " iterations",
                                    EigenPair{lambda, u, Normalization::Weighted,
                                              SignClass::PositiveWeightSide, iterations, 0.0});
    }
    u = u.scaled(1.0 / std::pow(moment, 1.0 / p));
    lambda = p_dirichlet_energy(mesh, u, p);
    if (cfg.polish) polish_eigenpair(mesh, m, p, reg, u, lambda);

    // canonical sign: positive integral
    double integral = 0.0;
    for (std::size_t i = 0; i < mesh.node_count(); ++i) integral += mesh.lumped_weights()[i] * u[i];
    if (integral < 0.0) u = u.negated();

    const double residual = eigen_residual(mesh, m, p, lambda, u);
    return EigenPair{lambda, std::move(u), Normalization::Weighted, SignClass::PositiveWeightSide,
                     iterations, residual};
}

EigenPair principal_eigenpair_negative(const Mesh& mesh, const NodalField& m, double p,
                                       const EigenConfig& cfg) {
    require_same_mesh(mesh, m, "principal_eigenpair_negative");
    const WeightRegime regime = classify_weight(mesh, m);
    if (regime != WeightRegime::SignChanging && regime != WeightRegime::NonPositive) {
        throw InfeasibleConstraintError(
            "no interior node with negative weight: the constraint ∫ (−m)|u|^p = 1 is empty");
    }
    EigenPair pair = principal_eigenpair_positive(mesh, m.negated(), p, cfg);
    pair.lambda = -pair.lambda;
    pair.sign_class = SignClass::NegativeWeightSide;
    return pair;
}

EigenPair to_unit_norm(const Mesh& mesh, EigenPair pair, double p) {
    const double norm = std::pow(p_dirichlet_energy(mesh, pair.u, p), 1.0 / p);
    if (!(norm > 0.0)) throw PreconditionError("cannot normalize a zero eigenfunction");
    pair.u = pair.u.scaled(1.0 / norm);
    pair.normalization = Normalization::UnitNorm;
    return pair;
}

}  // namespace plap
