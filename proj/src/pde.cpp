#include "plap/pde.hpp"

#include "plap/error.hpp"
#include "plap/maxprin.hpp"

#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>

namespace plap {

namespace {

void require_problem_fits(const Mesh& mesh, const SemilinearProblem& problem) {
    require_exponent(problem.p);
    if (problem.coefficient.size() != mesh.node_count() || problem.load.size() != mesh.node_count()) {
        throw MeshMismatchError("semilinear problem data does not match the mesh");
    }
}

bool all_finite(const Vector& v) { return v.allFinite(); }

/// Solves J x = rhs; returns false if the factorization fails.
bool solve_linear(const SparseMatrix& J, const Vector& rhs, Vector& x) {
    Eigen::SparseLU<SparseMatrix> lu;
    lu.analyzePattern(J);
    lu.factorize(J);
    if (lu.info() != Eigen::Success) return false;
    x = lu.solve(rhs);
    return lu.info() == Eigen::Success && all_finite(x);
}

NodalField with_interior(const Mesh& mesh, const Vector& x) {
    return NodalField::from_interior(mesh, std::span<const double>(x.data(), static_cast<std::size_t>(x.size())));
}

Vector interior_of(const Mesh& mesh, const NodalField& u) {
    const auto v = u.interior_values(mesh);
    return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace

Vector semilinear_residual(const Mesh& mesh, const SemilinearProblem& problem, const NodalField& u) {
    require_problem_fits(mesh, problem);
    Vector r = p_laplacian_operator(mesh, u, problem.p);
    const auto& in = mesh.interior_nodes();
    const auto& w = mesh.lumped_weights();
    for (std::size_t k = 0; k < in.size(); ++k) {
        const auto i = static_cast<std::size_t>(in[k]);
        double source = problem.load[i];
        if (problem.coefficient[i] != 0.0) source += problem.coefficient[i] * problem.reaction(u[i]);
        r[static_cast<Eigen::Index>(k)] -= w[i] * source;
    }
    return r;
}

SparseMatrix semilinear_jacobian(const Mesh& mesh, const SemilinearProblem& problem,
                                 const NodalField& u, Regularization reg) {
    require_problem_fits(mesh, problem);
    SparseMatrix J = regularized_jacobian(mesh, u, problem.p, reg);
    const auto& in = mesh.interior_nodes();
    const auto& w = mesh.lumped_weights();
    for (std::size_t k = 0; k < in.size(); ++k) {
        const auto i = static_cast<std::size_t>(in[k]);
        if (problem.coefficient[i] == 0.0) continue;
        const auto d = static_cast<Eigen::Index>(k);
        J.coeffRef(d, d) -= w[i] * problem.coefficient[i] * problem.reaction_derivative(u[i]);
    }
    return J;
}

SolveReport newton_solve(const Mesh& mesh, const SemilinearProblem& problem, NodalField initial,
                         const SolverConfig& cfg) {
    require_problem_fits(mesh, problem);
    require_same_mesh(mesh, initial, "newton_solve");
    const Regularization reg = cfg.regularization_for(mesh);
    const double load_norm =
        load_vector(mesh, NodalField(mesh, problem.load, false)).norm();
    const double tol = cfg.newton_tolerance * (1.0 + load_norm);

    SolveReport report{NodalField::from_interior(mesh, initial.interior_values(mesh)), false, 0,
                       0.0, {}, 0.0, std::nullopt};
    Vector x = interior_of(mesh, report.u);
    Vector r = semilinear_residual(mesh, problem, report.u);
    double rnorm = r.norm();
    report.residual_norm = rnorm;
    report.newton_path.emplace_back(0, rnorm);
    if (!std::isfinite(rnorm)) return report;

    for (int step = 1; step <= cfg.max_newton_steps; ++step) {
        if (rnorm <= tol) {
            report.converged = true;
            return report;
        }
        Vector dx;
        if (!solve_linear(semilinear_jacobian(mesh, problem, report.u, reg), -r, dx)) return report;

        double t = 1.0;
        bool accepted = false;
        while (t >= cfg.min_step) {
            Vector trial = x + t * dx;
            NodalField ut = with_interior(mesh, trial);
            Vector rt = semilinear_residual(mesh, problem, ut);
            const double tn = rt.norm();
            if (std::isfinite(tn) && tn <= (1.0 - 1e-4 * t) * rnorm) {
                x = std::move(trial);
                report.u = std::move(ut);
                r = std::move(rt);
                rnorm = tn;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        report.iterations = step;
        report.residual_norm = rnorm;
        report.newton_path.emplace_back(step, rnorm);
        if (!accepted) return report;
        if (report.u.max_abs() > cfg.blowup_threshold) return report;
    }
    report.converged = rnorm <= tol;
    return report;
}

namespace {

/// Nodal field of the P1 solution of −Δw = h, rescaled so that the p-Laplacian
/// balances the load along w: c^{p-1} E_p(w) = <b, w>.
NodalField coercive_initial_guess(const Mesh& mesh, double p, const NodalField& h) {
    const SparseMatrix K = regularized_jacobian(mesh, NodalField::zeros(mesh), 2.0, {0.0});
    const Vector b = load_vector(mesh, h);
    Eigen::SimplicialLDLT<SparseMatrix> ldlt(K);
    const Vector w = ldlt.solve(b);
    NodalField u = with_interior(mesh, w);
    if (p == 2.0) return u;
    const double energy = p_dirichlet_energy(mesh, u, p);
    const double work = b.dot(w);
    if (!(energy > 0.0) || work == 0.0) return u;
    const double c = std::pow(std::abs(work) / energy, 1.0 / (p - 1.0));
    return u.scaled(c);
}

}  // namespace

SolveReport solve_weighted_problem(const Mesh& mesh, const NodalField& m, double p, double lambda,
                                   const NodalField& h, const SolverConfig& cfg) {
    require_exponent(p);
    require_same_mesh(mesh, m, "solve_weighted_problem (weight)");
    require_same_mesh(mesh, h, "solve_weighted_problem (load)");
    if (cfg.continuation_steps < 1) throw PreconditionError("continuation_steps must be >= 1");

    const auto hin = h.interior_values(mesh);
    if (std::all_of(hin.begin(), hin.end(), [](double v) { return v == 0.0; })) {
        SolveReport zero{NodalField::zeros(mesh), true, 0, 0.0, {{0, 0.0}}, lambda, Verdict::Zero};
        return zero;
    }

    SemilinearProblem problem;
    problem.p = p;
    problem.coefficient.assign(mesh.node_count(), 0.0);
    problem.reaction = [p](double s) { return phi_p(s, p); };
    const double eps = cfg.regularization_for(mesh).epsilon;
    problem.reaction_derivative = [p, eps](double s) { return phi_p_derivative(s, p, eps); };
    problem.load = h.values();

    auto solve_at = [&](double lam, NodalField seed) {
        for (std::size_t i = 0; i < mesh.node_count(); ++i) problem.coefficient[i] = lam * m[i];
        return newton_solve(mesh, problem, std::move(seed), cfg);
    };

    std::vector<std::pair<int, double>> path;
    int total_iterations = 0;
    auto absorb = [&](SolveReport& rep) {
        for (auto [step, res] : rep.newton_path) path.emplace_back(total_iterations + step, res);
        total_iterations += rep.iterations;
    };
    auto finish = [&](SolveReport rep, double lam) {
        rep.newton_path = path;
        rep.iterations = total_iterations;
        rep.lambda_used = lam;
        if (rep.u.max_abs() > cfg.blowup_threshold) rep.converged = false;
        rep.verdict = rep.converged ? positivity_verdict(mesh, rep.u, default_positivity_tolerance(rep.u))
                                    : Verdict::Diverged;
        return rep;
    };

    SolveReport current = solve_at(0.0, coercive_initial_guess(mesh, p, h));
    absorb(current);
    if (!current.converged || lambda == 0.0) return finish(std::move(current), 0.0);

    // Equal increments toward the target; a failed increment is bisected.
    const double dl = lambda / cfg.continuation_steps;
    double lam = 0.0;
    for (int k = 1; k <= cfg.continuation_steps; ++k) {
        const double target = (k == cfg.continuation_steps) ? lambda : k * dl;
        double step = target - lam;
        int depth = 0;
        while (lam != target) {
            const double next = (std::abs(target - lam) <= std::abs(step)) ? target : lam + step;
            SolveReport trial = solve_at(next, current.u);
            absorb(trial);
            const bool ok = trial.converged && trial.u.max_abs() <= cfg.blowup_threshold;
            if (ok) {
                current = std::move(trial);
                lam = next;
                continue;
            }
            if (++depth > cfg.max_substep_depth || trial.u.max_abs() > cfg.blowup_threshold) {
                trial.converged = false;
                return finish(std::move(trial), next);
            }
            step *= 0.5;
        }
    }
    return finish(std::move(current), lambda);
}

}  // namespace plap
