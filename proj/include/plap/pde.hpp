#pragma once

#include "plap/mesh.hpp"
#include "plap/pcore.hpp"
#include "plap/verdict.hpp"

#include <functional>
#include <optional>
#include <utility>
#include <vector>

namespace plap {

struct SolverConfig {
    /// Absolute residual tolerance, scaled by (1 + ‖load‖₂).
    double newton_tolerance = 1e-10;
    int max_newton_steps = 60;
    /// Line search halves from 1 down to this step.
    double min_step = 1.0 / (1 << 20);
    /// Unset means Regularization::for_mesh.
    std::optional<Regularization> regularization;
    /// Equal λ increments on the path from the coercive problem at λ = 0.
    int continuation_steps = 8;
    /// Extra bisections of a λ increment after a Newton failure.
    int max_substep_depth = 8;
    double blowup_threshold = 1e8;

    Regularization regularization_for(const Mesh& mesh) const {
        return regularization.value_or(Regularization::for_mesh(mesh));
    }
    bool operator==(const SolverConfig&) const = default;
};

struct SolveReport {
    NodalField u;
    bool converged = false;
    int iterations = 0;
    double residual_norm = 0.0;
    std::vector<std::pair<int, double>> newton_path;
    double lambda_used = 0.0;
    std::optional<Verdict> verdict;
};

/// Interior-node system
///   R(u) = A(u) − W (c ⊙ F(u)) − W h = 0,
/// with A the discrete p-Laplacian, W the lumped weights, c a nodal coefficient
/// field and F a scalar reaction law applied nodewise.
struct SemilinearProblem {
    double p = 2.0;
    std::vector<double> coefficient;
    std::function<double(double)> reaction;
    std::function<double(double)> reaction_derivative;
    /// Nodal load h (may be all zeros).
    std::vector<double> load;
};

Vector semilinear_residual(const Mesh& mesh, const SemilinearProblem& problem, const NodalField& u);
SparseMatrix semilinear_jacobian(const Mesh& mesh, const SemilinearProblem& problem,
                                 const NodalField& u, Regularization reg);

/// Damped Newton from `initial`. Never throws on non-convergence; the report
/// carries converged = false instead.
SolveReport newton_solve(const Mesh& mesh, const SemilinearProblem& problem, NodalField initial,
                         const SolverConfig& cfg);

/// −Δ_p u − λ m φ_p(u) = h with u = 0 on the boundary. Solved at
/// λ = 0 first and continued to the target λ. Divergence near or beyond the
/// principal eigenvalues is reported, not raised.
SolveReport solve_weighted_problem(const Mesh& mesh, const NodalField& m, double p, double lambda,
                                   const NodalField& h, const SolverConfig& cfg);

class Nonlinearity;

enum class SolutionSign { Positive, Negative };

/// −Δ_p u = λ m f(u), seeking the one-sign solution selected by
/// `sign`. The solution is taken from the bifurcation branch of
/// −Δ_p u = μ m φ_p(u) + m g̃(u) (with f̃ = λ f) where it crosses μ = λ f₀, then
/// Newton-polished. Throws NoSolutionFoundError if the branch never crosses.
/// Requires m ≥ 0, m ≢ 0.
SolveReport solve_autonomous_problem(const Mesh& mesh, const NodalField& m, double p,
                                     const Nonlinearity& f, double lambda, SolutionSign sign,
                                     const SolverConfig& cfg);

}  // namespace plap
