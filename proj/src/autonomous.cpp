#include "plap/bifurcate.hpp"
#include "plap/error.hpp"
#include "plap/maxprin.hpp"
#include "plap/pde.hpp"

#include <string>

namespace plap {

SolveReport solve_autonomous_problem(const Mesh& mesh, const NodalField& m, double p, const Nonlinearity& f,
                                     double lambda, SolutionSign sign, const SolverConfig& cfg) {
    if (lambda == 0.0) throw NoSolutionFoundError("lambda = 0 admits only the trivial solution");
    const Nonlinearity scaled = f.scaled(lambda);
    ContinuationConfig ccfg;
    ccfg.solver = cfg;
    ccfg.eigen.newton = cfg;
    const Sigma sigma = sign == SolutionSign::Positive ? Sigma::Plus : Sigma::Minus;
    const Branch branch = continue_branch(mesh, m, p, scaled, sigma, ccfg);
    const double target = scaled.f0();
    const std::vector<Crossing> crossings = branch_crossings(mesh, m, scaled, branch, target, cfg);
    if (crossings.empty()) {
        throw NoSolutionFoundError("the one-sign branch does not cross parameter value " + std::to_string(target) +
                                   " (lambda = " + std::to_string(lambda) + ")");
    }
    const Crossing& c = crossings.front();
    SolveReport rep{c.u, c.converged, 0, c.residual_norm, {{0, c.residual_norm}}, lambda, std::nullopt};
    rep.verdict = positivity_verdict(mesh, rep.u, default_positivity_tolerance(rep.u));
    return rep;
}

}  // namespace plap
