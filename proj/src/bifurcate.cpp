#include "plap/bifurcate.hpp"

#include "plap/error.hpp"
#include "plap/maxprin.hpp"
#include "plap/pcore.hpp"

#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace plap {

Nonlinearity::Nonlinearity(std::function<double(double)> ratio, std::function<double(double)> ratio_derivative,
                           double p, double f0, double finf)
    : ratio_(std::move(ratio)), ratio_derivative_(std::move(ratio_derivative)), p_(p), f0_(f0), finf_(finf) {
    require_exponent(p);
    if (!ratio_ || !ratio_derivative_) throw PreconditionError("nonlinearity needs a ratio and its derivative");
    double sup = 0.0;
    double inf_g = std::numeric_limits<double>::infinity();
    // 20 samples per decade on [1e-8, 1e8], both signs
    for (int k = 0; k <= 320; ++k) {
        const double s = std::pow(10.0, -8.0 + k / 20.0);
        for (double sv : {s, -s}) {
            const double r = ratio_(sv);
            if (!std::isfinite(r)) {
                throw HypothesisError("f(s)/phi_p(s) is not finite at s = " + std::to_string(sv));
            }
            sup = std::max(sup, std::abs(r));
            inf_g = std::min(inf_g, r - f0_);
        }
    }
    // The declared limits must be attained at the ends of the sample range;
    // otherwise the ratio is either unbounded or f0/finf are wrong.
    auto near = [](double r, double target) { return std::abs(r - target) <= 1e-3 * (1.0 + std::abs(target)); };
    for (double sv : {1e-8, -1e-8}) {
        if (!near(ratio_(sv), f0_)) throw HypothesisError("f(s)/phi_p(s) does not approach f0 as s -> 0");
    }
    for (double sv : {1e8, -1e8}) {
        if (!near(ratio_(sv), finf_)) {
            throw HypothesisError("f(s)/phi_p(s) is unbounded or does not approach finf as |s| -> infinity");
        }
    }
    bound_ = sup;
    inf_g_ratio_ = inf_g;
}

Nonlinearity Nonlinearity::saturating(double p, double a, double b) {
    return Nonlinearity([a, b](double s) { return a + b * s * s / (1.0 + s * s); },
                        [b](double s) {
                            const double d = 1.0 + s * s;
                            return 2.0 * b * s / (d * d);
                        },
                        p, a, a + b);
}

double Nonlinearity::operator()(double s) const { return phi_p(s, p_) * ratio_(s); }

double Nonlinearity::derivative(double s, double epsilon) const {
    return phi_p_derivative(s, p_, epsilon) * ratio_(s) + phi_p(s, p_) * ratio_derivative_(s);
}

double Nonlinearity::g(double s) const { return phi_p(s, p_) * (ratio_(s) - f0_); }

double Nonlinearity::g_derivative(double s, double epsilon) const {
    return phi_p_derivative(s, p_, epsilon) * (ratio_(s) - f0_) + phi_p(s, p_) * ratio_derivative_(s);
}

Nonlinearity Nonlinearity::scaled(double c) const {
    auto r = ratio_;
    auto dr = ratio_derivative_;
    return Nonlinearity([r, c](double s) { return c * r(s); }, [dr, c](double s) { return c * dr(s); }, p_,
                        c * f0_, c * finf_);
}

double g_part(const Nonlinearity& f, double s) { return f.g(s); }

bool eigenvalue_separates_limits(const Nonlinearity& f, double lambda1) {
    return (f.f0() < lambda1 && lambda1 < f.finf()) || (f.f0() > lambda1 && lambda1 > f.finf());
}

namespace {

/// Extended system for (x, λ): F(x, λ) = A(u) − W m (λ φ_p(u) + g(u)) and one
/// linear constraint c_x·x + c_λ λ = target.
class BranchSystem {
public:
    BranchSystem(const Mesh& mesh, const NodalField& m, const Nonlinearity& f, Regularization reg)
        : mesh_(mesh), m_(m), f_(f), reg_(reg), n_(static_cast<Eigen::Index>(mesh.interior_count())) {}

    Eigen::Index size() const { return n_; }

    Vector residual(const NodalField& u, double lambda) const {
        Vector r = p_laplacian_operator(mesh_, u, f_.p());
        const auto& in = mesh_.interior_nodes();
        const auto& w = mesh_.lumped_weights();
        for (Eigen::Index k = 0; k < n_; ++k) {
            const auto i = static_cast<std::size_t>(in[static_cast<std::size_t>(k)]);
            if (m_[i] == 0.0) continue;
            r[k] -= w[i] * m_[i] * (lambda * phi_p(u[i], f_.p()) + f_.g(u[i]));
        }
        return r;
    }

    double scale(const NodalField& u) const { return 1.0 + p_laplacian_operator(mesh_, u, f_.p()).norm(); }

    /// Newton on the bordered system. Returns the iteration count, or -1.
    int correct(Vector& x, double& lambda, const Vector& cx, double clam, double target, int max_iter,
                double tol, double& residual_out) const {
        const auto& in = mesh_.interior_nodes();
        const auto& w = mesh_.lumped_weights();
        const double p = f_.p();
        for (int it = 0; it <= max_iter; ++it) {
            const NodalField u = field(x);
            const Vector F = residual(u, lambda);
            const double c = cx.dot(x) + clam * lambda - target;
            const double fn = F.norm();
            if (!std::isfinite(fn)) return -1;
            residual_out = fn;
            const double sc = scale(u);
            if (fn <= tol * sc && std::abs(c) <= 1e-12 * (1.0 + std::abs(target))) return it;
            if (it == max_iter) return -1;

            SparseMatrix J = regularized_jacobian(mesh_, u, p, reg_);
            std::vector<Eigen::Triplet<double>> trip;
            trip.reserve(static_cast<std::size_t>(J.nonZeros() + 3 * n_ + 1));
            for (int col = 0; col < J.outerSize(); ++col) {
                for (SparseMatrix::InnerIterator itj(J, col); itj; ++itj) {
                    trip.emplace_back(static_cast<int>(itj.row()), static_cast<int>(itj.col()), itj.value());
                }
            }
            const int nn = static_cast<int>(n_);
            for (Eigen::Index k = 0; k < n_; ++k) {
                const auto i = static_cast<std::size_t>(in[static_cast<std::size_t>(k)]);
                const int kk = static_cast<int>(k);
                if (m_[i] != 0.0) {
                    const double dsrc = lambda * phi_p_derivative(u[i], p, reg_.epsilon) +
                                        f_.g_derivative(u[i], reg_.epsilon);
                    trip.emplace_back(kk, kk, -w[i] * m_[i] * dsrc);
                    trip.emplace_back(kk, nn, -w[i] * m_[i] * phi_p(u[i], p));
                }
                if (cx[k] != 0.0) trip.emplace_back(nn, kk, cx[k]);
            }
            if (clam != 0.0) trip.emplace_back(nn, nn, clam);
            SparseMatrix B(n_ + 1, n_ + 1);
            B.setFromTriplets(trip.begin(), trip.end());
            Vector rhs(n_ + 1);
            rhs.head(n_) = -F;
            rhs[n_] = -c;
            Eigen::SparseLU<SparseMatrix> lu;
            lu.compute(B);
            if (lu.info() != Eigen::Success) return -1;
            const Vector d = lu.solve(rhs);
            if (!d.allFinite()) return -1;
            x += d.head(n_);
            lambda += d[n_];
        }
        return -1;
    }

    NodalField field(const Vector& x) const {
        return NodalField::from_interior(mesh_, std::span<const double>(x.data(), static_cast<std::size_t>(x.size())));
    }

    Vector interior(const NodalField& u) const {
        const auto v = u.interior_values(mesh_);
        return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
    }

    /// Weighted inner-product row w ⊙ v.
    Vector weighted(const Vector& v) const {
        Vector out(n_);
        const auto& in = mesh_.interior_nodes();
        for (Eigen::Index k = 0; k < n_; ++k) {
            out[k] = mesh_.lumped_weights()[static_cast<std::size_t>(in[static_cast<std::size_t>(k)])] * v[k];
        }
        return out;
    }

private:
    const Mesh& mesh_;
    const NodalField& m_;
    const Nonlinearity& f_;
    Regularization reg_;
    Eigen::Index n_;
};

BranchPoint make_point(const Mesh& mesh, const BranchSystem& sys, const Vector& x, double lambda, double arclength,
                       double residual, double p) {
    NodalField u = sys.field(x);
    const double norm = std::pow(p_dirichlet_energy(mesh, u, p), 1.0 / p);
    const Verdict v = positivity_verdict(mesh, u, default_positivity_tolerance(u));
    return BranchPoint{lambda, std::move(u), norm, arclength, v, residual};
}

}  // namespace

Branch continue_branch(const Mesh& mesh, const NodalField& m, double p, const Nonlinearity& f, Sigma sigma,
                       const ContinuationConfig& cfg, const std::optional<EigenPair>& principal) {
    require_exponent(p);
    require_same_mesh(mesh, m, "continue_branch");
    if (f.p() != p) throw PreconditionError("nonlinearity exponent does not match p");
    const WeightRegime regime = classify_weight(mesh, m);
    if (regime != WeightRegime::NonNegative &&
        !(cfg.allow_sign_changing_weight && regime == WeightRegime::SignChanging)) {
        throw PreconditionError("continue_branch requires a weight m >= 0 with m not identically zero");
    }

    const EigenPair pair = to_unit_norm(
        mesh, principal ? *principal : principal_eigenpair_positive(mesh, m, p, cfg.eigen), p);
    const Regularization reg = cfg.solver.regularization_for(mesh);
    const BranchSystem sys(mesh, m, f, reg);
    const double sgn = sign_of(sigma);

    Branch branch;
    branch.sigma = sigma;
    branch.bifurcation_lambda = pair.lambda;

    // Detachment: fix the projection onto u₁.
    const Vector u1 = sys.interior(pair.u);
    const Vector wu1 = sys.weighted(u1);
    const double amp = cfg.detachment_amplitude;
    Vector x = sgn * amp * u1;
    double lambda = pair.lambda;
    double residual = 0.0;
    if (sys.correct(x, lambda, wu1, 0.0, sgn * amp * wu1.dot(u1), cfg.max_corrector_iterations,
                    cfg.corrector_tolerance, residual) < 0) {
        branch.terminated_reason = Termination::StepFailure;
        return branch;
    }
    branch.points.push_back(make_point(mesh, sys, x, lambda, 0.0, residual, p));

    auto metric_norm = [&](const Vector& dx, double dl) { return std::sqrt(dx.dot(sys.weighted(dx)) + dl * dl); };

    // Tangent (σ u₁, 0), normalized.
    Vector tx = sgn * u1;
    double tl = 0.0;
    {
        const double tn = metric_norm(tx, tl);
        tx /= tn;
    }
    double h = cfg.initial_step;
    double arclength = 0.0;

    while (true) {
        const BranchPoint& last = branch.points.back();
        if (last.norm >= cfg.max_norm) {
            branch.terminated_reason = Termination::MaxNorm;
            break;
        }
        if (arclength >= cfg.max_arclength) {
            branch.terminated_reason = Termination::MaxArclength;
            break;
        }
        if (static_cast<int>(branch.points.size()) >= cfg.max_points) {
            branch.terminated_reason = Termination::MaxPoints;
            break;
        }
        const Vector x0 = x;
        const double l0 = lambda;
        Vector xp = x0 + h * tx;
        double lp = l0 + h * tl;
        const Vector cx = sys.weighted(tx);
        const double target = cx.dot(xp) + tl * lp;
        const int iters = sys.correct(xp, lp, cx, tl, target, cfg.max_corrector_iterations,
                                      cfg.corrector_tolerance, residual);
        if (iters < 0) {
            h *= 0.5;
            if (h < cfg.min_step) {
                branch.terminated_reason = Termination::StepFailure;
                break;
            }
            continue;
        }
        const Vector dx = xp - x0;
        const double dl = lp - l0;
        const double chord = metric_norm(dx, dl);
        if (!(chord > 0.0)) {
            branch.terminated_reason = Termination::StepFailure;
            break;
        }
        arclength += chord;
        x = xp;
        lambda = lp;
        branch.points.push_back(make_point(mesh, sys, x, lambda, arclength, residual, p));
        tx = dx / chord;
        tl = dl / chord;
        if (iters < cfg.target_corrector_iterations) {
            h = std::min(2.0 * h, cfg.max_step);
        } else if (iters > cfg.target_corrector_iterations) {
            h *= 0.5;
        }
    }
    return branch;
}

LambdaBound branch_lambda_bound(const Branch& branch, const Nonlinearity& f, double lambda1) {
    if (branch.points.empty()) throw PreconditionError("branch_lambda_bound: empty branch");
    LambdaBound out;
    out.lambda_star = std::max(0.0, -f.inf_g_ratio());
    out.bound_C = std::max(std::abs(lambda1 + out.lambda_star), std::abs(out.lambda_star)) + std::abs(lambda1);
    out.satisfied = std::all_of(branch.points.begin(), branch.points.end(),
                                [&](const BranchPoint& pt) { return std::abs(pt.lambda) <= out.bound_C; });
    return out;
}

std::vector<Crossing> branch_crossings(const Mesh& mesh, const NodalField& m, const Nonlinearity& f,
                                       const Branch& branch, double lambda_target, const SolverConfig& cfg) {
    if (branch.points.empty()) throw PreconditionError("branch_crossings: empty branch");
    require_same_mesh(mesh, m, "branch_crossings");
    const auto& pts = branch.points;
    std::vector<Crossing> out;

    const double vertical_tol = 1e-8 * std::max(1.0, std::abs(lambda_target));
    if (std::all_of(pts.begin(), pts.end(),
                    [&](const BranchPoint& pt) { return std::abs(pt.lambda - lambda_target) <= vertical_tol; })) {
        const auto it = std::max_element(pts.begin(), pts.end(),
                                         [](const BranchPoint& a, const BranchPoint& b) { return a.norm < b.norm; });
        out.push_back(Crossing{it->u, it->lambda, it->residual_norm, true, it->arclength});
        return out;
    }

    const double p = f.p();
    SemilinearProblem problem;
    problem.p = p;
    problem.coefficient = m.values();
    problem.load.assign(mesh.node_count(), 0.0);
    problem.reaction = [&f, p, lambda_target](double s) { return lambda_target * phi_p(s, p) + f.g(s); };
    const double eps = cfg.regularization_for(mesh).epsilon;
    problem.reaction_derivative = [&f, p, lambda_target, eps](double s) {
        return lambda_target * phi_p_derivative(s, p, eps) + f.g_derivative(s, eps);
    };

    for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
        const double a = pts[k].lambda - lambda_target;
        const double b = pts[k + 1].lambda - lambda_target;
        if (!(a * b < 0.0 || (b == 0.0 && a != 0.0))) continue;
        const double theta = a / (a - b);
        std::vector<double> guess(mesh.node_count());
        for (std::size_t i = 0; i < guess.size(); ++i) {
            guess[i] = pts[k].u[i] + theta * (pts[k + 1].u[i] - pts[k].u[i]);
        }
        SolveReport rep = newton_solve(mesh, problem, NodalField(mesh, std::move(guess), true), cfg);
        if (!rep.converged) continue;
        const double s = pts[k].arclength + theta * (pts[k + 1].arclength - pts[k].arclength);
        const bool duplicate = std::any_of(out.begin(), out.end(), [&](const Crossing& c) {
            double diff = 0.0;
            for (std::size_t i = 0; i < mesh.node_count(); ++i) diff = std::max(diff, std::abs(c.u[i] - rep.u[i]));
            return diff <= 1e-8 * std::max(1.0, rep.u.max_abs());
        });
        if (!duplicate) out.push_back(Crossing{rep.u, lambda_target, rep.residual_norm, true, s});
    }
    return out;
}

double extrapolated_origin(const Branch& branch, int count) {
    const auto n = std::min<std::size_t>(static_cast<std::size_t>(count), branch.points.size());
    if (n == 0) throw PreconditionError("extrapolated_origin: empty branch");
    if (n == 1) return branch.points.front().lambda;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double xv = branch.points[i].norm, yv = branch.points[i].lambda;
        sx += xv;
        sy += yv;
        sxx += xv * xv;
        sxy += xv * yv;
    }
    const double dn = static_cast<double>(n);
    const double denom = dn * sxx - sx * sx;
    if (denom == 0.0) return sy / dn;
    const double slope = (dn * sxy - sx * sy) / denom;
    return (sy - slope * sx) / dn;
}

}  // namespace plap
