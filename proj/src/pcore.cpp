#include "plap/pcore.hpp"

#include "plap/error.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace plap {

namespace {

Mesh::Gradient element_gradient(const Mesh& mesh, std::size_t e, const std::vector<double>& u) {
    Mesh::Gradient g{0.0, 0.0};
    const auto el = mesh.element(e);
    for (std::size_t k = 0; k < el.size(); ++k) {
        const auto& gk = mesh.basis_gradient(e, static_cast<int>(k));
        const double uk = u[static_cast<std::size_t>(el[k])];
        g[0] += uk * gk[0];
        g[1] += uk * gk[1];
    }
    return g;
}

double dot(const Mesh::Gradient& a, const Mesh::Gradient& b) { return a[0] * b[0] + a[1] * b[1]; }

void require_dirichlet(const NodalField& u, const char* what) {
    if (!u.dirichlet_zero()) {
        throw PreconditionError(std::string(what) + ": solution field must carry the Dirichlet-zero flag");
    }
}

}  // namespace

void require_exponent(double p) {
    if (!(p > 1.0) || !std::isfinite(p)) {
        throw PreconditionError("exponent p must be a finite number > 1, got " + std::to_string(p));
    }
}

double phi_p(double s, double p) {
    if (s == 0.0) return 0.0;
    if (p == 2.0) return s;
    return std::copysign(std::pow(std::abs(s), p - 1.0), s);
}

double phi_p_derivative(double s, double p, double epsilon) {
    if (p == 2.0) return 1.0;
    const double r2 = s * s + epsilon * epsilon;
    if (r2 == 0.0) {
        if (p < 2.0) throw SingularityError("phi_p derivative is unbounded at s = 0 for p < 2");
        return 0.0;
    }
    return (p - 1.0) * std::pow(r2, 0.5 * (p - 2.0));
}

double p_dirichlet_energy(const Mesh& mesh, const NodalField& u, double p) {
    require_exponent(p);
    require_same_mesh(mesh, u, "p_dirichlet_energy");
    double energy = 0.0;
    const auto& meas = mesh.element_measures();
    for (std::size_t e = 0; e < mesh.element_count(); ++e) {
        const auto g = element_gradient(mesh, e, u.values());
        const double g2 = dot(g, g);
        if (g2 > 0.0) energy += std::pow(g2, 0.5 * p) * meas[e];
    }
    return energy;
}

double weighted_p_moment(const Mesh& mesh, const NodalField& m, const NodalField& u, double p) {
    require_exponent(p);
    require_same_mesh(mesh, m, "weighted_p_moment (weight)");
    require_same_mesh(mesh, u, "weighted_p_moment (field)");
    const auto& w = mesh.lumped_weights();
    double moment = 0.0;
    for (std::size_t i = 0; i < mesh.node_count(); ++i) {
        const double a = std::abs(u[i]);
        if (a > 0.0) moment += w[i] * m[i] * std::pow(a, p);
    }
    return moment;
}

Vector p_laplacian_operator(const Mesh& mesh, const NodalField& u, double p) {
    require_exponent(p);
    require_same_mesh(mesh, u, "p_laplacian_operator");
    Vector out = Vector::Zero(static_cast<Eigen::Index>(mesh.interior_count()));
    const auto& meas = mesh.element_measures();
    for (std::size_t e = 0; e < mesh.element_count(); ++e) {
        const auto g = element_gradient(mesh, e, u.values());
        const double g2 = dot(g, g);
        if (g2 == 0.0) continue;
        const double coef = (p == 2.0 ? 1.0 : std::pow(g2, 0.5 * (p - 2.0))) * meas[e];
        const auto el = mesh.element(e);
        for (std::size_t k = 0; k < el.size(); ++k) {
            const int d = mesh.dof(el[k]);
            if (d < 0) continue;
            out[d] += coef * dot(g, mesh.basis_gradient(e, static_cast<int>(k)));
        }
    }
    return out;
}

Vector load_vector(const Mesh& mesh, const NodalField& rhs) {
    require_same_mesh(mesh, rhs, "load_vector");
    const auto& in = mesh.interior_nodes();
    const auto& w = mesh.lumped_weights();
    Vector b(static_cast<Eigen::Index>(in.size()));
    for (std::size_t k = 0; k < in.size(); ++k) {
        const auto i = static_cast<std::size_t>(in[k]);
        b[static_cast<Eigen::Index>(k)] = w[i] * rhs[i];
    }
    return b;
}

Vector p_laplacian_residual(const Mesh& mesh, const NodalField& u, double p, const NodalField& rhs) {
    require_dirichlet(u, "p_laplacian_residual");
    return p_laplacian_operator(mesh, u, p) - load_vector(mesh, rhs);
}

SparseMatrix regularized_jacobian(const Mesh& mesh, const NodalField& u, double p,
                                  Regularization reg) {
    require_exponent(p);
    require_same_mesh(mesh, u, "regularized_jacobian");
    require_dirichlet(u, "regularized_jacobian");
    if (reg.epsilon < 0.0) throw PreconditionError("regularization epsilon must be >= 0");
    const double eps2 = reg.epsilon * reg.epsilon;
    const auto& meas = mesh.element_measures();
    const int nv = mesh.vertices_per_element();

    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(mesh.element_count() * static_cast<std::size_t>(nv * nv));
    for (std::size_t e = 0; e < mesh.element_count(); ++e) {
        const auto g = element_gradient(mesh, e, u.values());
        const double g2 = dot(g, g);
        const double r2 = g2 + eps2;
        double a = 1.0;
        double b = 0.0;
        if (p != 2.0) {
            if (r2 == 0.0) {
                if (p < 2.0) {
                    throw SingularityError("zero element gradient with p < 2 and epsilon = 0");
                }
                a = 0.0;
            } else {
                a = std::pow(r2, 0.5 * (p - 2.0));
                if (g2 > 0.0) b = (p - 2.0) * a / r2;
            }
        }
        const auto el = mesh.element(e);
        for (int k = 0; k < nv; ++k) {
            const int dk = mesh.dof(el[static_cast<std::size_t>(k)]);
            if (dk < 0) continue;
            const auto& gk = mesh.basis_gradient(e, k);
            for (int l = 0; l < nv; ++l) {
                const int dl = mesh.dof(el[static_cast<std::size_t>(l)]);
                if (dl < 0) continue;
                const auto& gl = mesh.basis_gradient(e, l);
                const double v = meas[e] * (a * dot(gk, gl) + b * dot(g, gk) * dot(g, gl));
                triplets.emplace_back(dk, dl, v);
            }
        }
    }
    const auto n = static_cast<Eigen::Index>(mesh.interior_count());
    SparseMatrix J(n, n);
    J.setFromTriplets(triplets.begin(), triplets.end());
    return J;
}

}  // namespace plap
