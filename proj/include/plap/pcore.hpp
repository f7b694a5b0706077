#pragma once

#include "plap/mesh.hpp"

#include <Eigen/Core>
#include <Eigen/SparseCore>

namespace plap {

using Vector = Eigen::VectorXd;
using SparseMatrix = Eigen::SparseMatrix<double>;

/// Gradient-magnitude smoothing used inside Jacobians only: |∇u|^{p-2} is
/// replaced by (|∇u|² + ε²)^{(p-2)/2}.
struct Regularization {
    double epsilon = 1e-8;

    /// ε = 1e-8 / diam(Ω).
    static Regularization for_mesh(const Mesh& mesh) { return {1e-8 / mesh.diameter()}; }
    bool operator==(const Regularization&) const = default;
};

/// φ_p(s) = |s|^{p-2} s, with φ_p(0) = 0 for every p > 1.
double phi_p(double s, double p);

/// Derivative (p-1)|s|^{p-2}, smoothed as (p-1)(s² + ε²)^{(p-2)/2}.
double phi_p_derivative(double s, double p, double epsilon);

void require_exponent(double p);

/// Σ_T |∇u|_T^p |T|. Exact for P1 fields since gradients are elementwise constant.
double p_dirichlet_energy(const Mesh& mesh, const NodalField& u, double p);

/// Nodal (vertex) quadrature of ∫ m |u|^p: Σ_i w_i m_i |u_i|^p with the lumped
/// weights of the mesh. The same rule is used for every reaction and load term,
/// so the residual is the exact gradient of the discrete energy functionals.
double weighted_p_moment(const Mesh& mesh, const NodalField& m, const NodalField& u, double p);

/// Interior-node vector A(u)_i = Σ_T |T| |∇u|^{p-2} ∇u · ∇ψ_i.
Vector p_laplacian_operator(const Mesh& mesh, const NodalField& u, double p);

/// Interior-node vector b_i = w_i rhs_i, the quadrature of ∫ rhs ψ_i.
Vector load_vector(const Mesh& mesh, const NodalField& rhs);

/// Weak-form residual of −Δ_p u = rhs: A(u) − load_vector(rhs).
Vector p_laplacian_residual(const Mesh& mesh, const NodalField& u, double p, const NodalField& rhs);

/// Newton linearization of A at u, interior rows and columns only. Symmetric;
/// reduces to the P1 stiffness matrix when p = 2.
SparseMatrix regularized_jacobian(const Mesh& mesh, const NodalField& u, double p,
                                  Regularization reg);

}  // namespace plap
