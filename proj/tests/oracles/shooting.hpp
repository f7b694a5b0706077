#pragma once

// Independent references for the 1D p-Laplacian, built on the ODE form
// −(φ_p(u′))′ = λ φ_p(u) rather than on any finite-element machinery.

#include <cmath>
#include <numbers>

namespace oracle {

inline double phi(double s, double p) { return s == 0.0 ? 0.0 : std::copysign(std::pow(std::abs(s), p - 1.0), s); }

/// First Dirichlet eigenvalue of −(φ_p(u′))′ = λ φ_p(u) on (0, length).
///
/// Integrates u′ = φ_{p′}(w), w′ = −φ_p(u) (λ = 1) with RK4 from u = 0, w = 1
/// until u returns to zero at z; by scaling, λ₁ on (0, length) is (z/length)^p.
inline double shooting_first_eigenvalue(double p, double length = 1.0, double dx = 1e-5) {
    const double q = p / (p - 1.0);
    auto rhs = [&](double u, double w, double& du, double& dw) {
        du = phi(w, q);
        dw = -phi(u, p);
    };
    double x = 0.0, u = 0.0, w = 1.0;
    while (true) {
        double k1u, k1w, k2u, k2w, k3u, k3w, k4u, k4w;
        rhs(u, w, k1u, k1w);
        rhs(u + 0.5 * dx * k1u, w + 0.5 * dx * k1w, k2u, k2w);
        rhs(u + 0.5 * dx * k2u, w + 0.5 * dx * k2w, k3u, k3w);
        rhs(u + dx * k3u, w + dx * k3w, k4u, k4w);
        const double un = u + dx / 6.0 * (k1u + 2 * k2u + 2 * k3u + k4u);
        const double wn = w + dx / 6.0 * (k1w + 2 * k2w + 2 * k3w + k4w);
        if (x > dx && un <= 0.0) {
            const double z = x + dx * u / (u - un);
            return std::pow(z / length, p);
        }
        x += dx;
        u = un;
        w = wn;
        if (x > 100.0) return NAN;
    }
}

/// (p−1) π_p^p with π_p = 2π / (p sin(π/p)): closed form on (0, 1).
inline double closed_form_first_eigenvalue(double p) {
    const double pi_p = 2.0 * std::numbers::pi / (p * std::sin(std::numbers::pi / p));
    return (p - 1.0) * std::pow(pi_p, p);
}

/// Solution of −(φ_p(u′))′ = 1 on (0, 1), u(0) = u(1) = 0, at x:
/// u′(t) = φ_{p′}(1/2 − t), integrated by composite Simpson.
inline double torsion_solution(double p, double x, int panels = 20000) {
    const double q = p / (p - 1.0);
    auto du = [&](double t) { return phi(0.5 - t, q); };
    const double h = x / panels;
    double s = du(0.0) + du(x);
    for (int i = 1; i < panels; ++i) s += (i % 2 ? 4.0 : 2.0) * du(i * h);
    return s * h / 3.0;
}

}  // namespace oracle
