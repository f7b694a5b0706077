#pragma once

// Independent reference for 1D, p = 2 discrete spectra: Sturm-sequence
// bisection on symmetric tridiagonal matrices. Shares no code with the library.

#include <cmath>
#include <functional>
#include <vector>

namespace oracle {

/// Number of eigenvalues of the symmetric tridiagonal (diag, off) below x.
inline int count_below(const std::vector<double>& diag, const std::vector<double>& off, double x) {
    int count = 0;
    double q = 1.0;
    for (std::size_t i = 0; i < diag.size(); ++i) {
        const double e2 = i == 0 ? 0.0 : off[i - 1] * off[i - 1];
        q = diag[i] - x - (i == 0 ? 0.0 : e2 / q);
        if (q == 0.0) q = -1e-300;
        if (q < 0.0) ++count;
    }
    return count;
}

/// Interior stiffness of the uniform P1 Laplacian on (0, L) with n cells.
struct Tridiagonal {
    std::vector<double> diag;
    std::vector<double> off;
};

inline Tridiagonal stiffness(double length, int n) {
    const double h = length / n;
    Tridiagonal t;
    t.diag.assign(static_cast<std::size_t>(n - 1), 2.0 / h);
    t.off.assign(static_cast<std::size_t>(n - 2), -1.0 / h);
    return t;
}

/// Smallest eigenvalue of a tridiagonal matrix by bisection.
inline double smallest_eigenvalue(const Tridiagonal& t) {
    double lo = -1e12, hi = 1e12;
    for (int it = 0; it < 400; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (count_below(t.diag, t.off, mid) >= 1) hi = mid; else lo = mid;
    }
    return 0.5 * (lo + hi);
}

/// λ₁⁺ of K v = λ diag(h m_i) v on (0, L): the smallest λ > 0 at which
/// K − λ M stops being positive definite.
inline double principal_positive(double length, int n, const std::function<double(double)>& m) {
    const Tridiagonal k = stiffness(length, n);
    const double h = length / n;
    auto indefinite = [&](double lambda) {
        Tridiagonal a = k;
        for (int i = 1; i < n; ++i) a.diag[static_cast<std::size_t>(i - 1)] -= lambda * h * m(i * h);
        return count_below(a.diag, a.off, 0.0) > 0;
    };
    double lo = 0.0, hi = 1.0;
    while (!indefinite(hi)) hi *= 2.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (indefinite(mid)) hi = mid; else lo = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace oracle
