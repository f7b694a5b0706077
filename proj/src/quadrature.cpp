#include "plap/quadrature.hpp"

#include "plap/error.hpp"

#include <cmath>
#include <numbers>

namespace plap::quadrature {

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
    if (n < 1) throw PreconditionError("Gauss rule needs at least one point");
    nodes.assign(static_cast<std::size_t>(n), 0.0);
    weights.assign(static_cast<std::size_t>(n), 0.0);
    for (int i = 0; i < n; ++i) {
        // Newton on P_n from the Chebyshev-like initial guess.
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = pk;
            }
            if (n == 1) p0 = 1.0;
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        nodes[static_cast<std::size_t>(i)] = x;
        weights[static_cast<std::size_t>(i)] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
}

SimplexRule segment_gauss(int n) {
    std::vector<double> x, w;
    gauss_legendre(n, x, w);
    SimplexRule rule;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double t = 0.5 * (x[i] + 1.0);
        rule.points.push_back({1.0 - t, t, 0.0});
        rule.weights.push_back(0.5 * w[i]);
    }
    return rule;
}

SimplexRule triangle_six_point() {
    constexpr double a1 = 0.445948490915965, b1 = 1.0 - 2.0 * a1, w1 = 0.223381589678011;
    constexpr double a2 = 0.091576213509771, b2 = 1.0 - 2.0 * a2, w2 = 0.109951743655322;
    SimplexRule rule;
    rule.points = {{a1, a1, b1}, {a1, b1, a1}, {b1, a1, a1},
                   {a2, a2, b2}, {a2, b2, a2}, {b2, a2, a2}};
    rule.weights = {w1, w1, w1, w2, w2, w2};
    return rule;
}

SimplexRule triangle_collapsed_gauss(int n) {
    std::vector<double> x, w;
    gauss_legendre(n, x, w);
    SimplexRule rule;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double s = 0.5 * (x[i] + 1.0);
        for (std::size_t j = 0; j < x.size(); ++j) {
            const double t = 0.5 * (x[j] + 1.0);
            // (s, t) in the unit square -> (ξ, η) = (s, t(1-s)); Jacobian (1-s).
            const double xi = s, eta = t * (1.0 - s);
            rule.points.push_back({1.0 - xi - eta, xi, eta});
            // reference area 1/2, so weights relative to |T| carry a factor 2
            rule.weights.push_back(2.0 * 0.25 * w[i] * w[j] * (1.0 - s));
        }
    }
    return rule;
}

}  // namespace plap::quadrature
