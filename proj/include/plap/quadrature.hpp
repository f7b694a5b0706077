#pragma once

#include <array>
#include <vector>

namespace plap::quadrature {

/// Rule on a reference simplex: points in barycentric coordinates, weights
/// summing to 1 (multiply by the element measure).
struct SimplexRule {
    std::vector<std::array<double, 3>> points;
    std::vector<double> weights;
};

/// n-point Gauss–Legendre nodes and weights on [-1, 1].
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

/// n-point Gauss rule mapped to a segment.
SimplexRule segment_gauss(int n);

/// 6-point, degree-4 symmetric rule on a triangle.
SimplexRule triangle_six_point();

/// Collapsed (Duffy) tensor Gauss rule with n² points on a triangle.
SimplexRule triangle_collapsed_gauss(int n);

}  // namespace plap::quadrature
