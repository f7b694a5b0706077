#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace plap {

struct Point {
    double x = 0.0;
    double y = 0.0;
};

/// Uniform simplicial mesh of an interval (dimension 1) or of a rectangle
/// split into right triangles (dimension 2). Immutable after construction.
///
/// Per-element gradients of the P1 basis functions are precomputed; they are
/// constant on each element. Nodal quadrature weights (the lumped mass,
/// sum of |T|/(d+1) over the elements touching a node) are also cached.
class Mesh {
public:
    static constexpr int kMaxVertices = 3;
    using Element = std::array<int, kMaxVertices>;
    using Gradient = std::array<double, 2>;

    Mesh(int dimension, std::vector<Point> nodes, std::vector<Element> elements,
         std::vector<int> boundary_nodes);

    int dimension() const noexcept { return dimension_; }
    int vertices_per_element() const noexcept { return dimension_ + 1; }
    std::uint64_t id() const noexcept { return id_; }

    std::size_t node_count() const noexcept { return nodes_.size(); }
    std::size_t element_count() const noexcept { return elements_.size(); }
    std::size_t interior_count() const noexcept { return interior_nodes_.size(); }

    const std::vector<Point>& nodes() const noexcept { return nodes_; }
    const std::vector<Element>& elements() const noexcept { return elements_; }
    const std::vector<int>& boundary_nodes() const noexcept { return boundary_nodes_; }
    const std::vector<int>& interior_nodes() const noexcept { return interior_nodes_; }
    const std::vector<double>& element_measures() const noexcept { return measures_; }
    const std::vector<double>& lumped_weights() const noexcept { return lumped_; }

    bool is_boundary(int node) const { return dof_[static_cast<std::size_t>(node)] < 0; }
    /// Interior unknown index of a node, or -1 on the boundary.
    int dof(int node) const { return dof_[static_cast<std::size_t>(node)]; }

    /// Gradient of the local basis function `local` on element `e`.
    const Gradient& basis_gradient(std::size_t e, int local) const {
        return grads_[e][static_cast<std::size_t>(local)];
    }

    std::span<const int> element(std::size_t e) const {
        return {elements_[e].data(), static_cast<std::size_t>(vertices_per_element())};
    }

    double total_measure() const;
    double diameter() const;

private:
    int dimension_;
    std::uint64_t id_;
    std::vector<Point> nodes_;
    std::vector<Element> elements_;
    std::vector<int> boundary_nodes_;
    std::vector<int> interior_nodes_;
    std::vector<int> dof_;
    std::vector<double> measures_;
    std::vector<double> lumped_;
    std::vector<std::array<Gradient, kMaxVertices>> grads_;
};

Mesh build_interval_mesh(double a, double b, int n);
Mesh build_rectangle_mesh(double lx, double ly, int nx, int ny);

/// Scalar field given by its nodal values on a specific mesh.
class NodalField {
public:
    NodalField(const Mesh& mesh, std::vector<double> values, bool dirichlet_zero = false);

    static NodalField zeros(const Mesh& mesh, bool dirichlet_zero = true);

    /// Expands interior unknowns into a Dirichlet-zero field.
    static NodalField from_interior(const Mesh& mesh, std::span<const double> interior);

    std::uint64_t mesh_id() const noexcept { return mesh_id_; }
    bool dirichlet_zero() const noexcept { return dirichlet_zero_; }
    std::size_t size() const noexcept { return values_.size(); }

    const std::vector<double>& values() const noexcept { return values_; }
    double operator[](std::size_t i) const { return values_[i]; }

    std::vector<double> interior_values(const Mesh& mesh) const;

    double min_interior(const Mesh& mesh) const;
    double max_interior(const Mesh& mesh) const;
    double max_abs() const;

    NodalField scaled(double c) const;
    NodalField negated() const { return scaled(-1.0); }

private:
    std::uint64_t mesh_id_;
    std::vector<double> values_;
    bool dirichlet_zero_;
};

/// Throws MeshMismatchError unless `field` lives on `mesh`.
void require_same_mesh(const Mesh& mesh, const NodalField& field, const char* what);

NodalField sample_field(const Mesh& mesh, const std::function<double(const Point&)>& fn,
                        bool dirichlet = false);

}  // namespace plap
