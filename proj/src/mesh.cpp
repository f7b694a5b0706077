#include "plap/mesh.hpp"

#include "plap/error.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <string>

namespace plap {

namespace {

std::uint64_t next_mesh_id() {
    static std::atomic<std::uint64_t> counter{1};
    return counter.fetch_add(1, std::memory_order_relaxed);
}

}  // namespace

Mesh::Mesh(int dimension, std::vector<Point> nodes, std::vector<Element> elements,
           std::vector<int> boundary_nodes)
    : dimension_(dimension),
      id_(next_mesh_id()),
      nodes_(std::move(nodes)),
      elements_(std::move(elements)),
      boundary_nodes_(std::move(boundary_nodes)) {
    if (dimension_ != 1 && dimension_ != 2) {
        throw InvalidMeshError("mesh dimension must be 1 or 2");
    }
    const int n_nodes = static_cast<int>(nodes_.size());
    std::sort(boundary_nodes_.begin(), boundary_nodes_.end());
    boundary_nodes_.erase(std::unique(boundary_nodes_.begin(), boundary_nodes_.end()),
                          boundary_nodes_.end());
    for (int b : boundary_nodes_) {
        if (b < 0 || b >= n_nodes) {
            throw InvalidMeshError("boundary node index " + std::to_string(b) + " out of range");
        }
    }

    dof_.assign(nodes_.size(), 0);
    for (int b : boundary_nodes_) dof_[static_cast<std::size_t>(b)] = -1;
    for (int i = 0; i < n_nodes; ++i) {
        if (dof_[static_cast<std::size_t>(i)] == 0) {
            dof_[static_cast<std::size_t>(i)] = static_cast<int>(interior_nodes_.size());
            interior_nodes_.push_back(i);
        }
    }

    const int nv = vertices_per_element();
    measures_.reserve(elements_.size());
    grads_.reserve(elements_.size());
    lumped_.assign(nodes_.size(), 0.0);
    for (const Element& el : elements_) {
        for (int k = 0; k < nv; ++k) {
            if (el[static_cast<std::size_t>(k)] < 0 || el[static_cast<std::size_t>(k)] >= n_nodes) {
                throw InvalidMeshError("element references a nonexistent node");
            }
        }
        std::array<Gradient, kMaxVertices> g{};
        double measure = 0.0;
        if (dimension_ == 1) {
            const double x0 = nodes_[static_cast<std::size_t>(el[0])].x;
            const double x1 = nodes_[static_cast<std::size_t>(el[1])].x;
            measure = x1 - x0;
            g[0] = {-1.0 / measure, 0.0};
            g[1] = {1.0 / measure, 0.0};
        } else {
            const Point& p0 = nodes_[static_cast<std::size_t>(el[0])];
            const Point& p1 = nodes_[static_cast<std::size_t>(el[1])];
            const Point& p2 = nodes_[static_cast<std::size_t>(el[2])];
            const double det = (p1.x - p0.x) * (p2.y - p0.y) - (p2.x - p0.x) * (p1.y - p0.y);
            measure = 0.5 * det;
            // grad of barycentric coordinate k is the rotated opposite edge over 2|T|
            g[0] = {(p1.y - p2.y) / det, (p2.x - p1.x) / det};
            g[1] = {(p2.y - p0.y) / det, (p0.x - p2.x) / det};
            g[2] = {(p0.y - p1.y) / det, (p1.x - p0.x) / det};
        }
        if (!(measure > 0.0)) {
            throw InvalidMeshError("element with nonpositive measure (check orientation)");
        }
        measures_.push_back(measure);
        grads_.push_back(g);
        for (int k = 0; k < nv; ++k) {
            lumped_[static_cast<std::size_t>(el[static_cast<std::size_t>(k)])] += measure / nv;
        }
    }
}

double Mesh::total_measure() const {
    double s = 0.0;
    for (double m : measures_) s += m;
    return s;
}

double Mesh::diameter() const {
    double xmin = nodes_.front().x, xmax = xmin, ymin = nodes_.front().y, ymax = ymin;
    for (const Point& p : nodes_) {
        xmin = std::min(xmin, p.x);
        xmax = std::max(xmax, p.x);
        ymin = std::min(ymin, p.y);
        ymax = std::max(ymax, p.y);
    }
    return std::hypot(xmax - xmin, ymax - ymin);
}

Mesh build_interval_mesh(double a, double b, int n) {
    if (!(a < b)) throw InvalidMeshError("interval mesh requires a < b");
    if (n < 2) throw InvalidMeshError("interval mesh requires n >= 2");
    std::vector<Point> nodes(static_cast<std::size_t>(n) + 1);
    for (int i = 0; i <= n; ++i) {
        nodes[static_cast<std::size_t>(i)].x = (i == n) ? b : a + (b - a) * i / n;
    }
    std::vector<Mesh::Element> elements(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) elements[static_cast<std::size_t>(i)] = {i, i + 1, -1};
    return Mesh(1, std::move(nodes), std::move(elements), {0, n});
}

Mesh build_rectangle_mesh(double lx, double ly, int nx, int ny) {
    if (!(lx > 0.0) || !(ly > 0.0)) throw InvalidMeshError("rectangle dimensions must be positive");
    if (nx < 2 || ny < 2) throw InvalidMeshError("rectangle mesh requires nx, ny >= 2");
    const auto node = [nx](int i, int j) { return j * (nx + 1) + i; };
    std::vector<Point> nodes;
    nodes.reserve(static_cast<std::size_t>((nx + 1) * (ny + 1)));
    std::vector<int> boundary;
    for (int j = 0; j <= ny; ++j) {
        for (int i = 0; i <= nx; ++i) {
            nodes.push_back({i == nx ? lx : lx * i / nx, j == ny ? ly : ly * j / ny});
            if (i == 0 || i == nx || j == 0 || j == ny) boundary.push_back(node(i, j));
        }
    }
    std::vector<Mesh::Element> elements;
    elements.reserve(static_cast<std::size_t>(2 * nx * ny));
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            // counter-clockwise, diagonal from (i,j) to (i+1,j+1)
            elements.push_back({node(i, j), node(i + 1, j), node(i + 1, j + 1)});
            elements.push_back({node(i, j), node(i + 1, j + 1), node(i, j + 1)});
        }
    }
    return Mesh(2, std::move(nodes), std::move(elements), std::move(boundary));
}

NodalField::NodalField(const Mesh& mesh, std::vector<double> values, bool dirichlet_zero)
    : mesh_id_(mesh.id()), values_(std::move(values)), dirichlet_zero_(dirichlet_zero) {
    if (values_.size() != mesh.node_count()) {
        throw MeshMismatchError("field has " + std::to_string(values_.size()) +
                                " values but mesh has " + std::to_string(mesh.node_count()) +
                                " nodes");
    }
    if (dirichlet_zero_) {
        for (int b : mesh.boundary_nodes()) values_[static_cast<std::size_t>(b)] = 0.0;
    }
}

NodalField NodalField::zeros(const Mesh& mesh, bool dirichlet_zero) {
    return NodalField(mesh, std::vector<double>(mesh.node_count(), 0.0), dirichlet_zero);
}

NodalField NodalField::from_interior(const Mesh& mesh, std::span<const double> interior) {
    if (interior.size() != mesh.interior_count()) {
        throw MeshMismatchError("interior vector length does not match mesh");
    }
    std::vector<double> v(mesh.node_count(), 0.0);
    const auto& in = mesh.interior_nodes();
    for (std::size_t k = 0; k < in.size(); ++k) v[static_cast<std::size_t>(in[k])] = interior[k];
    return NodalField(mesh, std::move(v), true);
}

std::vector<double> NodalField::interior_values(const Mesh& mesh) const {
    require_same_mesh(mesh, *this, "interior_values");
    std::vector<double> out;
    out.reserve(mesh.interior_count());
    for (int i : mesh.interior_nodes()) out.push_back(values_[static_cast<std::size_t>(i)]);
    return out;
}

double NodalField::min_interior(const Mesh& mesh) const {
    const auto v = interior_values(mesh);
    return v.empty() ? 0.0 : *std::min_element(v.begin(), v.end());
}

double NodalField::max_interior(const Mesh& mesh) const {
    const auto v = interior_values(mesh);
    return v.empty() ? 0.0 : *std::max_element(v.begin(), v.end());
}

double NodalField::max_abs() const {
    double m = 0.0;
    for (double v : values_) m = std::max(m, std::abs(v));
    return m;
}

NodalField NodalField::scaled(double c) const {
    NodalField out = *this;
    for (double& v : out.values_) v *= c;
    return out;
}

void require_same_mesh(const Mesh& mesh, const NodalField& field, const char* what) {
    if (field.mesh_id() != mesh.id() || field.size() != mesh.node_count()) {
        throw MeshMismatchError(std::string(what) + ": field does not belong to this mesh");
    }
}

NodalField sample_field(const Mesh& mesh, const std::function<double(const Point&)>& fn,
                        bool dirichlet) {
    std::vector<double> v;
    v.reserve(mesh.node_count());
    for (const Point& p : mesh.nodes()) v.push_back(fn(p));
    return NodalField(mesh, std::move(v), dirichlet);
}

}  // namespace plap
