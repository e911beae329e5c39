#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "osclab/geometry.hpp"
#include "osclab/quadrature.hpp"

namespace osclab {

/// One boundary edge of the lattice. s0 < s1 are the arclength parameters of
/// the edge endpoints along its side (x1 on I1/I3, x2 on I2/I4); nodes[k]
/// sits at parameter s_k.
struct BoundaryEdge {
  std::array<int, 2> nodes{};
  Side side = Side::I1;
  double s0 = 0.0;
  double s1 = 0.0;
};

/// nx-by-ny lattice of Q1 elements on the unit square.
///
/// Nodes are numbered row-major, node(i, j) = j * (nx + 1) + i with i along x1.
/// Element e = j * nx + i has counterclockwise nodes
/// (i, j), (i + 1, j), (i + 1, j + 1), (i, j + 1).
class StructuredMesh {
 public:
  /// Throws InvalidMeshSize unless nx, ny >= 2.
  StructuredMesh(int nx, int ny);

  int nx() const noexcept { return nx_; }
  int ny() const noexcept { return ny_; }
  double hx() const noexcept { return 1.0 / nx_; }
  double hy() const noexcept { return 1.0 / ny_; }

  int num_nodes() const noexcept { return (nx_ + 1) * (ny_ + 1); }
  int num_elements() const noexcept { return nx_ * ny_; }

  int node(int i, int j) const noexcept { return j * (nx_ + 1) + i; }
  Point node_coords(int n) const noexcept;

  std::array<int, 4> element_nodes(int e) const noexcept;
  /// Lower-left corner of element e.
  Point element_origin(int e) const noexcept;
  double element_area(int /*e*/) const noexcept { return hx() * hy(); }

  const std::vector<BoundaryEdge>& boundary_edges() const noexcept { return edges_; }
  bool is_boundary_node(int n) const noexcept;

 private:
  int nx_;
  int ny_;
  std::vector<BoundaryEdge> edges_;
};

/// Per-element quadrature: the x1 extent of every element is split into
/// panels_per_element panels, each carrying a gauss_order-point Gauss rule
/// in both directions. Boundary edges along x1 (I1, I3) use the same panels.
struct QuadratureRule {
  int panels_per_element = 1;
  int gauss_order = 3;
};

/// Default cap on total interior quadrature points.
inline constexpr std::int64_t kDefaultQuadratureBudget = 20'000'000;

/// Panels chosen so each spans at most pi * eps / 4 in x1 (8 per period of
/// sin(x1/eps)), order 3. eps = 0 gives one panel. Throws
/// QuadratureBudgetExceeded when the point count would exceed max_points.
QuadratureRule oscillation_resolving_rule(const DiffeoFamily& fam, const StructuredMesh& mesh,
                                          std::int64_t max_points = kDefaultQuadratureBudget);

/// Reference-element quadrature points for a rule: local coordinates in
/// [0,1]^2 with weights summing to 1 and Q1 shape data.
struct ReferencePoint {
  double xi = 0.0;
  double eta = 0.0;
  double weight = 0.0;
  std::array<double, 4> shape{};
  std::array<std::array<double, 2>, 4> dshape{};  ///< d/dxi, d/deta
};

std::vector<ReferencePoint> reference_points(const QuadratureRule& rule);

/// Edge quadrature on [0,1] for an edge along side: values of the two edge
/// shape functions (1 - t, t) with weights summing to 1.
struct EdgePoint {
  double t = 0.0;
  double weight = 0.0;
};

std::vector<EdgePoint> edge_points(const QuadratureRule& rule, Side side);

/// int_Omega fn(x) dx with the rule over the mesh.
template <class Fn>
double integrate(const StructuredMesh& mesh, const QuadratureRule& rule, Fn&& fn) {
  const auto pts = reference_points(rule);
  double total = 0.0;
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const Point o = mesh.element_origin(e);
    double local = 0.0;
    for (const auto& q : pts) {
      local += q.weight * fn(Point{o.x1 + q.xi * mesh.hx(), o.x2 + q.eta * mesh.hy()});
    }
    total += local * mesh.element_area(e);
  }
  return total;
}

}  // namespace osclab
