#include "osclab/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "osclab/errors.hpp"

namespace osclab {

StructuredMesh::StructuredMesh(int nx, int ny) : nx_(nx), ny_(ny) {
  if (nx < 2 || ny < 2) {
    std::ostringstream msg;
    msg << "mesh needs nx, ny >= 2, got " << nx << " x " << ny;
    throw InvalidMeshSize(msg.str());
  }
  edges_.reserve(2 * (nx + ny));
  for (int i = 0; i < nx; ++i) {
    edges_.push_back({{node(i, ny), node(i + 1, ny)}, Side::I1, i * hx(), (i + 1) * hx()});
  }
  for (int j = 0; j < ny; ++j) {
    edges_.push_back({{node(nx, j), node(nx, j + 1)}, Side::I2, j * hy(), (j + 1) * hy()});
  }
  for (int i = 0; i < nx; ++i) {
    edges_.push_back({{node(i, 0), node(i + 1, 0)}, Side::I3, i * hx(), (i + 1) * hx()});
  }
  for (int j = 0; j < ny; ++j) {
    edges_.push_back({{node(0, j), node(0, j + 1)}, Side::I4, j * hy(), (j + 1) * hy()});
  }
}

Point StructuredMesh::node_coords(int n) const noexcept {
  const int i = n % (nx_ + 1);
  const int j = n / (nx_ + 1);
  return {i * hx(), j * hy()};
}

std::array<int, 4> StructuredMesh::element_nodes(int e) const noexcept {
  const int i = e % nx_;
  const int j = e / nx_;
  return {node(i, j), node(i + 1, j), node(i + 1, j + 1), node(i, j + 1)};
}

Point StructuredMesh::element_origin(int e) const noexcept {
  return {(e % nx_) * hx(), (e / nx_) * hy()};
}

bool StructuredMesh::is_boundary_node(int n) const noexcept {
  const int i = n % (nx_ + 1);
  const int j = n / (nx_ + 1);
  return i == 0 || j == 0 || i == nx_ || j == ny_;
}

QuadratureRule oscillation_resolving_rule(const DiffeoFamily& fam, const StructuredMesh& mesh,
                                          std::int64_t max_points) {
  QuadratureRule rule;
  rule.gauss_order = 3;
  if (!fam.is_limit()) {
    const double max_width = std::numbers::pi * fam.epsilon() / 4.0;
    rule.panels_per_element =
        std::max(1, static_cast<int>(std::ceil(mesh.hx() / max_width - 1e-12)));
  }
  const std::int64_t points = static_cast<std::int64_t>(mesh.num_elements()) *
                              rule.panels_per_element * rule.gauss_order * rule.gauss_order;
  if (points > max_points) {
    std::ostringstream msg;
    msg << "eps = " << fam.epsilon() << " on a " << mesh.nx() << "x" << mesh.ny()
        << " mesh needs " << points << " quadrature points (cap " << max_points << ")";
    throw QuadratureBudgetExceeded(msg.str());
  }
  return rule;
}

std::vector<ReferencePoint> reference_points(const QuadratureRule& rule) {
  const GaussRule1D g = gauss_legendre(rule.gauss_order);
  const int panels = rule.panels_per_element;
  std::vector<ReferencePoint> pts;
  pts.reserve(static_cast<std::size_t>(panels) * g.size() * g.size());
  for (int p = 0; p < panels; ++p) {
    for (int a = 0; a < g.size(); ++a) {
      const double xi = (p + g.nodes[a]) / panels;
      for (int b = 0; b < g.size(); ++b) {
        const double eta = g.nodes[b];
        ReferencePoint q;
        q.xi = xi;
        q.eta = eta;
        q.weight = g.weights[a] * g.weights[b] / panels;
        q.shape = {(1 - xi) * (1 - eta), xi * (1 - eta), xi * eta, (1 - xi) * eta};
        q.dshape = {{{-(1 - eta), -(1 - xi)}, {1 - eta, -xi}, {eta, xi}, {-eta, 1 - xi}}};
        pts.push_back(q);
      }
    }
  }
  return pts;
}

std::vector<EdgePoint> edge_points(const QuadratureRule& rule, Side side) {
  const GaussRule1D g = gauss_legendre(rule.gauss_order);
  const bool along_x1 = side == Side::I1 || side == Side::I3;
  const int panels = along_x1 ? rule.panels_per_element : 1;
  std::vector<EdgePoint> pts;
  pts.reserve(static_cast<std::size_t>(panels) * g.size());
  for (int p = 0; p < panels; ++p) {
    for (int a = 0; a < g.size(); ++a) {
      pts.push_back({(p + g.nodes[a]) / panels, g.weights[a] / panels});
    }
  }
  return pts;
}

}  // namespace osclab
