#include "osclab/assembly.hpp"

#include <cmath>
#include <stdexcept>

namespace osclab {

FieldQuadrature::FieldQuadrature(const DiffeoFamily& fam, const StructuredMesh& mesh,
                                 const QuadratureRule& rule)
    : fam_(fam), mesh_(mesh), rule_(rule) {
  const auto ref = reference_points(rule);
  per_element_ = static_cast<int>(ref.size());
  const double hx = mesh.hx();
  const double hy = mesh.hy();
  points_.reserve(static_cast<std::size_t>(mesh.num_elements()) * ref.size());
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const Point o = mesh.element_origin(e);
    for (const auto& r : ref) {
      QuadraturePoint qp;
      qp.x = {o.x1 + r.xi * hx, o.x2 + r.eta * hy};
      const double det = fam.jacobian_det(qp.x);
      const InvTransposeJacobian b = fam.inv_transpose_jacobian(qp.x);
      qp.weight_det = r.weight * hx * hy * det;
      qp.shape = r.shape;
      for (int k = 0; k < 4; ++k) {
        qp.grad[k] = b.apply({r.dshape[k][0] / hx, r.dshape[k][1] / hy});
      }
      points_.push_back(qp);
    }
  }
  for (const auto& edge : mesh.boundary_edges()) {
    const double len = edge.s1 - edge.s0;
    for (const auto& ep : edge_points(rule, edge.side)) {
      BoundaryQuadraturePoint bp;
      bp.nodes = edge.nodes;
      bp.shape = {1.0 - ep.t, ep.t};
      bp.s = edge.s0 + ep.t * len;
      bp.side = edge.side;
      bp.weight_jac = ep.weight * len * fam.boundary_jacobian(edge.side, bp.s);
      boundary_.push_back(bp);
    }
  }
}

namespace {

using Local = std::array<std::array<double, 4>, 4>;

void scatter(const std::array<int, 4>& nodes, const Local& local, std::vector<Triplet>& out) {
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) out.push_back({nodes[i], nodes[j], local[i][j]});
  }
}

SparseOperator assemble_volume(const FieldQuadrature& q, double grad_coef, double mass_coef) {
  const StructuredMesh& mesh = q.mesh();
  std::vector<Triplet> trips;
  trips.reserve(static_cast<std::size_t>(mesh.num_elements()) * 16);
  for (int e = 0; e < mesh.num_elements(); ++e) {
    Local local{};
    for (const auto& qp : q.element_points(e)) {
      for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) {
          const double g = qp.grad[i][0] * qp.grad[j][0] + qp.grad[i][1] * qp.grad[j][1];
          local[i][j] += qp.weight_det * (grad_coef * g + mass_coef * qp.shape[i] * qp.shape[j]);
        }
      }
    }
    scatter(mesh.element_nodes(e), local, trips);
  }
  return SparseOperator::from_triplets(mesh.num_nodes(), std::move(trips));
}

}  // namespace

SparseOperator assemble_stiffness_adapted(const FieldQuadrature& q, double a) {
  return assemble_volume(q, 1.0, a);
}

SparseOperator assemble_stiffness_adapted(const DiffeoFamily& fam, const StructuredMesh& mesh,
                                          const QuadratureRule& rule, double a) {
  return assemble_stiffness_adapted(FieldQuadrature(fam, mesh, rule), a);
}

SparseOperator assemble_mass(const FieldQuadrature& q) { return assemble_volume(q, 0.0, 1.0); }

SparseOperator assemble_mass(const DiffeoFamily& fam, const StructuredMesh& mesh,
                             const QuadratureRule& rule) {
  return assemble_mass(FieldQuadrature(fam, mesh, rule));
}

SparseOperator assemble_boundary_mass(const FieldQuadrature& q) {
  std::vector<Triplet> trips;
  trips.reserve(q.boundary_points().size() * 4);
  for (const auto& bp : q.boundary_points()) {
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) {
        trips.push_back({bp.nodes[i], bp.nodes[j], bp.weight_jac * bp.shape[i] * bp.shape[j]});
      }
    }
  }
  return SparseOperator::from_triplets(q.mesh().num_nodes(), std::move(trips));
}

SparseOperator assemble_boundary_mass(const DiffeoFamily& fam, const StructuredMesh& mesh,
                                      const QuadratureRule& rule) {
  return assemble_boundary_mass(FieldQuadrature(fam, mesh, rule));
}

SparseOperator assemble_h1_gram(const StructuredMesh& mesh) {
  return assemble_stiffness_adapted(DiffeoFamily::identity(), mesh, QuadratureRule{}, 1.0);
}

namespace {

/// Shared loop for the unweighted (canonical-metric) forms. coef(x) returns
/// the seven coefficients {div1, div2, div3, div4, div5, l1, l2} at x.
template <class Coefficients>
SparseOperator assemble_canonical_like(const StructuredMesh& mesh, const QuadratureRule& rule,
                                       double a, unsigned terms, Coefficients&& coef) {
  const auto ref = reference_points(rule);
  const double hx = mesh.hx();
  const double hy = mesh.hy();
  std::vector<Triplet> trips;
  trips.reserve(static_cast<std::size_t>(mesh.num_elements()) * 16);
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const Point o = mesh.element_origin(e);
    Local local{};
    for (const auto& r : ref) {
      const Point x{o.x1 + r.xi * hx, o.x2 + r.eta * hy};
      const std::array<double, 7> c = coef(x);
      const double w = r.weight * hx * hy;
      for (int i = 0; i < 4; ++i) {      // test psi
        const double p1 = r.dshape[i][0] / hx;
        const double p2 = r.dshape[i][1] / hy;
        const double p0 = r.shape[i];
        for (int j = 0; j < 4; ++j) {    // trial u
          const double u1 = r.dshape[j][0] / hx;
          const double u2 = r.dshape[j][1] / hy;
          double v = 0.0;
          if (terms & kDiv1) v += c[0] * u1 * p1;
          if (terms & kDiv2) v += c[1] * u2 * p1;
          if (terms & kDiv3) v += c[2] * u1 * p2;
          if (terms & kDiv4) v += c[3] * u2 * p2;
          if (terms & kDiv5) v += c[4] * u2 * p2;
          if (terms & kL1) v += c[5] * u1 * p0;
          if (terms & kL2) v += c[6] * u2 * p0;
          if (terms & kCanonicalMass) v += a * r.shape[j] * p0;
          local[i][j] += w * v;
        }
      }
    }
    scatter(mesh.element_nodes(e), local, trips);
  }
  return SparseOperator::from_triplets(mesh.num_nodes(), std::move(trips));
}

}  // namespace

SparseOperator assemble_stiffness_canonical(double eps, const StructuredMesh& mesh,
                                            const QuadratureRule& rule, double a,
                                            unsigned terms) {
  if (!(eps > 0.0)) throw std::invalid_argument("canonical-metric operator needs eps > 0");
  return assemble_canonical_like(mesh, rule, a, terms, [eps](Point x) {
    const double s = std::sin(x.x1 / eps);
    const double c = std::cos(x.x1 / eps);
    const double j = 1.0 + eps * s;
    const double cross = -x.x2 * c / j;
    return std::array<double, 7>{1.0,
                                 cross,
                                 cross,
                                 cross * cross,
                                 1.0 / (j * j),
                                 -c / j,
                                 x.x2 * c * c / (j * j)};
  });
}

SparseOperator assemble_limit_anomalous(const StructuredMesh& mesh, const QuadratureRule& rule,
                                        double a) {
  return assemble_canonical_like(mesh, rule, a, kAllCanonicalTerms, [](Point x) {
    return std::array<double, 7>{1.0, 0.0, 0.0, 0.5 * x.x2 * x.x2, 1.0, 0.0, 0.5 * x.x2};
  });
}

PaperFamilyExtraTerms paper_family_extra_terms(double eps, const StructuredMesh& mesh,
                                               const QuadratureRule& rule,
                                               std::span<const double> u,
                                               std::span<const double> psi) {
  if (!(eps > 0.0)) throw std::invalid_argument("paper_family_extra_terms needs eps > 0");
  const auto ref = reference_points(rule);
  const double hx = mesh.hx();
  const double hy = mesh.hy();
  const double log_eps = std::log(eps);
  PaperFamilyExtraTerms out;
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const Point o = mesh.element_origin(e);
    const auto nodes = mesh.element_nodes(e);
    for (const auto& r : ref) {
      const Point x{o.x1 + r.xi * hx, o.x2 + r.eta * hy};
      double u1 = 0.0, u2 = 0.0, p = 0.0;
      for (int k = 0; k < 4; ++k) {
        u1 += u[nodes[k]] * r.dshape[k][0] / hx;
        u2 += u[nodes[k]] * r.dshape[k][1] / hy;
        p += psi[nodes[k]] * r.shape[k];
      }
      const double c = std::cos(x.x1 / eps);
      const double w = r.weight * hx * hy;
      out.first += w * (-x.x2 * std::exp((1.0 - x.x2) * log_eps) * log_eps * c * u1 * p);
      out.second +=
          w * (x.x2 * x.x2 * std::exp((2.0 - 2.0 * x.x2) * log_eps) * log_eps * c * c * u2 * p);
    }
  }
  return out;
}

}  // namespace osclab
