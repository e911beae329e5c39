#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "osclab/geometry.hpp"
#include "osclab/mesh.hpp"
#include "osclab/sparse.hpp"

namespace osclab {

/// A quadrature point of the adapted-metric forms with everything the
/// integrands need precomputed.
struct QuadraturePoint {
  Point x;
  double weight_det = 0.0;                       ///< w * |Jh_eps(x)|
  std::array<double, 4> shape{};                 ///< Q1 shape values
  std::array<std::array<double, 2>, 4> grad{};   ///< B grad(phi_k), B = (Jh)^{-T}
};

struct BoundaryQuadraturePoint {
  std::array<int, 2> nodes{};
  std::array<double, 2> shape{};
  double weight_jac = 0.0;  ///< w * |J_{dOmega} h_eps|
  double s = 0.0;
  Side side = Side::I1;
};

/// Quadrature data of one (family, mesh, rule) triple, shared by the
/// operators, loads, linearizations and the Lyapunov functional so that they
/// all see the same discrete integrals.
class FieldQuadrature {
 public:
  FieldQuadrature(const DiffeoFamily& fam, const StructuredMesh& mesh, const QuadratureRule& rule);

  const DiffeoFamily& family() const noexcept { return fam_; }
  const StructuredMesh& mesh() const noexcept { return mesh_; }
  const QuadratureRule& rule() const noexcept { return rule_; }

  int points_per_element() const noexcept { return per_element_; }
  std::span<const QuadraturePoint> element_points(int e) const noexcept {
    return {points_.data() + static_cast<std::size_t>(e) * per_element_,
            static_cast<std::size_t>(per_element_)};
  }
  std::span<const BoundaryQuadraturePoint> boundary_points() const noexcept {
    return boundary_;
  }

 private:
  DiffeoFamily fam_;
  StructuredMesh mesh_;
  QuadratureRule rule_;
  int per_element_ = 0;
  std::vector<QuadraturePoint> points_;
  std::vector<BoundaryQuadraturePoint> boundary_;
};

/// int (B grad u).(B grad v) |Jh| + a int u v |Jh|  (the operator A_eps).
SparseOperator assemble_stiffness_adapted(const FieldQuadrature& q, double a);
SparseOperator assemble_stiffness_adapted(const DiffeoFamily& fam, const StructuredMesh& mesh,
                                          const QuadratureRule& rule, double a);

/// int u v |Jh|  (M_eps).
SparseOperator assemble_mass(const FieldQuadrature& q);
SparseOperator assemble_mass(const DiffeoFamily& fam, const StructuredMesh& mesh,
                             const QuadratureRule& rule);

/// int_{dOmega} u v |J_{dOmega} h|  (B_eps); M_pi(p) on I1 at eps = 0.
SparseOperator assemble_boundary_mass(const FieldQuadrature& q);
SparseOperator assemble_boundary_mass(const DiffeoFamily& fam, const StructuredMesh& mesh,
                                      const QuadratureRule& rule);

/// Plain H^1 Gram matrix int grad u . grad v + u v on the unperturbed square.
SparseOperator assemble_h1_gram(const StructuredMesh& mesh);

/// Terms of the canonical-metric pull-back form for the linear profile
/// h_eps = (x1, x2 + x2 eps sin(x1/eps)); J = 1 + eps sin(x1/eps),
/// c = cos(x1/eps). Rows index the test function psi, columns the trial u.
enum CanonicalTerm : unsigned {
  kDiv1 = 1u << 0,  ///< u_1 psi_1
  kDiv2 = 1u << 1,  ///< (-x2 c / J) u_2 psi_1
  kDiv3 = 1u << 2,  ///< (-x2 c / J) u_1 psi_2
  kDiv4 = 1u << 3,  ///< (x2^2 c^2 / J^2) u_2 psi_2
  kDiv5 = 1u << 4,  ///< (1 / J^2) u_2 psi_2
  kL1 = 1u << 5,    ///< (-c / J) u_1 psi
  kL2 = 1u << 6,    ///< (x2 c^2 / J^2) u_2 psi
  kCanonicalMass = 1u << 7,  ///< a u psi (unweighted)
  kAllCanonicalTerms = 0xffu,
};

/// Canonical-metric operator (nonsymmetric). eps must be > 0.
SparseOperator assemble_stiffness_canonical(double eps, const StructuredMesh& mesh,
                                            const QuadratureRule& rule, double a,
                                            unsigned terms = kAllCanonicalTerms);

/// Weak* limit of the canonical-metric operator:
/// (-Delta + a) + 1/2 int x2^2 u_2 psi_2 + 1/2 int x2 u_2 psi. Nonsymmetric.
SparseOperator assemble_limit_anomalous(const StructuredMesh& mesh, const QuadratureRule& rule,
                                        double a);

/// The two extra integrals that the canonical-metric form of the
/// x2 eps^(2 - x2) family carries over the plain operator:
///   first  = int -x2 eps^(1 - x2) ln(eps) cos(x1/eps) u_1 psi
///   second = int x2^2 eps^(2 - 2 x2) ln(eps) cos^2(x1/eps) u_2 psi
struct PaperFamilyExtraTerms {
  double first = 0.0;
  double second = 0.0;
};

PaperFamilyExtraTerms paper_family_extra_terms(double eps, const StructuredMesh& mesh,
                                               const QuadratureRule& rule,
                                               std::span<const double> u,
                                               std::span<const double> psi);

}  // namespace osclab
