#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <numbers>

#include "osclab/errors.hpp"
#include "osclab/mesh.hpp"
#include "osclab/quadrature.hpp"

namespace {

using namespace osclab;

TEST(Mesh, CountsForSmallMeshes) {
  const StructuredMesh m(2, 2);
  EXPECT_EQ(m.num_nodes(), 9);
  EXPECT_EQ(m.num_elements(), 4);
  EXPECT_EQ(m.boundary_edges().size(), 8u);
  std::map<Side, int> per_side;
  for (const auto& e : m.boundary_edges()) ++per_side[e.side];
  for (Side s : {Side::I1, Side::I2, Side::I3, Side::I4}) EXPECT_EQ(per_side[s], 2);

  const StructuredMesh r(4, 2);
  EXPECT_EQ(r.num_nodes(), 15);
  EXPECT_EQ(r.num_elements(), 8);
}

TEST(Mesh, AreasSumToOne) {
  for (auto [nx, ny] : {std::pair{2, 2}, {3, 7}, {32, 32}, {17, 5}}) {
    const StructuredMesh m(nx, ny);
    double area = 0.0;
    for (int e = 0; e < m.num_elements(); ++e) area += m.element_area(e);
    EXPECT_NEAR(area, 1.0, 1e-14);
  }
}

TEST(Mesh, RowMajorCounterclockwise) {
  const StructuredMesh m(3, 2);
  EXPECT_EQ(m.node(2, 1), 6);
  const auto n = m.element_nodes(4);  // i = 1, j = 1
  EXPECT_EQ(n[0], m.node(1, 1));
  EXPECT_EQ(n[1], m.node(2, 1));
  EXPECT_EQ(n[2], m.node(2, 2));
  EXPECT_EQ(n[3], m.node(1, 2));
}

TEST(Mesh, BoundaryTagsMatchCoordinates) {
  const StructuredMesh m(5, 4);
  for (const auto& e : m.boundary_edges()) {
    for (int k = 0; k < 2; ++k) {
      const Point p = m.node_coords(e.nodes[k]);
      const double s = k == 0 ? e.s0 : e.s1;
      switch (e.side) {
        case Side::I1: EXPECT_EQ(p.x2, 1.0); EXPECT_NEAR(p.x1, s, 1e-15); break;
        case Side::I2: EXPECT_EQ(p.x1, 1.0); EXPECT_NEAR(p.x2, s, 1e-15); break;
        case Side::I3: EXPECT_EQ(p.x2, 0.0); EXPECT_NEAR(p.x1, s, 1e-15); break;
        case Side::I4: EXPECT_EQ(p.x1, 0.0); EXPECT_NEAR(p.x2, s, 1e-15); break;
      }
      EXPECT_TRUE(m.is_boundary_node(e.nodes[k]));
    }
  }
  EXPECT_FALSE(m.is_boundary_node(m.node(2, 2)));
}

TEST(Mesh, RejectsTinyMeshes) {
  EXPECT_THROW(StructuredMesh(1, 4), InvalidMeshSize);
  EXPECT_THROW(StructuredMesh(4, 0), InvalidMeshSize);
}

TEST(Quadrature, GaussRuleExactness) {
  for (int n = 2; n <= 10; ++n) {
    const auto g = gauss_legendre(n);
    for (int d = 0; d <= 2 * n - 1; ++d) {
      double s = 0.0;
      for (std::size_t k = 0; k < g.nodes.size(); ++k) s += g.weights[k] * std::pow(g.nodes[k], d);
      EXPECT_NEAR(s, 1.0 / (d + 1), 1e-14) << "n=" << n << " d=" << d;
    }
  }
}

TEST(Quadrature, RuleIntegratesBivariateMonomials) {
  const StructuredMesh m(3, 4);
  for (int panels : {1, 3}) {
    const QuadratureRule rule{panels, 3};
    for (int p = 0; p <= 5; ++p) {
      for (int q = 0; q <= 5; ++q) {
        const double v = integrate(m, rule, [p, q](Point x) {
          return std::pow(x.x1, p) * std::pow(x.x2, q);
        });
        EXPECT_NEAR(v, 1.0 / ((p + 1) * (q + 1)), 1e-14);
      }
    }
  }
}

TEST(Quadrature, AdaptiveIntegration) {
  const double v = integrate_adaptive([](double x) { return std::exp(x); }, 0.0, 1.0, 1e-13);
  EXPECT_NEAR(v, std::exp(1.0) - 1.0, 1e-13);
}

TEST(Quadrature, OscillationResolvingPanels) {
  const StructuredMesh m(32, 32);
  EXPECT_EQ(oscillation_resolving_rule(DiffeoFamily::identity(), m).panels_per_element, 1);
  EXPECT_EQ(oscillation_resolving_rule(DiffeoFamily::perturbed(0.1), m).panels_per_element, 1);
  const auto r = oscillation_resolving_rule(DiffeoFamily::perturbed(0.01), m);
  EXPECT_EQ(r.panels_per_element, 4);
  EXPECT_EQ(r.gauss_order, 3);
}

TEST(Quadrature, BudgetIsEnforced) {
  const StructuredMesh m(32, 32);
  EXPECT_THROW(oscillation_resolving_rule(DiffeoFamily::perturbed(0.001), m, 100000),
               QuadratureBudgetExceeded);
}

TEST(Quadrature, UnitAndOscillatoryIntegrals) {
  const StructuredMesh m(32, 32);
  for (double eps : {0.1, 0.05, 0.02}) {
    const auto rule = oscillation_resolving_rule(DiffeoFamily::perturbed(eps), m);
    EXPECT_NEAR(integrate(m, rule, [](Point) { return 1.0; }), 1.0, 1e-13);
    const double s = integrate(m, rule, [eps](Point x) { return std::sin(x.x1 / eps); });
    EXPECT_NEAR(s, eps * (1.0 - std::cos(1.0 / eps)), 1e-8) << eps;
  }
}

}  // namespace
