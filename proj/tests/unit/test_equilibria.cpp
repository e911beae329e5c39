#include <gtest/gtest.h>

#include <cmath>

#include "osclab/equilibria.hpp"

namespace {

using namespace osclab;

ProblemSpec cubic_only() {
  ProblemSpec s;
  s.g.kind = BoundaryNonlinearity::Kind::Zero;
  return s;
}

ProblemSpec linear_only() {
  ProblemSpec s;
  s.f.kind = InteriorNonlinearity::Kind::Zero;
  s.g.kind = BoundaryNonlinearity::Kind::Zero;
  s.c0 = 0.0;
  return s;
}

NodalField constant(const StructuredMesh& mesh, double c) {
  return interpolate(mesh, [c](Point) { return c; });
}

TEST(Linearization, ZeroNonlinearityIsStiffness) {
  const StructuredMesh mesh(8, 8);
  const Semiflow flow(linear_only(), DiffeoFamily::perturbed(0.1), mesh);
  const auto l = assemble_linearization(flow, constant(mesh, 0.3).values);
  const auto& a = flow.stiffness();
  ASSERT_EQ(l.nonzeros(), a.nonzeros());
  for (std::size_t k = 0; k < a.nonzeros(); ++k) EXPECT_EQ(l.values()[k], a.values()[k]);
}

TEST(Linearization, ConstantStateSpectra) {
  const StructuredMesh mesh(16, 16);
  const Semiflow flow(cubic_only(), DiffeoFamily::identity(), mesh);
  const auto at0 = linearization_spectrum(flow, constant(mesh, 0.0).values, 2);
  EXPECT_NEAR(at0[0], -0.5, 0.005);
  const auto at1 = linearization_spectrum(flow, constant(mesh, std::sqrt(0.5)).values, 2);
  EXPECT_NEAR(at1[0], 1.0, 0.01);
}

TEST(Linearization, Symmetric) {
  const StructuredMesh mesh(8, 8);
  const Semiflow flow(ProblemSpec{}, DiffeoFamily::perturbed(0.05), mesh);
  const NodalField u = interpolate(mesh, [](Point p) { return 0.8 * std::sin(3 * p.x1 + p.x2); });
  EXPECT_LT(assemble_linearization(flow, u.values).max_asymmetry(), 1e-12);
}

TEST(Newton, ConstantBranches) {
  const StructuredMesh mesh(16, 16);
  const Semiflow flow(cubic_only(), DiffeoFamily::identity(), mesh);
  const auto plus = newton_equilibria(flow, constant(mesh, 0.6));
  for (double v : plus.state.values) ASSERT_NEAR(v, 0.7071068, 1e-7);
  EXPECT_EQ(plus.morse_index, 0);
  EXPECT_TRUE(plus.hyperbolic);
  EXPECT_LE(plus.residual, 1e-10);

  const auto zero = newton_equilibria(flow, constant(mesh, 0.01));
  for (double v : zero.state.values) ASSERT_NEAR(v, 0.0, 1e-8);
  EXPECT_EQ(zero.morse_index, 1);
  EXPECT_NEAR(zero.spectrum_head[0], -0.5, 0.005);
  EXPECT_GT(zero.spectrum_head[1], 0.0);

  const auto minus = newton_equilibria(flow, constant(mesh, -0.6));
  for (double v : minus.state.values) ASSERT_NEAR(v, -0.7071068, 1e-7);
}

TEST(Newton, FindEquilibriaIsOddSymmetric) {
  const StructuredMesh mesh(16, 16);
  const Semiflow flow(ProblemSpec{}, DiffeoFamily::perturbed(0.1), mesh);
  const auto eqs = find_equilibria(flow, equilibrium_initial_guesses(flow.spec(), mesh));
  ASSERT_GE(eqs.size(), 3u);
  for (const auto& e : eqs) {
    Vector neg(e.state.values);
    for (double& v : neg) v = -v;
    EXPECT_LT(dual_norm(flow, flow.residual(neg)), 1e-8);
  }
}

TEST(Newton, EquilibriumIsStationaryUnderEvolution) {
  const StructuredMesh mesh(16, 16);
  const Semiflow flow(ProblemSpec{}, DiffeoFamily::perturbed(0.1), mesh);
  const auto e = newton_equilibria(flow, constant(mesh, 0.6));
  const Trajectory t = evolve(flow, e.state, 1.0, flow.spec().dt);
  Vector d(e.state.values);
  for (std::size_t i = 0; i < d.size(); ++i) d[i] -= t.states.back().values[i];
  EXPECT_LT(flow.h1_norm(d), 1e-6);
  const NodalField one = flow.imex_step(e.state, 0.02);
  for (std::size_t i = 0; i < d.size(); ++i) EXPECT_NEAR(one.values[i], e.state.values[i], 1e-8);
}

TEST(Continuation, ZeroNonlinearityKeepsZero) {
  const StructuredMesh mesh(8, 8);
  const ProblemSpec spec = linear_only();
  const Semiflow flow(spec, DiffeoFamily::identity(), mesh);
  const auto eqs = find_equilibria(flow, equilibrium_initial_guesses(spec, mesh));
  ASSERT_EQ(eqs.size(), 1u);
  for (double v : eqs[0].state.values) ASSERT_NEAR(v, 0.0, 1e-12);
  const double eps[] = {0.05, 0.1, 0.2};
  for (const auto& p : continue_in_epsilon(spec, mesh, eps, eqs[0])) {
    EXPECT_FALSE(p.lost);
    EXPECT_LT(p.distance_l2, 1e-12);
    EXPECT_LT(p.distance_h1, 1e-12);
  }
}

TEST(Continuation, MorseIndexConstantAlongBranch) {
  const StructuredMesh mesh(16, 16);
  const ProblemSpec spec = cubic_only();
  const Semiflow flow(spec, DiffeoFamily::identity(), mesh);
  const double eps[] = {0.05, 0.1, 0.2};
  for (double c : {0.6, 0.01}) {
    const auto e0 = newton_equilibria(flow, constant(mesh, c));
    for (const auto& p : continue_in_epsilon(spec, mesh, eps, e0)) {
      ASSERT_FALSE(p.lost);
      EXPECT_EQ(p.record.morse_index, e0.morse_index);
    }
  }
}

TEST(Robin, ReducesToGroundEigenvalue) {
  const StructuredMesh mesh(16, 16);
  ProblemSpec spec;
  spec.d0 = 0.0;
  spec.c0 = 0.0;
  const auto fam = DiffeoFamily::perturbed(0.1);
  EXPECT_NEAR(robin_first_eigenvalue(spec, fam, mesh, oscillation_resolving_rule(fam, mesh)), 0.5,
              0.005);
}

TEST(Robin, RayleighBoundAndContinuity) {
  const StructuredMesh mesh(16, 16);
  ProblemSpec spec;  // a - c0 = 1, d0 = 0.1
  const double l0 = robin_first_eigenvalue(spec, DiffeoFamily::identity(), mesh, {});
  EXPECT_LE(l0, 1.0 - 0.1 * 4.2160067 + 1e-9);
  EXPECT_GT(l0, 0.0);
  for (double eps : {0.05, 0.025}) {
    const auto fam = DiffeoFamily::perturbed(eps);
    const double l = robin_first_eigenvalue(spec, fam, mesh, oscillation_resolving_rule(fam, mesh));
    EXPECT_NEAR(l, l0, 0.1 * l0) << eps;
  }
}

}  // namespace
