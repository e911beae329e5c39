#include <gtest/gtest.h>

#include <atomic>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "osclab/experiments.hpp"

namespace {

using namespace osclab;

ProblemSpec small_spec() {
  ProblemSpec s;
  s.nx = s.ny = 8;
  return s;
}

TEST(Trend, Classification) {
  const std::vector<double> dec{0.3, 0.2, 0.1};
  const std::vector<double> flat{1e-13, 3e-12, 2e-13};
  const std::vector<double> bump{0.3, 0.4, 0.1};
  const std::vector<double> tie{0.2, 0.2};
  EXPECT_EQ(classify_trend(dec), Trend::StrictlyDecreasing);
  EXPECT_EQ(classify_trend(flat), Trend::Invariant);
  EXPECT_EQ(classify_trend(bump), Trend::NotDecreasing);
  EXPECT_EQ(classify_trend(tie), Trend::NotDecreasing);
  EXPECT_EQ(classify_trend(bump, 1.0), Trend::Invariant);
  EXPECT_STREQ(to_string(Trend::Invariant), "invariant");
}

TEST(Trend, LogLogSlope) {
  const std::vector<double> eps{0.2, 0.1, 0.05};
  const std::vector<double> lin{0.6, 0.3, 0.15};
  const std::vector<double> quad{0.04, 0.01, 0.0025};
  EXPECT_NEAR(log_log_slope(eps, lin), 1.0, 1e-12);
  EXPECT_NEAR(log_log_slope(eps, quad), 2.0, 1e-12);
  const std::vector<double> one{1.0, 0.0, 0.0};
  EXPECT_TRUE(std::isnan(log_log_slope(eps, one)));
}

TEST(Report, CsvLayoutAndVerdict) {
  StudyReport r;
  r.name = "demo";
  r.columns = {"x", "y"};
  r.add_row(0.1, {1.0, 2.5});
  r.add_row(0.0, {0.0, -1.0}, "ref");
  r.add_property("gate", true, "ok");
  r.add_property("info", false, "n/a", false);
  EXPECT_TRUE(r.passed());
  EXPECT_EQ(summary_line(r), "demo: PASS (1/1 gating properties)");
  std::ostringstream out;
  write_csv(out, r);
  EXPECT_EQ(out.str(),
            "epsilon,x,y,verdict\n"
            "1.000000000000e-01,1.000000000000e+00,2.500000000000e+00,pass\n"
            "0.000000000000e+00,0.000000000000e+00,-1.000000000000e+00,ref\n");
  EXPECT_EQ(r.column("y"), 1);
  EXPECT_THROW(r.column("z"), std::out_of_range);
  r.add_property("bad", false, "x");
  EXPECT_FALSE(r.passed());
  EXPECT_EQ(summary_line(r), "demo: FAIL (1/2 gating properties)");
}

TEST(ParallelFor, CoversEveryIndexOnce) {
  for (int threads : {1, 2, 7}) {
    std::vector<std::atomic<int>> hits(50);
    parallel_for(50, threads, [&](int i) { ++hits[i]; });
    for (auto& h : hits) EXPECT_EQ(h.load(), 1);
  }
}

TEST(ParallelFor, RethrowsLowestFailingIndex) {
  try {
    parallel_for(20, 4, [](int i) {
      if (i == 13 || i == 5) throw std::runtime_error(std::to_string(i));
    });
    FAIL();
  } catch (const std::runtime_error& e) {
    EXPECT_STREQ(e.what(), "5");
  }
}

TEST(Boundary, ExactAtWholePeriods) {
  // 1/eps = m pi puts whole periods of cos^2 on [0, 1].
  for (int m : {1, 3, 10}) {
    const double eps = 1.0 / (m * std::numbers::pi);
    EXPECT_LT(boundary_average_error(eps, [](double) { return 1.0; }), 1e-12) << m;
  }
  EXPECT_GT(boundary_average_error(0.1, [](double) { return 1.0; }), 1e-3);
}

TEST(Boundary, StudyRatesNearOne) {
  const std::vector<double> grid{0.2, 0.1, 0.05, 0.025};
  const StudyReport r = boundary_average_study(grid);
  EXPECT_EQ(r.rows.size(), 4u);
  EXPECT_TRUE(r.passed());
}

TEST(Resolvent, ZeroRightHandSide) {
  const ProblemSpec spec = small_spec();
  const StructuredMesh mesh(spec.nx, spec.ny);
  const NodalField zero{Vector(mesh.num_nodes(), 0.0)};
  const std::vector<double> grid{0.2, 0.1};
  const StudyReport r = resolvent_convergence_study(spec, grid, -1.0, zero);
  for (double e : r.column_values("err_l2")) EXPECT_EQ(e, 0.0);
  for (double e : r.column_values("err_h1")) EXPECT_EQ(e, 0.0);
}

TEST(Resolvent, ConstantRightHandSide) {
  const ProblemSpec spec = small_spec();
  const StructuredMesh mesh(spec.nx, spec.ny);
  const NodalField one{Vector(mesh.num_nodes(), 1.0)};
  const std::vector<double> grid{0.2, 0.1};
  const StudyReport r = resolvent_convergence_study(spec, grid, -1.0, one);
  ASSERT_EQ(r.rows.size(), 3u);
  EXPECT_NEAR(r.column_values("u_min").back(), 2.0 / 3.0, 1e-9);
  EXPECT_NEAR(r.column_values("u_max").back(), 2.0 / 3.0, 1e-9);
  EXPECT_TRUE(r.passed());
}

TEST(Studies, ThreadCountDoesNotChangeOutput) {
  const ProblemSpec spec = small_spec();
  const StructuredMesh mesh(spec.nx, spec.ny);
  const NodalField f = interpolate(mesh, [](Point p) { return p.x2; });
  const std::vector<double> grid{0.2, 0.1, 0.05};
  auto csv = [&](int threads) {
    std::ostringstream out;
    write_csv(out, resolvent_convergence_study(spec, grid, -1.0, f, {threads}));
    write_csv(out, eigenvalue_convergence_study(spec, grid, 2, {threads}));
    return out.str();
  };
  EXPECT_EQ(csv(1), csv(3));
}

TEST(Semidistance, OneSided) {
  const SparseOperator id = SparseOperator::from_triplets(1, {{0, 0, 1.0}});
  const std::vector<Vector> a{{0.0}, {1.0}};
  const std::vector<Vector> b{{0.0}, {1.0}, {5.0}};
  EXPECT_EQ(semidistance(a, b, id), 0.0);
  EXPECT_EQ(semidistance(b, a, id), 4.0);
}

TEST(Attractor, InitialConditions) {
  const StructuredMesh mesh(4, 4);
  const auto ics = attractor_initial_conditions(mesh);
  ASSERT_EQ(ics.size(), 12u);
  EXPECT_NEAR(ics[0].values[0], -0.5 + 0.2, 1e-15);
}

}  // namespace
