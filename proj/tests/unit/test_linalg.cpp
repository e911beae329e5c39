#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "osclab/assembly.hpp"
#include "osclab/linalg.hpp"
#include "osclab/mesh.hpp"

namespace {

using namespace osclab;

constexpr double kPi = std::numbers::pi;

// Gaussian elimination with partial pivoting on a dense copy.
Vector dense_solve(std::vector<std::vector<double>> a, Vector b) {
  const int n = static_cast<int>(b.size());
  for (int k = 0; k < n; ++k) {
    int p = k;
    for (int i = k + 1; i < n; ++i) {
      if (std::abs(a[i][k]) > std::abs(a[p][k])) p = i;
    }
    std::swap(a[k], a[p]);
    std::swap(b[k], b[p]);
    for (int i = k + 1; i < n; ++i) {
      const double m = a[i][k] / a[k][k];
      for (int j = k; j < n; ++j) a[i][j] -= m * a[k][j];
      b[i] -= m * b[k];
    }
  }
  Vector x(n);
  for (int i = n - 1; i >= 0; --i) {
    double s = b[i];
    for (int j = i + 1; j < n; ++j) s -= a[i][j] * x[j];
    x[i] = s / a[i][i];
  }
  return x;
}

struct RandomSystem {
  std::vector<std::vector<double>> dense;
  SparseOperator sparse;
};

// Banded random SPD: symmetric off-diagonals plus a dominant diagonal.
RandomSystem random_spd(int n, double diag_shift, unsigned seed) {
  std::mt19937 gen(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<std::vector<double>> d(n, std::vector<double>(n, 0.0));
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < std::min(n, i + 6); ++j) d[i][j] = d[j][i] = u(gen);
  }
  for (int i = 0; i < n; ++i) {
    double s = 0.0;
    for (int j = 0; j < n; ++j) s += std::abs(d[i][j]);
    d[i][i] = s + diag_shift + std::abs(u(gen));
  }
  std::vector<Triplet> t;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (d[i][j] != 0.0) t.push_back({i, j, d[i][j]});
    }
  }
  return {d, SparseOperator::from_triplets(n, t)};
}

TEST(Sparse, DuplicatesAreSummed) {
  const auto a = SparseOperator::from_triplets(2, {{0, 0, 1.0}, {0, 1, 2.0}, {0, 0, 3.0}, {1, 1, 5.0}});
  EXPECT_EQ(a.at(0, 0), 4.0);
  EXPECT_EQ(a.at(0, 1), 2.0);
  EXPECT_EQ(a.at(1, 0), 0.0);
  EXPECT_EQ(a.nonzeros(), 3u);
  EXPECT_EQ(a.max_asymmetry(), 2.0);
  const Vector y = a.apply(Vector{1.0, 1.0});
  EXPECT_EQ(y[0], 6.0);
  EXPECT_EQ(y[1], 5.0);
  const Vector z = a.apply_transpose(Vector{1.0, 1.0});
  EXPECT_EQ(z[1], 7.0);
  EXPECT_EQ(a.form(Vector{0.0, 1.0}, Vector{1.0, 0.0}), 0.0);
}

TEST(Cg, DiagonalSystemInOneIteration) {
  std::vector<Triplet> t;
  for (int i = 0; i < 10; ++i) t.push_back({i, i, 1.0});
  const auto id = SparseOperator::from_triplets(10, t);
  Vector b(10);
  for (int i = 0; i < 10; ++i) b[i] = i - 3.5;
  const auto r = cg_solve(id, b);
  EXPECT_EQ(r.report.iterations, 1);
  for (int i = 0; i < 10; ++i) EXPECT_NEAR(r.x[i], b[i], 1e-15);
}

TEST(Cg, ConstantResolventSolution) {
  const StructuredMesh mesh(16, 16);
  const auto fam = DiffeoFamily::identity();
  const QuadratureRule rule{};
  const auto m = assemble_mass(fam, mesh, rule);
  const auto am = SparseOperator::combine(1.0, assemble_stiffness_adapted(fam, mesh, rule, 0.5), 1.0, m);
  const auto r = cg_solve(am, m.row_sums(), {.tol = 1e-12});
  EXPECT_TRUE(r.report.converged);
  for (double v : r.x) EXPECT_NEAR(v, 1.0 / 1.5, 1e-10);
}

TEST(Cg, MatchesDenseOracle) {
  const auto sys = random_spd(50, 0.1, 7);
  std::mt19937 gen(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Vector b(50);
  for (double& v : b) v = u(gen);
  const auto r = cg_solve(sys.sparse, b, {.tol = 1e-12});
  EXPECT_LE(r.report.residual, 1e-12);
  const Vector ref = dense_solve(sys.dense, b);
  for (int i = 0; i < 50; ++i) EXPECT_NEAR(r.x[i], ref[i], 1e-9);
}

TEST(Cg, ReportsTrueResidualOnFailure) {
  const auto sys = random_spd(50, 0.0, 3);
  Vector b(50, 1.0);
  const auto r = cg_solve(sys.sparse, b, {.tol = 1e-14, .max_iterations = 2, .throw_on_failure = false});
  EXPECT_FALSE(r.report.converged);
  const Vector ax = sys.sparse.apply(r.x);
  double num = 0.0;
  for (int i = 0; i < 50; ++i) num += (b[i] - ax[i]) * (b[i] - ax[i]);
  EXPECT_NEAR(r.report.residual, std::sqrt(num) / norm2(b), 1e-12);
  EXPECT_THROW(cg_solve(sys.sparse, b, {.tol = 1e-14, .max_iterations = 2}), NotConverged);
}

TEST(Minres, SolvesIndefiniteSystem) {
  // Shift a random SPD matrix into indefiniteness and compare with the dense oracle.
  auto sys = random_spd(40, 0.1, 5);
  std::vector<Triplet> t;
  for (int i = 0; i < 40; ++i) {
    sys.dense[i][i] -= 3.0;
    for (int j = 0; j < 40; ++j) {
      if (sys.dense[i][j] != 0.0) t.push_back({i, j, sys.dense[i][j]});
    }
  }
  const auto a = SparseOperator::from_triplets(40, t);
  Vector b(40);
  for (int i = 0; i < 40; ++i) b[i] = std::sin(i + 1.0);
  const auto r = minres_solve(a, b, {.tol = 1e-11});
  EXPECT_TRUE(r.report.converged);
  const Vector ref = dense_solve(sys.dense, b);
  for (int i = 0; i < 40; ++i) EXPECT_NEAR(r.x[i], ref[i], 1e-7);
}

class NeumannSpectrum : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    const StructuredMesh mesh(64, 64);
    const auto fam = DiffeoFamily::identity();
    a_ = new SparseOperator(assemble_stiffness_adapted(fam, mesh, {}, 0.5));
    m_ = new SparseOperator(assemble_mass(fam, mesh, {}));
    pairs_ = new std::vector<EigenPair>(smallest_eigenpairs(*a_, *m_, 4));
  }
  static void TearDownTestSuite() {
    delete a_;
    delete m_;
    delete pairs_;
  }
  static SparseOperator* a_;
  static SparseOperator* m_;
  static std::vector<EigenPair>* pairs_;
};

SparseOperator* NeumannSpectrum::a_ = nullptr;
SparseOperator* NeumannSpectrum::m_ = nullptr;
std::vector<EigenPair>* NeumannSpectrum::pairs_ = nullptr;

TEST_F(NeumannSpectrum, SeparationOfVariablesValues) {
  const double expected[] = {0.5, 0.5 + kPi * kPi, 0.5 + kPi * kPi, 0.5 + 2 * kPi * kPi};
  ASSERT_EQ(pairs_->size(), 4u);
  for (int j = 0; j < 4; ++j) {
    EXPECT_NEAR((*pairs_)[j].value, expected[j], 0.01 * expected[j]) << j;
  }
  for (int j = 1; j < 4; ++j) EXPECT_LE((*pairs_)[j - 1].value, (*pairs_)[j].value);
}

TEST_F(NeumannSpectrum, GroundStateIsConstant) {
  const Vector& x = (*pairs_)[0].vector;
  const Vector ones(x.size(), 1.0);
  const double mean = m_->form(ones, x) / m_->form(ones, ones);
  Vector d(x);
  for (double& v : d) v -= mean;
  EXPECT_LT(std::sqrt(m_->form(d, d)), 1e-6);
  EXPECT_NEAR(m_->form(x, x), 1.0, 1e-10);
}

TEST_F(NeumannSpectrum, DegeneratePairIsOrthogonal) {
  const Vector& x = (*pairs_)[1].vector;
  const Vector& y = (*pairs_)[2].vector;
  EXPECT_LT(std::abs(m_->form(x, y)), 1e-8);
  EXPECT_NEAR(m_->form(y, y), 1.0, 1e-10);
}

TEST_F(NeumannSpectrum, ResidualsAndRayleighConsistency) {
  for (const auto& p : *pairs_) {
    EXPECT_LT(eigen_residual(*a_, *m_, p), 10 * 1e-8);
    const double q = a_->form(p.vector, p.vector) - p.value * m_->form(p.vector, p.vector);
    EXPECT_LT(std::abs(q), 1e-8 * std::abs(p.value) + 1e-10);
  }
}

TEST(Eigen, Deterministic) {
  const StructuredMesh mesh(16, 16);
  const auto fam = DiffeoFamily::perturbed(0.1);
  const auto rule = oscillation_resolving_rule(fam, mesh);
  const auto a = assemble_stiffness_adapted(fam, mesh, rule, 0.5);
  const auto m = assemble_mass(fam, mesh, rule);
  const auto p = smallest_eigenpairs(a, m, 3);
  const auto q = smallest_eigenpairs(a, m, 3);
  for (int j = 0; j < 3; ++j) {
    EXPECT_EQ(p[j].value, q[j].value);
    EXPECT_EQ(p[j].vector, q[j].vector);
  }
}

}  // namespace
