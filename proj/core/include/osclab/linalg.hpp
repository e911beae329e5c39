#pragma once

#include <span>
#include <string>
#include <vector>

#include "osclab/errors.hpp"
#include "osclab/sparse.hpp"

namespace osclab {

double dot(std::span<const double> a, std::span<const double> b) noexcept;
double norm2(std::span<const double> a) noexcept;
/// y += alpha * x
void axpy(double alpha, std::span<const double> x, std::span<double> y) noexcept;

struct SolveReport {
  int iterations = 0;
  /// True relative residual ||b - A x|| / ||b||, recomputed after iterating.
  double residual = 0.0;
  bool converged = false;
  /// CG met p^T A p <= 0.
  bool indefinite = false;
};

class NotConverged : public Error {
 public:
  NotConverged(const std::string& what, SolveReport report)
      : Error(what), report_(report) {}
  const SolveReport& report() const noexcept { return report_; }

 private:
  SolveReport report_;
};

struct SolveResult {
  Vector x;
  SolveReport report;
};

struct KrylovOptions {
  double tol = 1e-10;
  int max_iterations = 10000;
  /// Throw NotConverged instead of returning converged = false.
  bool throw_on_failure = true;
};

/// Jacobi-preconditioned conjugate gradients for SPD A. x0 (optional) is the
/// initial guess.
SolveResult cg_solve(const SparseOperator& a, std::span<const double> b,
                     const KrylovOptions& opts = {}, std::span<const double> x0 = {});

/// Preconditioned MINRES for symmetric (possibly indefinite) A, with the
/// SPD preconditioner diag(|A_ii|).
SolveResult minres_solve(const SparseOperator& a, std::span<const double> b,
                         const KrylovOptions& opts = {}, std::span<const double> x0 = {});

struct EigenPair {
  double value = 0.0;
  Vector vector;  ///< M-normalized, first significant entry positive
};

struct EigenOptions {
  double tol = 1e-8;
  int max_iterations = 500;
  /// Extra block vectors beyond k for subspace iteration.
  int guard_vectors = 3;
  /// Shift sigma of the shift-invert operator (A - sigma M)^{-1} M.
  double shift = 0.0;
  /// Lower the shift and restart when A - sigma M turns out to be indefinite.
  bool auto_shift = true;
};

/// k smallest eigenpairs of A x = lambda M x (A symmetric, M SPD), ascending.
///
/// Block shift-invert power iteration: each sweep applies (A - sigma M)^{-1} M
/// via CG at tol / 100, M-orthonormalizes the block by Gram-Schmidt and
/// performs a Rayleigh-Ritz projection. Stops when every wanted pair has
/// ||A x - lambda M x|| <= tol (1 + |lambda|) ||M x||.
std::vector<EigenPair> smallest_eigenpairs(const SparseOperator& a, const SparseOperator& m,
                                           int k, const EigenOptions& opts = {});

/// ||A x - lambda M x|| / ((1 + |lambda|) ||M x||)
double eigen_residual(const SparseOperator& a, const SparseOperator& m, const EigenPair& pair);

}  // namespace osclab
