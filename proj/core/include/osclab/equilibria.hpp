#pragma once

#include <span>
#include <string>
#include <vector>

#include "osclab/semiflow.hpp"

namespace osclab {

/// |lambda_min(L)| above this declares an equilibrium hyperbolic.
inline constexpr double kHyperbolicityGap = 1e-3;

struct EquilibriumRecord {
  double epsilon = 0.0;
  NodalField state;
  /// sqrt(r^T M^{-1} r) for r = A e - F(e) - G(e).
  double residual = 0.0;
  int iterations = 0;
  std::vector<double> spectrum_head;  ///< smallest eigenvalues of (L, M), ascending
  int morse_index = 0;                ///< negative entries of spectrum_head
  bool hyperbolic = false;            ///< min |lambda| > kHyperbolicityGap
};

/// L(u) = A - F_u(u) - G_u(u) with
/// F_u(i, j) = int f'(u_h) phi_j phi_i |Jh| and
/// G_u(i, j) = int_{dOmega} g'(u_h) phi_j phi_i |J_{dOmega} h|.
SparseOperator assemble_linearization(const Semiflow& flow, std::span<const double> u);
SparseOperator assemble_linearization(const ProblemSpec& spec, const DiffeoFamily& fam,
                                      const StructuredMesh& mesh, const QuadratureRule& rule,
                                      std::span<const double> u);

/// k smallest eigenvalues of the pencil (L(u), M_eps), ascending.
std::vector<double> linearization_spectrum(const Semiflow& flow, std::span<const double> u,
                                           int k);

/// sqrt(r^T M_eps^{-1} r)
double dual_norm(const Semiflow& flow, std::span<const double> r);

struct NewtonOptions {
  double tol = 1e-10;
  int max_iterations = 50;
  int spectrum_k = 4;
};

/// Newton on A u = F(u) + G(u): solve L(u_k) delta = -(A u_k - F(u_k) - G(u_k))
/// by MINRES (L is indefinite at saddles), u_{k+1} = u_k + delta. Throws
/// NewtonDiverged if the residual grows over 5 consecutive steps or the
/// iteration budget runs out, SingularLinearization if the linear solve
/// fails.
EquilibriumRecord newton_equilibria(const Semiflow& flow, const NodalField& u0,
                                    const NewtonOptions& opts = {});

/// Constants {-1, 0.01, 1} * sqrt(max(1 - a, 0.01)), each alone and with a
/// 0.1 cos(pi x1) or 0.1 cos(pi x2) perturbation.
std::vector<NodalField> equilibrium_initial_guesses(const ProblemSpec& spec,
                                                    const StructuredMesh& mesh);

/// Newton from every guess; converged results deduplicated (H^1 distance
/// below 1e-6) and sorted by mean value.
std::vector<EquilibriumRecord> find_equilibria(const Semiflow& flow,
                                               const std::vector<NodalField>& guesses,
                                               const NewtonOptions& opts = {});

struct ContinuationPoint {
  double epsilon = 0.0;
  bool lost = false;  ///< Newton failed at this eps; later points are skipped
  std::string error;
  EquilibriumRecord record;
  double distance_l2 = 0.0;  ///< ||e(eps) - e(0)||
  double distance_h1 = 0.0;
};

/// Follows the branch through e0 (computed at eps = 0) over the given eps
/// values in ascending order, warm-starting each Newton solve from the
/// previous point. Results are returned in the order of `epsilons`.
std::vector<ContinuationPoint> continue_in_epsilon(const ProblemSpec& spec,
                                                   const StructuredMesh& mesh,
                                                   std::span<const double> epsilons,
                                                   const EquilibriumRecord& e0,
                                                   const NewtonOptions& opts = {});

/// lambda_0(eps): smallest eigenvalue of (A^{(a - c0)} - d0 B_eps, M_eps), where
/// A^{(a - c0)} is the adapted stiffness with zeroth-order coefficient a - c0.
double robin_first_eigenvalue(const ProblemSpec& spec, const DiffeoFamily& fam,
                              const StructuredMesh& mesh, const QuadratureRule& rule);

}  // namespace osclab
