#pragma once

#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "osclab/equilibria.hpp"
#include "osclab/semiflow.hpp"

namespace osclab {

/// Errors at or below this are treated as exact epsilon-invariance (solver
/// roundoff), not as a sequence that can be ordered.
inline constexpr double kInvarianceFloor = 1e-9;

enum class Trend {
  StrictlyDecreasing,
  Invariant,  ///< every entry <= kInvarianceFloor
  NotDecreasing,
};

const char* to_string(Trend t) noexcept;

/// Classifies a sequence listed in the order of decreasing epsilon.
Trend classify_trend(std::span<const double> errors, double floor = kInvarianceFloor) noexcept;

/// Least-squares slope of log(err) against log(eps). Non-positive entries
/// are skipped; returns NaN with fewer than two usable points.
double log_log_slope(std::span<const double> eps, std::span<const double> err) noexcept;

struct PropertyCheck {
  std::string name;
  bool passed = false;
  std::string detail;
  /// Informational checks are reported but do not decide the verdict.
  bool gating = true;
};

/// One epsilon-indexed table plus the property verdicts of a study.
struct StudyReport {
  std::string name;
  int nx = 0;
  int ny = 0;
  std::string quadrature;  ///< e.g. "panels<=pi*eps/4,gauss3"
  std::vector<std::string> columns;
  std::vector<double> epsilons;
  std::vector<std::vector<double>> rows;
  std::vector<std::string> row_verdicts;
  std::vector<PropertyCheck> properties;
  /// Extra CSV tables (file name, content) such as trajectory dumps.
  std::vector<std::pair<std::string, std::string>> attachments;

  /// All gating properties hold.
  bool passed() const noexcept;
  int column(const std::string& name) const;  ///< throws std::out_of_range
  std::vector<double> column_values(const std::string& name) const;
  void add_row(double eps, std::vector<double> metrics, std::string verdict = "pass");
  void add_property(std::string name, bool passed, std::string detail, bool gating = true);
};

/// "epsilon,<columns>,verdict" followed by one line per row, numbers as %.12e.
void write_csv(std::ostream& out, const StudyReport& report);
/// "<name>: PASS|FAIL (k/n gating properties)".
std::string summary_line(const StudyReport& report);

/// Runs fn(i) for i in [0, n) on up to `threads` workers. Each index is
/// processed by exactly one call, so results stored per index do not depend
/// on the thread count.
void parallel_for(int n, int threads, const std::function<void(int)>& fn);

struct StudyOptions {
  int threads = 1;
};

/// Solves (A_eps - lambda M_eps) u_eps = M_eps f for each eps and for eps = 0
/// and tabulates err_l2, err_h1 (plain eps = 0 norms) plus min/max of u_eps.
/// Rows: eps grid in decreasing order, then the eps = 0 reference.
StudyReport resolvent_convergence_study(const ProblemSpec& spec, std::span<const double> eps_grid,
                                        double lambda, const NodalField& f_rhs,
                                        const StudyOptions& opts = {});

/// First k eigenvalues of (A_eps, M_eps), their distance to eps = 0, and the
/// extreme eigenvalues of the coercivity pencil (A_eps, G_H1). Only the
/// ground eigenvalue trend gates; higher modes are informational.
StudyReport eigenvalue_convergence_study(const ProblemSpec& spec, std::span<const double> eps_grid,
                                         int k, const StudyOptions& opts = {});

/// Canonical-metric form c_eps, plain form p and anomalous limit l on the
/// probes (x2, x2), (x1, x1), (x2^2, x2) for the linear profile, plus the
/// two extra terms of the paper-profile family on (x1 + x2, x2).
StudyReport wrong_limit_study(const StructuredMesh& mesh, std::span<const double> eps_grid,
                              double a, const StudyOptions& opts = {});

/// |int_0^1 sqrt(1 + cos^2(s/eps)) v(s) ds - M_pi(p) int_0^1 v(s) ds|.
double boundary_average_error(double eps, const std::function<double(double)>& v);

/// boundary_average_error for v = 1, s, s^2.
StudyReport boundary_average_study(std::span<const double> eps_grid);

/// Smallest eigenvalue of the Robin pencil per eps and at eps = 0.
StudyReport robin_eigenvalue_study(const ProblemSpec& spec, std::span<const double> eps_grid,
                                   const StudyOptions& opts = {});

/// 3 constants x 4 cosine modes:
/// c + 0.2 cos(m pi x1) cos(n pi x2), c in {-0.5, 0.1, 0.5},
/// (m, n) in {(1,0), (0,1), (1,1), (2,0)}.
std::vector<NodalField> attractor_initial_conditions(const StructuredMesh& mesh);

/// Evolves every initial condition over [0, spec.t_final] at each eps
/// (and eps = 0) and checks the discrete gradient structure. The trajectory
/// of the first initial condition is attached per eps.
StudyReport evolve_study(const ProblemSpec& spec, std::span<const double> eps_grid,
                         const std::vector<NodalField>& ics, const StudyOptions& opts = {});

/// Equilibria at eps = 0 from the standard guesses, each continued over the
/// eps grid. Attaches the per-branch equilibria report.
StudyReport equilibria_study(const ProblemSpec& spec, std::span<const double> eps_grid,
                             const StudyOptions& opts = {});

struct AttractorOptions {
  double t_transient = 30.0;
  double t_sample = 5.0;
  int sample_every = 25;  ///< steps between stored snapshots
  int threads = 1;
  /// Semidistances at or below this count as zero. Sampled tails still carry
  /// decaying transients, so the floor is looser than kInvarianceFloor.
  double invariance_floor = 1e-6;
};

/// max_{x in A_eps} min_{y in A_0} ||x - y||
double semidistance(const std::vector<Vector>& from, const std::vector<Vector>& to,
                    const SparseOperator& gram);

/// Trajectory tails of every initial condition plus all equilibria found,
/// per eps; the one-sided semidistance to the eps = 0 sample in H^1 and L^2.
StudyReport attractor_semidistance_study(const ProblemSpec& spec,
                                         std::span<const double> eps_grid,
                                         const std::vector<NodalField>& ics,
                                         const AttractorOptions& opts = {});

}  // namespace osclab
