#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "osclab/assembly.hpp"
#include "osclab/linalg.hpp"

namespace osclab {

/// Interior nonlinearity f.
struct InteriorNonlinearity {
  enum class Kind { Zero, CubicSaturated };
  Kind kind = Kind::CubicSaturated;
  /// Clip radius: f(u) = u - u^3 for |u| <= radius, continued linearly
  /// (C^1) outside so that f' stays bounded.
  double radius = 10.0;

  double value(double u) const noexcept;
  double derivative(double u) const noexcept;
  /// Primitive F with F(0) = 0.
  double primitive(double u) const noexcept;

  bool operator==(const InteriorNonlinearity&) const = default;
};

/// Boundary nonlinearity g.
struct BoundaryNonlinearity {
  enum class Kind { Zero, ScaledTanh };
  Kind kind = Kind::ScaledTanh;
  double scale = 0.1;  ///< g(u) = scale * tanh(u)

  double value(double u) const noexcept;
  double derivative(double u) const noexcept;
  /// Primitive G with G(0) = 0.
  double primitive(double u) const noexcept;

  bool operator==(const BoundaryNonlinearity&) const = default;
};

struct Tolerances {
  double cg = 1e-12;
  double eigen = 1e-9;
  double newton = 1e-10;
  int newton_max_iterations = 50;

  bool operator==(const Tolerances&) const = default;
};

struct ProblemSpec {
  double a = 0.5;
  InteriorNonlinearity f;
  BoundaryNonlinearity g;
  double d0 = 0.1;
  double c0 = -0.5;
  std::vector<double> epsilons{0.2, 0.1, 0.05};
  Profile profile = Profile::Paper;
  int nx = 32;
  int ny = 32;
  double dt = 0.02;
  double t_final = 1.0;
  Tolerances tol;

  bool operator==(const ProblemSpec&) const = default;
};

/// Constants entering the growth bound
/// |f(u1) - f(u2)| <= L (1 + |u1|^lambda + |u2|^lambda) |u1 - u2|.
struct GrowthBound {
  double lipschitz = 0.0;
  double exponent = 0.0;
};

GrowthBound growth_bound(const InteriorNonlinearity& f) noexcept;
GrowthBound growth_bound(const BoundaryNonlinearity& g) noexcept;

/// limsup_{|u| -> inf} f(u)/u estimated from samples at |u| = 1e3, 1e4.
double dissipativity_slope(const InteriorNonlinearity& f) noexcept;
double dissipativity_slope(const BoundaryNonlinearity& g) noexcept;

/// Checks the structural hypotheses (positivity of a and of the mesh and
/// time step, growth, dissipativity, bounded derivatives). Throws
/// ConfigInvalid naming the first violated hypothesis.
void validate(const ProblemSpec& spec);

/// Coefficient vector of a Q1 field.
struct NodalField {
  Vector values;

  int size() const noexcept { return static_cast<int>(values.size()); }
  bool all_finite() const noexcept;
  double max_abs() const noexcept;
};

/// Nodal interpolant of fn.
template <class Fn>
NodalField interpolate(const StructuredMesh& mesh, Fn&& fn) {
  NodalField out{Vector(mesh.num_nodes())};
  for (int n = 0; n < mesh.num_nodes(); ++n) out.values[n] = fn(mesh.node_coords(n));
  return out;
}

/// Loads: i-th entry int_Omega f(u_h) phi_i |Jh| dx.
Vector apply_interior_load(const ProblemSpec& spec, const FieldQuadrature& q,
                           std::span<const double> u);
/// i-th entry int_{dOmega} g(u_h) phi_i |J_{dOmega} h| ds; zero on interior nodes.
Vector apply_boundary_load(const ProblemSpec& spec, const FieldQuadrature& q,
                           std::span<const double> u);

/// All discrete ingredients of the semiflow at one eps.
class Semiflow {
 public:
  Semiflow(const ProblemSpec& spec, const DiffeoFamily& fam, const StructuredMesh& mesh);

  const ProblemSpec& spec() const noexcept { return spec_; }
  const FieldQuadrature& quadrature() const noexcept { return quad_; }
  const StructuredMesh& mesh() const noexcept { return quad_.mesh(); }
  const DiffeoFamily& family() const noexcept { return quad_.family(); }

  const SparseOperator& stiffness() const noexcept { return stiffness_; }  ///< A_eps (incl. a M)
  const SparseOperator& mass() const noexcept { return mass_; }
  const SparseOperator& boundary_mass() const noexcept { return boundary_mass_; }
  const SparseOperator& h1_gram() const noexcept { return h1_gram_; }

  /// F(u) + G(u)
  Vector nonlinear_load(std::span<const double> u) const;
  /// A u - F(u) - G(u)
  Vector residual(std::span<const double> u) const;

  /// V(u) = 1/2 u^T A u - int F(u_h) |Jh| - int G(u_h) |J_dOmega h|.
  double lyapunov_value(std::span<const double> u) const;

  /// (M + dt A) u_next = M u + dt (F(u) + G(u)). The matrix for spec.dt is
  /// assembled once; other step sizes build it on the fly.
  NodalField imex_step(const NodalField& u, double dt) const;

  /// sqrt(u^T G u) with the plain H^1 Gram matrix.
  double h1_norm(std::span<const double> u) const;
  double l2_norm(std::span<const double> u) const;

 private:
  ProblemSpec spec_;
  FieldQuadrature quad_;
  SparseOperator stiffness_;
  SparseOperator mass_;
  SparseOperator boundary_mass_;
  SparseOperator h1_gram_;
  SparseOperator plain_mass_;
  SparseOperator step_;  ///< M + spec.dt A
};

inline constexpr double kBlowupGuard = 1e6;

struct Trajectory {
  std::vector<double> times;     ///< every step, starting at t = 0
  std::vector<double> lyapunov;  ///< V at each entry of times
  std::vector<double> min_u;
  std::vector<double> max_u;
  std::vector<double> h1_norm;
  std::vector<double> state_times;
  std::vector<NodalField> states;
  /// Largest V(u_{n+1}) - V(u_n) - 1e-8 (1 + |V(u_n)|) over the run; <= 0 iff
  /// the discrete gradient structure held at every step.
  double worst_lyapunov_increase = 0.0;
};

struct EvolveOptions {
  /// Keep every k-th state (the last state is always kept).
  int store_every = 1;
};

/// Repeated imex_step up to t_final with V recorded at every step. Throws
/// BlowupDetected when ||u||_inf exceeds kBlowupGuard.
Trajectory evolve(const Semiflow& flow, const NodalField& u0, double t_final, double dt,
                  const EvolveOptions& opts = {});

/// CSV with columns t,V,min_u,max_u,h1_norm.
void write_trajectory_csv(std::ostream& out, const Trajectory& traj);

}  // namespace osclab
