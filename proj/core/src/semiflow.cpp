#include "osclab/semiflow.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>

namespace osclab {

double InteriorNonlinearity::value(double u) const noexcept {
  if (kind == Kind::Zero) return 0.0;
  if (std::abs(u) <= radius) return u - u * u * u;
  const double edge = std::copysign(radius, u);
  return (edge - edge * edge * edge) + (1.0 - 3.0 * radius * radius) * (u - edge);
}

double InteriorNonlinearity::derivative(double u) const noexcept {
  if (kind == Kind::Zero) return 0.0;
  if (std::abs(u) <= radius) return 1.0 - 3.0 * u * u;
  return 1.0 - 3.0 * radius * radius;
}

double InteriorNonlinearity::primitive(double u) const noexcept {
  if (kind == Kind::Zero) return 0.0;
  const auto inner = [](double v) { return 0.5 * v * v - 0.25 * v * v * v * v; };
  if (std::abs(u) <= radius) return inner(u);
  const double edge = std::copysign(radius, u);
  const double d = u - edge;
  return inner(edge) + (edge - edge * edge * edge) * d +
         0.5 * (1.0 - 3.0 * radius * radius) * d * d;
}

double BoundaryNonlinearity::value(double u) const noexcept {
  return kind == Kind::Zero ? 0.0 : scale * std::tanh(u);
}

double BoundaryNonlinearity::derivative(double u) const noexcept {
  if (kind == Kind::Zero) return 0.0;
  const double t = std::tanh(u);
  return scale * (1.0 - t * t);
}

double BoundaryNonlinearity::primitive(double u) const noexcept {
  if (kind == Kind::Zero) return 0.0;
  // log cosh u without overflow
  const double au = std::abs(u);
  return scale * (au + std::log1p(std::exp(-2.0 * au)) - std::numbers::ln2);
}

GrowthBound growth_bound(const InteriorNonlinearity& f) noexcept {
  if (f.kind == InteriorNonlinearity::Kind::Zero) return {0.0, 2.0};
  return {3.0, 2.0};
}

GrowthBound growth_bound(const BoundaryNonlinearity& g) noexcept {
  if (g.kind == BoundaryNonlinearity::Kind::Zero) return {0.0, 1.0};
  return {std::abs(g.scale), 1.0};
}

namespace {

template <class Nonlinearity>
double sampled_slope(const Nonlinearity& n) noexcept {
  double worst = -std::numeric_limits<double>::infinity();
  for (double u : {1e3, -1e3, 1e4, -1e4}) worst = std::max(worst, n.value(u) / u);
  return worst;
}

template <class Nonlinearity>
bool growth_holds(const Nonlinearity& n, GrowthBound bound) {
  for (int i = 0; i <= 40; ++i) {
    const double u1 = -50.0 + 2.5 * i;
    for (int j = 0; j <= 40; ++j) {
      const double u2 = -49.3 + 2.5 * j;
      const double lhs = std::abs(n.value(u1) - n.value(u2));
      const double rhs = bound.lipschitz *
                         (1.0 + std::pow(std::abs(u1), bound.exponent) +
                          std::pow(std::abs(u2), bound.exponent)) *
                         std::abs(u1 - u2);
      if (lhs > rhs * (1.0 + 1e-12) + 1e-12) return false;
    }
  }
  return true;
}

}  // namespace

double dissipativity_slope(const InteriorNonlinearity& f) noexcept { return sampled_slope(f); }
double dissipativity_slope(const BoundaryNonlinearity& g) noexcept { return sampled_slope(g); }

void validate(const ProblemSpec& spec) {
  std::ostringstream msg;
  if (!(spec.a > 0.0)) {
    msg << "a = " << spec.a << " must be positive";
    throw ConfigInvalid("a>0", msg.str());
  }
  if (spec.nx < 2 || spec.ny < 2) {
    msg << "mesh " << spec.nx << "x" << spec.ny << " needs at least 2 cells per direction";
    throw ConfigInvalid("mesh", msg.str());
  }
  if (!(spec.dt > 0.0) || !(spec.t_final >= 0.0)) {
    msg << "dt = " << spec.dt << ", t_final = " << spec.t_final;
    throw ConfigInvalid("time", msg.str());
  }
  if (!(spec.tol.cg > 0.0) || !(spec.tol.eigen > 0.0) || !(spec.tol.newton > 0.0) ||
      spec.tol.newton_max_iterations < 1) {
    throw ConfigInvalid("tolerances", "all tolerances must be positive");
  }
  for (double eps : spec.epsilons) {
    if (!(eps >= 0.0) || !std::isfinite(eps)) {
      msg << "eps = " << eps << " must be finite and >= 0";
      throw ConfigInvalid("epsilon", msg.str());
    }
    try {
      (void)DiffeoFamily::make(eps, spec.profile);
    } catch (const NonPositiveJacobian& e) {
      throw ConfigInvalid("jacobian", e.what());
    }
  }
  if (spec.f.kind == InteriorNonlinearity::Kind::CubicSaturated &&
      !(spec.f.radius > 0.0 && std::isfinite(spec.f.radius))) {
    msg << "clip radius " << spec.f.radius << " must be positive and finite";
    throw ConfigInvalid("hip_derivf", msg.str());
  }
  if (!std::isfinite(spec.g.scale)) throw ConfigInvalid("hip_derivg", "g scale must be finite");
  if (!growth_holds(spec.f, growth_bound(spec.f))) {
    throw ConfigInvalid("hipf", "growth bound with lambda1 = 2 violated");
  }
  if (!growth_holds(spec.g, growth_bound(spec.g))) {
    throw ConfigInvalid("hipg", "growth bound with lambda2 = 1 violated");
  }
  const double f_slope = dissipativity_slope(spec.f);
  if (f_slope > spec.c0) {
    msg << "limsup f(u)/u ~ " << f_slope << " exceeds c0 = " << spec.c0;
    throw ConfigInvalid("hipf2", msg.str());
  }
  const double g_slope = dissipativity_slope(spec.g);
  if (!(g_slope < spec.d0)) {
    msg << "d0' ~ " << g_slope << " >= d0 = " << spec.d0;
    throw ConfigInvalid("hipg2/autovalor", msg.str());
  }
}

bool NodalField::all_finite() const noexcept {
  return std::all_of(values.begin(), values.end(), [](double v) { return std::isfinite(v); });
}

double NodalField::max_abs() const noexcept {
  double m = 0.0;
  for (double v : values) m = std::max(m, std::abs(v));
  return m;
}

Vector apply_interior_load(const ProblemSpec& spec, const FieldQuadrature& q,
                           std::span<const double> u) {
  const StructuredMesh& mesh = q.mesh();
  Vector load(mesh.num_nodes(), 0.0);
  if (spec.f.kind == InteriorNonlinearity::Kind::Zero) return load;
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const auto nodes = mesh.element_nodes(e);
    std::array<double, 4> local{};
    for (const auto& qp : q.element_points(e)) {
      double uh = 0.0;
      for (int k = 0; k < 4; ++k) uh += u[nodes[k]] * qp.shape[k];
      const double fw = spec.f.value(uh) * qp.weight_det;
      for (int k = 0; k < 4; ++k) local[k] += fw * qp.shape[k];
    }
    for (int k = 0; k < 4; ++k) load[nodes[k]] += local[k];
  }
  return load;
}

Vector apply_boundary_load(const ProblemSpec& spec, const FieldQuadrature& q,
                           std::span<const double> u) {
  Vector load(q.mesh().num_nodes(), 0.0);
  if (spec.g.kind == BoundaryNonlinearity::Kind::Zero) return load;
  for (const auto& bp : q.boundary_points()) {
    const double uh = u[bp.nodes[0]] * bp.shape[0] + u[bp.nodes[1]] * bp.shape[1];
    const double gw = spec.g.value(uh) * bp.weight_jac;
    load[bp.nodes[0]] += gw * bp.shape[0];
    load[bp.nodes[1]] += gw * bp.shape[1];
  }
  return load;
}

Semiflow::Semiflow(const ProblemSpec& spec, const DiffeoFamily& fam, const StructuredMesh& mesh)
    : spec_(spec), quad_(fam, mesh, oscillation_resolving_rule(fam, mesh)) {
  stiffness_ = assemble_stiffness_adapted(quad_, spec.a);
  mass_ = assemble_mass(quad_);
  boundary_mass_ = assemble_boundary_mass(quad_);
  h1_gram_ = assemble_h1_gram(mesh);
  plain_mass_ = assemble_mass(DiffeoFamily::identity(), mesh, QuadratureRule{});
  step_ = SparseOperator::combine(1.0, mass_, spec.dt, stiffness_);
}

Vector Semiflow::nonlinear_load(std::span<const double> u) const {
  Vector load = apply_interior_load(spec_, quad_, u);
  const Vector boundary = apply_boundary_load(spec_, quad_, u);
  axpy(1.0, boundary, load);
  return load;
}

Vector Semiflow::residual(std::span<const double> u) const {
  Vector r = stiffness_.apply(u);
  axpy(-1.0, nonlinear_load(u), r);
  return r;
}

double Semiflow::lyapunov_value(std::span<const double> u) const {
  double value = 0.5 * stiffness_.form(u, u);
  const StructuredMesh& m = mesh();
  if (spec_.f.kind != InteriorNonlinearity::Kind::Zero) {
    double interior = 0.0;
    for (int e = 0; e < m.num_elements(); ++e) {
      const auto nodes = m.element_nodes(e);
      for (const auto& qp : quad_.element_points(e)) {
        double uh = 0.0;
        for (int k = 0; k < 4; ++k) uh += u[nodes[k]] * qp.shape[k];
        interior += spec_.f.primitive(uh) * qp.weight_det;
      }
    }
    value -= interior;
  }
  if (spec_.g.kind != BoundaryNonlinearity::Kind::Zero) {
    double boundary = 0.0;
    for (const auto& bp : quad_.boundary_points()) {
      const double uh = u[bp.nodes[0]] * bp.shape[0] + u[bp.nodes[1]] * bp.shape[1];
      boundary += spec_.g.primitive(uh) * bp.weight_jac;
    }
    value -= boundary;
  }
  return value;
}

NodalField Semiflow::imex_step(const NodalField& u, double dt) const {
  Vector rhs = mass_.apply(u.values);
  axpy(dt, nonlinear_load(u.values), rhs);
  KrylovOptions opts;
  opts.tol = spec_.tol.cg;
  if (dt == spec_.dt) return {cg_solve(step_, rhs, opts, u.values).x};
  const SparseOperator system = SparseOperator::combine(1.0, mass_, dt, stiffness_);
  return {cg_solve(system, rhs, opts, u.values).x};
}

double Semiflow::h1_norm(std::span<const double> u) const {
  return std::sqrt(std::max(h1_gram_.form(u, u), 0.0));
}

double Semiflow::l2_norm(std::span<const double> u) const {
  return std::sqrt(std::max(plain_mass_.form(u, u), 0.0));
}

namespace {

void record(Trajectory& traj, const Semiflow& flow, double t, const NodalField& u, double v) {
  traj.times.push_back(t);
  traj.lyapunov.push_back(v);
  const auto [lo, hi] = std::minmax_element(u.values.begin(), u.values.end());
  traj.min_u.push_back(*lo);
  traj.max_u.push_back(*hi);
  traj.h1_norm.push_back(flow.h1_norm(u.values));
}

}  // namespace

Trajectory evolve(const Semiflow& flow, const NodalField& u0, double t_final, double dt,
                  const EvolveOptions& opts) {
  if (!u0.all_finite()) throw BlowupDetected("initial state is not finite");
  const int steps = static_cast<int>(std::llround(t_final / dt));
  const int every = std::max(1, opts.store_every);
  Trajectory traj;
  NodalField u = u0;
  double v = flow.lyapunov_value(u.values);
  record(traj, flow, 0.0, u, v);
  traj.state_times.push_back(0.0);
  traj.states.push_back(u);
  traj.worst_lyapunov_increase = -std::numeric_limits<double>::infinity();
  for (int n = 1; n <= steps; ++n) {
    u = flow.imex_step(u, dt);
    const double t = n * dt;
    if (!u.all_finite() || u.max_abs() > kBlowupGuard) {
      std::ostringstream msg;
      msg << "sup norm exceeded " << kBlowupGuard << " at t = " << t;
      throw BlowupDetected(msg.str());
    }
    const double v_next = flow.lyapunov_value(u.values);
    traj.worst_lyapunov_increase =
        std::max(traj.worst_lyapunov_increase, v_next - v - 1e-8 * (1.0 + std::abs(v)));
    v = v_next;
    record(traj, flow, t, u, v);
    if (n % every == 0 || n == steps) {
      traj.state_times.push_back(t);
      traj.states.push_back(u);
    }
  }
  if (steps == 0) traj.worst_lyapunov_increase = 0.0;
  return traj;
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
  out << "t,V,min_u,max_u,h1_norm\n";
  char line[160];
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    std::snprintf(line, sizeof line, "%.6f,%.12e,%.12e,%.12e,%.12e\n", traj.times[i],
                  traj.lyapunov[i], traj.min_u[i], traj.max_u[i], traj.h1_norm[i]);
    out << line;
  }
}

}  // namespace osclab
