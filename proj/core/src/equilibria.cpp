#include "osclab/equilibria.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

namespace osclab {

namespace {

SparseOperator linearization_from(const ProblemSpec& spec, const FieldQuadrature& q,
                                  const SparseOperator& stiffness, std::span<const double> u) {
  const StructuredMesh& mesh = q.mesh();
  std::vector<Triplet> trips;
  if (spec.f.kind != InteriorNonlinearity::Kind::Zero) {
    trips.reserve(static_cast<std::size_t>(mesh.num_elements()) * 16);
    for (int e = 0; e < mesh.num_elements(); ++e) {
      const auto nodes = mesh.element_nodes(e);
      std::array<std::array<double, 4>, 4> local{};
      for (const auto& qp : q.element_points(e)) {
        double uh = 0.0;
        for (int k = 0; k < 4; ++k) uh += u[nodes[k]] * qp.shape[k];
        const double fw = spec.f.derivative(uh) * qp.weight_det;
        for (int i = 0; i < 4; ++i) {
          for (int j = 0; j < 4; ++j) local[i][j] += fw * qp.shape[i] * qp.shape[j];
        }
      }
      for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) trips.push_back({nodes[i], nodes[j], local[i][j]});
      }
    }
  }
  if (spec.g.kind != BoundaryNonlinearity::Kind::Zero) {
    for (const auto& bp : q.boundary_points()) {
      const double uh = u[bp.nodes[0]] * bp.shape[0] + u[bp.nodes[1]] * bp.shape[1];
      const double gw = spec.g.derivative(uh) * bp.weight_jac;
      for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
          trips.push_back({bp.nodes[i], bp.nodes[j], gw * bp.shape[i] * bp.shape[j]});
        }
      }
    }
  }
  if (trips.empty()) return stiffness;
  const SparseOperator derivative = SparseOperator::from_triplets(mesh.num_nodes(), std::move(trips));
  return SparseOperator::combine(1.0, stiffness, -1.0, derivative);
}

double mean(std::span<const double> v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

Vector difference(std::span<const double> a, std::span<const double> b) {
  Vector d(a.size());
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = a[i] - b[i];
  return d;
}

}  // namespace

SparseOperator assemble_linearization(const Semiflow& flow, std::span<const double> u) {
  return linearization_from(flow.spec(), flow.quadrature(), flow.stiffness(), u);
}

SparseOperator assemble_linearization(const ProblemSpec& spec, const DiffeoFamily& fam,
                                      const StructuredMesh& mesh, const QuadratureRule& rule,
                                      std::span<const double> u) {
  const FieldQuadrature q(fam, mesh, rule);
  return linearization_from(spec, q, assemble_stiffness_adapted(q, spec.a), u);
}

std::vector<double> linearization_spectrum(const Semiflow& flow, std::span<const double> u,
                                           int k) {
  const SparseOperator l = assemble_linearization(flow, u);
  double sup_f = 0.0;
  for (double v : u) sup_f = std::max(sup_f, flow.spec().f.derivative(v));
  EigenOptions opts;
  opts.tol = flow.spec().tol.eigen;
  // Start below the spectrum; auto_shift lowers further if CG still finds
  // negative curvature.
  opts.shift = -(1.0 + sup_f + 10.0 * std::abs(flow.spec().g.scale));
  std::vector<double> values;
  for (const auto& pair : smallest_eigenpairs(l, flow.mass(), k, opts)) {
    values.push_back(pair.value);
  }
  return values;
}

double dual_norm(const Semiflow& flow, std::span<const double> r) {
  KrylovOptions opts;
  opts.tol = 1e-13;
  const SolveResult s = cg_solve(flow.mass(), r, opts);
  return std::sqrt(std::max(dot(r, s.x), 0.0));
}

EquilibriumRecord newton_equilibria(const Semiflow& flow, const NodalField& u0,
                                    const NewtonOptions& opts) {
  EquilibriumRecord rec;
  rec.epsilon = flow.family().epsilon();
  rec.state = u0;
  Vector& u = rec.state.values;
  Vector r = flow.residual(u);
  double res = dual_norm(flow, r);
  double previous = res;
  int growth = 0;
  KrylovOptions lin;
  lin.tol = 1e-10;
  lin.max_iterations = 20 * flow.mesh().num_nodes();
  int it = 0;
  while (res > opts.tol) {
    if (it >= opts.max_iterations) {
      std::ostringstream msg;
      msg << "Newton reached " << opts.max_iterations << " iterations at residual " << res;
      throw NewtonDiverged(msg.str());
    }
    ++it;
    const SparseOperator l = assemble_linearization(flow, u);
    Vector rhs = r;
    for (double& v : rhs) v = -v;
    SolveResult step;
    try {
      step = minres_solve(l, rhs, lin);
    } catch (const NotConverged& e) {
      throw SingularLinearization(std::string("Newton step: ") + e.what());
    }
    axpy(1.0, step.x, u);
    if (!rec.state.all_finite()) throw NewtonDiverged("Newton iterate is not finite");
    r = flow.residual(u);
    res = dual_norm(flow, r);
    growth = res > previous ? growth + 1 : 0;
    if (growth >= 5 || !std::isfinite(res)) {
      std::ostringstream msg;
      msg << "Newton residual grew for " << growth << " consecutive steps (now " << res << ")";
      throw NewtonDiverged(msg.str());
    }
    previous = res;
  }
  rec.residual = res;
  rec.iterations = it;
  rec.spectrum_head = linearization_spectrum(flow, u, opts.spectrum_k);
  rec.morse_index = static_cast<int>(
      std::count_if(rec.spectrum_head.begin(), rec.spectrum_head.end(),
                    [](double v) { return v < 0.0; }));
  double gap = std::numeric_limits<double>::infinity();
  for (double v : rec.spectrum_head) gap = std::min(gap, std::abs(v));
  rec.hyperbolic = gap > kHyperbolicityGap;
  return rec;
}

std::vector<NodalField> equilibrium_initial_guesses(const ProblemSpec& spec,
                                                    const StructuredMesh& mesh) {
  const double scale = std::sqrt(std::max(1.0 - spec.a, 0.01));
  std::vector<NodalField> guesses;
  for (double c : {-1.0, 0.01, 1.0}) {
    const double base = c * scale;
    guesses.push_back(interpolate(mesh, [base](Point) { return base; }));
    guesses.push_back(interpolate(mesh, [base](Point p) {
      return base + 0.1 * std::cos(std::numbers::pi * p.x1);
    }));
    guesses.push_back(interpolate(mesh, [base](Point p) {
      return base + 0.1 * std::cos(std::numbers::pi * p.x2);
    }));
  }
  return guesses;
}

std::vector<EquilibriumRecord> find_equilibria(const Semiflow& flow,
                                               const std::vector<NodalField>& guesses,
                                               const NewtonOptions& opts) {
  std::vector<EquilibriumRecord> found;
  for (const auto& guess : guesses) {
    EquilibriumRecord rec;
    try {
      rec = newton_equilibria(flow, guess, opts);
    } catch (const NewtonDiverged&) {
      continue;
    } catch (const SingularLinearization&) {
      continue;
    }
    const bool duplicate = std::any_of(found.begin(), found.end(), [&](const auto& other) {
      return flow.h1_norm(difference(rec.state.values, other.state.values)) < 1e-6;
    });
    if (!duplicate) found.push_back(std::move(rec));
  }
  std::stable_sort(found.begin(), found.end(), [](const auto& x, const auto& y) {
    return mean(x.state.values) < mean(y.state.values);
  });
  return found;
}

std::vector<ContinuationPoint> continue_in_epsilon(const ProblemSpec& spec,
                                                   const StructuredMesh& mesh,
                                                   std::span<const double> epsilons,
                                                   const EquilibriumRecord& e0,
                                                   const NewtonOptions& opts) {
  std::vector<std::size_t> order(epsilons.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return epsilons[i] < epsilons[j]; });

  const Semiflow reference(spec, DiffeoFamily::identity(spec.profile), mesh);
  std::vector<ContinuationPoint> points(epsilons.size());
  NodalField warm = e0.state;
  bool lost = false;
  for (std::size_t idx : order) {
    ContinuationPoint& pt = points[idx];
    pt.epsilon = epsilons[idx];
    if (lost) {
      pt.lost = true;
      pt.error = "skipped after an earlier failure";
      continue;
    }
    try {
      const Semiflow flow(spec, DiffeoFamily::make(epsilons[idx], spec.profile), mesh);
      pt.record = newton_equilibria(flow, warm, opts);
      const Vector d = difference(pt.record.state.values, e0.state.values);
      pt.distance_l2 = reference.l2_norm(d);
      pt.distance_h1 = reference.h1_norm(d);
      warm = pt.record.state;
    } catch (const Error& e) {
      pt.lost = true;
      pt.error = e.what();
      lost = true;
    }
  }
  return points;
}

double robin_first_eigenvalue(const ProblemSpec& spec, const DiffeoFamily& fam,
                              const StructuredMesh& mesh, const QuadratureRule& rule) {
  const FieldQuadrature q(fam, mesh, rule);
  const SparseOperator shifted = assemble_stiffness_adapted(q, spec.a - spec.c0);
  const SparseOperator robin =
      SparseOperator::combine(1.0, shifted, -spec.d0, assemble_boundary_mass(q));
  EigenOptions opts;
  opts.tol = spec.tol.eigen;
  return smallest_eigenpairs(robin, assemble_mass(q), 1, opts).front().value;
}

}  // namespace osclab
