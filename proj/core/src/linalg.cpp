#include "osclab/linalg.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace osclab {

double dot(std::span<const double> a, std::span<const double> b) noexcept {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(std::span<const double> a) noexcept { return std::sqrt(dot(a, a)); }

void axpy(double alpha, std::span<const double> x, std::span<double> y) noexcept {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

namespace {

Vector inverse_abs_diagonal(const SparseOperator& a) {
  Vector d = a.diagonal();
  for (double& v : d) v = (v != 0.0) ? 1.0 / std::abs(v) : 1.0;
  return d;
}

double true_relative_residual(const SparseOperator& a, std::span<const double> b,
                              std::span<const double> x, double bnorm) {
  Vector r = a.apply(x);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = b[i] - r[i];
  return norm2(r) / bnorm;
}

Vector initial_guess(int n, std::span<const double> x0) {
  if (x0.empty()) return Vector(n, 0.0);
  return Vector(x0.begin(), x0.end());
}

SolveResult finish(const char* name, SolveResult result, const KrylovOptions& opts) {
  if (!result.report.converged && opts.throw_on_failure) {
    std::ostringstream msg;
    msg << name << " did not converge: " << result.report.iterations
        << " iterations, relative residual " << result.report.residual
        << (result.report.indefinite ? " (operator not positive definite)" : "");
    throw NotConverged(msg.str(), result.report);
  }
  return result;
}

}  // namespace

SolveResult cg_solve(const SparseOperator& a, std::span<const double> b,
                     const KrylovOptions& opts, std::span<const double> x0) {
  const int n = a.size();
  SolveResult result{initial_guess(n, x0), {}};
  const double bnorm = norm2(b);
  if (bnorm == 0.0) {
    std::fill(result.x.begin(), result.x.end(), 0.0);
    result.report.converged = true;
    return result;
  }
  const Vector dinv = inverse_abs_diagonal(a);
  Vector& x = result.x;
  Vector r(n), z(n), p(n), ap(n);
  int total = 0;
  // Restarts guard against drift between the recurrence and the true residual.
  for (int restart = 0; restart < 4 && total < opts.max_iterations; ++restart) {
    a.apply(x, r);
    for (int i = 0; i < n; ++i) r[i] = b[i] - r[i];
    if (norm2(r) <= opts.tol * bnorm) break;
    for (int i = 0; i < n; ++i) z[i] = dinv[i] * r[i];
    p = z;
    double rz = dot(r, z);
    while (total < opts.max_iterations) {
      ++total;
      a.apply(p, ap);
      const double pap = dot(p, ap);
      if (!(pap > 0.0)) {
        result.report.indefinite = true;
        break;
      }
      const double alpha = rz / pap;
      axpy(alpha, p, x);
      axpy(-alpha, ap, r);
      if (norm2(r) <= 0.5 * opts.tol * bnorm) break;
      for (int i = 0; i < n; ++i) z[i] = dinv[i] * r[i];
      const double rz_new = dot(r, z);
      const double beta = rz_new / rz;
      rz = rz_new;
      for (int i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
    }
    if (result.report.indefinite) break;
    if (true_relative_residual(a, b, x, bnorm) <= opts.tol) break;
  }
  result.report.iterations = total;
  result.report.residual = true_relative_residual(a, b, x, bnorm);
  result.report.converged = !result.report.indefinite && result.report.residual <= opts.tol;
  return finish("CG", std::move(result), opts);
}

SolveResult minres_solve(const SparseOperator& a, std::span<const double> b,
                         const KrylovOptions& opts, std::span<const double> x0) {
  const int n = a.size();
  SolveResult result{initial_guess(n, x0), {}};
  const double bnorm = norm2(b);
  if (bnorm == 0.0) {
    std::fill(result.x.begin(), result.x.end(), 0.0);
    result.report.converged = true;
    return result;
  }
  const Vector pinv = inverse_abs_diagonal(a);
  Vector& x = result.x;
  int total = 0;
  for (int restart = 0; restart < 4 && total < opts.max_iterations; ++restart) {
    Vector v = a.apply(x);
    for (int i = 0; i < n; ++i) v[i] = b[i] - v[i];
    if (norm2(v) <= opts.tol * bnorm) break;
    Vector v_old(n, 0.0), w(n, 0.0), w_old(n, 0.0), z(n), az(n), v_new(n), w_new(n);
    for (int i = 0; i < n; ++i) z[i] = pinv[i] * v[i];
    double gamma = std::sqrt(dot(z, v));
    double gamma_old = 1.0;
    double eta = gamma;
    const double eta0 = gamma;
    double s_old = 0.0, s = 0.0, c_old = 1.0, c = 1.0;
    while (total < opts.max_iterations) {
      ++total;
      for (double& zi : z) zi /= gamma;
      a.apply(z, az);
      const double delta = dot(az, z);
      for (int i = 0; i < n; ++i) {
        v_new[i] = az[i] - (delta / gamma) * v[i] - (gamma / gamma_old) * v_old[i];
      }
      Vector z_new(n);
      for (int i = 0; i < n; ++i) z_new[i] = pinv[i] * v_new[i];
      const double gamma_new = std::sqrt(std::max(dot(z_new, v_new), 0.0));
      const double alpha0 = c * delta - c_old * s * gamma;
      const double alpha1 = std::hypot(alpha0, gamma_new);
      const double alpha2 = s * delta + c_old * c * gamma;
      const double alpha3 = s_old * gamma;
      if (alpha1 == 0.0) break;
      const double c_new = alpha0 / alpha1;
      const double s_new = gamma_new / alpha1;
      for (int i = 0; i < n; ++i) w_new[i] = (z[i] - alpha3 * w_old[i] - alpha2 * w[i]) / alpha1;
      axpy(c_new * eta, w_new, x);
      eta = -s_new * eta;
      std::swap(w_old, w);
      std::swap(w, w_new);
      std::swap(v_old, v);
      std::swap(v, v_new);
      z = std::move(z_new);
      gamma_old = gamma;
      gamma = gamma_new;
      c_old = c;
      c = c_new;
      s_old = s;
      s = s_new;
      if (std::abs(eta) <= 0.1 * opts.tol * eta0 || gamma == 0.0) break;
    }
    if (true_relative_residual(a, b, x, bnorm) <= opts.tol) break;
  }
  result.report.iterations = total;
  result.report.residual = true_relative_residual(a, b, x, bnorm);
  result.report.converged = result.report.residual <= opts.tol;
  return finish("MINRES", std::move(result), opts);
}

double eigen_residual(const SparseOperator& a, const SparseOperator& m, const EigenPair& pair) {
  const Vector ax = a.apply(pair.vector);
  const Vector mx = m.apply(pair.vector);
  Vector r(ax.size());
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = ax[i] - pair.value * mx[i];
  return norm2(r) / ((1.0 + std::abs(pair.value)) * norm2(mx));
}

namespace {

struct IndefiniteShift {};

void normalize_sign(Vector& v) {
  double peak = 0.0;
  for (double x : v) peak = std::max(peak, std::abs(x));
  for (double x : v) {
    if (std::abs(x) > 1e-8 * peak) {
      if (x < 0.0) {
        for (double& y : v) y = -y;
      }
      return;
    }
  }
}

/// Modified Gram-Schmidt in the M inner product, applied twice.
void m_orthonormalize(std::vector<Vector>& block, const SparseOperator& m) {
  for (std::size_t j = 0; j < block.size(); ++j) {
    const double initial = std::sqrt(std::max(m.form(block[j], block[j]), 0.0));
    for (int pass = 0; pass < 2; ++pass) {
      const Vector mv = m.apply(block[j]);
      for (std::size_t i = 0; i < j; ++i) axpy(-dot(block[i], mv), block[i], block[j]);
    }
    const double len = std::sqrt(std::max(m.form(block[j], block[j]), 0.0));
    if (!(len > 1e-10 * initial) || !(len > 0.0)) {
      std::ostringstream msg;
      msg << "M-norm of block vector " << j << " collapsed during deflation";
      throw DegenerateDeflation(msg.str());
    }
    for (double& x : block[j]) x /= len;
  }
}

std::vector<EigenPair> subspace_iteration(const SparseOperator& a, const SparseOperator& m,
                                          int k, const EigenOptions& opts, double shift) {
  const int n = a.size();
  const int p = std::min(n, k + std::max(opts.guard_vectors, 1));
  const SparseOperator shifted =
      shift == 0.0 ? a : SparseOperator::combine(1.0, a, -shift, m);

  // Deterministic start: the constant vector and low-discrepancy columns.
  std::vector<Vector> block(p, Vector(n));
  for (int j = 0; j < p; ++j) {
    for (int i = 0; i < n; ++i) {
      const double t = std::fmod((i + 1) * (0.6180339887498949 + 0.1 * j) +
                                     0.7548776662466927 * (j + 1) * (i % 7),
                                 1.0);
      block[j][i] = (j == 0) ? 1.0 : t - 0.5;
    }
  }
  m_orthonormalize(block, m);
  std::vector<double> ritz(p, 0.0);
  std::vector<Vector> guesses(p);

  KrylovOptions inner;
  inner.tol = opts.tol / 100.0;
  inner.max_iterations = 20 * n + 100;
  inner.throw_on_failure = false;

  for (int iter = 0; iter < opts.max_iterations; ++iter) {
    for (int j = 0; j < p; ++j) {
      const Vector rhs = m.apply(block[j]);
      Vector x0;
      if (iter > 0 && ritz[j] - shift != 0.0) {
        x0 = block[j];
        for (double& x : x0) x /= (ritz[j] - shift);
      }
      SolveResult solved = cg_solve(shifted, rhs, inner, x0);
      if (solved.report.indefinite) throw IndefiniteShift{};
      if (!solved.report.converged) {
        throw NotConverged("inner shift-invert solve did not converge", solved.report);
      }
      block[j] = std::move(solved.x);
    }
    m_orthonormalize(block, m);

    Eigen::MatrixXd h(p, p);
    std::vector<Vector> ablock(p);
    for (int j = 0; j < p; ++j) ablock[j] = a.apply(block[j]);
    for (int i = 0; i < p; ++i) {
      for (int j = i; j < p; ++j) {
        const double v = 0.5 * (dot(block[i], ablock[j]) + dot(block[j], ablock[i]));
        h(i, j) = v;
        h(j, i) = v;
      }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(h);
    const Eigen::VectorXd& theta = solver.eigenvalues();
    const Eigen::MatrixXd& q = solver.eigenvectors();
    std::vector<Vector> rotated(p, Vector(n, 0.0));
    for (int j = 0; j < p; ++j) {
      for (int i = 0; i < p; ++i) axpy(q(i, j), block[i], rotated[j]);
      ritz[j] = theta(j);
    }
    block = std::move(rotated);

    double worst = 0.0;
    for (int j = 0; j < k; ++j) {
      worst = std::max(worst, eigen_residual(a, m, EigenPair{ritz[j], block[j]}));
    }
    if (worst <= opts.tol) {
      std::vector<EigenPair> out;
      out.reserve(k);
      for (int j = 0; j < k; ++j) {
        normalize_sign(block[j]);
        out.push_back({ritz[j], std::move(block[j])});
      }
      return out;
    }
  }
  SolveReport report;
  report.iterations = opts.max_iterations;
  throw NotConverged("subspace iteration did not converge", report);
}

}  // namespace

std::vector<EigenPair> smallest_eigenpairs(const SparseOperator& a, const SparseOperator& m,
                                           int k, const EigenOptions& opts) {
  if (k < 1 || k > a.size()) throw std::invalid_argument("smallest_eigenpairs: bad k");
  double shift = opts.shift;
  for (int attempt = 0; attempt < 40; ++attempt) {
    try {
      return subspace_iteration(a, m, k, opts, shift);
    } catch (const IndefiniteShift&) {
      if (!opts.auto_shift) {
        SolveReport report;
        report.indefinite = true;
        throw NotConverged("A - sigma M is not positive definite", report);
      }
      shift -= std::max(1.0, std::abs(shift));
    }
  }
  SolveReport report;
  report.indefinite = true;
  throw NotConverged("no positive definite shift found", report);
}

}  // namespace osclab
