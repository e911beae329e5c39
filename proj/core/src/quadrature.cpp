#include "osclab/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace osclab {

GaussRule1D gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n must be >= 1");
  GaussRule1D rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    // Chebyshev-like initial guess, then Newton on P_n.
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // Recompute derivative at the converged node.
    double p0 = 1.0;
    double p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    // Map [-1, 1] -> [0, 1]; store ascending.
    rule.nodes[i] = 0.5 * (1.0 - x);
    rule.weights[i] = 0.5 * w;
    rule.nodes[n - 1 - i] = 0.5 * (1.0 + x);
    rule.weights[n - 1 - i] = 0.5 * w;
  }
  return rule;
}

namespace {

double panel(const std::function<double(double)>& f, const GaussRule1D& g, double lo,
             double hi) {
  const double h = hi - lo;
  double sum = 0.0;
  for (int i = 0; i < g.size(); ++i) sum += g.weights[i] * f(lo + h * g.nodes[i]);
  return sum * h;
}

double refine(const std::function<double(double)>& f, const GaussRule1D& g, double lo,
              double hi, double whole, double tol, int depth) {
  const double mid = 0.5 * (lo + hi);
  const double left = panel(f, g, lo, mid);
  const double right = panel(f, g, mid, hi);
  if (depth <= 0 || std::abs(left + right - whole) <= tol) return left + right;
  return refine(f, g, lo, mid, left, 0.5 * tol, depth - 1) +
         refine(f, g, mid, hi, right, 0.5 * tol, depth - 1);
}

}  // namespace

double integrate_adaptive(const std::function<double(double)>& f, double lo, double hi,
                          double abs_tol, int max_depth) {
  static const GaussRule1D g10 = gauss_legendre(10);
  return refine(f, g10, lo, hi, panel(f, g10, lo, hi), abs_tol, max_depth);
}

}  // namespace osclab
