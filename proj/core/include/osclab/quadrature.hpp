#pragma once

#include <functional>
#include <vector>

namespace osclab {

/// Gauss-Legendre rule on [0, 1].
struct GaussRule1D {
  std::vector<double> nodes;
  std::vector<double> weights;

  int size() const noexcept { return static_cast<int>(nodes.size()); }
};

/// n-point Gauss-Legendre rule mapped to [0, 1]; exact for degree 2n - 1.
/// Nodes come from Newton iteration on P_n, so any n >= 1 is supported.
GaussRule1D gauss_legendre(int n);

/// Adaptive bisection with a 10-point Gauss-Legendre panel; a panel is
/// accepted when its two halves agree with it to within the local share of
/// abs_tol.
double integrate_adaptive(const std::function<double(double)>& f, double lo, double hi,
                          double abs_tol, int max_depth = 40);

}  // namespace osclab
