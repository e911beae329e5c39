#pragma once

#include <cmath>
#include <numbers>

namespace osclab::testing {

inline double boundary_integrand(double y) { return std::sqrt(1.0 + std::cos(y) * std::cos(y)); }

// Composite Simpson with n (even) panels.
template <class F>
double simpson(F&& f, double lo, double hi, int n) {
  const double h = (hi - lo) / n;
  double s = f(lo) + f(hi);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(lo + i * h);
  return s * h / 3.0;
}

// Complete elliptic integral of the second kind E(k) by the AGM.
inline double elliptic_e(double k) {
  double a = 1.0, b = std::sqrt(1.0 - k * k), c = k;
  double sum = 0.5 * c * c;
  double pow2 = 0.5;
  while (std::abs(c) > 1e-16) {
    const double an = 0.5 * (a + b);
    const double bn = std::sqrt(a * b);
    c = 0.5 * (a - b);
    a = an;
    b = bn;
    pow2 *= 2.0;
    sum += pow2 * c * c;
  }
  return std::numbers::pi / (2.0 * a) * (1.0 - sum);
}

inline double boundary_average_by_simpson() {
  return simpson(boundary_integrand, 0.0, std::numbers::pi, 1'000'000) / std::numbers::pi;
}

// (1/pi) int_0^pi sqrt(1 + cos^2) = 2 sqrt(2) E(1/sqrt(2)) / pi
inline double boundary_average_by_agm() {
  return 2.0 * std::sqrt(2.0) * elliptic_e(1.0 / std::sqrt(2.0)) / std::numbers::pi;
}

}  // namespace osclab::testing
