#include "osclab/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "osclab/errors.hpp"
#include "osclab/quadrature.hpp"

namespace osclab {

const char* to_string(Side side) noexcept {
  switch (side) {
    case Side::I1: return "I1";
    case Side::I2: return "I2";
    case Side::I3: return "I3";
    case Side::I4: return "I4";
  }
  return "?";
}

const char* to_string(Profile profile) noexcept {
  return profile == Profile::Paper ? "paper" : "linear";
}

DiffeoFamily DiffeoFamily::identity(Profile profile) noexcept {
  return DiffeoFamily(0.0, profile);
}

DiffeoFamily DiffeoFamily::perturbed(double epsilon, Profile profile) {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    std::ostringstream msg;
    msg << "perturbed family needs eps > 0, got " << epsilon;
    throw NonPositiveJacobian(msg.str());
  }
  DiffeoFamily fam(epsilon, profile);
  fam.log_eps_ = std::log(epsilon);
  const double min_det = fam.min_jacobian_on_grid(kAdmissibilityScan);
  if (!(min_det > kMinAdmissibleJacobian)) {
    std::ostringstream msg;
    msg << "eps = " << epsilon << " (" << to_string(profile)
        << " profile) is beyond the admissible range: min |Jh| = " << min_det
        << " <= " << kMinAdmissibleJacobian;
    throw NonPositiveJacobian(msg.str());
  }
  return fam;
}

DiffeoFamily DiffeoFamily::make(double epsilon, Profile profile) {
  return epsilon == 0.0 ? identity(profile) : perturbed(epsilon, profile);
}

double DiffeoFamily::phi(double x2) const noexcept {
  if (is_limit()) return 0.0;
  if (profile_ == Profile::Linear) return x2 * epsilon_;
  return x2 * std::exp((2.0 - x2) * log_eps_);
}

double DiffeoFamily::dphi_dx2(double x2) const noexcept {
  if (is_limit()) return 0.0;
  if (profile_ == Profile::Linear) return epsilon_;
  return std::exp((2.0 - x2) * log_eps_) * (1.0 - x2 * log_eps_);
}

Point DiffeoFamily::map_point(Point x) const noexcept {
  if (is_limit()) return x;
  return {x.x1, x.x2 + phi(x.x2) * std::sin(x.x1 / epsilon_)};
}

Mat2 DiffeoFamily::jacobian(Point x) const noexcept {
  if (is_limit()) return {{{1.0, 0.0}, {0.0, 1.0}}};
  const double arg = x.x1 / epsilon_;
  return {{{1.0, 0.0},
           {phi(x.x2) * std::cos(arg) / epsilon_, 1.0 + dphi_dx2(x.x2) * std::sin(arg)}}};
}

double DiffeoFamily::raw_det(Point x) const noexcept {
  if (is_limit()) return 1.0;
  return 1.0 + dphi_dx2(x.x2) * std::sin(x.x1 / epsilon_);
}

double DiffeoFamily::jacobian_det(Point x) const {
  const double det = raw_det(x);
  if (!(det > 0.0)) {
    std::ostringstream msg;
    msg << "|Jh| = " << det << " at (" << x.x1 << ", " << x.x2 << "), eps = " << epsilon_;
    throw NonPositiveJacobian(msg.str());
  }
  return det;
}

InvTransposeJacobian DiffeoFamily::inv_transpose_jacobian(Point x) const {
  if (is_limit()) return {};
  const double det = jacobian_det(x);
  const double arg = x.x1 / epsilon_;
  InvTransposeJacobian b;
  b.b22 = 1.0 / det;
  b.b12 = -phi(x.x2) * std::cos(arg) / epsilon_ / det;
  return b;
}

double DiffeoFamily::boundary_jacobian(Side side, double s) const {
  if (is_limit()) return side == Side::I1 ? boundary_average_limit() : 1.0;
  switch (side) {
    case Side::I1: {
      // phi(1, eps) = eps for both profiles, so d/dx1 of the image height is cos(x1/eps).
      const double c = std::cos(s / epsilon_);
      return std::sqrt(1.0 + c * c);
    }
    case Side::I2: {
      const double w = 1.0 + dphi_dx2(s) * std::sin(1.0 / epsilon_);
      if (w < 0.0) {
        std::ostringstream msg;
        msg << "I2 boundary weight " << w << " < 0 at x2 = " << s << ", eps = " << epsilon_;
        throw NegativeBoundaryWeight(msg.str());
      }
      return w;
    }
    case Side::I3:
    case Side::I4:
      return 1.0;
  }
  return 1.0;
}

double DiffeoFamily::min_jacobian_on_grid(int n) const noexcept {
  double lo = 1.0;
  for (int j = 0; j <= n; ++j) {
    const double x2 = static_cast<double>(j) / n;
    for (int i = 0; i <= n; ++i) {
      lo = std::min(lo, raw_det({static_cast<double>(i) / n, x2}));
    }
  }
  return lo;
}

double boundary_average_limit() {
  static const double value = [] {
    const auto p = [](double y) {
      const double c = std::cos(y);
      return std::sqrt(1.0 + c * c);
    };
    return integrate_adaptive(p, 0.0, std::numbers::pi, 1e-12) / std::numbers::pi;
  }();
  return value;
}

}  // namespace osclab
